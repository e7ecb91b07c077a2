"""Synthetic theorem generation: premises, forward reasoning, persistence."""

import random
from fractions import Fraction

import pytest

from ineqprover.expr import (evaluate, free_symbols, is_cyclic_symmetric,
                             parse, render)
from ineqprover.generator import (GeneratorConfig, TheoremRecord,
                                  check_equality_condition, dedup,
                                  equality_candidate, gen_premises,
                                  generate_dataset, generate_theorems, load,
                                  persist, replay_record, select_shortest,
                                  stats)
from ineqprover.ineq import AssumptionSet, parse_inequality
from oracles import numeric_holds

CFG = GeneratorConfig(premise_loops=1, loops=2, select_m=10, max_premises=10,
                      seed=42, validation_samples=60)

FIG3_PREMISE = "sqrt(a^2+2*b*c) + sqrt(b^2+2*c*a) + sqrt(c^2+2*a*b)"


class TestPremises:
    def test_contains_simple_cyclic_sums(self):
        prem = gen_premises(CFG)
        rendered = {render(p) for p in prem}
        assert "a*b + a*c + b*c" in rendered
        assert "a + b + c" in rendered

    def test_contains_radical_premise_shape(self):
        prem = gen_premises(GeneratorConfig(premise_loops=1, max_premises=64))
        assert parse(FIG3_PREMISE) in prem

    def test_all_cyclically_symmetric(self):
        for p in gen_premises(CFG):
            assert is_cyclic_symmetric(p, ["a", "b", "c"]), render(p)

    def test_deterministic(self):
        assert [p.skey for p in gen_premises(CFG)] == \
            [p.skey for p in gen_premises(CFG)]


class TestForwardReasoning:
    def test_fig3_jensen_bound_retained(self):
        recs = generate_theorems(parse(FIG3_PREMISE), CFG)
        bounds = {r.inequality for r in recs}
        jensen = ("sqrt(2*a*b + c^2) + sqrt(2*a*c + b^2) + sqrt(2*b*c + a^2)"
                  " <= sqrt(3*(2*a*b + 2*a*c + 2*b*c + a^2 + b^2 + c^2))")
        assert any("jensen" in r.rule_chain for r in recs)
        assert jensen in bounds

    def test_seed_records_from_plain_sum(self):
        cfg = GeneratorConfig(premise_loops=0, loops=0, seed=1,
                              validation_samples=60)
        recs = generate_theorems(parse("a+b+c"), cfg)
        assert any(r.inequality ==
                   "3*(a*b*c)^(1/3) <= a + b + c" for r in recs)
        assert all(r.inference_depth == 1 for r in recs)

    def test_transitive_linking_produces_deeper_records(self):
        recs = generate_theorems(parse(FIG3_PREMISE), CFG)
        assert any(r.inference_depth >= 2 for r in recs)
        deeper = next(r for r in recs if r.inference_depth >= 2)
        assert deeper.parent_id is not None

    def test_every_record_numerically_valid(self, rng):
        recs = generate_theorems(parse(FIG3_PREMISE), CFG)
        for rec in recs[:40]:
            g = rec.goal()
            names = sorted(g.free_symbols())
            assert numeric_holds(g.lhs, g.rhs, names, 100, rng), rec.inequality

    def test_every_record_equality_point_verifies(self):
        recs = generate_theorems(parse(FIG3_PREMISE), CFG)
        for rec in recs:
            point = {k: Fraction(v) for k, v in rec.equality_point.items()}
            assert check_equality_condition(rec.goal(), point), rec.inequality

    def test_derivation_replay(self):
        recs = generate_theorems(parse(FIG3_PREMISE), CFG)
        store = {r.record_id: r for r in recs}
        assert all(replay_record(r, store) for r in recs)

    def test_determinism(self):
        a = [r.inequality for r in generate_theorems(parse(FIG3_PREMISE), CFG)]
        b = [r.inequality for r in generate_theorems(parse(FIG3_PREMISE), CFG)]
        assert a == b


class TestEqualityCondition:
    def test_amgm_equality_at_all_equal(self):
        g = parse_inequality("3*(a*b*c)^(1/3) <= a+b+c",
                             AssumptionSet.for_symbols(["a", "b", "c"]))
        assert check_equality_condition(g, {n: Fraction(1) for n in "abc"})

    def test_corrupted_bound_rejected(self):
        g = parse_inequality("3*(a*b*c)^(1/3) + 1 <= a+b+c",
                             AssumptionSet.for_symbols(["a", "b", "c"]))
        assert not check_equality_condition(g, {n: Fraction(1) for n in "abc"})

    def test_candidate_respects_homogeneous_condition(self):
        cond = parse_inequality("a*b + b*c + c*a = 3")
        asm = AssumptionSet.for_symbols(["a", "b", "c"], conditions=[cond])
        g = parse_inequality("a <= b + c", asm)
        point = equality_candidate(g)
        v = float(evaluate(parse("a*b+b*c+c*a"), point))
        assert abs(v - 3) < 1e-6


class TestSelection:
    def test_selects_m_shortest(self):
        cfg = GeneratorConfig()
        recs = generate_theorems(parse("a+b+c"),
                                 GeneratorConfig(loops=0, validation_samples=40))
        pool = [(r.goal(), r) for r in recs]
        chosen = select_shortest(pool, 3)
        max_len = max(r.string_length for _, r in chosen)
        rejected = [r for _, r in pool if r not in [c for _, c in chosen]]
        if rejected:
            assert max_len <= min(r.string_length for r in rejected)


class TestDedupPersist:
    def test_dedup_drops_duplicates(self):
        recs = generate_theorems(parse("a+b+c"),
                                 GeneratorConfig(loops=0, validation_samples=40))
        doubled = recs + [TheoremRecord(
            record_id=10000 + r.record_id, inequality=r.inequality,
            premise=r.premise, rule_chain=r.rule_chain,
            inference_depth=r.inference_depth, tree_depth=r.tree_depth,
            string_length=r.string_length, equality_point=r.equality_point,
            parent_id=None, seed=r.seed) for r in recs]
        assert len(dedup(doubled)) == len(dedup(recs))

    def test_persist_load_roundtrip(self, tmp_path):
        recs = generate_theorems(parse(FIG3_PREMISE), CFG)[:25]
        path = tmp_path / "data.ndtheorems"
        n = persist(recs, str(path))
        assert n == 25
        loaded = load(str(path))
        assert loaded == recs

    def test_malformed_line_reports_number(self, tmp_path):
        path = tmp_path / "bad.ndtheorems"
        path.write_text('{"bad": 1}\n')
        with pytest.raises(ValueError, match="line 1"):
            load(str(path))

    def test_stats_report(self):
        recs = generate_theorems(parse(FIG3_PREMISE), CFG)
        report = stats(recs)
        assert "inference depth" in report and "tree depth" in report
        assert "metric\tvalue\tcount" in report
        assert stats([]) == "no records\n"


class TestDataset:
    def test_dataset_deterministic_and_worker_independent(self):
        cfg = GeneratorConfig(premise_loops=0, loops=1, select_m=6,
                              max_premises=4, seed=9, validation_samples=40)
        a = [r.inequality for r in generate_dataset(cfg, workers=1)]
        b = [r.inequality for r in generate_dataset(cfg, workers=2)]
        assert a == b and len(a) > 0
