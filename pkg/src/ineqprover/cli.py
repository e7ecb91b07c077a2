"""Command-line entry point: proving, benchmarking, generation, training."""

from __future__ import annotations

import argparse
import json
import shlex
import sys
import time
from dataclasses import replace
from typing import List, Optional

from . import generator as gen
from .benchmark import Problem, get_problem, load_benchmark
from .expr import parse
from .heuristics import (CurriculumConfig, ScorerClient, SubprocessTransport,
                         TcpTransport, ValueModel, curriculum_run,
                         default_prover, external_heuristic, pretrain,
                         tree_depth_score)
from .ineq import AssumptionSet, Inequality, parse_inequality
from .prover import (MctsConfig, SearchLimits, SearchResult, best_first_search,
                     bfs_search, mcts_search, render_proof)

EXIT_SOLVED = 0
EXIT_UNSOLVED = 2
EXIT_UNSUPPORTED = 3
EXIT_USAGE = 64


def _limits(args) -> SearchLimits:
    return SearchLimits(time_limit=args.time_limit,
                        max_expansions=args.max_expansions)


def _heuristic(args):
    if args.heuristic == "tree-depth":
        return tree_depth_score, None
    if args.heuristic == "model":
        if not args.model:
            raise _usage_error("--model is required with heuristic=model")
        return ValueModel.load(args.model).score, None
    if args.heuristic == "scorer":
        if args.scorer_cmd:
            transport = SubprocessTransport(shlex.split(args.scorer_cmd))
        elif args.scorer_host:
            transport = TcpTransport(args.scorer_host, args.scorer_port)
        else:
            raise _usage_error("scorer heuristic needs --scorer-cmd or "
                                   "--scorer-host")
        client = ScorerClient(transport)
        return external_heuristic(client), client
    raise _usage_error(f"unknown heuristic {args.heuristic!r}")


def _usage_error(msg: str) -> SystemExit:
    print(f"error: {msg}", file=sys.stderr)
    return SystemExit(EXIT_USAGE)


def _run_strategy(goal: Inequality, strategy: str, h, limits: SearchLimits,
                  seed: int) -> SearchResult:
    if strategy == "best-first":
        return best_first_search(goal, h, limits, seed=seed)
    if strategy == "bfs":
        return bfs_search(goal, limits, seed=seed)
    if strategy == "mcts":
        return mcts_search(goal, h, MctsConfig(), limits, seed=seed)
    raise _usage_error(f"unknown strategy {strategy!r}")


def _report_line(pid: str, strategy: str, result: SearchResult) -> str:
    proof_len = len(result.proof.goals) if result.proof else 0
    return "\t".join([pid, strategy, "1" if result.stats.solved else "0",
                      str(result.stats.expansions),
                      str(int(result.stats.elapsed * 1000)),
                      str(proof_len)])


def cmd_prove(args) -> int:
    if args.id:
        try:
            problem = get_problem(args.id)
        except KeyError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_USAGE
        if not problem.supported:
            print(f"{problem.id}: unsupported ({problem.note})")
            return EXIT_UNSUPPORTED
        goal = problem.goal
        pid = problem.id
    elif args.expr:
        names = args.vars.split(",") if args.vars else None
        conds = [parse_inequality(c) for c in (args.condition or [])]
        try:
            tmp = parse_inequality(args.expr)
        except Exception as e:
            print(f"parse error: {e}", file=sys.stderr)
            return EXIT_USAGE
        if names is None:
            names = sorted(tmp.free_symbols())
        asm = AssumptionSet.for_symbols(names, "positive", conditions=conds)
        goal = replace(tmp, assumptions=asm)
        pid = "adhoc"
    else:
        print("error: need --id or --expr", file=sys.stderr)
        return EXIT_USAGE
    h, client = _heuristic(args)
    try:
        result = _run_strategy(goal, args.strategy, h, _limits(args), args.seed)
    finally:
        if client:
            client.close()
    print(_report_line(pid, args.strategy, result))
    if result.proof:
        print()
        print(render_proof(result.proof))
        return EXIT_SOLVED
    print(f"unsolved: expansions={result.stats.expansions} "
          f"elapsed={result.stats.elapsed:.1f}s "
          f"open={result.stats.open_size}")
    return EXIT_UNSOLVED


def _bench_one(pid: str, strategy: str, heuristic: str, time_limit: float,
               max_expansions: int, seed: int) -> dict:
    problem = get_problem(pid)
    limits = SearchLimits(time_limit=time_limit, max_expansions=max_expansions)
    if heuristic == "tree-depth":
        h = tree_depth_score
    else:
        h = ValueModel.load(heuristic).score
    result = _run_strategy(problem.goal, strategy, h, limits, seed)
    return {"id": problem.id, "strategy": strategy,
            "solved": result.stats.solved,
            "expansions": result.stats.expansions,
            "elapsed_ms": int(result.stats.elapsed * 1000),
            "proof_len": len(result.proof.goals) if result.proof else 0}


def cmd_bench(args) -> int:
    problems = load_benchmark()
    if args.ids:
        wanted = {get_problem(i).id for i in args.ids.split(",")}
        problems = [p for p in problems if p.id in wanted]
    rows: List[dict] = []
    heuristic = args.model if args.heuristic == "model" else "tree-depth"
    jobs = []
    for p in problems:
        if not p.supported:
            rows.append({"id": p.id, "strategy": args.strategy,
                         "solved": False, "expansions": 0, "elapsed_ms": 0,
                         "proof_len": 0, "unsupported": True})
            continue
        jobs.append(p.id)
    if args.jobs > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            futs = [ex.submit(_bench_one, pid, args.strategy, heuristic,
                              args.time_limit, args.max_expansions, args.seed)
                    for pid in jobs]
            rows.extend(f.result() for f in futs)
    else:
        for pid in jobs:
            rows.append(_bench_one(pid, args.strategy, heuristic,
                                   args.time_limit, args.max_expansions,
                                   args.seed))
    rows.sort(key=lambda r: r["id"])
    solved = 0
    for r in rows:
        if r.get("unsupported"):
            print(f"{r['id']}\t{args.strategy}\tunsupported")
            continue
        solved += 1 if r["solved"] else 0
        print("\t".join([r["id"], r["strategy"], "1" if r["solved"] else "0",
                         str(r["expansions"]), str(r["elapsed_ms"]),
                         str(r["proof_len"])]))
    print(f"# solved {solved}/{len(load_benchmark()) if not args.ids else len(problems)}"
          f" strategy={args.strategy} heuristic={args.heuristic}"
          f" time_limit={args.time_limit}s")
    if args.report:
        with open(args.report, "w") as fh:
            json.dump({"rows": rows, "solved": solved}, fh, indent=1)
    return EXIT_SOLVED


def cmd_generate(args) -> int:
    cfg = gen.GeneratorConfig(
        variables=tuple(args.vars.split(",")),
        premise_loops=args.premise_loops,
        loops=args.loops,
        select_m=args.select,
        max_premises=args.premises,
        seed=args.seed)
    records = gen.generate_dataset(cfg, workers=args.jobs)
    n = gen.persist(records, args.out)
    print(f"wrote {n} records to {args.out}")
    print(gen.stats(records))
    return EXIT_SOLVED


def _records_to_goals(records):
    from .prover import Goal
    return [(Goal(r.goal()), r.tree_depth) for r in records]


def cmd_pretrain(args) -> int:
    records = gen.load(args.data)
    if not records:
        print("error: empty dataset", file=sys.stderr)
        return EXIT_USAGE
    model = ValueModel(hidden=args.hidden, seed=args.seed)
    pretrain(model, _records_to_goals(records), epochs=args.epochs,
             seed=args.seed)
    model.save(args.out)
    print(f"pretrained on {len(records)} records -> {args.out}")
    return EXIT_SOLVED


def cmd_curriculum(args) -> int:
    records = [r for r in gen.load(args.data) if r.inference_depth >= 4]
    records.sort(key=lambda r: (r.tree_depth, r.string_length))
    if args.problems:
        records = records[:args.problems]
    if not records:
        print("error: no problems with inference depth >= 4",
              file=sys.stderr)
        return EXIT_USAGE
    model = ValueModel.load(args.model) if args.model else ValueModel(seed=args.seed)
    cfg = CurriculumConfig(time_cap=args.time_limit,
                           max_expansions=args.max_expansions)
    problems = [r.goal() for r in records]
    model, report = curriculum_run(model, problems, cfg=cfg)
    model.save(args.out)
    for row in report.rows:
        print(f"problem {row['index']}\tsolved={int(row['solved'])}"
              f"\texpansions={row['expansions']}"
              f"\telapsed_ms={int(row['elapsed'] * 1000)}")
    print(f"# solved {report.solved_count()}/{len(report.rows)}; "
          f"model -> {args.out}")
    return EXIT_SOLVED


def cmd_scorer_test(args) -> int:
    if args.cmd:
        transport = SubprocessTransport(shlex.split(args.cmd))
    elif args.host:
        transport = TcpTransport(args.host, args.port)
    else:
        print("error: need --cmd or --host", file=sys.stderr)
        return EXIT_USAGE
    texts = []
    for p in load_benchmark():
        small, large, strict = p.goal.oriented()
        from .expr import render
        texts.append(f"{render(small)} {'<' if strict else '<='} {render(large)}")
    texts += ["a <= b", "a + b <= a*b", "1 <= a^2 + b^2"]
    client = ScorerClient(transport)
    ok = 0
    try:
        for i in range(args.count):
            value = client.score_text(texts[i % len(texts)])
            if 0.0 <= value <= 1.0:
                ok += 1
    finally:
        client.close()
    print(f"{ok}/{args.count} OK")
    return EXIT_SOLVED if ok == args.count else EXIT_UNSOLVED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ineqprover",
                                 description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prove", help="prove one inequality")
    p.add_argument("--id", help="benchmark problem id, e.g. MO-INT-20/05")
    p.add_argument("--expr", help="inequality text, e.g. 'a+b >= 2*sqrt(a*b)'")
    p.add_argument("--vars", help="comma-separated variables")
    p.add_argument("--positive", action="store_true",
                   help="variables are positive (default)")
    p.add_argument("--condition", action="append",
                   help="equational condition, e.g. 'a*b*c = 1'")
    p.add_argument("--strategy", default="best-first",
                   choices=["best-first", "bfs", "mcts"])
    p.add_argument("--heuristic", default="tree-depth",
                   choices=["tree-depth", "model", "scorer"])
    p.add_argument("--model", help="value-model checkpoint path")
    p.add_argument("--scorer-cmd", help="external scorer command (stdio)")
    p.add_argument("--scorer-host")
    p.add_argument("--scorer-port", type=int, default=7331)
    p.add_argument("--time-limit", type=float, default=5400.0)
    p.add_argument("--max-expansions", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_prove)

    p = sub.add_parser("bench", help="run the MO-INT-20 benchmark")
    p.add_argument("--strategy", default="best-first",
                   choices=["best-first", "bfs", "mcts"])
    p.add_argument("--heuristic", default="tree-depth",
                   choices=["tree-depth", "model"])
    p.add_argument("--model")
    p.add_argument("--ids", help="comma-separated subset of problem ids")
    p.add_argument("--time-limit", type=float, default=5400.0)
    p.add_argument("--max-expansions", type=int, default=2000)
    p.add_argument("--jobs", type=int, default=1,
                   help="cross-problem parallelism")
    p.add_argument("--report", help="write JSON report here")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("generate", help="generate synthetic theorems")
    p.add_argument("--vars", default="a,b,c")
    p.add_argument("--premises", type=int, default=64)
    p.add_argument("--premise-loops", type=int, default=1)
    p.add_argument("--loops", type=int, default=3)
    p.add_argument("--select", type=int, default=20)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("pretrain", help="pretrain the value model")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=60)
    p.add_argument("--hidden", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_pretrain)

    p = sub.add_parser("curriculum", help="curriculum fine-tuning run")
    p.add_argument("--data", required=True)
    p.add_argument("--model", help="starting checkpoint")
    p.add_argument("--out", required=True)
    p.add_argument("--problems", type=int, default=0,
                   help="cap on number of problems (0 = all)")
    p.add_argument("--time-limit", type=float, default=2400.0)
    p.add_argument("--max-expansions", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_curriculum)

    p = sub.add_parser("scorer-test", help="external scorer conformance")
    p.add_argument("--cmd", help="scorer command (stdio transport)")
    p.add_argument("--host")
    p.add_argument("--port", type=int, default=7331)
    p.add_argument("--count", type=int, default=100)
    p.set_defaults(fn=cmd_scorer_test)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    try:
        return args.fn(args)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
