"""Olympiad algebraic inequality engine: symbolic core, theorem matchers,
synthetic generation, and heuristic proof search."""

from .expr import (Expr, Const, Sym, Add, Mul, Pow, parse, render, evaluate,
                   substitute, tree_depth, cyclic_sum, cyclic_product,
                   is_cyclic_symmetric, canonical_hash, string_length,
                   differentiate, ExprError, ParseError, DomainError,
                   SizeLimitError)
from .poly import expand, together, factor_terms, total_degree
from .ineq import AssumptionSet, Inequality, parse_inequality
from .signs import Sign, infer_sign, label_monotonicity
from .theorems import (MatchBudget, MatchResult, match_amgm,
                       match_weighted_amgm, match_holder, match_jensen,
                       match_schur, match_muirhead, one_var_check,
                       tangent_line_check, side_bounds)
from .rules import RuleRegistry, apply_rule, homogenize
from .prover import (Goal, ProofTree, SearchLimits, MctsConfig,
                     best_first_search, bfs_search, mcts_search,
                     generate_subgoals, is_trivially_true, falsify,
                     render_proof)
from .heuristics import (ValueModel, CurriculumConfig, tree_depth_score,
                         pretrain, curriculum_relabel, curriculum_run,
                         ScorerClient, external_score)
from .generator import (GeneratorConfig, TheoremRecord, gen_premises,
                        generate_theorems, generate_dataset,
                        check_equality_condition, dedup, persist, load,
                        stats)
from .benchmark import Problem, load_benchmark, get_problem

__all__ = [n for n in dir() if not n.startswith("_")]
