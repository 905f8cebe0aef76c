"""Stage runners: exact identity checks over seeded tuple domains."""

from __future__ import annotations

from fractions import Fraction

from ._parallel import chunked_map
from .cochain import (
    Cochain,
    EvalContext,
    WordTuple,
    exhaustive_aligned_tuples,
    random_aligned_tuples,
)
from .report import ExperimentPlan, StageResult


def describe_tuple(t: WordTuple) -> list[str]:
    return [str(w) for w in t]


def stage_tasks(plan: ExperimentPlan, arity: int, stage: str) -> list[WordTuple]:
    """Exhaustive budgeted tuples plus seeded random tuples for one stage."""
    tasks: list[WordTuple] = []
    budget = plan.budget(arity)
    if budget >= arity:
        tasks.extend(
            exhaustive_aligned_tuples(
                plan.rank,
                arity,
                budget,
                plan.exhaustive_entry_radius,
                plan.enumeration_cap,
            )
        )
    count = plan.samples(stage)
    if count > 0:
        tasks.extend(
            random_aligned_tuples(
                plan.rank, arity, count, plan.max_len, f"{plan.seed}:{stage}"
            )
        )
    return tasks


def _identity_worker(payload, start: int, chunk) -> dict:
    lhs, rhs = payload
    ctx = EvalContext()
    bad_index = None
    counterexample = None
    for i, t in enumerate(chunk):
        left = lhs._eval(t, ctx)
        right = rhs._eval(t, ctx)
        if left != right:
            bad_index = start + i
            counterexample = {
                "tuple": describe_tuple(t),
                "lhs": str(left),
                "rhs": str(right),
            }
            break
    return {"checked": len(chunk), "bad_index": bad_index, "counterexample": counterexample}


def merge_scan_parts(parts: list[dict]) -> dict:
    merged = {"checked": 0, "bad_index": None, "counterexample": None}
    for part in parts:
        merged["checked"] += part["checked"]
        if part["bad_index"] is not None and (
            merged["bad_index"] is None or part["bad_index"] < merged["bad_index"]
        ):
            merged["bad_index"] = part["bad_index"]
            merged["counterexample"] = part["counterexample"]
    return merged


def identity_stage(
    name: str,
    lhs: Cochain,
    rhs: Cochain,
    tasks: list[WordTuple],
    jobs: int = 1,
    stats: dict | None = None,
) -> StageResult:
    """Exact pointwise equality of two expressions over the task list."""
    parts = chunked_map(_identity_worker, (lhs, rhs), tasks, jobs)
    merged = merge_scan_parts(parts)
    return StageResult(
        name=name,
        passed=merged["counterexample"] is None,
        checked=merged["checked"],
        counterexample=merged["counterexample"],
        stats=stats,
    )


def _zero_worker(payload, start: int, chunk) -> dict:
    (expr,) = payload
    ctx = EvalContext()
    bad_index = None
    counterexample = None
    for i, t in enumerate(chunk):
        value = expr._eval(t, ctx)
        if value:
            bad_index = start + i
            counterexample = {"tuple": describe_tuple(t), "value": str(value)}
            break
    return {"checked": len(chunk), "bad_index": bad_index, "counterexample": counterexample}


def vanishing_stage(
    name: str, expr: Cochain, tasks: list[WordTuple], jobs: int = 1
) -> StageResult:
    parts = chunked_map(_zero_worker, (expr,), tasks, jobs)
    merged = merge_scan_parts(parts)
    return StageResult(
        name=name,
        passed=merged["counterexample"] is None,
        checked=merged["checked"],
        counterexample=merged["counterexample"],
    )


def _sup_worker(payload, start: int, chunk) -> dict:
    (expr,) = payload
    ctx = EvalContext()
    best = Fraction(0)
    arg_index = None
    argmax = None
    for i, t in enumerate(chunk):
        value = abs(expr._eval(t, ctx))
        if value > best:
            best = value
            arg_index = start + i
            argmax = describe_tuple(t)
    return {"checked": len(chunk), "max": best, "arg_index": arg_index, "argmax": argmax}


def sup_scan(expr: Cochain, tasks: list[WordTuple], jobs: int = 1) -> dict:
    """Max |value| with the first achieving tuple, independent of job count."""
    parts = chunked_map(_sup_worker, (expr,), tasks, jobs)
    merged = {"checked": 0, "max": Fraction(0), "arg_index": None, "argmax": None}
    for part in parts:
        merged["checked"] += part["checked"]
        if part["max"] > merged["max"]:
            merged["max"] = part["max"]
            merged["arg_index"] = part["arg_index"]
            merged["argmax"] = part["argmax"]
    return merged
