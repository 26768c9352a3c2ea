from __future__ import annotations

from ..circuit import Circuit
from ..merge import normalize_plan
from .evaluator import PlanEvaluator, SearchOutcome, outcome


def greedy_search(
    c: Circuit,
    backend,
    pairs=None,
    merge_1q: bool = True,
    start_plan=(),
    evaluator: PlanEvaluator | None = None,
) -> SearchOutcome:
    """Repeatedly commit the pair with the largest strict T-count drop."""
    ev = evaluator or PlanEvaluator(c, backend, merge_1q)
    allowed = None if pairs is None else set(normalize_plan(pairs))
    plan = normalize_plan(start_plan)
    cur = ev.t_count(plan)
    traj = []
    while True:
        cands = sorted(ev.candidate_pairs(plan))
        if allowed is not None:
            cands = [p for p in cands if p in allowed]
        best = None
        for p in cands:
            t = ev.t_count(plan + (p,))
            if t < cur and (best is None or t < best[0]):
                best = (t, p)
        if best is None:
            break
        plan = plan + (best[1],)
        traj.append((best[1], cur - best[0], best[0]))
        cur = best[0]
    return outcome(ev, plan, traj)


def greedy_refine(
    c: Circuit,
    backend,
    plan,
    pairs=None,
    merge_1q: bool = True,
    evaluator: PlanEvaluator | None = None,
) -> SearchOutcome:
    """Best greedy completion over every prefix of plan, plan itself included."""
    ev = evaluator or PlanEvaluator(c, backend, merge_1q)
    plan = normalize_plan(plan)
    best = (ev.t_count(plan), len(plan), plan, [])
    for k in range(len(plan) + 1):
        out = greedy_search(c, backend, pairs, merge_1q, plan[:k], ev)
        cand = (out.t_count, len(out.plan), out.plan, out.trajectory)
        if cand[:2] < best[:2]:
            best = cand
    return outcome(ev, best[2], best[3])
