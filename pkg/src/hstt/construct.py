"""Greedy initial construction: most-constrained lesson first, placed at its
least-contended feasible period.  One pass, no backtracking; lessons that run
out of feasible periods stay unscheduled and are handed to the search phase.
"""

from __future__ import annotations

import random

from .model import Instance, ScheduleState, feasible_periods


def lesson_priority(inst: Instance, s: ScheduleState, lidx: int) -> int:
    """Sort key: number of feasible start periods (fewer = more urgent)."""
    return len(feasible_periods(inst, s, lidx))


def select_period(inst: Instance, s: ScheduleState, lidx: int):
    """Among the lesson's feasible periods, the one contended by the fewest
    other unscheduled lessons; None when the lesson is unplaceable."""
    own = feasible_periods(inst, s, lidx)
    if not own:
        return None
    contention = {q: 0 for q in own}
    for other in s.unscheduled:
        if other == lidx:
            continue
        for q in feasible_periods(inst, s, other):
            if q in contention:
                contention[q] += 1
    return min(own, key=lambda q: (contention[q], q))


def build_initial(inst: Instance, seed: int = 0, shuffle_ties: bool = False) -> ScheduleState:
    """Repeatedly place the most-constrained unscheduled lesson until no
    remaining lesson has a feasible period.  Deterministic by default; with
    shuffle_ties the seed randomizes equal-priority ordering."""
    rng = random.Random(seed)
    s = ScheduleState.empty(inst)
    while True:
        counts = {}
        for lidx in s.unscheduled:
            fp = feasible_periods(inst, s, lidx)
            if fp:
                counts[lidx] = len(fp)
        if not counts:
            break
        candidates = sorted(counts, key=lambda i: (counts[i], inst.lessons[i].id))
        if shuffle_ties:
            best = counts[candidates[0]]
            tied = [i for i in candidates if counts[i] == best]
            pick = rng.choice(tied)
        else:
            pick = candidates[0]
        q = select_period(inst, s, pick)
        if q is None:
            # feasible set emptied since counting is impossible within one pass
            break
        s.assign(inst, pick, q)
    return s
