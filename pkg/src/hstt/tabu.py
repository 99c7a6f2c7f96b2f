"""Tabu search over feasible schedules.

Moves are composite: insert a lesson at a target period, eject every
scheduled lesson the insertion conflicts with, and re-insert each ejected
lesson at the first conflict-free available period if one exists.  The
engine keeps a tenure-based tabu list over displaced (lesson, period) pairs,
an aspiration override, and a transition-frequency memory that penalizes
often-repeated placements while diversification is active.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

from .evaluator import (
    CostBreakdown,
    apply_move,
    audit_hard,
    delta_breakdown,
    total_cost,
)
from .model import Instance, ScheduleState, UNSCHEDULED, feasible_periods

VARIANTS = ("ts", "tsi", "tsd", "tsdi")


class MoveAtom(NamedTuple):
    lesson: int
    period: int
    dir: str  # "in" | "out"


@dataclass(frozen=True)
class Move:
    atoms: tuple[MoveAtom, ...]
    primary: tuple[int, int]  # (lesson, target period) of step 1


@dataclass
class TransitionMemory:
    """Lesson x period placement counters driving the diversification penalty."""

    z: dict[tuple[int, int], int] = field(default_factory=dict)
    zbar: int = 0

    def record(self, move: Move) -> None:
        for a in move.atoms:
            if a.dir == "in":
                n = self.z.get((a.lesson, a.period), 0) + 1
                self.z[(a.lesson, a.period)] = n
                if n > self.zbar:
                    self.zbar = n

    def clear(self) -> None:
        self.z.clear()
        self.zbar = 0


@dataclass
class SolverConfig:
    iterations: int = 3000
    div_activation: int = 20
    iterations_div: int = 5
    intra_activation: int = 40
    variant: str = "tsdi"
    seed: int = 0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant '{self.variant}'")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        for name in ("div_activation", "iterations_div", "intra_activation"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.iterations_div >= self.div_activation:
            raise ValueError("iterations_div must be smaller than div_activation")


def generate_move(inst: Instance, s: ScheduleState, lidx: int, q: int) -> Move:
    """Build the composite move placing lesson ``lidx`` at start period ``q``."""
    l = inst.lessons[lidx]
    if q not in inst.placeable[lidx]:
        raise ValueError(f"lesson {l.id}: period {q} not available")
    atoms: list[MoveAtom] = []
    old = s.assignment[lidx]
    if old is not UNSCHEDULED:
        atoms.append(MoveAtom(lidx, old, "out"))

    ejected: set[int] = set()
    for k in range(l.duration):
        qq = q + k
        for t in l.teachers:
            occ = s.tpb[t][qq]
            if occ is not None and occ != lidx:
                ejected.add(occ)
        for c in l.classes:
            occ = s.cpb[c][qq]
            if occ is not None and occ != lidx:
                ejected.add(occ)
    order = sorted(ejected, key=lambda i: inst.lessons[i].id)
    for e in order:
        atoms.append(MoveAtom(e, s.assignment[e], "out"))
    atoms.append(MoveAtom(lidx, q, "in"))

    # overlay over the base tables: freed/claimed cells of this move only
    ot: dict[tuple[int, int], int | None] = {}
    oc: dict[tuple[int, int], int | None] = {}

    def release(li: int, start: int):
        le = inst.lessons[li]
        for k in range(le.duration):
            for t in le.teachers:
                ot[(t, start + k)] = None
            for c in le.classes:
                oc[(c, start + k)] = None

    def cell_free(li: int, start: int) -> bool:
        le = inst.lessons[li]
        for k in range(le.duration):
            qq = start + k
            for t in le.teachers:
                occ = ot.get((t, qq), s.tpb[t][qq])
                if occ is not None and occ != li:
                    return False
            for c in le.classes:
                occ = oc.get((c, qq), s.cpb[c][qq])
                if occ is not None and occ != li:
                    return False
        return True

    def claim(li: int, start: int):
        le = inst.lessons[li]
        for k in range(le.duration):
            for t in le.teachers:
                ot[(t, start + k)] = li
            for c in le.classes:
                oc[(c, start + k)] = li

    if old is not UNSCHEDULED:
        release(lidx, old)
    for e in order:
        release(e, s.assignment[e])
    claim(lidx, q)
    for e in order:
        for q2 in inst.placeable[e]:
            if cell_free(e, q2):
                atoms.append(MoveAtom(e, q2, "in"))
                claim(e, q2)
                break
    return Move(atoms=tuple(atoms), primary=(lidx, q))


def candidate_lessons(inst: Instance, s: ScheduleState, move_type: str) -> list[int]:
    """Candidates for the move type, most-constrained first."""
    if move_type == "out_in":
        pool = list(s.unscheduled)
    else:
        pool = [i for i in range(len(inst.lessons)) if i not in s.unscheduled]
    pool.sort(key=lambda i: (len(feasible_periods(inst, s, i)), inst.lessons[i].id))
    return pool


def is_tabu(tl: dict[tuple[int, int], int], move: Move, iteration: int) -> bool:
    """A move is tabu if any of its insertions revisits an actively-listed
    (lesson, period) pair."""
    for a in move.atoms:
        if a.dir == "in" and iteration < tl.get((a.lesson, a.period), 0):
            return True
    return False


def tenure_sample(lesson_count: int, rng: random.Random) -> int:
    """Uniform tenure from [ceil(0.25*sqrt(n)), floor(2*sqrt(n))]."""
    root = math.sqrt(lesson_count)
    lo = math.ceil(0.25 * root)
    hi = math.floor(2 * root)
    return rng.randint(lo, hi)


def move_penalty(mem: TransitionMemory, move: Move, current_cost: int) -> float:
    """Frequency surcharge: mean placement ratio of the move's insertions
    times the current cost; zero with an empty memory."""
    if mem.zbar == 0 or not move.atoms:
        return 0.0
    eps = 0.0
    for a in move.atoms:
        if a.dir == "in":
            eps += mem.z.get((a.lesson, a.period), 0) / mem.zbar
    return eps / len(move.atoms) * current_cost


def _weighted(inst: Instance, d: tuple[int, int, int, int, int]) -> int:
    w = inst.weights.as_tuple()
    return w[0] * d[0] + w[1] * d[1] + w[2] * d[2] + w[3] * d[3] + w[4] * d[4]


def select_move(
    inst: Instance,
    s: ScheduleState,
    tl: dict[tuple[int, int], int],
    mem: TransitionMemory,
    move_type: str,
    penalty_active: bool,
    best_cost: int,
    current_cost: int,
    iteration: int,
    rng: random.Random,
):
    """First-improvement walk over sorted candidates with aspiration; if no
    move improves, the best non-tabu move of a random candidate lesson.

    Returns (move, per-objective delta) or None when no legal move exists.
    """
    cands = candidate_lessons(inst, s, move_type)
    if not cands:
        return None
    for lidx in cands:
        old = s.assignment[lidx]
        for q in inst.placeable[lidx]:
            if q == old:
                continue
            m = generate_move(inst, s, lidx, q)
            d = delta_breakdown(inst, s, m)
            dw = _weighted(inst, d)
            if current_cost + dw < best_cost:
                return m, d  # aspiration: overrides tabu status
            pen = move_penalty(mem, m, current_cost) if penalty_active else 0.0
            if dw + pen < 0 and not is_tabu(tl, m, iteration):
                return m, d

    pool = list(cands)
    while pool:
        pick = pool.pop(rng.randrange(len(pool)))
        old = s.assignment[pick]
        best = None
        best_score = None
        for q in inst.placeable[pick]:
            if q == old:
                continue
            m = generate_move(inst, s, pick, q)
            if is_tabu(tl, m, iteration):
                continue
            d = delta_breakdown(inst, s, m)
            score = _weighted(inst, d) + (
                move_penalty(mem, m, current_cost) if penalty_active else 0.0
            )
            if best_score is None or score < best_score:
                best, best_score = (m, d), score
        if best is not None:
            return best
    return None


@dataclass
class ImproveResult:
    best_state: ScheduleState
    best_cost: CostBreakdown
    initial_cost: CostBreakdown
    final_cost: CostBreakdown
    trace: list[tuple]
    iterations: int


TRACE_HEADER = "iteration,current_total,best_total,move_type,penalty_active,f1,f2,f3,f4,f5"


def improve(
    inst: Instance,
    s0: ScheduleState,
    cfg: SolverConfig,
    iteration_hook: Callable[[int, ScheduleState], None] | None = None,
    debug_hook: Callable[..., None] | None = None,
) -> ImproveResult:
    """Run the configured number of tabu iterations from a feasible start."""
    if not audit_hard(inst, s0).clean:
        raise ValueError("initial schedule violates hard constraints")
    variant = cfg.variant
    use_intra = variant in ("tsi", "tsdi")
    use_div = variant in ("tsd", "tsdi")

    s = s0.clone()
    cur = total_cost(inst, s)
    initial = cur
    best_state = s.clone()
    best = cur
    tl: dict[tuple[int, int], int] = {}
    mem = TransitionMemory()
    rng = random.Random(cfg.seed)
    n_lessons = len(inst.lessons)
    noimp = 0
    intra_depth = 0
    trace: list[tuple] = []

    for it in range(1, cfg.iterations + 1):
        if noimp > 0 and noimp % cfg.intra_activation == 0:
            intra_depth += 1
        intra_active = (
            use_intra
            and noimp >= cfg.intra_activation
            and noimp % cfg.intra_activation < intra_depth
        )
        pen_active = (
            use_div
            and noimp >= cfg.div_activation
            and noimp % cfg.div_activation < cfg.iterations_div
        )
        move_type = "intra" if intra_active else "out_in"
        if not candidate_lessons(inst, s, move_type):
            move_type = "intra" if move_type == "out_in" else "out_in"

        sel = select_move(
            inst, s, tl, mem, move_type, pen_active, best.total, cur.total, it, rng
        )
        if sel is not None:
            m, d = sel
            tenure = tenure_sample(n_lessons, rng)
            apply_move(inst, s, m)
            for a in m.atoms:
                if a.dir == "out":
                    tl[(a.lesson, a.period)] = it + tenure + 1
            mem.record(m)
            cur = CostBreakdown(
                cur.f1 + d[0],
                cur.f2 + d[1],
                cur.f3 + d[2],
                cur.f4 + d[3],
                cur.f5 + d[4],
                cur.total + _weighted(inst, d),
            )
            if cur.total < best.total:
                best = cur
                best_state = s.clone()
                noimp = 0
                intra_depth = 0
                mem.clear()
            else:
                noimp += 1
        else:
            noimp += 1
        trace.append(
            (
                it,
                cur.total,
                best.total,
                move_type,
                int(pen_active),
                cur.f1,
                cur.f2,
                cur.f3,
                cur.f4,
                cur.f5,
            )
        )
        if iteration_hook is not None:
            iteration_hook(it, s)
        if debug_hook is not None:
            debug_hook(it, s, mem, tl, noimp, intra_depth)
    return ImproveResult(
        best_state=best_state,
        best_cost=best,
        initial_cost=initial,
        final_cost=cur,
        trace=trace,
        iterations=cfg.iterations,
    )
