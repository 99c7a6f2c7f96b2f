"""Hard-constraint audit and the five soft objectives with weighted total.

All scoring is exact integer arithmetic.  ``move_delta`` recomputes only the
(resource, day) rows and courses touched by a move's atoms; the test suite
checks it against a full recompute with zero tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Instance, ScheduleState, UNSCHEDULED


@dataclass(frozen=True)
class CostBreakdown:
    f1: int
    f2: int
    f3: int
    f4: int
    f5: int
    total: int

    def csv_row(self) -> str:
        return f"{self.f1},{self.f2},{self.f3},{self.f4},{self.f5},{self.total}"


@dataclass(frozen=True)
class HardViolationReport:
    conflict_count: int
    availability_count: int

    @property
    def clean(self) -> bool:
        return self.conflict_count == 0 and self.availability_count == 0


def audit_hard(inst: Instance, s: ScheduleState) -> HardViolationReport:
    """Count H1/H2 violations directly from the assignment, ignoring the
    redundant tables (so it can catch table corruption independently)."""
    conflicts = 0
    unavailable = 0
    t_occ: dict[tuple[int, int], int] = {}
    c_occ: dict[tuple[int, int], int] = {}
    for l in inst.lessons:
        q = s.assignment[l.index]
        if q is UNSCHEDULED:
            continue
        for k in range(l.duration):
            qq = q + k
            if not inst.lesson_avail[l.index][qq]:
                unavailable += 1
            for t in l.teachers:
                t_occ[(t, qq)] = t_occ.get((t, qq), 0) + 1
            for c in l.classes:
                c_occ[(c, qq)] = c_occ.get((c, qq), 0) + 1
    for occ in (t_occ, c_occ):
        for n in occ.values():
            if n > 1:
                conflicts += n - 1
    return HardViolationReport(conflicts, unavailable)


# -- per-row helpers (shared by full and incremental scoring) --------------


def _row_day_gaps(row, avail, start: int, h: int) -> int:
    """Gap count for one resource on one day: idle-but-available interior
    periods with some occupied period before and after within the day."""
    gaps = 0
    first = last = -1
    for i in range(h):
        if row[start + i] is not None:
            if first < 0:
                first = i
            last = i
    if first < 0:
        return 0
    for i in range(first + 1, last):
        if row[start + i] is None and avail[start + i]:
            gaps += 1
    return gaps


def _compact_flag(inst: Instance, s: ScheduleState, lidx: int) -> int:
    """1 if some other scheduled lesson of the same course sits on the same
    or an adjacent day."""
    q = s.assignment[lidx]
    if q is UNSCHEDULED:
        return 0
    h = inst.calendar.slots_per_day
    day = q // h
    for other in inst.course_members[inst.lessons[lidx].course]:
        if other == lidx:
            continue
        q2 = s.assignment[other]
        if q2 is UNSCHEDULED:
            continue
        if abs(day - q2 // h) <= 1:
            return 1
    return 0


def _unbalanced_flag(inst: Instance, s: ScheduleState, cidx: int, day: int) -> int:
    """1 if the class's complex occupied hours that day exceed ceil(h/2)."""
    h = inst.calendar.slots_per_day
    row = s.cpb[cidx]
    start = day * h
    hours = 0
    for i in range(h):
        lidx = row[start + i]
        if lidx is not None and cidx in inst.lesson_complex[lidx]:
            hours += 1
    return 1 if hours > -(-h // 2) else 0


# -- full objectives -------------------------------------------------------


def class_gaps(inst: Instance, s: ScheduleState) -> int:
    h = inst.calendar.slots_per_day
    total = 0
    for c in range(len(inst.class_ids)):
        row, avail = s.cpb[c], inst.class_avail[c]
        for day in range(inst.calendar.days):
            total += _row_day_gaps(row, avail, day * h, h)
    return total


def teacher_gaps(inst: Instance, s: ScheduleState) -> int:
    h = inst.calendar.slots_per_day
    total = 0
    for t in range(len(inst.teacher_ids)):
        row, avail = s.tpb[t], inst.teacher_avail[t]
        for day in range(inst.calendar.days):
            total += _row_day_gaps(row, avail, day * h, h)
    return total


def compactness_violations(inst: Instance, s: ScheduleState) -> int:
    return sum(_compact_flag(inst, s, l.index) for l in inst.lessons)


def unbalance_violations(inst: Instance, s: ScheduleState) -> int:
    total = 0
    for c in range(len(inst.class_ids)):
        for day in range(inst.calendar.days):
            total += _unbalanced_flag(inst, s, c, day)
    return total


def unscheduled_count(s: ScheduleState) -> int:
    return len(s.unscheduled)


def total_cost(inst: Instance, s: ScheduleState) -> CostBreakdown:
    f1 = class_gaps(inst, s)
    f2 = teacher_gaps(inst, s)
    f3 = compactness_violations(inst, s)
    f4 = unbalance_violations(inst, s)
    f5 = unscheduled_count(s)
    w = inst.weights.as_tuple()
    total = w[0] * f1 + w[1] * f2 + w[2] * f3 + w[3] * f4 + w[4] * f5
    return CostBreakdown(f1, f2, f3, f4, f5, total)


# -- incremental delta -----------------------------------------------------


def _partial(inst, s, class_days, teacher_days, courses):
    h = inst.calendar.slots_per_day
    f1 = sum(
        _row_day_gaps(s.cpb[c], inst.class_avail[c], d * h, h) for c, d in class_days
    )
    f2 = sum(
        _row_day_gaps(s.tpb[t], inst.teacher_avail[t], d * h, h) for t, d in teacher_days
    )
    f3 = 0
    for crs in courses:
        for lidx in inst.course_members[crs]:
            f3 += _compact_flag(inst, s, lidx)
    f4 = sum(_unbalanced_flag(inst, s, c, d) for c, d in class_days)
    return f1, f2, f3, f4


def _affected(inst, move):
    h = inst.calendar.slots_per_day
    class_days: set[tuple[int, int]] = set()
    teacher_days: set[tuple[int, int]] = set()
    courses: set[int] = set()
    for a in move.atoms:
        l = inst.lessons[a.lesson]
        courses.add(l.course)
        day = a.period // h
        for c in l.classes:
            class_days.add((c, day))
        for t in l.teachers:
            teacher_days.add((t, day))
    return class_days, teacher_days, courses


def apply_move(inst: Instance, s: ScheduleState, move) -> None:
    """Apply all atoms in place: removals first, then insertions."""
    for a in move.atoms:
        if a.dir == "out":
            s.assign(inst, a.lesson, UNSCHEDULED)
    for a in move.atoms:
        if a.dir == "in":
            s.assign(inst, a.lesson, a.period)


def revert_move(inst: Instance, s: ScheduleState, snapshot) -> None:
    for lidx, _ in snapshot:
        s.assign(inst, lidx, UNSCHEDULED)
    for lidx, q in snapshot:
        if q is not UNSCHEDULED:
            s.assign(inst, lidx, q)


def move_snapshot(s: ScheduleState, move):
    seen = []
    done = set()
    for a in move.atoms:
        if a.lesson not in done:
            done.add(a.lesson)
            seen.append((a.lesson, s.assignment[a.lesson]))
    return seen


def delta_breakdown(inst: Instance, s: ScheduleState, move):
    """Per-objective cost deltas of applying ``move``; state left unchanged."""
    if not move.atoms:
        return (0, 0, 0, 0, 0)
    class_days, teacher_days, courses = _affected(inst, move)
    before = _partial(inst, s, class_days, teacher_days, courses)
    u_before = sum(1 for a in {a.lesson for a in move.atoms} if s.assignment[a] is UNSCHEDULED)
    snapshot = move_snapshot(s, move)
    apply_move(inst, s, move)
    after = _partial(inst, s, class_days, teacher_days, courses)
    u_after = sum(
        1 for lidx, _ in snapshot if s.assignment[lidx] is UNSCHEDULED
    )
    revert_move(inst, s, snapshot)
    return (
        after[0] - before[0],
        after[1] - before[1],
        after[2] - before[2],
        after[3] - before[3],
        u_after - u_before,
    )


def delta_cost(inst: Instance, s: ScheduleState, move) -> int:
    """Exact total-cost delta of ``move``, computed incrementally."""
    d = delta_breakdown(inst, s, move)
    w = inst.weights.as_tuple()
    return w[0] * d[0] + w[1] * d[1] + w[2] * d[2] + w[3] * d[3] + w[4] * d[4]
