"""Synthetic instance generation with planted blocks and sparseness control.

Planted blocks use dedicated teachers and carefully ordered session ids so
the detector's pairing and pattern rules hold on the clean (full
availability) instance.  Availability is then thinned teacher-by-teacher to
approach the requested sparseness ratio while keeping per-teacher demand
within supply.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

from .model import Calendar, Instance, Lesson, Weights


class GenError(ValueError):
    """Raised when a generation spec cannot be satisfied."""


@dataclass
class GenSpec:
    classes: int
    teachers: int
    subjects: int
    days: int
    slots_per_day: int
    hours_per_class: int
    sparseness: float = 1.0
    planted_half_switch: int = 0
    planted_half_loop: int = 0
    planted_half_chain: int = 0
    complex_fraction: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.sparseness <= 1.0:
            raise GenError("sparseness must be in (0, 1]")
        if self.hours_per_class > self.days * self.slots_per_day:
            raise GenError("hours_per_class exceeds periods per class")
        for name in ("classes", "teachers", "subjects", "days", "slots_per_day"):
            if getattr(self, name) < 1:
                raise GenError(f"{name} must be positive")

    @classmethod
    def from_json(cls, text: str) -> "GenSpec":
        doc = json.loads(text)
        planted = doc.pop("planted", {})
        doc.setdefault("planted_half_switch", planted.get("half_switch", 0))
        doc.setdefault("planted_half_loop", planted.get("half_loop", 0))
        doc.setdefault("planted_half_chain", planted.get("half_chain", 0))
        return cls(**doc)


# Desk-scale shapes mirroring the published school characteristics.
SHAPES: dict[str, GenSpec] = {
    "ta": GenSpec(
        classes=12, teachers=43, subjects=14, days=6, slots_per_day=3,
        hours_per_class=16, sparseness=0.34,
        planted_half_switch=4, planted_half_loop=1, planted_half_chain=0,
    ),
    "al": GenSpec(
        classes=12, teachers=42, subjects=14, days=6, slots_per_day=4,
        hours_per_class=16, sparseness=0.30,
        planted_half_switch=2, planted_half_loop=1, planted_half_chain=1,
    ),
    "de": GenSpec(
        classes=9, teachers=24, subjects=10, days=4, slots_per_day=3,
        hours_per_class=11, sparseness=0.36,
        planted_half_switch=0, planted_half_loop=0, planted_half_chain=2,
    ),
}


def _structures(remaining: int, h: int, allow_single: bool, rng: random.Random):
    """Course duration structures consuming ``remaining`` hours."""
    out = []
    while remaining > 0:
        options = []
        if allow_single:
            if remaining >= 5:
                options += [(2, 2, 1), (2, 1), (1, 1)]
            if remaining >= 3:
                options += [(2, 1), (1, 1)]
            if remaining >= 2:
                options.append((1, 1))
            options.append((1,))
        if h >= 2 and remaining >= 2:
            options += [(2,), (2, 2)] if remaining >= 4 else [(2,)]
        if h >= 3 and remaining >= 3:
            options.append((3,))
        options = [o for o in options if sum(o) <= remaining and max(o) <= h]
        if not allow_single:
            # never strand a single hour we cannot express without a 1-long lesson
            options = [o for o in options if remaining - sum(o) != 1]
        if not options:
            raise GenError(
                f"cannot decompose {remaining} filler hours "
                f"(h={h}, singles {'allowed' if allow_single else 'forbidden'})"
            )
        pick = options[rng.randrange(len(options))]
        out.append(pick)
        remaining -= sum(pick)
    return out


def generate_instance(spec: GenSpec) -> Instance:
    rng = random.Random(spec.seed)
    cal = Calendar(spec.days, spec.slots_per_day)
    p = cal.periods

    class_ids = [f"c{i:02d}" for i in range(spec.classes)]
    teacher_ids = [f"t{i:02d}" for i in range(spec.teachers)]
    subject_ids = [f"s{i:02d}" for i in range(spec.subjects)]
    course_ids: list[str] = []
    lessons: list[Lesson] = []

    class_hours = [0] * spec.classes
    teacher_hours = [0] * spec.teachers
    # classes hosting a planted singleton must not receive 1-hour fillers
    no_single_filler: set[int] = set()

    dedicated = (
        2 * spec.planted_half_switch
        + 3 * spec.planted_half_loop
        + 2 * spec.planted_half_chain
    )
    if dedicated > spec.teachers:
        raise GenError("not enough teachers for the planted blocks")
    next_teacher = 0
    next_class = 0
    planted_hours = {"half_switch": 0, "half_loop": 0, "half_chain": 0}

    def take_classes(n: int) -> list[int]:
        nonlocal next_class
        if spec.classes < n:
            raise GenError("not enough classes for a planted block")
        out = [(next_class + i) % spec.classes for i in range(n)]
        next_class += n
        return out

    def take_teachers(n: int) -> list[int]:
        nonlocal next_teacher
        out = list(range(next_teacher, next_teacher + n))
        next_teacher += n
        return out

    def add_session(tag: str, t: int, c: int, s: int):
        course_ids.append(f"crs_{tag}")
        lessons.append(
            Lesson(
                id=f"l_{tag}",
                index=len(lessons),
                course=len(course_ids) - 1,
                duration=1,
                kind="simple",
                tuples=((t, c, s),),
                teachers=(t,),
                classes=(c,),
                edge_preference=False,
            )
        )
        class_hours[c] += 1
        teacher_hours[t] += 1

    blk = 0
    for _ in range(spec.planted_half_switch):
        ca, cb = take_classes(2)
        tx, ty = take_teachers(2)
        sx, sy = rng.randrange(spec.subjects), rng.randrange(spec.subjects)
        add_session(f"p{blk:02d}_{class_ids[ca]}_0", tx, ca, sx)
        add_session(f"p{blk:02d}_{class_ids[ca]}_1", ty, ca, sy)
        add_session(f"p{blk:02d}_{class_ids[cb]}_0", ty, cb, sy)
        add_session(f"p{blk:02d}_{class_ids[cb]}_1", tx, cb, sx)
        planted_hours["half_switch"] += 4
        blk += 1
    for _ in range(spec.planted_half_loop):
        cs = take_classes(3)
        ts = take_teachers(3)
        subs = [rng.randrange(spec.subjects) for _ in range(3)]
        for i, c in enumerate(cs):
            add_session(f"p{blk:02d}_{class_ids[c]}_0", ts[i], c, subs[i])
            add_session(
                f"p{blk:02d}_{class_ids[c]}_1", ts[(i + 1) % 3], c, subs[(i + 1) % 3]
            )
        planted_hours["half_loop"] += 6
        blk += 1
    for _ in range(spec.planted_half_chain):
        c1, c2, c3 = take_classes(3)
        if c1 in no_single_filler or c3 in no_single_filler:
            raise GenError("half-chain endpoints collide on a class; use more classes")
        tg, ta = take_teachers(2)
        sg, sa = rng.randrange(spec.subjects), rng.randrange(spec.subjects)
        add_session(f"p{blk:02d}_{class_ids[c1]}_0", tg, c1, sg)
        add_session(f"p{blk:02d}_{class_ids[c2]}_0", tg, c2, sg)
        add_session(f"p{blk:02d}_{class_ids[c2]}_1", ta, c2, sa)
        add_session(f"p{blk:02d}_{class_ids[c3]}_0", ta, c3, sa)
        no_single_filler.update((c1, c3))
        planted_hours["half_chain"] += 4
        blk += 1

    # fillers: per-class courses taught by the least-loaded free teacher
    filler_pool = list(range(next_teacher, spec.teachers))
    if not filler_pool:
        raise GenError("no teachers left for filler lessons")
    crs_n = 0
    for c in range(spec.classes):
        remaining = spec.hours_per_class - class_hours[c]
        if remaining < 0:
            raise GenError(f"class {class_ids[c]} over-filled by planted blocks")
        allow_single = c not in no_single_filler
        for structure in _structures(remaining, spec.slots_per_day, allow_single, rng):
            t = min(filler_pool, key=lambda i: (teacher_hours[i], i))
            subj = rng.randrange(spec.subjects)
            cid = f"crs_f{crs_n:03d}"
            course_ids.append(cid)
            for k, dur in enumerate(structure):
                lessons.append(
                    Lesson(
                        id=f"l_z{crs_n:03d}_{k}",
                        index=len(lessons),
                        course=len(course_ids) - 1,
                        duration=dur,
                        kind="simple",
                        tuples=((t, c, subj),),
                        teachers=(t,),
                        classes=(c,),
                        edge_preference=False,
                    )
                )
                class_hours[c] += dur
                teacher_hours[t] += dur
            crs_n += 1

    for t in range(spec.teachers):
        if teacher_hours[t] > p:
            raise GenError(
                f"teacher {teacher_ids[t]} demand {teacher_hours[t]} exceeds {p} periods"
            )
    for c in range(spec.classes):
        if class_hours[c] > p:
            raise GenError(f"class {class_ids[c]} demand exceeds supply")

    n_complex = round(spec.complex_fraction * spec.subjects)
    complex_ids = sorted(rng.sample(range(spec.subjects), n_complex))
    complex_subjects = {c: set(complex_ids) for c in range(spec.classes)}

    teacher_avail = [[True] * p for _ in range(spec.teachers)]
    class_avail = [[True] * p for _ in range(spec.classes)]

    inst_full = Instance(
        calendar=cal,
        teacher_ids=teacher_ids,
        class_ids=class_ids,
        subject_ids=subject_ids,
        course_ids=course_ids,
        lessons=lessons,
        teacher_avail=teacher_avail,
        class_avail=class_avail,
        complex_subjects=complex_subjects,
        curricula={},
        weights=Weights(),
        planted_blocks={k: v for k, v in planted_hours.items() if v},
    )
    _thin_availability(spec, rng, inst_full, teacher_avail, teacher_hours, p)

    return Instance(
        calendar=cal,
        teacher_ids=teacher_ids,
        class_ids=class_ids,
        subject_ids=subject_ids,
        course_ids=course_ids,
        lessons=lessons,
        teacher_avail=teacher_avail,
        class_avail=class_avail,
        complex_subjects=complex_subjects,
        curricula={},
        weights=Weights(),
        planted_blocks={k: v for k, v in planted_hours.items() if v},
    )


def _thin_availability(spec, rng, inst_full, teacher_avail, teacher_hours, p):
    """Remove teacher periods until the sparseness target is reached.

    To keep the instance solvable, a hidden reference schedule is built on
    the full-availability instance (after block rewriting, so planted blocks
    keep a shared period) and every teacher keeps the periods they use in
    it.  Thinning therefore never destroys the reference solution."""
    if spec.sparseness >= 1.0:
        return
    from .blocks import detect_blocks
    from .construct import build_initial
    from .model import UNSCHEDULED

    rewritten, _ = detect_blocks(inst_full)
    hidden = build_initial(rewritten)
    required: list[set[int]] = [set() for _ in range(spec.teachers)]
    for l in rewritten.lessons:
        q = hidden.assignment[l.index]
        if q is UNSCHEDULED:
            continue
        for k in range(l.duration):
            for t in l.teachers:
                required[t].add(q + k)
    for t in range(spec.teachers):
        # teachers with hidden-unscheduled lessons still keep demand-many periods
        spare = [q for q in range(p) if q not in required[t]]
        rng.shuffle(spare)
        while len(required[t]) < min(teacher_hours[t], p) and spare:
            required[t].add(spare.pop())

    lessons = inst_full.lessons
    by_teacher: dict[int, list[int]] = {}
    for l in lessons:
        for t in l.teachers:
            by_teacher.setdefault(t, []).append(l.index)
    lesson_avail = [[True] * p for _ in lessons]
    denom = len(lessons) * p
    current = denom
    target = spec.sparseness * denom
    candidates = [
        (t, q)
        for t in range(spec.teachers)
        for q in range(p)
        if q not in required[t]
    ]
    rng.shuffle(candidates)
    for t, q in candidates:
        if current <= target:
            break
        teacher_avail[t][q] = False
        for lidx in by_teacher.get(t, ()):
            if lesson_avail[lidx][q]:
                lesson_avail[lidx][q] = False
                current -= 1
    sr = current / denom
    if abs(sr - spec.sparseness) > 0.03:
        raise GenError(
            f"could not reach sparseness {spec.sparseness:.2f} "
            f"(achieved {sr:.2f}) while keeping teachers feasible"
        )


def compute_sparseness(available_pair_count: int, lesson_count: int, periods: int) -> float:
    """Available (lesson, period) pairs over lessons x periods."""
    if lesson_count == 0 or periods == 0:
        return 0.0
    return available_pair_count / (lesson_count * periods)
