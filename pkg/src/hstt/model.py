"""Problem data model: calendar, instance, lessons and the schedule representation.

The weekly grid has ``p = days * slots_per_day`` periods indexed 0..p-1 in
row-major order (day = q // h, slot = q % h).  A schedule keeps the lesson ->
period assignment plus two redundant occupancy tables (teacher x period and
class x period) that are maintained in lockstep so conflict checks are O(1).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

# Explicit sentinel for "lesson not placed"; serialized as -1 in files.
UNSCHEDULED = None

LESSON_KINDS = ("simple", "half_switch", "double_lesson", "half_loop", "half_chain")

DEFAULT_WEIGHTS = (100, 40, 30, 60, 1000)


class InstanceError(ValueError):
    """Raised for malformed or inconsistent instance files."""


@dataclass(frozen=True)
class Calendar:
    days: int
    slots_per_day: int

    def __post_init__(self):
        if self.days < 1 or self.slots_per_day < 1:
            raise InstanceError("calendar: days and slots_per_day must be positive")

    @property
    def periods(self) -> int:
        return self.days * self.slots_per_day


def period_day(q: int, cal: Calendar) -> int:
    """Day index of period q."""
    if not 0 <= q < cal.periods:
        raise InstanceError(f"period index {q} out of range 0..{cal.periods - 1}")
    return q // cal.slots_per_day


def period_slot(q: int, cal: Calendar) -> int:
    """Within-day slot index of period q."""
    if not 0 <= q < cal.periods:
        raise InstanceError(f"period index {q} out of range 0..{cal.periods - 1}")
    return q % cal.slots_per_day


@dataclass(frozen=True)
class Weights:
    w1: int = DEFAULT_WEIGHTS[0]
    w2: int = DEFAULT_WEIGHTS[1]
    w3: int = DEFAULT_WEIGHTS[2]
    w4: int = DEFAULT_WEIGHTS[3]
    w5: int = DEFAULT_WEIGHTS[4]

    def __post_init__(self):
        for w in self.as_tuple():
            if w < 0:
                raise InstanceError("weights must be non-negative")

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return (self.w1, self.w2, self.w3, self.w4, self.w5)


@dataclass(frozen=True)
class Lesson:
    """A set of (teacher, class, subject) tuples meeting simultaneously.

    All resource references are integer indices into the owning instance's
    id lists.  ``duration`` hours occupy consecutive periods within one day.
    """

    id: str
    index: int
    course: int
    duration: int
    kind: str
    tuples: tuple[tuple[int, int, int], ...]
    teachers: tuple[int, ...] = field(default=())
    classes: tuple[int, ...] = field(default=())
    edge_preference: bool = False


class Instance:
    """Immutable problem description with precomputed availability tables."""

    def __init__(
        self,
        calendar: Calendar,
        teacher_ids: list[str],
        class_ids: list[str],
        subject_ids: list[str],
        course_ids: list[str],
        lessons: list[Lesson],
        teacher_avail: list[list[bool]],
        class_avail: list[list[bool]],
        complex_subjects: dict[int, set[int]],
        curricula: dict[int, str],
        weights: Weights,
        planted_blocks: dict[str, int] | None = None,
    ):
        self.calendar = calendar
        self.teacher_ids = list(teacher_ids)
        self.class_ids = list(class_ids)
        self.subject_ids = list(subject_ids)
        self.course_ids = list(course_ids)
        self.lessons = list(lessons)
        self.teacher_avail = [list(r) for r in teacher_avail]
        self.class_avail = [list(r) for r in class_avail]
        # class index -> set of subject indices that are complex for it
        self.complex_subjects = {c: set(s) for c, s in complex_subjects.items()}
        self.curricula = dict(curricula)
        self.weights = weights
        self.planted_blocks = dict(planted_blocks) if planted_blocks else {}

        self.lesson_index = {l.id: l.index for l in self.lessons}
        self._build_derived()

    # -- derived tables ----------------------------------------------------

    def _build_derived(self):
        p = self.calendar.periods
        h = self.calendar.slots_per_day
        self.lesson_avail: list[list[bool]] = []
        self.placeable: list[tuple[int, ...]] = []
        self.lesson_complex: list[frozenset[int]] = []
        members: dict[int, list[int]] = {}
        for l in self.lessons:
            avail = [
                all(self.teacher_avail[t][q] for t in l.teachers)
                and all(self.class_avail[c][q] for c in l.classes)
                for q in range(p)
            ]
            self.lesson_avail.append(avail)
            starts = []
            for q in range(p):
                slot = q % h
                if slot + l.duration > h:
                    continue
                if not all(avail[q + k] for k in range(l.duration)):
                    continue
                if l.edge_preference and not (slot == 0 or slot + l.duration == h):
                    continue
                starts.append(q)
            self.placeable.append(tuple(starts))
            self.lesson_complex.append(
                frozenset(
                    c
                    for (_, c, s) in l.tuples
                    if s in self.complex_subjects.get(c, ())
                )
            )
            members.setdefault(l.course, []).append(l.index)
        self.course_members = {c: tuple(ls) for c, ls in members.items()}

    @property
    def periods(self) -> int:
        return self.calendar.periods

    def lesson(self, lid: str) -> Lesson:
        return self.lessons[self.lesson_index[lid]]

    def available_pair_count(self) -> int:
        """Total number of (lesson, period) pairs with avl = 1."""
        return sum(sum(row) for row in self.lesson_avail)


class ScheduleState:
    """Mutable assignment of lessons to start periods with redundant tables.

    ``assignment[l]`` is the start period or UNSCHEDULED.  ``tpb[t][q]`` /
    ``cpb[c][q]`` hold the lesson index occupying that cell or None; by
    construction a cell holds at most one lesson (hard constraint H1).
    """

    __slots__ = ("assignment", "tpb", "cpb", "unscheduled")

    def __init__(self, assignment, tpb, cpb, unscheduled):
        self.assignment = assignment
        self.tpb = tpb
        self.cpb = cpb
        self.unscheduled = unscheduled

    @classmethod
    def empty(cls, inst: Instance) -> "ScheduleState":
        p = inst.periods
        return cls(
            assignment=[UNSCHEDULED] * len(inst.lessons),
            tpb=[[None] * p for _ in inst.teacher_ids],
            cpb=[[None] * p for _ in inst.class_ids],
            unscheduled=set(range(len(inst.lessons))),
        )

    def clone(self) -> "ScheduleState":
        return ScheduleState(
            list(self.assignment),
            [list(r) for r in self.tpb],
            [list(r) for r in self.cpb],
            set(self.unscheduled),
        )

    def assign(self, inst: Instance, lidx: int, period) -> None:
        """Move lesson ``lidx`` to ``period`` (or UNSCHEDULED), updating tables."""
        l = inst.lessons[lidx]
        old = self.assignment[lidx]
        if old is not UNSCHEDULED:
            for k in range(l.duration):
                for t in l.teachers:
                    self.tpb[t][old + k] = None
                for c in l.classes:
                    self.cpb[c][old + k] = None
        self.assignment[lidx] = period
        if period is UNSCHEDULED:
            self.unscheduled.add(lidx)
            return
        self.unscheduled.discard(lidx)
        for k in range(l.duration):
            for t in l.teachers:
                if self.tpb[t][period + k] is not None:
                    raise AssertionError(
                        f"teacher cell ({t},{period + k}) already occupied"
                    )
                self.tpb[t][period + k] = lidx
            for c in l.classes:
                if self.cpb[c][period + k] is not None:
                    raise AssertionError(
                        f"class cell ({c},{period + k}) already occupied"
                    )
                self.cpb[c][period + k] = lidx


def feasible_periods(inst: Instance, s: ScheduleState, lidx: int) -> list[int]:
    """Start periods where the lesson fits: available, span within one day,
    no collision with any *other* scheduled lesson (the lesson's own current
    cells are ignored, i.e. the check treats it as removed first)."""
    l = inst.lessons[lidx]
    tpb, cpb = s.tpb, s.cpb
    out = []
    for q in inst.placeable[lidx]:
        ok = True
        for k in range(l.duration):
            qq = q + k
            for t in l.teachers:
                occ = tpb[t][qq]
                if occ is not None and occ != lidx:
                    ok = False
                    break
            if not ok:
                break
            for c in l.classes:
                occ = cpb[c][qq]
                if occ is not None and occ != lidx:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(q)
    return out


def apply_assignment(inst: Instance, s: ScheduleState, lidx: int, period) -> ScheduleState:
    """Assign lesson to period (or UNSCHEDULED) in place; returns ``s``."""
    s.assign(inst, lidx, period)
    return s


def verify_tables(inst: Instance, s: ScheduleState) -> None:
    """Full audit of the Q <-> tpb/cpb consistency invariant; raises on breach."""
    p = inst.periods
    exp_t = [[None] * p for _ in inst.teacher_ids]
    exp_c = [[None] * p for _ in inst.class_ids]
    for l in inst.lessons:
        q = s.assignment[l.index]
        if q is UNSCHEDULED:
            if l.index not in s.unscheduled:
                raise AssertionError(f"lesson {l.id} missing from unscheduled set")
            continue
        if l.index in s.unscheduled:
            raise AssertionError(f"scheduled lesson {l.id} in unscheduled set")
        for k in range(l.duration):
            for t in l.teachers:
                if exp_t[t][q + k] is not None:
                    raise AssertionError(f"teacher conflict at ({t},{q + k})")
                exp_t[t][q + k] = l.index
            for c in l.classes:
                if exp_c[c][q + k] is not None:
                    raise AssertionError(f"class conflict at ({c},{q + k})")
                exp_c[c][q + k] = l.index
    if exp_t != s.tpb:
        raise AssertionError("tpb table inconsistent with assignment")
    if exp_c != s.cpb:
        raise AssertionError("cpb table inconsistent with assignment")


# -- instance file parsing / serialization --------------------------------


def _require(cond: bool, msg: str):
    if not cond:
        raise InstanceError(msg)


def parse_instance(text: str) -> Instance:
    """Parse and validate a JSON instance file."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceError(
            f"syntax error at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from e
    _require(isinstance(doc, dict), "top level must be an object")
    for key in ("calendar", "teachers", "classes", "subjects", "courses", "lessons"):
        _require(key in doc, f"missing top-level key '{key}'")

    cal_doc = doc["calendar"]
    cal = Calendar(int(cal_doc["days"]), int(cal_doc["slots_per_day"]))
    p = cal.periods

    def id_list(items, what):
        ids = []
        for it in items:
            _require("id" in it, f"{what} entry without id")
            _require(it["id"] not in ids, f"duplicate {what} id '{it['id']}'")
            ids.append(it["id"])
        return ids

    teacher_ids = id_list(doc["teachers"], "teacher")
    class_ids = id_list(doc["classes"], "class")
    subject_ids = id_list(doc["subjects"], "subject")
    course_ids = id_list(doc["courses"], "course")
    t_idx = {t: i for i, t in enumerate(teacher_ids)}
    c_idx = {c: i for i, c in enumerate(class_ids)}
    s_idx = {s: i for i, s in enumerate(subject_ids)}
    crs_idx = {c: i for i, c in enumerate(course_ids)}

    def avail_row(entry, what):
        # Missing availability means available at every period.
        if "available_periods" not in entry:
            return [True] * p
        row = [False] * p
        for q in entry["available_periods"]:
            _require(0 <= q < p, f"{what} '{entry['id']}': period {q} out of range")
            row[q] = True
        return row

    teacher_avail = [avail_row(t, "teacher") for t in doc["teachers"]]
    class_avail = [avail_row(c, "class") for c in doc["classes"]]
    curricula = {
        c_idx[c["id"]]: c["curriculum"] for c in doc["classes"] if "curriculum" in c
    }
    complex_subjects: dict[int, set[int]] = {}
    for sub in doc["subjects"]:
        for cid in sub.get("complex_for", []):
            _require(cid in c_idx, f"subject '{sub['id']}': unknown class '{cid}'")
            complex_subjects.setdefault(c_idx[cid], set()).add(s_idx[sub["id"]])

    lessons = []
    seen = set()
    for i, ld in enumerate(doc["lessons"]):
        _require("id" in ld, f"lesson #{i} without id")
        lid = ld["id"]
        _require(lid not in seen, f"duplicate lesson id '{lid}'")
        seen.add(lid)
        dur = int(ld.get("duration", 1))
        _require(dur >= 1, f"lesson '{lid}': duration must be >= 1")
        _require(dur <= cal.slots_per_day, f"lesson '{lid}': duration exceeds day length")
        kind = ld.get("kind", "simple")
        _require(kind in LESSON_KINDS, f"lesson '{lid}': unknown kind '{kind}'")
        _require(ld.get("course") in crs_idx, f"lesson '{lid}': unknown course '{ld.get('course')}'")
        tups = []
        _require(bool(ld.get("tuples")), f"lesson '{lid}': needs at least one tuple")
        for tup in ld["tuples"]:
            for key, table, what in (
                ("teacher", t_idx, "teacher"),
                ("class", c_idx, "class"),
                ("subject", s_idx, "subject"),
            ):
                _require(
                    tup.get(key) in table,
                    f"lesson '{lid}': unknown {what} '{tup.get(key)}'",
                )
            tups.append((t_idx[tup["teacher"]], c_idx[tup["class"]], s_idx[tup["subject"]]))
        if kind == "simple":
            _require(len(tups) == 1, f"lesson '{lid}': simple lessons have one tuple")
        teachers = tuple(sorted({t for t, _, _ in tups}))
        classes = tuple(sorted({c for _, c, _ in tups}))
        lessons.append(
            Lesson(
                id=lid,
                index=i,
                course=crs_idx[ld["course"]],
                duration=dur,
                kind=kind,
                tuples=tuple(tups),
                teachers=teachers,
                classes=classes,
                edge_preference=bool(ld.get("edge_preference", False)),
            )
        )

    wdoc = doc.get("weights", {})
    weights = Weights(
        w1=int(wdoc.get("w1", DEFAULT_WEIGHTS[0])),
        w2=int(wdoc.get("w2", DEFAULT_WEIGHTS[1])),
        w3=int(wdoc.get("w3", DEFAULT_WEIGHTS[2])),
        w4=int(wdoc.get("w4", DEFAULT_WEIGHTS[3])),
        w5=int(wdoc.get("w5", DEFAULT_WEIGHTS[4])),
    )
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
        curricula=curricula,
        weights=weights,
        planted_blocks=doc.get("planted_blocks"),
    )


def serialize_instance(inst: Instance) -> str:
    """Canonical JSON serialization; parse(serialize(x)) == x structurally."""
    p = inst.periods

    def avail_entry(row):
        if all(row):
            return None
        return [q for q in range(p) if row[q]]

    teachers = []
    for i, tid in enumerate(inst.teacher_ids):
        e = {"id": tid}
        av = avail_entry(inst.teacher_avail[i])
        if av is not None:
            e["available_periods"] = av
        teachers.append(e)
    classes = []
    for i, cid in enumerate(inst.class_ids):
        e = {"id": cid}
        av = avail_entry(inst.class_avail[i])
        if av is not None:
            e["available_periods"] = av
        if i in inst.curricula:
            e["curriculum"] = inst.curricula[i]
        classes.append(e)
    subjects = []
    for i, sid in enumerate(inst.subject_ids):
        e = {"id": sid}
        cplx = sorted(
            c for c, subs in inst.complex_subjects.items() if i in subs
        )
        if cplx:
            e["complex_for"] = [inst.class_ids[c] for c in cplx]
        subjects.append(e)
    course_struct: dict[int, list[int]] = {i: [] for i in range(len(inst.course_ids))}
    for l in inst.lessons:
        course_struct[l.course].append(l.duration)
    courses = [
        {"id": cid, "structure": sorted(course_struct[i], reverse=True)}
        for i, cid in enumerate(inst.course_ids)
    ]
    lessons = []
    for l in inst.lessons:
        e = {
            "id": l.id,
            "course": inst.course_ids[l.course],
            "duration": l.duration,
            "kind": l.kind,
            "tuples": [
                {
                    "teacher": inst.teacher_ids[t],
                    "class": inst.class_ids[c],
                    "subject": inst.subject_ids[s],
                }
                for t, c, s in l.tuples
            ],
        }
        if l.edge_preference:
            e["edge_preference"] = True
        lessons.append(e)
    doc = {
        "calendar": {"days": inst.calendar.days, "slots_per_day": inst.calendar.slots_per_day},
        "teachers": teachers,
        "classes": classes,
        "subjects": subjects,
        "courses": courses,
        "lessons": lessons,
        "weights": dict(zip(("w1", "w2", "w3", "w4", "w5"), inst.weights.as_tuple())),
    }
    if inst.planted_blocks:
        doc["planted_blocks"] = inst.planted_blocks
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def instances_equal(a: Instance, b: Instance) -> bool:
    """Structural equality, used by the parse/serialize round-trip check."""
    return serialize_instance(a) == serialize_instance(b)
