import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hstt.model import parse_instance


def instance_doc(
    days=2,
    slots=3,
    teachers=("t1", "t2"),
    classes=("c1", "c2"),
    subjects=("s1", "s2"),
    lessons=(),
    teacher_avail=None,
    class_avail=None,
    complex_for=None,
    weights=None,
):
    """Build an instance JSON document from compact lesson tuples.

    Each lesson is (id, teacher, class, subject) or a dict with optional
    duration/kind/course/tuples/edge_preference.
    """
    doc = {
        "calendar": {"days": days, "slots_per_day": slots},
        "teachers": [{"id": t} for t in teachers],
        "classes": [{"id": c} for c in classes],
        "subjects": [{"id": s} for s in subjects],
        "courses": [],
        "lessons": [],
    }
    if teacher_avail:
        for e in doc["teachers"]:
            if e["id"] in teacher_avail:
                e["available_periods"] = teacher_avail[e["id"]]
    if class_avail:
        for e in doc["classes"]:
            if e["id"] in class_avail:
                e["available_periods"] = class_avail[e["id"]]
    if complex_for:
        for e in doc["subjects"]:
            if e["id"] in complex_for:
                e["complex_for"] = complex_for[e["id"]]
    courses = {}
    for spec in lessons:
        if not isinstance(spec, dict):
            lid, t, c, s = spec
            spec = {"id": lid, "tuples": [{"teacher": t, "class": c, "subject": s}]}
        spec = dict(spec)
        spec.setdefault("duration", 1)
        spec.setdefault("kind", "simple")
        spec.setdefault("course", f"crs_{spec['id']}")
        courses.setdefault(spec["course"], []).append(spec["duration"])
        doc["lessons"].append(spec)
    doc["courses"] = [{"id": cid, "structure": st} for cid, st in courses.items()]
    if weights:
        doc["weights"] = weights
    return doc


def make_instance(**kwargs):
    return parse_instance(json.dumps(instance_doc(**kwargs)))


@pytest.fixture
def tiny_instance():
    """One class, one teacher, one 1-hour lesson, 1 day x 2 slots."""
    return make_instance(
        days=1,
        slots=2,
        teachers=("t1",),
        classes=("c1",),
        subjects=("s1",),
        lessons=[("l1", "t1", "c1", "s1")],
    )


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import REPORT_LINES
    except ImportError:
        return
    if REPORT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in REPORT_LINES:
            terminalreporter.write_line(line)
