"""Run orchestration: solve pipeline, file exports and experiment summaries."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .blocks import detect_blocks
from .construct import build_initial
from .evaluator import CostBreakdown, audit_hard, total_cost
from .model import Instance, ScheduleState, UNSCHEDULED, serialize_instance
from .tabu import SolverConfig, TRACE_HEADER, improve


@dataclass
class RunReport:
    variant: str
    seed: int
    iterations: int
    initial_total: int
    final: CostBreakdown
    improvement_pct: float
    wall_time: float
    trace: list[tuple]

    def to_json(self) -> str:
        # wall time is deliberately excluded so reports are byte-stable
        doc = {
            "variant": self.variant,
            "seed": self.seed,
            "iterations": self.iterations,
            "initial_total": self.initial_total,
            "final": {
                "f1": self.final.f1,
                "f2": self.final.f2,
                "f3": self.final.f3,
                "f4": self.final.f4,
                "f5": self.final.f5,
                "total": self.final.total,
            },
            "improvement_pct": round(self.improvement_pct, 4),
        }
        return json.dumps(doc, indent=1) + "\n"


def schedule_json(inst: Instance, s: ScheduleState) -> str:
    doc = {
        l.id: (-1 if s.assignment[l.index] is UNSCHEDULED else s.assignment[l.index])
        for l in inst.lessons
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def load_schedule(inst: Instance, text: str) -> ScheduleState:
    doc = json.loads(text)
    s = ScheduleState.empty(inst)
    for lid, q in doc.items():
        if lid not in inst.lesson_index:
            raise ValueError(f"schedule references unknown lesson '{lid}'")
        if q != -1:
            s.assign(inst, inst.lesson_index[lid], q)
    return s


def _grid_csv(inst: Instance, s: ScheduleState, rows, ids, table) -> str:
    p = inst.periods
    lines = ["id," + ",".join(f"p{q}" for q in range(p))]
    for i in range(rows):
        cells = [
            inst.lessons[table[i][q]].id if table[i][q] is not None else ""
            for q in range(p)
        ]
        lines.append(ids[i] + "," + ",".join(cells))
    return "\n".join(lines) + "\n"


def class_grid_csv(inst: Instance, s: ScheduleState) -> str:
    return _grid_csv(inst, s, len(inst.class_ids), inst.class_ids, s.cpb)


def teacher_grid_csv(inst: Instance, s: ScheduleState) -> str:
    return _grid_csv(inst, s, len(inst.teacher_ids), inst.teacher_ids, s.tpb)


def trace_csv(trace: list[tuple]) -> str:
    lines = [TRACE_HEADER]
    for row in trace:
        lines.append(",".join(str(x) for x in row))
    return "\n".join(lines) + "\n"


def run_solve(
    inst: Instance,
    cfg: SolverConfig,
    out_dir: Path | None = None,
    iteration_hook=None,
) -> tuple[RunReport, Instance, ScheduleState]:
    """Full pipeline: block detection, greedy construction, tabu search.

    Returns the report plus the rewritten instance and best schedule; when
    ``out_dir`` is given, writes instance_solved.json, schedule.json, the
    per-class/per-teacher grids, trace.csv and report.json there.
    """
    t0 = time.perf_counter()
    solved_inst, _paths = detect_blocks(inst)
    s0 = build_initial(solved_inst, seed=cfg.seed)
    result = improve(solved_inst, s0, cfg, iteration_hook=iteration_hook)
    wall = time.perf_counter() - t0
    initial = result.initial_cost.total
    final = result.best_cost
    imp = 100.0 * (initial - final.total) / initial if initial else 0.0
    report = RunReport(
        variant=cfg.variant,
        seed=cfg.seed,
        iterations=cfg.iterations,
        initial_total=initial,
        final=final,
        improvement_pct=imp,
        wall_time=wall,
        trace=result.trace,
    )
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "instance_solved.json").write_text(serialize_instance(solved_inst))
        (out_dir / "schedule.json").write_text(
            schedule_json(solved_inst, result.best_state)
        )
        (out_dir / "class_grid.csv").write_text(
            class_grid_csv(solved_inst, result.best_state)
        )
        (out_dir / "teacher_grid.csv").write_text(
            teacher_grid_csv(solved_inst, result.best_state)
        )
        (out_dir / "trace.csv").write_text(trace_csv(result.trace))
        (out_dir / "report.json").write_text(report.to_json())
    return report, solved_inst, result.best_state


def evaluate_schedule(inst: Instance, s: ScheduleState) -> dict:
    cost = total_cost(inst, s)
    hard = audit_hard(inst, s)
    return {
        "hard_conflicts": hard.conflict_count,
        "hard_unavailable": hard.availability_count,
        "f1": cost.f1,
        "f2": cost.f2,
        "f3": cost.f3,
        "f4": cost.f4,
        "f5": cost.f5,
        "total": cost.total,
    }


def run_experiment(
    instances: list[tuple[str, Instance]],
    seeds: list[int],
    variants: list[str],
    iterations: int = 3000,
    out_dir: Path | None = None,
) -> list[dict]:
    """Mean final cost and improvement per (instance, variant) over seeds."""
    rows = []
    for name, inst in instances:
        for variant in variants:
            finals = []
            initials = []
            for seed in seeds:
                cfg = SolverConfig(iterations=iterations, variant=variant, seed=seed)
                report, _, _ = run_solve(inst, cfg)
                finals.append(report.final.total)
                initials.append(report.initial_total)
            mean_final = Fraction(sum(finals), len(finals))
            mean_initial = Fraction(sum(initials), len(initials))
            imp = (
                100 * (mean_initial - mean_final) / mean_initial
                if mean_initial
                else Fraction(0)
            )
            rows.append(
                {
                    "instance": name,
                    "variant": variant,
                    "seeds": len(seeds),
                    "mean_initial": float(mean_initial),
                    "mean_final": float(mean_final),
                    "mean_imp_pct": float(imp),
                }
            )
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "summary.csv").write_text(summary_csv(rows))
        (out_dir / "summary.txt").write_text(summary_text(rows))
    return rows


def summary_csv(rows: list[dict]) -> str:
    lines = ["instance,variant,seeds,mean_initial,mean_final,mean_imp_pct"]
    for r in rows:
        lines.append(
            f"{r['instance']},{r['variant']},{r['seeds']},"
            f"{r['mean_initial']:.2f},{r['mean_final']:.2f},{r['mean_imp_pct']:.2f}"
        )
    return "\n".join(lines) + "\n"


def summary_text(rows: list[dict]) -> str:
    header = f"{'instance':<16}{'variant':<9}{'seeds':>6}{'initial':>12}{'final':>12}{'%IMP':>8}"
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r['instance']:<16}{r['variant']:<9}{r['seeds']:>6}"
            f"{r['mean_initial']:>12.1f}{r['mean_final']:>12.1f}{r['mean_imp_pct']:>8.1f}"
        )
    return "\n".join(lines) + "\n"
