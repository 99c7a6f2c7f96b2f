"""Command-line front end.

Subcommands: generate, detect-blocks, solve, experiment, evaluate.
Exit codes: 0 success, 1 input error, 2 unsatisfiable generation spec.
"""

from __future__ import annotations

import argparse
import glob
import json
import sys
from pathlib import Path

from .blocks import detect_blocks, detection_summary
from .generator import GenError, GenSpec, SHAPES, compute_sparseness, generate_instance
from .harness import evaluate_schedule, load_schedule, run_experiment, run_solve
from .model import InstanceError, parse_instance, serialize_instance
from .tabu import SolverConfig, VARIANTS
from .model import Weights


def _load_instance(path: str):
    return parse_instance(Path(path).read_text())


def cmd_generate(args) -> int:
    if args.shape:
        spec = SHAPES[args.shape]
        spec = GenSpec(**{**spec.__dict__, "seed": args.seed})
    else:
        spec = GenSpec.from_json(Path(args.spec).read_text())
        if args.seed is not None:
            spec.seed = args.seed
    inst = generate_instance(spec)
    text = serialize_instance(inst)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    sr = compute_sparseness(inst.available_pair_count(), len(inst.lessons), inst.periods)
    print(
        f"generated {len(inst.lessons)} lessons, sr={sr:.2f}",
        file=sys.stderr,
    )
    return 0


def cmd_detect_blocks(args) -> int:
    inst = _load_instance(args.instance)
    _, paths = detect_blocks(inst)
    report = {
        "blocks": [
            {
                "kind": p.kind,
                "member_sessions": [inst.lessons[i].id for i in p.member_lessons],
                "classes": sorted(
                    {inst.class_ids[c] for i in p.member_lessons for c in inst.lessons[i].classes}
                ),
                "teachers": sorted(
                    {inst.teacher_ids[t] for i in p.member_lessons for t in inst.lessons[i].teachers}
                ),
            }
            for p in paths
        ],
        "summary": detection_summary(inst, paths),
    }
    print(json.dumps(report, indent=1))
    return 0


def _config_from_args(args) -> SolverConfig:
    return SolverConfig(
        iterations=args.iterations,
        variant=args.variant,
        seed=args.seed,
        div_activation=args.div_activation,
        iterations_div=args.iterations_div,
        intra_activation=args.intra_activation,
    )


def _apply_weight_overrides(inst, args):
    if not any(getattr(args, f"w{i}") is not None for i in range(1, 6)):
        return inst
    cur = inst.weights.as_tuple()
    vals = [
        getattr(args, f"w{i}") if getattr(args, f"w{i}") is not None else cur[i - 1]
        for i in range(1, 6)
    ]
    inst.weights = Weights(*vals)
    inst._build_derived()
    return inst


def cmd_solve(args) -> int:
    inst = _apply_weight_overrides(_load_instance(args.instance), args)
    cfg = _config_from_args(args)
    report, _, _ = run_solve(inst, cfg, out_dir=Path(args.out))
    print(
        f"variant={report.variant} seed={report.seed} "
        f"initial={report.initial_total} final={report.final.total} "
        f"imp={report.improvement_pct:.1f}% wall={report.wall_time:.1f}s"
    )
    return 0


def cmd_experiment(args) -> int:
    files = sorted(glob.glob(args.instances))
    if not files:
        raise InstanceError(f"no instance files match '{args.instances}'")
    instances = [(Path(f).stem, _load_instance(f)) for f in files]
    lo, hi = (int(x) for x in args.seeds.split(".."))
    seeds = list(range(lo, hi + 1))
    variants = args.variants.split(",")
    for v in variants:
        if v not in VARIANTS:
            raise InstanceError(f"unknown variant '{v}'")
    rows = run_experiment(
        instances, seeds, variants, iterations=args.iterations, out_dir=Path(args.out)
    )
    from .harness import summary_text

    sys.stdout.write(summary_text(rows))
    return 0


def cmd_evaluate(args) -> int:
    inst = _load_instance(args.instance)
    s = load_schedule(inst, Path(args.schedule).read_text())
    print(json.dumps(evaluate_schedule(inst, s), indent=1))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hstt", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a synthetic instance")
    mx = g.add_mutually_exclusive_group(required=True)
    mx.add_argument("--spec", help="JSON generation spec file")
    mx.add_argument("--shape", choices=sorted(SHAPES), help="built-in shape preset")
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    d = sub.add_parser("detect-blocks", help="report detected lesson blocks")
    d.add_argument("--instance", required=True)
    d.set_defaults(func=cmd_detect_blocks)

    s = sub.add_parser("solve", help="run the full solve pipeline")
    s.add_argument("--instance", required=True)
    s.add_argument("--variant", choices=VARIANTS, default="tsdi")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--iterations", type=int, default=3000)
    s.add_argument("--div-activation", type=int, default=20)
    s.add_argument("--iterations-div", type=int, default=5)
    s.add_argument("--intra-activation", type=int, default=40)
    for i in range(1, 6):
        s.add_argument(f"--w{i}", type=int, default=None)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("experiment", help="run an instance x variant x seed sweep")
    e.add_argument("--instances", required=True, help="glob of instance files")
    e.add_argument("--seeds", default="0..9", help="inclusive range a..b")
    e.add_argument("--variants", default="ts,tsi,tsd,tsdi")
    e.add_argument("--iterations", type=int, default=3000)
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_experiment)

    v = sub.add_parser("evaluate", help="audit and score a schedule file")
    v.add_argument("--instance", required=True)
    v.add_argument("--schedule", required=True)
    v.set_defaults(func=cmd_evaluate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GenError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (InstanceError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
