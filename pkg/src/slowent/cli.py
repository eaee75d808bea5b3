"""Command-line interface.

Exit codes: 0 when every asserted invariant passed, 1 when a verdict
failed, 2 on usage errors. All randomness flows from --seed; --threads is
accepted for interface compatibility and does not change any output.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import covernum, cutstack, expcli, recurrence
from .lattice import UsageError, pattern_to_text


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON experiment config")
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument("--out", type=Path, default=Path("out"))
    parser.add_argument("--format", choices=("csv", "json"), default="json")
    parser.add_argument("--threads", type=int, default=1, help="accepted for compatibility; outputs do not depend on it")


def _schedule_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--stages", type=int, default=4)
    parser.add_argument("--theta", type=str, default="1/3")
    parser.add_argument("--c", type=str, default="2")
    parser.add_argument("--r1", type=int, default=1)
    parser.add_argument("--schedule-file", type=Path)


def _schedule_from_args(args: argparse.Namespace) -> cutstack.Schedule:
    if getattr(args, "schedule_file", None):
        return cutstack.schedule_from_text(args.schedule_file.read_text())
    return cutstack.build_schedule(args.stages, Fraction(args.theta), Fraction(args.c), args.r1)


def _load_config(args: argparse.Namespace, kind: str) -> expcli.ExperimentConfig:
    if args.config:
        doc = json.loads(args.config.read_text())
        doc.setdefault("kind", kind)
        config = expcli.config_from_json(doc)
        if config.kind != kind:
            raise UsageError(f"config kind {config.kind!r} does not match subcommand {kind!r}")
        return config
    spec = {"stages": args.stages, "theta": args.theta, "c": args.c, "r1": args.r1}
    if getattr(args, "schedule_file", None):
        spec = {"file": str(args.schedule_file)}
    return expcli.ExperimentConfig(
        kind=kind,
        seed=args.seed,
        schedule_spec=spec,
        sample_size=getattr(args, "sample_size", 50),
    )


def _emit(report: expcli.Report, args: argparse.Namespace) -> int:
    path = expcli.write_report(report, args.out, args.format)
    failed = report.failed()
    for v in report.verdicts:
        print(f"[{v.status.upper():8s}] {v.name}: {v.invariant}")
    print(f"report: {path}")
    return 1 if failed else 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="slowent", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sched = sub.add_parser("schedule", help="build or check construction schedules")
    sched_sub = p_sched.add_subparsers(dest="action", required=True)
    p_build = sched_sub.add_parser("build")
    _schedule_args(p_build)
    p_build.add_argument("--out-file", type=Path)
    p_check = sched_sub.add_parser("check")
    p_check.add_argument("file", type=Path)

    p_sample = sub.add_parser("sample", help="sample construction points")
    _add_common(p_sample)
    _schedule_args(p_sample)
    p_sample.add_argument("--stage", type=int, default=3)
    p_sample.add_argument("--count", type=int, default=5)

    p_names = sub.add_parser("names", help="emit a sampled point's name pattern")
    _add_common(p_names)
    _schedule_args(p_names)
    p_names.add_argument("--n", type=int, default=27)
    p_names.add_argument("--point-seed", type=int, default=0)

    p_dist = sub.add_parser("distmat", help="pairwise recurrence-metric distances for a sample")
    _add_common(p_dist)
    _schedule_args(p_dist)
    p_dist.add_argument("--n", type=int, default=27)
    p_dist.add_argument("--sample-size", type=int, default=12)

    p_fit = sub.add_parser("fit", help="growth-exponent fit from a CSV of n,value rows")
    _add_common(p_fit)
    p_fit.add_argument("input", type=Path)
    p_fit.add_argument("--scale", choices=("slow", "exp"), default="slow")

    for kind, helptext in (
        ("cover", "cover-number scan over construction samples"),
        ("recur", "recurrence census, alpha fit, binomial bound"),
        ("overlay", "overlay separation bounds and erasure identity"),
        ("ratio-et", "ratio ergodic theorem visit-count check"),
        ("bowen", "Bowen metric checks on toy torus actions"),
        ("verify", "full claim-verification matrix"),
        ("metric-props", "pattern metric axiom suite"),
    ):
        p = sub.add_parser(kind, help=helptext)
        _add_common(p)
        _schedule_args(p)
        p.add_argument("--sample-size", type=int, default=None)

    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


_KIND_BY_COMMAND = {
    "cover": "cover-scan",
    "recur": "recurrence",
    "overlay": "overlay",
    "ratio-et": "ratio-et",
    "bowen": "bowen",
    "verify": "verify-all",
    "metric-props": "metric-props",
}

_DEFAULT_SIZES = {
    "metric-props": 100_000,
    "cover-scan": 12,
    "recurrence": 50,
    "overlay": 10_000,
    "ratio-et": 100,
    "bowen": 500,
    "verify-all": 50,
}


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "schedule":
        return _schedule_command(args)
    if args.command == "sample":
        sched = _schedule_from_args(args)
        for i in range(args.count):
            p = cutstack.sample_point(sched, args.stage, expcli.rng.derive_seed(args.seed, "point", i))
            print(f"point {i}: levels={p.levels}")
        return 0
    if args.command == "names":
        sched = _schedule_from_args(args)
        p = cutstack.sample_point(sched, 3, expcli.rng.derive_seed(args.seed, "point", args.point_seed))
        sys.stdout.write(pattern_to_text(cutstack.name01(p, args.n)))
        return 0
    if args.command == "distmat":
        sched = _schedule_from_args(args)
        pts = expcli.sample_points(sched, 3, args.sample_size, args.seed)
        patterns = [recurrence.recurrence_set(q, args.n).site_set() for q in pts]
        from .partitions import recurrence_metric

        args.out.mkdir(parents=True, exist_ok=True)
        rows = []
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                rows.append({"i": i, "j": j, "distance": recurrence_metric(patterns[i], patterns[j])})
        expcli.write_csv(rows, args.out / "distmat.csv")
        print(args.out / "distmat.csv")
        return 0
    if args.command == "fit":
        samples = []
        for line in args.input.read_text().splitlines()[1:]:
            if not line.strip():
                continue
            n, value = line.split(",")[:2]
            samples.append((int(n), float(value)))
        fit = covernum.growth_fit(samples, args.scale)
        args.out.mkdir(parents=True, exist_ok=True)
        expcli.write_csv(expcli.fit_rows(fit), args.out / "fit.csv")
        print(json.dumps(expcli._canonical(fit), indent=2, sort_keys=True))
        return 0
    kind = _KIND_BY_COMMAND[args.command]
    config = _load_config(args, kind)
    if getattr(args, "sample_size", None):
        config = expcli.ExperimentConfig(
            kind=config.kind,
            seed=config.seed,
            schedule_spec=config.schedule_spec,
            sample_size=args.sample_size,
            scales=config.scales,
            eps_list=config.eps_list,
        )
    elif not args.config:
        config = expcli.ExperimentConfig(
            kind=config.kind,
            seed=config.seed,
            schedule_spec=config.schedule_spec,
            sample_size=_DEFAULT_SIZES[kind],
            scales=config.scales,
            eps_list=config.eps_list,
        )
    report = expcli.run_experiment(config)
    return _emit(report, args)


def _schedule_command(args: argparse.Namespace) -> int:
    if args.action == "build":
        sched = _schedule_from_args(args)
        text = cutstack.schedule_to_text(sched)
        if args.out_file:
            args.out_file.write_text(text)
            print(args.out_file)
        else:
            sys.stdout.write(text)
        return 0
    sched = cutstack.schedule_from_text(args.file.read_text())
    print(f"ok: {sched.stages} stages, theta={sched.theta}, c={sched.c}, r={sched.radii}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
