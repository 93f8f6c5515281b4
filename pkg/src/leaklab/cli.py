"""Batch command-line interface.

Subcommands: run, sweep, dpi, multisession, oracle, certify.  Exit codes:
0 success, 1 validation error, 2 soundness or oracle violation.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .config import ScenarioConfig, load_scenario
from .discrete import DiscreteChannel
from .errors import ValidationError
from .harness import (
    defense_sweep,
    dpi_check,
    multi_session_experiment,
    oracle_multisession,
    oracle_suite,
    run_scenario,
)
from .reporting import (
    dpi_csv_text,
    layers_csv_text,
    multisession_csv_text,
    oracle_text,
    pareto_csv_text,
    report_text,
    result_csv_text,
)
from .trajectory import default_statistics, lipschitz_certificate, perturbation_sampler, MetricConfig

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_VIOLATION = 2


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="override scenario seed")
    parser.add_argument("--trials", type=int, default=None, help="override scenario trials")
    parser.add_argument("--out-dir", type=Path, default=Path("."), help="output directory")
    parser.add_argument(
        "--format",
        choices=("csv", "structured"),
        default="structured",
        help="stdout summary format",
    )
    parser.add_argument("--workers", type=int, default=1, help="parallel trial workers")
    parser.add_argument(
        "--dump-layers",
        action="store_true",
        help="also write layers.csv with per-layer packet sequences",
    )


def _load(args) -> ScenarioConfig:
    cfg = load_scenario(args.scenario)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.trials is not None:
        cfg = replace(cfg, trials=args.trials)
    cfg.validate()
    return cfg


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(text.encode("utf-8"))


def _cmd_run(args) -> int:
    cfg = _load(args)
    result = run_scenario(cfg, workers=args.workers)
    _write(args.out_dir / "result.csv", result_csv_text(result))
    _write(args.out_dir / "report.txt", report_text(result))
    if args.dump_layers:
        _write(args.out_dir / "layers.csv", layers_csv_text(cfg))
    if args.format == "csv":
        sys.stdout.write(result_csv_text(result))
    else:
        sys.stdout.write(report_text(result))
    return EXIT_OK if result.soundness_ok() else EXIT_VIOLATION


def _cmd_sweep(args) -> int:
    cfg = _load(args)
    result = defense_sweep(cfg, workers=args.workers)
    text = pareto_csv_text(result)
    _write(args.out_dir / "pareto.csv", text)
    if args.dump_layers:
        _write(args.out_dir / "layers.csv", layers_csv_text(cfg))
    sys.stdout.write(text)
    if result.best_index is None:
        near = result.nearest_infeasible_index
        sys.stdout.write(f"no feasible point; nearest infeasible index: {near}\n")
    return EXIT_OK


def _cmd_dpi(args) -> int:
    cfg = _load(args)
    result = dpi_check(cfg, workers=args.workers)
    text = dpi_csv_text(result)
    _write(args.out_dir / "dpi.csv", text)
    sys.stdout.write(text)
    return EXIT_OK if result.nonincreasing_ok else EXIT_VIOLATION


def _parse_sessions(raw: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in raw.split(",") if tok)


def _cmd_multisession(args) -> int:
    sessions = _parse_sessions(args.sessions)
    if args.channel is not None:
        ch = DiscreteChannel.from_file(args.channel)
        rows = oracle_multisession(ch, sessions)
        lines = ["sessions,exact_error,exponent_nats"]
        for r in rows:
            lines.append(f"{r.sessions},{r.exact_error!r},{r.exponent_nats!r}")
        text = "\n".join(lines) + "\n"
        _write(args.out_dir / "multisession.csv", text)
        sys.stdout.write(text)
        return EXIT_OK
    if args.scenario is None:
        raise ValidationError("multisession: need a scenario file or --channel")
    cfg = _load(args)
    result = multi_session_experiment(
        cfg, sessions=sessions, eval_groups=args.groups, workers=args.workers
    )
    text = multisession_csv_text(result)
    _write(args.out_dir / "multisession.csv", text)
    sys.stdout.write(text)
    return EXIT_OK


def _cmd_oracle(args) -> int:
    result = oracle_suite(
        n_channels=args.channels, stats_per_channel=args.stats, seed=args.seed
    )
    sys.stdout.write(oracle_text(result))
    return EXIT_OK if result.ok() else EXIT_VIOLATION


def _cmd_certify(args) -> int:
    metric = MetricConfig()
    registry = default_statistics(metric)
    failures = 0
    for name, desc in sorted(registry.items()):
        sampler = perturbation_sampler(
            preserve_directions=(name == "updown_balance")
        )
        cert = lipschitz_certificate(desc, metric, sampler, trials=args.trials, seed=args.seed)
        status = "pass" if cert.passed else "FAIL"
        sys.stdout.write(
            f"{name:<22} declared={cert.declared!r} empirical_max={cert.max_ratio!r} "
            f"trials={cert.trials} {status}\n"
        )
        failures += 0 if cert.passed else 1
    return EXIT_OK if failures == 0 else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leaklab",
        description="Seeded side-channel leakage simulation and bound verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario and emit result.csv + report.txt")
    p_run.add_argument("scenario", type=Path)
    _add_common(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run the scenario's defense grid, emit pareto.csv")
    p_sweep.add_argument("scenario", type=Path)
    _add_common(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_dpi = sub.add_parser("dpi", help="per-layer MI series with non-increase check")
    p_dpi.add_argument("scenario", type=Path)
    _add_common(p_dpi)
    p_dpi.set_defaults(func=_cmd_dpi)

    p_ms = sub.add_parser("multisession", help="accuracy vs session count")
    p_ms.add_argument("scenario", type=Path, nargs="?", default=None)
    p_ms.add_argument("--channel", type=Path, default=None, help="exact oracle mode on a channel file")
    p_ms.add_argument("--sessions", type=str, default="1,2,4,8")
    p_ms.add_argument("--groups", type=int, default=200, help="evaluation groups per label")
    _add_common(p_ms)
    p_ms.set_defaults(func=_cmd_multisession)

    p_or = sub.add_parser("oracle", help="exact-channel inequality verification suite")
    p_or.add_argument("--channels", type=int, default=1000)
    p_or.add_argument("--stats", type=int, default=10)
    p_or.add_argument("--seed", type=int, default=0)
    p_or.set_defaults(func=_cmd_oracle)

    p_cert = sub.add_parser("certify", help="empirical Lipschitz certificates for shipped statistics")
    p_cert.add_argument("--trials", type=int, default=100_000)
    p_cert.add_argument("--seed", type=int, default=0)
    p_cert.set_defaults(func=_cmd_certify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        sys.stderr.write(f"validation error: {exc}\n")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
