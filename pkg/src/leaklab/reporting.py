"""Deterministic emission of results as CSV tables and structured text.

Floats are rendered with ``repr`` (shortest round-trip form), so identical
results serialize to identical bytes.  Column names are part of the stable
output contract and documented in the README.
"""

from __future__ import annotations

from .channel import run_chain
from .config import ScenarioConfig
from .estimators import PairEstimate
from .harness import (
    DpiResult,
    ExperimentResult,
    MultiSessionResult,
    SweepResult,
    OracleSuiteResult,
)
from .seeding import trial_seed
from .traffic import UP


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _row(*cells) -> str:
    return ",".join(_fmt(c) for c in cells)


RESULT_COLUMNS = "kind,name,pair,point,lo,hi,n,seed_range,unit"


def _estimate_row(kind: str, name: str, pair: str, est: PairEstimate, unit: str) -> str:
    return _row(
        kind,
        name,
        pair,
        est.point,
        est.lo,
        est.hi,
        est.n,
        f"{est.seed_range[0]}:{est.seed_range[1]}",
        unit,
    )


def result_csv_text(result: ExperimentResult) -> str:
    pair = f"{result.pair[0]}|{result.pair[1]}"
    lines = [RESULT_COLUMNS]
    lines.append(_estimate_row("estimate", "delta_bar", pair, result.delta_bar, "statistic units"))
    lines.append(_estimate_row("estimate", "C", pair, result.c_bound, "metric units"))
    if result.rho.identifiable:
        lines.append(_estimate_row("estimate", "rho", pair, result.rho.estimate, "ratio"))
    else:
        lines.append(_row("estimate", "rho", pair, "unidentifiable", "", "", "", "", "ratio"))
    for name, value, unit in result.report.rows():
        lines.append(_row("bound", name, pair, value, "", "", "", "", unit))
    lines.append(_row("empirical", "tv", pair, result.empirical_tv, "", "", "", "", "probability"))
    lines.append(_estimate_row("empirical", "mi_bits", pair, result.empirical_mi, "bits"))
    lines.append(_estimate_row("empirical", "accuracy", pair, result.empirical_accuracy, "probability"))
    for layer, mi, hw in zip(result.dpi.layers, result.dpi.mi_bits, result.dpi.ci_halfwidth):
        lines.append(_row("dpi", f"mi_{layer}", pair, mi, mi - hw, mi + hw, "", "", "bits"))
    lines.append(_row("soundness", "mi_sound", pair, result.mi_sound, "", "", "", "", "flag"))
    lines.append(_row("soundness", "accuracy_sound", pair, result.accuracy_sound, "", "", "", "", "flag"))
    lines.append(
        _row("soundness", "dpi_nonincreasing", pair, result.dpi.nonincreasing_ok, "", "", "", "", "flag")
    )
    return "\n".join(lines) + "\n"


def _est_line(name: str, est: PairEstimate) -> str:
    return (
        f"  {name:<12} point={_fmt(est.point)}  ci99=[{_fmt(est.lo)}, {_fmt(est.hi)}]"
        f"  n={est.n}"
    )


def report_text(result: ExperimentResult) -> str:
    lines = ["leakage report", "=" * 14]
    lines.append(f"pair: {result.pair[0]} vs {result.pair[1]}")
    lines.append(f"trials: {result.trials}  seed: {result.seed}")
    lines.append("")
    lines.append("estimates (99% CI)")
    lines.append(_est_line("delta_bar", result.delta_bar))
    lines.append(_est_line("C", result.c_bound))
    if result.rho.identifiable:
        lines.append(_est_line("rho", result.rho.estimate))
    else:
        lines.append("  rho          unidentifiable (network-layer gap CI includes 0)")
    lines.append("")
    if result.vacuous_reason is not None:
        lines.append(f"report is vacuous: {result.vacuous_reason}")
    inputs = result.report.inputs
    lines.append("bound inputs (CI-conservative)")
    lines.append(
        f"  delta_bar={_fmt(inputs.delta_bar)}  C={_fmt(inputs.C)}  "
        f"L_phi={_fmt(inputs.L_phi)}  rho={_fmt(inputs.rho)}  M={_fmt(inputs.M)}  "
        f"priors=({_fmt(inputs.prior_x)}, {_fmt(inputs.prior_x2)})"
    )
    lines.append("")
    lines.append("bounds")
    for name, value, unit in result.report.rows():
        lines.append(f"  {name:<24} {_fmt(value):<24} {unit}")
    lines.append("")
    lines.append("empirical (observation layer)")
    lines.append(f"  tv={_fmt(result.empirical_tv)}")
    lines.append(_est_line("mi_bits", result.empirical_mi))
    lines.append(_est_line("accuracy", result.empirical_accuracy))
    lines.append("")
    lines.append("per-layer MI (bits)")
    for layer, mi, hw in zip(result.dpi.layers, result.dpi.mi_bits, result.dpi.ci_halfwidth):
        lines.append(f"  {layer:<12} {_fmt(mi)} +/- {_fmt(hw)}")
    lines.append("")
    lines.append("soundness")
    lines.append(f"  mi_lb <= empirical mi (CI lo): {_fmt(result.mi_sound)}")
    lines.append(f"  acc_lb <= empirical accuracy (CI hi): {_fmt(result.accuracy_sound)}")
    lines.append(f"  dpi nonincreasing: {_fmt(result.dpi.nonincreasing_ok)}")
    return "\n".join(lines) + "\n"


LAYERS_COLUMNS = "trial,layer,index,time_s,length_bytes,direction"


def layers_csv_text(cfg: ScenarioConfig) -> str:
    """Re-run every trial and dump the per-layer packet sequences.

    The trial column is a global counter in label-major order (label index
    times trials, plus the per-label trial index).
    """
    lines = [LAYERS_COLUMNS]
    for li, lab in enumerate(cfg.labels):
        profile = cfg.profiles[lab.name]
        for t in range(cfg.trials):
            s = trial_seed(cfg.seed, t)
            run = run_chain(lab, profile, cfg.configs, cfg.window, s)
            global_trial = li * cfg.trials + t
            for layer_name, seq in (
                ("plaintext", run.plaintext),
                ("ciphertext", run.ciphertext),
                ("arrival", run.arrival),
            ):
                for i in range(len(seq)):
                    lines.append(
                        _row(
                            global_trial,
                            layer_name,
                            i,
                            float(seq.times[i]),
                            int(seq.lengths[i]),
                            "up" if int(seq.dirs[i]) == UP else "down",
                        )
                    )
    return "\n".join(lines) + "\n"


PARETO_COLUMNS = (
    "index,pad_policy,pad_target,added_delay_s,cover_rate,bandwidth_overhead,"
    "added_latency_s,throughput_ratio,feasible,pareto,best,empirical_mi_bits,"
    "mi_lb_bits,condition_v_ok,c_estimate"
)


def pareto_csv_text(sweep: SweepResult) -> str:
    lines = [PARETO_COLUMNS]
    for i, p in enumerate(sweep.points):
        lines.append(
            _row(
                i,
                p.defense.pad_policy or "",
                p.defense.pad_target if p.defense.pad_target is not None else "",
                p.defense.added_delay,
                p.defense.cover_rate,
                p.efficiency.bandwidth_overhead,
                p.efficiency.added_latency,
                p.efficiency.throughput_ratio,
                p.feasible,
                p.pareto,
                i == sweep.best_index,
                p.empirical_mi_bits,
                p.report.mi_lb_bits,
                p.report.condition_v_ok,
                p.c_point,
            )
        )
    return "\n".join(lines) + "\n"


DPI_COLUMNS = "layer,mi_bits,ci_halfwidth"


def dpi_csv_text(dpi: DpiResult) -> str:
    lines = [DPI_COLUMNS]
    for layer, mi, hw in zip(dpi.layers, dpi.mi_bits, dpi.ci_halfwidth):
        lines.append(_row(layer, mi, hw))
    return "\n".join(lines) + "\n"


MULTISESSION_COLUMNS = (
    "sessions,accuracy,acc_lo,acc_hi,pe_envelope,mi_accumulated_ub_bits"
)


def multisession_csv_text(ms: MultiSessionResult) -> str:
    lines = [MULTISESSION_COLUMNS]
    for row in ms.rows:
        lines.append(
            _row(
                row.sessions,
                row.accuracy,
                row.acc_lo,
                row.acc_hi,
                row.pe_envelope,
                row.mi_accumulated_ub_bits,
            )
        )
    return "\n".join(lines) + "\n"


def oracle_text(result: OracleSuiteResult) -> str:
    lines = [
        "oracle verification suite",
        f"channels: {result.channels}  statistics per channel: {result.stats_per_channel}",
    ]
    for name, count in result.checks.items():
        lines.append(f"  {name:<28} {count} checks")
    if result.ok():
        lines.append("all inequalities hold")
    else:
        lines.append(f"VIOLATIONS ({len(result.violations)} shown):")
        for v in result.violations:
            lines.append(f"  {v}")
    return "\n".join(lines) + "\n"
