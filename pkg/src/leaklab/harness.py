"""Config-driven experiment runner.

One collection pass per scenario gathers, per trial and per label, the
statistic at the plaintext and arrival layers, the observer statistic, the
plaintext-to-arrival trace deviation, and the sender-side byte/latency
figures.  Every estimate, bound, empirical quantity and soundness comparison
derives from that matrix, so a scenario's numbers are mutually consistent
and reproducible regardless of worker count.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .bounds import (
    BoundInputs,
    LeakageReport,
    build_report,
    multi_session_projection,
    tv_lower_bound_from_expectation,
    accuracy_from_tv,
    bhattacharyya,
)
from .channel import ChainConfigs, run_chain
from .config import DefenseParams, ScenarioConfig, SweepSpec
from .discrete import (
    DiscreteChannel,
    exact_bayes_error,
    exact_chernoff,
    exact_mi,
    exact_tv,
    product_channel,
    random_channel,
)
from .errors import ValidationError
from .estimators import (
    PairEstimate,
    RhoEstimate,
    Z99,
    bayes_accuracy,
    default_bins,
    empirical_tv,
    gap_estimate,
    mean_estimate,
    shared_edges,
)
from .seeding import trial_seed
from .traffic import SemanticLabel, TrafficProfile
from .trajectory import (
    ObservationStatistic,
    StatisticDescriptor,
    default_statistics,
    embed,
    eval_observation_statistic,
    eval_statistic,
    metric_d,
)

LAYER_NAMES = ("plaintext", "arrival", "observation")
DPI_BATCHES = 10
EVAL_TRIAL_OFFSET = 1 << 20  # multisession evaluation seeds, disjoint from training


@dataclass(frozen=True, eq=False)
class ChainSamples:
    """Per-trial collected values for one label."""

    phi_p: np.ndarray
    phi_n: np.ndarray
    psi_y: np.ndarray
    deviation: np.ndarray
    cipher_bytes: np.ndarray
    arrival_mean_time: np.ndarray


def statistics_for(cfg: ScenarioConfig) -> tuple[StatisticDescriptor, ObservationStatistic]:
    registry = default_statistics(cfg.metric, cfg.g_cap)
    phi = registry[cfg.phi_key]
    psi = ObservationStatistic(kind=cfg.psi_key, s_cap=cfg.metric.s_cap, g_cap=cfg.g_cap)
    return phi, psi


def _collect_chunk(args) -> np.ndarray:
    (label, profile, configs, window, seed, lo, hi, phi, psi, metric) = args
    rows = np.empty((hi - lo, 6))
    for i, t in enumerate(range(lo, hi)):
        s = trial_seed(seed, t)
        run = run_chain(label, profile, configs, window, s)
        z_p = embed(run.plaintext, window)
        z_n = embed(run.arrival, window)
        rows[i, 0] = eval_statistic(phi, z_p)
        rows[i, 1] = eval_statistic(phi, z_n)
        rows[i, 2] = eval_observation_statistic(psi, run.features)
        rows[i, 3] = metric_d(z_p, z_n, metric)
        rows[i, 4] = run.ciphertext.total_bytes()
        rows[i, 5] = float(run.arrival.times.mean()) if len(run.arrival) else 0.0
    return rows


def collect_samples(
    label: SemanticLabel,
    profile: TrafficProfile,
    configs: ChainConfigs,
    window: float,
    trials: int,
    seed: int,
    phi: StatisticDescriptor,
    psi: ObservationStatistic,
    metric,
    trial_offset: int = 0,
    workers: int = 1,
) -> ChainSamples:
    """Run ``trials`` seeded chains for one label and collect the matrix.

    Trials are split into index ranges; results are merged in trial order,
    so the output is byte-identical for any worker count.
    """
    bounds = np.linspace(trial_offset, trial_offset + trials, max(1, workers) * 4 + 1)
    edges = sorted(set(int(b) for b in bounds))
    chunks = [
        (label, profile, configs, window, seed, lo, hi, phi, psi, metric)
        for lo, hi in zip(edges[:-1], edges[1:])
        if hi > lo
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_collect_chunk, chunks))
    else:
        parts = [_collect_chunk(c) for c in chunks]
    rows = np.vstack(parts)
    return ChainSamples(
        phi_p=rows[:, 0],
        phi_n=rows[:, 1],
        psi_y=rows[:, 2],
        deviation=rows[:, 3],
        cipher_bytes=rows[:, 4],
        arrival_mean_time=rows[:, 5],
    )


def _collect_all(
    cfg: ScenarioConfig,
    configs: ChainConfigs,
    workers: int,
    trials: int | None = None,
    trial_offset: int = 0,
) -> dict[str, ChainSamples]:
    phi, psi = statistics_for(cfg)
    n = trials if trials is not None else cfg.trials
    return {
        lab.name: collect_samples(
            lab,
            cfg.profiles[lab.name],
            configs,
            cfg.window,
            n,
            cfg.seed,
            phi,
            psi,
            cfg.metric,
            trial_offset=trial_offset,
            workers=workers,
        )
        for lab in cfg.labels
    }


def _best_pair(
    cfg: ScenarioConfig, samples: dict[str, ChainSamples]
) -> tuple[SemanticLabel, SemanticLabel]:
    """The semantic pair with the largest protocol-layer gap estimate."""
    best = None
    for i, a in enumerate(cfg.labels):
        for b in cfg.labels[i + 1 :]:
            gap = abs(samples[a.name].phi_p.mean() - samples[b.name].phi_p.mean())
            if best is None or gap > best[0]:
                best = (gap, a, b)
    assert best is not None
    return best[1], best[2]


def plugin_mi_with_priors(
    per_label_values: list[np.ndarray], priors: np.ndarray, bins: int
) -> float:
    """Plug-in MI with known priors: joint[i] = prior_i * hist_i / n_i, bits."""
    pooled = np.concatenate(per_label_values)
    edges = shared_edges(pooled, bins)
    joint = np.vstack(
        [
            priors[i] * (np.histogram(v, bins=edges)[0] / max(1, v.size))
            for i, v in enumerate(per_label_values)
        ]
    )
    px = joint.sum(axis=1, keepdims=True)
    py = joint.sum(axis=0, keepdims=True)
    mask = joint > 0
    mi = float((joint[mask] * np.log2(joint[mask] / (px @ py)[mask])).sum())
    return max(0.0, mi)


def _batched_mi(
    per_label_values: list[np.ndarray], priors: np.ndarray, bins: int, batches: int
) -> PairEstimate:
    """Plug-in MI with a CI from disjoint trial batches (fixed bin edges)."""
    n = min(v.size for v in per_label_values)
    batches = min(batches, n)
    splits = np.linspace(0, n, batches + 1).astype(int)
    vals = []
    for lo, hi in zip(splits[:-1], splits[1:]):
        if hi > lo:
            vals.append(
                plugin_mi_with_priors([v[lo:hi] for v in per_label_values], priors, bins)
            )
    arr = np.array(vals)
    return mean_estimate(arr, (0, len(vals)))


@dataclass(frozen=True)
class DpiResult:
    """Per-layer MI of the label against the matched statistic."""

    layers: tuple[str, ...]
    mi_bits: tuple[float, ...]
    ci_halfwidth: tuple[float, ...]
    nonincreasing_ok: bool


def _dpi_series(
    cfg: ScenarioConfig, samples: dict[str, ChainSamples]
) -> DpiResult:
    priors = np.array([lab.prior for lab in cfg.labels])
    bins = default_bins(cfg.trials)
    mi_pts = []
    halfwidths = []
    for attr in ("phi_p", "phi_n", "psi_y"):
        per_label = [getattr(samples[lab.name], attr) for lab in cfg.labels]
        est = _batched_mi(per_label, priors, bins, DPI_BATCHES)
        mi_pts.append(est.point)
        halfwidths.append(est.hi - est.point)
    ok = all(
        mi_pts[i + 1] <= mi_pts[i] + 2.0 * max(halfwidths[i], halfwidths[i + 1])
        for i in range(len(mi_pts) - 1)
    )
    return DpiResult(
        layers=LAYER_NAMES,
        mi_bits=tuple(mi_pts),
        ci_halfwidth=tuple(halfwidths),
        nonincreasing_ok=ok,
    )


@dataclass(frozen=True)
class ExperimentResult:
    """Everything run_scenario measures, estimates and derives."""

    pair: tuple[str, str]
    delta_bar: PairEstimate
    c_bound: PairEstimate
    rho: RhoEstimate
    report: LeakageReport
    vacuous_reason: str | None
    empirical_tv: float
    empirical_mi: PairEstimate
    empirical_accuracy: PairEstimate
    dpi: DpiResult
    mi_sound: bool
    accuracy_sound: bool
    trials: int
    seed: int
    runtime_s: float

    def soundness_ok(self) -> bool:
        return self.mi_sound and self.accuracy_sound and self.dpi.nonincreasing_ok


def _conservative_inputs(
    delta_est: PairEstimate,
    c_est: PairEstimate,
    rho_est: RhoEstimate,
    phi: StatisticDescriptor,
    pair: tuple[SemanticLabel, SemanticLabel],
) -> tuple[BoundInputs | None, str | None]:
    """CI-conservative endpoints: low gap, high deviation, low preservation.

    The equal-prior clause of the bound consumes the observer statistic's
    gap, which is normalized by the statistic bound M, so delta_bar enters
    in units of M.
    """
    if not rho_est.identifiable:
        return None, "rho unidentifiable: network-layer gap CI includes 0"
    delta_lo = min(2.0, max(0.0, delta_est.lo) / phi.bound)
    if delta_lo <= 0.0:
        return None, "delta_bar CI includes 0: pair not distinguishable at this n"
    rho_lo = rho_est.estimate.lo
    if rho_lo <= 0.0:
        return None, "rho CI includes 0: observer gap not resolved at this n"
    return (
        BoundInputs(
            delta_bar=delta_lo,
            C=max(0.0, c_est.hi),
            L_phi=phi.lipschitz,
            rho=min(1.0, rho_lo),
            M=1.0,
            prior_x=pair[0].prior,
            prior_x2=pair[1].prior,
        ),
        None,
    )


def _vacuous_report(pair: tuple[SemanticLabel, SemanticLabel], phi: StatisticDescriptor) -> LeakageReport:
    inputs = BoundInputs(
        delta_bar=0.0,
        C=0.0,
        L_phi=phi.lipschitz,
        rho=1.0,
        M=1.0,
        prior_x=pair[0].prior,
        prior_x2=pair[1].prior,
    )
    return build_report(inputs)


def run_scenario(cfg: ScenarioConfig, workers: int = 1) -> ExperimentResult:
    """Estimate the bound parameters, build the report, and cross-check it
    against empirical plug-in quantities at the observation layer.
    """
    cfg.validate()
    started = time.perf_counter()
    phi, _psi = statistics_for(cfg)
    samples = _collect_all(cfg, cfg.configs, workers)
    a, b = _best_pair(cfg, samples)
    seed_range = (cfg.seed, cfg.trials)

    delta_est = gap_estimate(samples[a.name].phi_p, samples[b.name].phi_p, seed_range)
    c_est = None
    for lab in cfg.labels:
        est = mean_estimate(samples[lab.name].deviation, seed_range)
        if c_est is None or est.point > c_est.point:
            c_est = est

    num = gap_estimate(samples[a.name].psi_y, samples[b.name].psi_y, seed_range)
    den = gap_estimate(samples[a.name].phi_n, samples[b.name].phi_n, seed_range)
    if den.ci_excludes_zero():
        point = min(1.0, max(0.0, num.point / den.point))
        rho_est = RhoEstimate(
            identifiable=True,
            estimate=PairEstimate(
                point=point,
                lo=min(1.0, max(0.0, num.lo) / den.hi),
                hi=min(1.0, max(0.0, num.hi) / den.lo),
                n=num.n,
                seed_range=seed_range,
            ),
            numerator=num,
            denominator=den,
        )
    else:
        rho_est = RhoEstimate(identifiable=False, estimate=None, numerator=num, denominator=den)

    priors = np.array([lab.prior for lab in cfg.labels])
    bins = default_bins(cfg.trials)
    per_label_psi = [samples[lab.name].psi_y for lab in cfg.labels]
    emp_tv = empirical_tv(samples[a.name].psi_y, samples[b.name].psi_y, bins)
    emp_mi = _batched_mi(per_label_psi, priors, bins, DPI_BATCHES)

    pooled_labels = np.concatenate(
        [np.full(samples[lab.name].psi_y.size, lab.id) for lab in cfg.labels]
    )
    pooled_values = np.concatenate(per_label_psi)
    acc_point = bayes_accuracy(pooled_labels, pooled_values, bins, holdout=0.3)
    n_test = sum(int(math.ceil(0.3 * samples[lab.name].psi_y.size)) for lab in cfg.labels)
    acc_se = math.sqrt(max(acc_point * (1.0 - acc_point), 1e-12) / n_test)
    emp_acc = PairEstimate(
        point=acc_point,
        lo=acc_point - Z99 * acc_se,
        hi=acc_point + Z99 * acc_se,
        n=n_test,
        seed_range=seed_range,
    )

    inputs, vacuous_reason = _conservative_inputs(delta_est, c_est, rho_est, phi, (a, b))
    if inputs is None:
        report = _vacuous_report((a, b), phi)
    else:
        report = build_report(inputs, empirical_mi_bits=emp_mi.point)

    dpi = _dpi_series(cfg, samples)
    mi_sound = report.mi_lb_bits <= max(0.0, emp_mi.lo) + 1e-12 or not report.condition_v_ok
    accuracy_sound = report.acc_lb <= min(1.0, max(0.5, emp_acc.hi)) + 1e-12

    return ExperimentResult(
        pair=(a.name, b.name),
        delta_bar=delta_est,
        c_bound=c_est,
        rho=rho_est,
        report=report,
        vacuous_reason=vacuous_reason,
        empirical_tv=emp_tv,
        empirical_mi=emp_mi,
        empirical_accuracy=emp_acc,
        dpi=dpi,
        mi_sound=mi_sound,
        accuracy_sound=accuracy_sound,
        trials=cfg.trials,
        seed=cfg.seed,
        runtime_s=time.perf_counter() - started,
    )


def dpi_check(cfg: ScenarioConfig, workers: int = 1) -> DpiResult:
    """Per-layer MI series with the non-increase comparison applied."""
    cfg.validate()
    samples = _collect_all(cfg, cfg.configs, workers)
    return _dpi_series(cfg, samples)


# ---------------------------------------------------------------------------
# Defense sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EfficiencyMetrics:
    """Defense cost on matched seeds against the undefended baseline.

    bandwidth_overhead: extra sender-side bytes / baseline bytes
    added_latency: shift of the mean arrival time, seconds
    throughput_ratio: baseline bytes / defended bytes (goodput fraction)
    """

    bandwidth_overhead: float
    added_latency: float
    throughput_ratio: float


def _efficiency(
    defended: dict[str, ChainSamples], baseline: dict[str, ChainSamples]
) -> EfficiencyMetrics:
    def_bytes = float(np.concatenate([s.cipher_bytes for s in defended.values()]).mean())
    base_bytes = float(np.concatenate([s.cipher_bytes for s in baseline.values()]).mean())
    def_t = float(np.concatenate([s.arrival_mean_time for s in defended.values()]).mean())
    base_t = float(np.concatenate([s.arrival_mean_time for s in baseline.values()]).mean())
    overhead = max(0.0, (def_bytes - base_bytes) / base_bytes) if base_bytes else 0.0
    return EfficiencyMetrics(
        bandwidth_overhead=overhead,
        added_latency=def_t - base_t,
        throughput_ratio=base_bytes / def_bytes if def_bytes else 1.0,
    )


@dataclass(frozen=True)
class SweepPoint:
    defense: DefenseParams
    efficiency: EfficiencyMetrics
    report: LeakageReport
    vacuous_reason: str | None
    empirical_mi_bits: float
    c_point: float
    feasible: bool
    pareto: bool = False


@dataclass(frozen=True)
class SweepResult:
    points: tuple[SweepPoint, ...]
    beta_max: float
    dt_max: float
    best_index: int | None  # feasible point with minimal empirical MI
    nearest_infeasible_index: int | None  # set when nothing is feasible


def _pareto_mask(points: list[tuple[float, float, float]]) -> list[bool]:
    mask = []
    for i, p in enumerate(points):
        dominated = any(
            all(q[k] <= p[k] for k in range(3)) and any(q[k] < p[k] for k in range(3))
            for j, q in enumerate(points)
            if j != i
        )
        mask.append(not dominated)
    return mask


def defense_sweep(cfg: ScenarioConfig, workers: int = 1) -> SweepResult:
    """Evaluate a defense grid under efficiency constraints.

    Every grid point runs the scenario with the defense applied on the same
    trial seeds, so efficiency and leakage changes are attributable to the
    defense alone.  Output marks feasibility against (beta_max, dt_max), the
    feasible point minimizing empirical MI, and the Pareto frontier over
    (overhead, latency, MI).
    """
    cfg.validate()
    if cfg.sweep is None:
        raise ValidationError("defense_sweep: scenario has no [sweep] section")
    spec: SweepSpec = cfg.sweep
    phi, _psi = statistics_for(cfg)
    priors = np.array([lab.prior for lab in cfg.labels])
    bins = default_bins(cfg.trials)

    baseline = _collect_all(cfg, cfg.configs, workers)

    points: list[SweepPoint] = []
    for theta in spec.grid:
        theta.validate()
        defended_cfg = cfg.configs.with_defense(
            pad_policy=theta.pad_policy,
            pad_target=theta.pad_target,
            added_delay=theta.added_delay,
            cover_rate=theta.cover_rate,
        )
        samples = baseline if theta.is_null() else _collect_all(cfg, defended_cfg, workers)
        a, b = _best_pair(cfg, samples)
        seed_range = (cfg.seed, cfg.trials)
        delta_est = gap_estimate(samples[a.name].phi_p, samples[b.name].phi_p, seed_range)
        c_est = None
        for lab in cfg.labels:
            est = mean_estimate(samples[lab.name].deviation, seed_range)
            if c_est is None or est.point > c_est.point:
                c_est = est
        num = gap_estimate(samples[a.name].psi_y, samples[b.name].psi_y, seed_range)
        den = gap_estimate(samples[a.name].phi_n, samples[b.name].phi_n, seed_range)
        if den.ci_excludes_zero():
            rho_est = RhoEstimate(
                identifiable=True,
                estimate=PairEstimate(
                    point=min(1.0, max(0.0, num.point / den.point)),
                    lo=min(1.0, max(0.0, num.lo) / den.hi),
                    hi=min(1.0, max(0.0, num.hi) / den.lo),
                    n=num.n,
                    seed_range=seed_range,
                ),
                numerator=num,
                denominator=den,
            )
        else:
            rho_est = RhoEstimate(False, None, num, den)
        inputs, reason = _conservative_inputs(delta_est, c_est, rho_est, phi, (a, b))
        emp_mi = plugin_mi_with_priors(
            [samples[lab.name].psi_y for lab in cfg.labels], priors, bins
        )
        report = build_report(inputs, emp_mi) if inputs is not None else _vacuous_report((a, b), phi)
        eff = _efficiency(samples, baseline)
        feasible = (
            eff.bandwidth_overhead <= spec.beta_max + 1e-12
            and eff.added_latency <= spec.dt_max + 1e-12
        )
        points.append(
            SweepPoint(
                defense=theta,
                efficiency=eff,
                report=report,
                vacuous_reason=reason,
                empirical_mi_bits=emp_mi,
                c_point=c_est.point,
                feasible=feasible,
            )
        )

    pareto = _pareto_mask(
        [
            (p.efficiency.bandwidth_overhead, p.efficiency.added_latency, p.empirical_mi_bits)
            for p in points
        ]
    )
    points = [replace(p, pareto=flag) for p, flag in zip(points, pareto)]

    feasible_idx = [i for i, p in enumerate(points) if p.feasible]
    if feasible_idx:
        best = min(feasible_idx, key=lambda i: points[i].empirical_mi_bits)
        nearest = None
    else:
        best = None
        nearest = min(
            range(len(points)),
            key=lambda i: max(0.0, points[i].efficiency.bandwidth_overhead - spec.beta_max)
            + max(0.0, points[i].efficiency.added_latency - spec.dt_max),
        )
    return SweepResult(
        points=tuple(points),
        beta_max=spec.beta_max,
        dt_max=spec.dt_max,
        best_index=best,
        nearest_infeasible_index=nearest,
    )


# ---------------------------------------------------------------------------
# Multi-session accumulation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MultiSessionRow:
    sessions: int
    accuracy: float
    acc_lo: float
    acc_hi: float
    pe_envelope: float
    mi_accumulated_ub_bits: float


@dataclass(frozen=True)
class MultiSessionResult:
    rows: tuple[MultiSessionRow, ...]
    report: LeakageReport
    eval_groups: int


def multi_session_experiment(
    cfg: ScenarioConfig,
    sessions: tuple[int, ...] = (1, 2, 4, 8),
    eval_groups: int = 200,
    workers: int = 1,
) -> MultiSessionResult:
    """Classify label from k independent sessions, for each k in the grid.

    Training sessions use the scenario's trial range; evaluation groups use
    a disjoint trial range, and group g at budget k reads the first k of its
    reserved sessions, so accuracy curves across k share random numbers.
    """
    cfg.validate()
    if not sessions or min(sessions) < 1:
        raise ValidationError("multi_session: session grid must contain integers >= 1")
    max_k = max(sessions)

    scenario = run_scenario(cfg, workers=workers)
    train = _collect_all(cfg, cfg.configs, workers)
    eval_samples = _collect_all(
        cfg, cfg.configs, workers, trials=eval_groups * max_k, trial_offset=EVAL_TRIAL_OFFSET
    )

    bins = default_bins(cfg.trials)
    pooled = np.concatenate([train[lab.name].psi_y for lab in cfg.labels])
    edges = shared_edges(pooled, bins)
    log_lik = []
    for lab in cfg.labels:
        counts = np.histogram(train[lab.name].psi_y, bins=edges)[0].astype(np.float64)
        counts += 0.5  # keeps unseen bins finite under the log
        log_lik.append(np.log(counts / counts.sum()))
    log_lik = np.vstack(log_lik)
    log_prior = np.log(np.array([lab.prior for lab in cfg.labels]))

    rows = []
    for k in sorted(set(sessions)):
        correct = 0
        total = 0
        for i, lab in enumerate(cfg.labels):
            values = eval_samples[lab.name].psi_y.reshape(eval_groups, max_k)[:, :k]
            idx = np.clip(np.searchsorted(edges, values, side="right") - 1, 0, bins - 1)
            scores = log_prior[:, None] + log_lik[:, idx].sum(axis=2)
            predicted = np.argmax(scores, axis=0)
            correct += int((predicted == i).sum())
            total += eval_groups
        acc = correct / total
        se = math.sqrt(max(acc * (1.0 - acc), 1e-12) / total)
        projection = multi_session_projection(scenario.report, k)
        rows.append(
            MultiSessionRow(
                sessions=k,
                accuracy=acc,
                acc_lo=acc - Z99 * se,
                acc_hi=acc + Z99 * se,
                pe_envelope=projection.pe_envelope,
                mi_accumulated_ub_bits=projection.mi_accumulated_ub_bits,
            )
        )
    return MultiSessionResult(rows=tuple(rows), report=scenario.report, eval_groups=eval_groups)


@dataclass(frozen=True)
class OracleMultiSessionRow:
    sessions: int
    exact_error: float
    exponent_nats: float  # -(1/k) ln Pe


def oracle_multisession(
    ch: DiscreteChannel, sessions: tuple[int, ...]
) -> tuple[OracleMultiSessionRow, ...]:
    """Exact multi-session Bayes error by product-channel enumeration."""
    rows = []
    for k in sessions:
        pe = exact_bayes_error(product_channel(ch, k))
        exponent = -math.log(pe) / k if pe > 0 else math.inf
        rows.append(OracleMultiSessionRow(sessions=k, exact_error=pe, exponent_nats=exponent))
    return tuple(rows)


# ---------------------------------------------------------------------------
# Oracle verification suite
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OracleSuiteResult:
    channels: int
    stats_per_channel: int
    checks: dict[str, int]
    violations: tuple[str, ...]

    def ok(self) -> bool:
        return not self.violations


def oracle_suite(
    n_channels: int = 1000, stats_per_channel: int = 10, seed: int = 0
) -> OracleSuiteResult:
    """Certify every inequality in the bound chain against exact brute force.

    For random 2-input channels and random bounded statistics, checks with
    zero tolerance for violations (beyond float slack):

      expectation-gap bound   gap/(2M) <= TV
      bound-chain soundness   report's tv_lb <= TV and mi_lb <= exact MI
      MI-TV relation          exact MI >= (2/ln2) p p' TV^2
      accuracy identity       1 - Bayes error = (1 + TV)/2 at equal priors
      overlap chain           TV <= sqrt(1 - BC^2), Chernoff >= B >= -ln(1-TV^2)/2
    """
    rng = np.random.default_rng(seed)
    tol = 1e-9
    checks = {
        "expectation_gap_vs_tv": 0,
        "bound_chain_soundness": 0,
        "mi_tv_relation": 0,
        "accuracy_identity": 0,
        "overlap_chain": 0,
    }
    violations: list[str] = []

    def violate(msg: str) -> None:
        if len(violations) < 20:
            violations.append(msg)

    for c in range(n_channels):
        ch = random_channel(rng, n_inputs=2)
        p_row, q_row = ch.conditionals[0], ch.conditionals[1]
        tv = exact_tv(ch, 0, 1)
        mi = exact_mi(ch)

        for _ in range(stats_per_channel):
            m_bound = float(rng.uniform(0.1, 10.0))
            f = rng.uniform(-m_bound, m_bound, ch.n_outputs)
            gap = abs(float(f @ p_row) - float(f @ q_row))
            checks["expectation_gap_vs_tv"] += 1
            if gap / (2.0 * m_bound) > tv + tol:
                violate(f"channel {c}: gap/(2M) = {gap / (2 * m_bound)} > TV = {tv}")

            checks["bound_chain_soundness"] += 1
            tv_lb = tv_lower_bound_from_expectation(gap, m_bound)
            inputs = BoundInputs(
                delta_bar=gap / m_bound,
                C=0.0,
                L_phi=1.0,
                rho=1.0,
                M=1.0,
                prior_x=float(ch.priors[0]),
                prior_x2=float(ch.priors[1]),
            )
            report = build_report(inputs)
            if tv_lb > tv + tol or report.tv_lb > tv + tol:
                violate(f"channel {c}: tv_lb {max(tv_lb, report.tv_lb)} > TV {tv}")
            if report.mi_lb_bits > mi + tol:
                violate(f"channel {c}: mi_lb {report.mi_lb_bits} > exact MI {mi}")

        checks["mi_tv_relation"] += 1
        pairwise = (2.0 / math.log(2.0)) * float(ch.priors[0]) * float(ch.priors[1]) * tv**2
        if pairwise > mi + tol:
            violate(f"channel {c}: (2/ln2) p p' TV^2 = {pairwise} > MI = {mi}")

        checks["accuracy_identity"] += 1
        eq = DiscreteChannel(
            priors=np.array([0.5, 0.5]), conditionals=ch.conditionals.copy()
        )
        pe = exact_bayes_error(eq)
        if abs((1.0 - pe) - accuracy_from_tv(tv)) > 1e-12:
            violate(f"channel {c}: accuracy identity off by {(1 - pe) - accuracy_from_tv(tv)}")

        checks["overlap_chain"] += 1
        bc, b_dist = bhattacharyya(p_row, q_row)
        chern = exact_chernoff(p_row, q_row)
        if tv > math.sqrt(max(0.0, 1.0 - bc * bc)) + tol:
            violate(f"channel {c}: TV {tv} > sqrt(1 - BC^2) {math.sqrt(1 - bc * bc)}")
        if chern < b_dist - tol:
            violate(f"channel {c}: Chernoff {chern} < Bhattacharyya {b_dist}")
        if tv < 1.0 and b_dist < -0.5 * math.log(1.0 - tv * tv) - tol:
            violate(f"channel {c}: B {b_dist} < -0.5 ln(1 - TV^2)")

    return OracleSuiteResult(
        channels=n_channels,
        stats_per_channel=stats_per_channel,
        checks=checks,
        violations=tuple(violations),
    )
