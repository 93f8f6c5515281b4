"""Monte Carlo estimation of the leakage-bound parameters.

Everything here reduces to three primitives: seeded chain runs (common
random numbers across labels and layers), mean/gap estimates with normal
99% confidence intervals, and histogram plug-in estimates of total
variation, mutual information and Bayes accuracy.  The exact discrete
oracle in :mod:`leaklab.discrete` is the ground truth these estimators are
tested against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChainConfigs, encapsulate, encrypt, run_chain, transmit
from .errors import ValidationError
from .seeding import trial_seed
from .traffic import SemanticLabel, TrafficProfile, generate_session
from .trajectory import (
    MetricConfig,
    ObservationStatistic,
    StatisticDescriptor,
    embed,
    eval_observation_statistic,
    eval_statistic,
    metric_d,
)

Z99 = 2.5758293035489004  # two-sided 99% normal quantile

MIN_TRIALS = 100


@dataclass(frozen=True)
class PairEstimate:
    """A Monte Carlo point estimate with a 99% normal-approximation CI."""

    point: float
    lo: float
    hi: float
    n: int
    seed_range: tuple[int, int]
    degenerate: bool = False

    def ci_excludes_zero(self) -> bool:
        return self.lo > 0.0


def mean_estimate(samples: np.ndarray, seed_range: tuple[int, int]) -> PairEstimate:
    n = samples.shape[0]
    m = float(samples.mean())
    se = float(samples.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return PairEstimate(
        point=m, lo=m - Z99 * se, hi=m + Z99 * se, n=n, seed_range=seed_range
    )


def gap_estimate(
    xs: np.ndarray, ys: np.ndarray, seed_range: tuple[int, int]
) -> PairEstimate:
    """Estimate |E[xs] - E[ys]| from independent sample sets.

    The interval is centered on the absolute gap with the signed gap's
    standard error, so a pair with no true gap yields an interval
    containing 0.
    """
    n, n2 = xs.shape[0], ys.shape[0]
    g = float(xs.mean() - ys.mean())
    var = (xs.var(ddof=1) / n if n > 1 else 0.0) + (ys.var(ddof=1) / n2 if n2 > 1 else 0.0)
    se = math.sqrt(float(var))
    point = abs(g)
    degenerate = se == 0.0 and g == 0.0
    return PairEstimate(
        point=point,
        lo=point - Z99 * se,
        hi=point + Z99 * se,
        n=min(n, n2),
        seed_range=seed_range,
        degenerate=degenerate,
    )


def _require_trials(trials: int) -> None:
    if trials < MIN_TRIALS:
        raise ValidationError(f"trials must be >= {MIN_TRIALS}, got {trials}")


def protocol_layer_values(
    label: SemanticLabel,
    profile: TrafficProfile,
    phi: StatisticDescriptor,
    configs: ChainConfigs,
    window: float,
    trials: int,
    seed: int,
    trial_offset: int = 0,
) -> np.ndarray:
    """phi evaluated on the plaintext trace, one value per trial."""
    out = np.empty(trials)
    for t in range(trials):
        s = trial_seed(seed, trial_offset + t)
        msgs = generate_session(label, profile, window, s)
        xi_p = encapsulate(msgs, configs.protocol, s)
        out[t] = eval_statistic(phi, embed(xi_p, window))
    return out


def estimate_delta_bar(
    pair: tuple[SemanticLabel, SemanticLabel],
    profiles: tuple[TrafficProfile, TrafficProfile],
    phi: StatisticDescriptor,
    configs: ChainConfigs,
    window: float,
    trials: int,
    seed: int,
) -> PairEstimate:
    """Protocol-layer distinguishability of a semantic pair.

    Estimates |E[phi(z_P) | x] - E[phi(z_P) | x']| by independent-seed Monte
    Carlo.  A zero-gap, zero-variance pair is flagged degenerate rather
    than rejected.
    """
    _require_trials(trials)
    a, b = pair
    if a.prior <= 0 or b.prior <= 0:
        raise ValidationError("estimate_delta_bar: both priors must be positive")
    xs = protocol_layer_values(a, profiles[0], phi, configs, window, trials, seed)
    ys = protocol_layer_values(b, profiles[1], phi, configs, window, trials, seed)
    return gap_estimate(xs, ys, (seed, trials))


def deviation_values(
    label: SemanticLabel,
    profile: TrafficProfile,
    metric: MetricConfig,
    configs: ChainConfigs,
    window: float,
    trials: int,
    seed: int,
    trial_offset: int = 0,
) -> np.ndarray:
    """d(z_P, z_N) on matched seeds, one value per trial."""
    out = np.empty(trials)
    for t in range(trials):
        s = trial_seed(seed, trial_offset + t)
        msgs = generate_session(label, profile, window, s)
        xi_p = encapsulate(msgs, configs.protocol, s)
        xi_n = transmit(encrypt(xi_p, configs.encryption), configs.network, s)
        out[t] = metric_d(embed(xi_p, window), embed(xi_n, window), metric)
    return out


def estimate_C(
    labels: tuple[SemanticLabel, ...],
    profiles: dict[str, TrafficProfile],
    metric: MetricConfig,
    configs: ChainConfigs,
    window: float,
    trials: int,
    seed: int,
) -> PairEstimate:
    """Trace deviation bound: max over labels of E[d(z_P, z_N) | X = x].

    Each label's expectation uses matched seeds (the same session runs the
    whole chain); the returned estimate is the per-label mean with the
    largest point value, whose CI serves as the bound's CI.
    """
    _require_trials(trials)
    best: PairEstimate | None = None
    for label in labels:
        samples = deviation_values(
            label, profiles[label.name], metric, configs, window, trials, seed
        )
        est = mean_estimate(samples, (seed, trials))
        if best is None or est.point > best.point:
            best = est
    assert best is not None
    return best


@dataclass(frozen=True)
class RhoEstimate:
    """Observation-layer preservation ratio, or an explicit unidentifiable flag.

    ``estimate`` is None exactly when the network-layer gap's CI includes 0,
    in which case no ratio is reported.
    """

    identifiable: bool
    estimate: PairEstimate | None
    numerator: PairEstimate
    denominator: PairEstimate


def estimate_rho(
    pair: tuple[SemanticLabel, SemanticLabel],
    profiles: tuple[TrafficProfile, TrafficProfile],
    phi: StatisticDescriptor,
    psi: ObservationStatistic,
    configs: ChainConfigs,
    window: float,
    trials: int,
    seed: int,
) -> RhoEstimate:
    """Fraction of the network-layer expectation gap preserved by the observer.

    Matched seeds couple the numerator (psi on the feature record) and the
    denominator (phi on the arrival trace), and the ratio is clipped to
    [0, 1].  The CI divides conservative endpoints.
    """
    _require_trials(trials)
    phi_n = {0: np.empty(trials), 1: np.empty(trials)}
    psi_y = {0: np.empty(trials), 1: np.empty(trials)}
    for i, (label, profile) in enumerate(zip(pair, profiles)):
        for t in range(trials):
            s = trial_seed(seed, t)
            run = run_chain(label, profile, configs, window, s)
            phi_n[i][t] = eval_statistic(phi, embed(run.arrival, window))
            psi_y[i][t] = eval_observation_statistic(psi, run.features)
    num = gap_estimate(psi_y[0], psi_y[1], (seed, trials))
    den = gap_estimate(phi_n[0], phi_n[1], (seed, trials))
    if not den.ci_excludes_zero():
        return RhoEstimate(identifiable=False, estimate=None, numerator=num, denominator=den)
    point = min(1.0, max(0.0, num.point / den.point))
    lo = min(1.0, max(0.0, num.lo) / den.hi)
    hi = min(1.0, max(0.0, num.hi) / den.lo)
    est = PairEstimate(point=point, lo=lo, hi=hi, n=num.n, seed_range=(seed, trials))
    return RhoEstimate(identifiable=True, estimate=est, numerator=num, denominator=den)


# ---------------------------------------------------------------------------
# Histogram plug-in estimators
# ---------------------------------------------------------------------------


def default_bins(n: int) -> int:
    """Cube-root rule, clipped to [2, 256]."""
    return int(np.clip(math.ceil(n ** (1.0 / 3.0)), 2, 256))


def shared_edges(values: np.ndarray, bins: int) -> np.ndarray:
    lo = float(values.min())
    hi = float(values.max())
    if hi <= lo:
        lo -= 0.5
        hi += 0.5
    return np.linspace(lo, hi, bins + 1)


@dataclass(frozen=True, eq=False)
class BinnedFeature:
    """Shared-bin histograms of a scalar feature, one row per label."""

    edges: np.ndarray  # shape (bins + 1,)
    counts: np.ndarray  # shape (labels, bins)
    labels: tuple[int, ...]

    @classmethod
    def from_samples(
        cls, labels: np.ndarray, values: np.ndarray, bins: int
    ) -> "BinnedFeature":
        if bins < 2:
            raise ValidationError(f"bins must be >= 2, got {bins}")
        uniq = tuple(int(u) for u in np.unique(labels))
        edges = shared_edges(values, bins)
        counts = np.vstack(
            [np.histogram(values[labels == u], bins=edges)[0] for u in uniq]
        )
        return cls(edges=edges, counts=counts, labels=uniq)

    def mass(self) -> int:
        return int(self.counts.sum())


def empirical_tv(samples_x: np.ndarray, samples_x2: np.ndarray, bins: int) -> float:
    """Histogram total variation over shared equal-width bins."""
    if bins < 2:
        raise ValidationError(f"empirical_tv: bins must be >= 2, got {bins}")
    samples_x = np.asarray(samples_x, dtype=np.float64)
    samples_x2 = np.asarray(samples_x2, dtype=np.float64)
    if samples_x.size == 0 or samples_x2.size == 0:
        raise ValidationError("empirical_tv: both sample sets must be non-empty")
    edges = shared_edges(np.concatenate([samples_x, samples_x2]), bins)
    p = np.histogram(samples_x, bins=edges)[0] / samples_x.size
    q = np.histogram(samples_x2, bins=edges)[0] / samples_x2.size
    return 0.5 * float(np.abs(p - q).sum())


def plugin_mi(labels: np.ndarray, values: np.ndarray, bins: int) -> float:
    """Plug-in mutual information of (label, binned value), in bits."""
    labels = np.asarray(labels)
    values = np.asarray(values, dtype=np.float64)
    if np.unique(labels).size < 2:
        raise ValidationError("plugin_mi: need at least 2 labels")
    feature = BinnedFeature.from_samples(labels, values, bins)
    joint = feature.counts / feature.mass()
    px = joint.sum(axis=1, keepdims=True)
    py = joint.sum(axis=0, keepdims=True)
    mask = joint > 0
    mi = float((joint[mask] * np.log2(joint[mask] / (px @ py)[mask])).sum())
    return max(0.0, mi)


def bayes_accuracy(
    labels: np.ndarray, values: np.ndarray, bins: int, holdout: float = 0.3
) -> float:
    """Histogram Bayes classifier accuracy on a deterministic holdout split.

    Per label, the later ``holdout`` fraction of samples (in input order) is
    held out; the rest trains per-label histograms and priors.  Prediction
    is argmax of prior times bin likelihood, ties to the lower label.
    """
    if not (0.0 < holdout < 1.0):
        raise ValidationError(f"holdout fraction {holdout} outside (0, 1)")
    if bins < 2:
        raise ValidationError(f"bayes_accuracy: bins must be >= 2, got {bins}")
    labels = np.asarray(labels)
    values = np.asarray(values, dtype=np.float64)
    uniq = np.unique(labels)
    if uniq.size < 2:
        raise ValidationError("bayes_accuracy: need at least 2 labels")

    train_mask = np.zeros(labels.shape[0], dtype=bool)
    for u in uniq:
        idx = np.nonzero(labels == u)[0]
        n_hold = int(math.ceil(holdout * idx.size))
        if n_hold == 0 or n_hold == idx.size:
            raise ValidationError(f"bayes_accuracy: label {u} has an empty split")
        train_mask[idx[: idx.size - n_hold]] = True

    edges = shared_edges(values[train_mask], bins)
    likelihood = np.vstack(
        [
            np.histogram(values[train_mask & (labels == u)], bins=edges)[0]
            for u in uniq
        ]
    ).astype(np.float64)
    n_per_label = likelihood.sum(axis=1)
    priors = n_per_label / n_per_label.sum()
    likelihood /= n_per_label[:, None]

    test_values = values[~train_mask]
    test_labels = labels[~train_mask]
    bin_idx = np.clip(np.searchsorted(edges, test_values, side="right") - 1, 0, bins - 1)
    posterior = priors[:, None] * likelihood[:, bin_idx]
    all_zero = posterior.sum(axis=0) == 0
    posterior[:, all_zero] = priors[:, None]
    predicted = uniq[np.argmax(posterior, axis=0)]
    return float((predicted == test_labels).mean())
