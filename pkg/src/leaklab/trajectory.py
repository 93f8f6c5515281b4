"""Unified trajectory space: window embeddings, the trace metric, and the
registry of bounded statistics.

Packet sequences from any layer embed into one space (time, length,
direction triples on a fixed window) so a single metric can compare a
plaintext trace with its arrival-side counterpart, and so the same statistic
can be evaluated on either.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .channel import FeatureRecord, MarkedPacketSequence
from .errors import DegenerateSampleError, ValidationError
from .traffic import DOWN, UP

STATISTIC_KINDS = ("clipped_total_bytes", "updown_balance", "clipped_mean_gap")


@dataclass(frozen=True, eq=False)
class WindowedTrajectory:
    """A packet trace restricted to [0, T], with its layer tag discarded."""

    times: np.ndarray
    lengths: np.ndarray
    dirs: np.ndarray
    window: float

    def __len__(self) -> int:
        return self.times.shape[0]


def embed(pkts, window: float) -> WindowedTrajectory:
    """Embed a packet sequence (any layer) into the unified space.

    Packets after the window are dropped; the operation is idempotent.
    """
    if window <= 0:
        raise ValidationError(f"embed: window must be positive, got {window}")
    keep = pkts.times <= window
    return WindowedTrajectory(
        times=pkts.times[keep],
        lengths=pkts.lengths[keep],
        dirs=pkts.dirs[keep],
        window=float(window),
    )


@dataclass(frozen=True)
class MetricConfig:
    """Weights for the trace deviation metric.

    w_len weighs byte deviation (normalized by s_cap), w_cnt packet-count
    deviation, w_time seconds of timing deviation.
    """

    w_len: float = 1.0
    w_cnt: float = 0.05
    w_time: float = 0.1
    s_cap: float = 1e6
    alignment: str = "index_matched"

    def validate(self) -> None:
        for name in ("w_len", "w_cnt", "w_time"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValidationError(f"metric: {name} must be finite and non-negative")
        if self.w_len == 0 and self.w_cnt == 0 and self.w_time == 0:
            raise ValidationError("metric: at least one weight must be positive")
        if self.s_cap <= 0:
            raise ValidationError("metric: s_cap must be positive")
        if self.alignment != "index_matched":
            raise ValidationError(f"metric: unknown alignment {self.alignment!r}")


def metric_d(z: WindowedTrajectory, z2: WindowedTrajectory, cfg: MetricConfig) -> float:
    """Weighted trace deviation between two windowed trajectories.

    With both traces time-sorted and index-matched, and m = min(n, n'),

        d = w_len/s_cap * (sum_{i<=m} |l_i - l'_i|  +  sum tail lengths)
          + w_time      * (sum_{i<=m} |t_i - t'_i|  +  sum tail times)
          + w_cnt * |n - n'|

    where the tail sums run over the longer trace's unmatched entries.  This
    is the L1 distance between the traces zero-padded to a common length,
    plus the count term, which makes d a genuine pseudometric: symmetric,
    zero on identical traces, and triangle-inequality-safe even when counts
    differ (charging unmatched entries only through w_cnt is not).
    """
    cfg.validate()
    if z.window != z2.window:
        raise ValidationError(
            f"metric_d: window mismatch ({z.window} vs {z2.window})"
        )
    n, n2 = len(z), len(z2)
    m = min(n, n2)
    len_dev = float(np.abs(z.lengths[:m] - z2.lengths[:m]).sum())
    time_dev = float(np.abs(z.times[:m] - z2.times[:m]).sum())
    longer = z if n > n2 else z2
    len_dev += float(longer.lengths[m:].sum())
    time_dev += float(longer.times[m:].sum())
    return (
        cfg.w_len * len_dev / cfg.s_cap
        + cfg.w_cnt * abs(n - n2)
        + cfg.w_time * time_dev
    )


@dataclass(frozen=True)
class StatisticDescriptor:
    """A bounded statistic on trajectories with a declared stability modulus.

    ``lipschitz`` is the constant certified against ``metric`` by
    :func:`lipschitz_certificate`; see :func:`default_statistics` for the
    analytic values shipped with each kind.
    """

    kind: str
    bound: float  # values stay in [-bound, bound]
    lipschitz: float
    metric: MetricConfig
    g_cap: float = 1.0  # seconds; normalizer for clipped_mean_gap

    def validate(self) -> None:
        if self.kind not in STATISTIC_KINDS:
            raise ValidationError(
                f"statistic kind {self.kind!r} not one of {STATISTIC_KINDS}"
            )
        if self.bound <= 0:
            raise ValidationError("statistic: bound must be positive")
        if self.lipschitz <= 0:
            raise ValidationError("statistic: lipschitz must be positive")
        if self.g_cap <= 0:
            raise ValidationError("statistic: g_cap must be positive")
        self.metric.validate()


def eval_statistic(desc: StatisticDescriptor, z: WindowedTrajectory) -> float:
    """Evaluate a statistic; result is always within [-bound, bound].

    Empty-trajectory fallbacks: -bound for the byte and gap statistics
    (nothing observed reads as minimal volume / minimal spacing), 0 for the
    direction balance.
    """
    desc.validate()
    m = desc.bound
    n = len(z)
    if desc.kind == "clipped_total_bytes":
        if n == 0:
            return -m
        b = float(z.lengths.sum())
        return float(np.clip(2.0 * b / desc.metric.s_cap - 1.0, -m, m))
    if desc.kind == "updown_balance":
        if n == 0:
            return 0.0
        up = int((z.dirs == UP).sum())
        down = n - up
        return float(np.clip((up - down) / (up + down + 1.0), -m, m))
    # clipped_mean_gap
    if n < 2:
        return -m
    gap = float((z.times[-1] - z.times[0]) / (n - 1))
    return float(np.clip(2.0 * gap / desc.g_cap - 1.0, -m, m))


@dataclass(frozen=True)
class ObservationStatistic:
    """Mirror of a StatisticDescriptor computed from a FeatureRecord.

    Bound fixed at 1: observer-side statistics always map into [-1, 1].
    """

    kind: str
    s_cap: float = 1e6
    g_cap: float = 1.0

    def validate(self) -> None:
        if self.kind not in STATISTIC_KINDS:
            raise ValidationError(
                f"observation statistic kind {self.kind!r} not one of {STATISTIC_KINDS}"
            )
        if self.s_cap <= 0 or self.g_cap <= 0:
            raise ValidationError("observation statistic: caps must be positive")


def eval_observation_statistic(psi: ObservationStatistic, rec: FeatureRecord) -> float:
    """Evaluate an observer-side statistic from window aggregates.

    Same functional forms as :func:`eval_statistic`, read from the quantized
    and sampled record, so the value reflects exactly what the observer saw.
    """
    psi.validate()

    def need(field: str):
        value = getattr(rec, field)
        if value is None:
            raise ValidationError(
                f"observation statistic {psi.kind!r} requires feature 'aggregates' ({field})"
            )
        return value

    if psi.kind == "clipped_total_bytes":
        total = need("total_bytes")
        if need("packet_count") == 0:
            return -1.0
        return float(np.clip(2.0 * total / psi.s_cap - 1.0, -1.0, 1.0))
    if psi.kind == "updown_balance":
        up = need("up_count")
        down = need("down_count")
        if up + down == 0:
            return 0.0
        return float(np.clip((up - down) / (up + down + 1.0), -1.0, 1.0))
    count = need("packet_count")
    if count < 2:
        return -1.0
    gap = need("mean_interarrival")
    return float(np.clip(2.0 * gap / psi.g_cap - 1.0, -1.0, 1.0))


def default_statistics(
    metric: MetricConfig, g_cap: float = 1.0
) -> dict[str, StatisticDescriptor]:
    """The shipped statistics with their analytic Lipschitz constants.

    clipped_total_bytes, bound 1, L = 2/w_len:
        |phi(z) - phi(z')| <= (2/s_cap) |B(z) - B(z')| and the metric's
        length component (matched plus unmatched entries) bounds |dB| by
        (s_cap/w_len) d, so |dphi| <= (2/w_len) d for every pair.

    updown_balance, bound 1, L = 1/(2 w_cnt):
        one packet appended or removed moves the balance by at most 1/2 and
        costs at least w_cnt; k-packet changes cost proportionally more.
        The metric carries no direction term, so this constant is certified
        against samplers that perturb times, lengths and counts but do not
        relabel the direction of a kept packet (no finite constant exists
        for pure relabeling, which moves the balance at zero distance).

    clipped_mean_gap, bound 1, L = max(2/(g_cap w_time), 2/w_cnt):
        an endpoint time shift of dt moves the mean gap by at most dt
        (n >= 2), and count changes across the n < 2 fallback boundary are
        charged through w_cnt.
    """
    metric.validate()
    out: dict[str, StatisticDescriptor] = {}
    if metric.w_len > 0:
        out["clipped_total_bytes"] = StatisticDescriptor(
            kind="clipped_total_bytes",
            bound=1.0,
            lipschitz=2.0 / metric.w_len,
            metric=metric,
            g_cap=g_cap,
        )
    if metric.w_cnt > 0:
        out["updown_balance"] = StatisticDescriptor(
            kind="updown_balance",
            bound=1.0,
            lipschitz=1.0 / (2.0 * metric.w_cnt),
            metric=metric,
            g_cap=g_cap,
        )
    if metric.w_time > 0 and metric.w_cnt > 0:
        out["clipped_mean_gap"] = StatisticDescriptor(
            kind="clipped_mean_gap",
            bound=1.0,
            lipschitz=max(2.0 / (g_cap * metric.w_time), 2.0 / metric.w_cnt),
            metric=metric,
            g_cap=g_cap,
        )
    return out


PairSampler = Callable[[np.random.Generator], tuple[WindowedTrajectory, WindowedTrajectory]]


def _random_trajectory(
    rng: np.random.Generator, window: float, max_packets: int, max_length: int
) -> WindowedTrajectory:
    n = int(rng.integers(0, max_packets + 1))
    times = np.sort(rng.uniform(0.0, window, n))
    lengths = rng.integers(40, max_length + 1, n).astype(np.int64)
    dirs = np.where(rng.random(n) < 0.5, UP, DOWN).astype(np.int8)
    return WindowedTrajectory(times=times, lengths=lengths, dirs=dirs, window=window)


def perturbation_sampler(
    window: float = 10.0,
    max_packets: int = 60,
    max_length: int = 1500,
    preserve_directions: bool = False,
) -> PairSampler:
    """Random trajectory pairs exercising length, time and count changes.

    Modes cycle through: single length bump, single time shift, tail
    append/delete, and fully independent pairs.  With
    ``preserve_directions`` the second trace keeps the first's direction
    marks at matched indices (required when certifying direction-sensitive
    statistics against the direction-blind metric).
    """

    def sample(rng: np.random.Generator) -> tuple[WindowedTrajectory, WindowedTrajectory]:
        base = _random_trajectory(rng, window, max_packets, max_length)
        mode = int(rng.integers(0, 4))
        if mode == 0 and len(base):
            lengths = base.lengths.copy()
            i = int(rng.integers(0, len(base)))
            lengths[i] = max(1, lengths[i] + int(rng.integers(-max_length, max_length + 1)))
            other = WindowedTrajectory(base.times, lengths, base.dirs, window)
        elif mode == 1 and len(base):
            times = base.times.copy()
            i = int(rng.integers(0, len(base)))
            times[i] = float(np.clip(times[i] + rng.normal(0.0, window / 4), 0.0, window))
            order = np.argsort(times, kind="stable")
            other = WindowedTrajectory(times[order], base.lengths[order], base.dirs[order], window)
        elif mode == 2:
            k = int(rng.integers(1, 4))
            if len(base) and rng.random() < 0.5:
                keep = max(0, len(base) - k)
                other = WindowedTrajectory(
                    base.times[:keep], base.lengths[:keep], base.dirs[:keep], window
                )
            else:
                t_hi = float(base.times[-1]) if len(base) else 0.0
                extra_t = np.sort(rng.uniform(t_hi, window, k))
                extra_l = rng.integers(40, max_length + 1, k).astype(np.int64)
                extra_d = np.where(rng.random(k) < 0.5, UP, DOWN).astype(np.int8)
                other = WindowedTrajectory(
                    np.concatenate([base.times, extra_t]),
                    np.concatenate([base.lengths, extra_l]),
                    np.concatenate([base.dirs, extra_d]),
                    window,
                )
        else:
            other = _random_trajectory(rng, window, max_packets, max_length)
            if preserve_directions:
                m = min(len(base), len(other))
                dirs = other.dirs.copy()
                dirs[:m] = base.dirs[:m]
                other = WindowedTrajectory(other.times, other.lengths, dirs, window)
        return base, other

    return sample


@dataclass(frozen=True)
class CertificateResult:
    max_ratio: float
    declared: float
    trials: int
    passed: bool


def lipschitz_certificate(
    desc: StatisticDescriptor,
    metric: MetricConfig,
    sampler: PairSampler,
    trials: int,
    seed: int = 0,
) -> CertificateResult:
    """Empirical check that |phi(z) - phi(z')| / d(z, z') never exceeds the
    declared constant over sampled pairs.

    Pairs at zero distance with differing values fail immediately (infinite
    ratio); a sampler that only ever produces identical pairs is rejected.
    """
    desc.validate()
    metric.validate()
    rng = np.random.default_rng(seed)
    max_ratio = 0.0
    distinct = 0
    for _ in range(trials):
        z, z2 = sampler(rng)
        d = metric_d(z, z2, metric)
        dphi = abs(eval_statistic(desc, z) - eval_statistic(desc, z2))
        if d == 0.0:
            if dphi > 0.0:
                max_ratio = math.inf
                distinct += 1
                break
            continue
        distinct += 1
        max_ratio = max(max_ratio, dphi / d)
    if distinct == 0:
        raise DegenerateSampleError(
            "lipschitz_certificate: sampler produced only identical pairs"
        )
    passed = max_ratio <= desc.lipschitz * (1.0 + 1e-9)
    return CertificateResult(
        max_ratio=max_ratio, declared=desc.lipschitz, trials=trials, passed=passed
    )
