"""Causal operators of the transport chain.

Four seeded, pure operators turn an application message sequence into the
features an on-path observer records:

    encapsulate  messages -> plaintext packets (segmentation, headers)
    encrypt      plaintext -> ciphertext packets (length transform, delay)
    transmit     ciphertext -> arrival packets (latency, jitter, loss, reorder)
    observe      arrival packets -> feature record (sampling, quantization)

``run_chain`` composes them with per-layer seeds derived from one master
seed, so any layer can be recomputed independently.  Packet payloads are
never materialized: every downstream computation reads only times, lengths
and directions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ValidationError
from .seeding import layer_rng
from .traffic import DOWN, UP, MessageSequence, SemanticLabel, TrafficProfile, generate_session

LAYER_PLAINTEXT = "plaintext"
LAYER_CIPHERTEXT = "ciphertext"
LAYER_ARRIVAL = "arrival"

PAD_POLICIES = ("none", "pad_to_block", "pad_to_fixed", "random_pad")
FEATURE_FIELDS = ("lengths", "times", "directions", "aggregates")


@dataclass(frozen=True, eq=False)
class Packet:
    time: float
    length: int
    direction: int  # UP or DOWN


@dataclass(frozen=True, eq=False)
class MarkedPacketSequence:
    """Time-ordered packets at one layer of the chain."""

    times: np.ndarray  # float64, sorted non-decreasing
    lengths: np.ndarray  # int64, >= 1
    dirs: np.ndarray  # int8, UP/DOWN
    layer: str
    window: float
    provenance: tuple[int, int]  # (label id, seed)

    def __len__(self) -> int:
        return self.times.shape[0]

    def total_bytes(self) -> int:
        return int(self.lengths.sum())

    def packets(self) -> list[Packet]:
        return [
            Packet(float(t), int(l), int(d))
            for t, l, d in zip(self.times, self.lengths, self.dirs)
        ]

    @classmethod
    def from_packets(
        cls,
        packets: list[Packet],
        layer: str,
        window: float,
        provenance: tuple[int, int] = (0, 0),
    ) -> "MarkedPacketSequence":
        packets = sorted(packets, key=lambda p: p.time)
        return cls(
            times=np.array([p.time for p in packets], dtype=np.float64),
            lengths=np.array([p.length for p in packets], dtype=np.int64),
            dirs=np.array([p.direction for p in packets], dtype=np.int8),
            layer=layer,
            window=float(window),
            provenance=provenance,
        )


@dataclass(frozen=True)
class ProtocolConfig:
    """Segmentation and encapsulation of messages into packets."""

    mtu: int = 1500
    header_overhead: int = 40
    segmentation: str = "eager"  # "eager" | "nagle"
    nagle_delay: float = 0.005  # max coalescing hold, seconds (nagle only)
    pacing_jitter: float = 0.0  # std-dev of per-packet send jitter, seconds

    def validate(self) -> None:
        if self.mtu <= self.header_overhead:
            raise ValidationError(
                f"protocol: mtu {self.mtu} must exceed header_overhead {self.header_overhead}"
            )
        if self.header_overhead < 0:
            raise ValidationError("protocol: header_overhead must be non-negative")
        if self.segmentation not in ("eager", "nagle"):
            raise ValidationError(
                f"protocol: segmentation {self.segmentation!r} not one of ('eager', 'nagle')"
            )
        if self.nagle_delay < 0:
            raise ValidationError("protocol: nagle_delay must be non-negative")
        if self.pacing_jitter < 0:
            raise ValidationError("protocol: pacing_jitter must be non-negative")


@dataclass(frozen=True)
class EncryptionConfig:
    """Deterministic length transform plus a constant processing delay.

    The length map sends a plaintext length L to:

        none          L + record_overhead
        pad_to_block  block_size * ceil((L + record_overhead) / block_size)
        pad_to_fixed  pad_target   (inputs must fit: L + overhead <= target)
        random_pad    L + record_overhead + U{0..pad_max_extra}

    random_pad draws are keyed by (sequence seed, input length), so equal
    input lengths always map to equal output lengths within a run.
    """

    record_overhead: int = 29
    block_size: int = 64
    pad_policy: str = "pad_to_block"
    pad_target: int = 1600
    pad_max_extra: int = 255
    processing_delay: float = 0.0001

    def validate(self) -> None:
        if self.record_overhead < 0:
            raise ValidationError("encryption: record_overhead must be non-negative")
        if self.block_size < 1:
            raise ValidationError("encryption: block_size must be >= 1")
        if self.pad_policy not in PAD_POLICIES:
            raise ValidationError(
                f"encryption: pad_policy {self.pad_policy!r} not one of {PAD_POLICIES}"
            )
        if self.pad_policy == "pad_to_fixed" and self.pad_target < self.record_overhead + 1:
            raise ValidationError(
                "encryption: pad_target must be at least record_overhead + 1"
            )
        if self.pad_max_extra < 0:
            raise ValidationError("encryption: pad_max_extra must be non-negative")
        if self.processing_delay < 0:
            raise ValidationError("encryption: processing_delay must be non-negative")


@dataclass(frozen=True)
class NetworkConfig:
    """Arrival-path perturbations: latency, jitter, loss, reordering."""

    base_latency: float = 0.0005
    jitter: float = 0.0002  # std-dev of half-normal delay, seconds
    loss: float = 0.005  # in [0, 1); a lost packet arrives once, late
    retransmit_delay: float = 0.05
    reorder: float = 0.01  # in [0, 1); adjacent pairwise swap probability

    def validate(self) -> None:
        if self.base_latency < 0:
            raise ValidationError("network: base_latency must be non-negative")
        if self.jitter < 0:
            raise ValidationError("network: jitter must be non-negative")
        if not (0.0 <= self.loss < 1.0):
            raise ValidationError(f"network: loss {self.loss} outside [0, 1)")
        if self.retransmit_delay < 0:
            raise ValidationError("network: retransmit_delay must be non-negative")
        if not (0.0 <= self.reorder < 1.0):
            raise ValidationError(f"network: reorder {self.reorder} outside [0, 1)")


@dataclass(frozen=True)
class ObservationConfig:
    """What the on-path observer records, and how coarsely.

    Granules of 0 disable the corresponding quantization.
    """

    time_granule: float = 0.001  # seconds; arrival times floored to multiples
    length_granule: int = 0  # bytes; lengths rounded up to multiples
    keep_probability: float = 1.0  # per-packet sampling
    features: tuple[str, ...] = FEATURE_FIELDS

    def validate(self) -> None:
        if self.time_granule < 0:
            raise ValidationError("observation: time_granule must be non-negative")
        if self.length_granule < 0:
            raise ValidationError("observation: length_granule must be non-negative")
        if not (0.0 < self.keep_probability <= 1.0):
            raise ValidationError(
                f"observation: keep_probability {self.keep_probability} outside (0, 1]"
            )
        unknown = set(self.features) - set(FEATURE_FIELDS)
        if unknown:
            raise ValidationError(
                f"observation: unknown features {sorted(unknown)}; valid: {FEATURE_FIELDS}"
            )


@dataclass(frozen=True, eq=False)
class FeatureRecord:
    """Observer output: per-packet features plus window aggregates.

    Per-packet arrays are present only when the corresponding feature is
    enabled; aggregates are present only when "aggregates" is enabled.
    Everything is computed after sampling and quantization, on packets
    within [0, window].
    """

    window: float
    lengths: np.ndarray | None
    times: np.ndarray | None
    directions: np.ndarray | None
    total_bytes: int | None
    packet_count: int | None
    up_count: int | None
    down_count: int | None
    mean_interarrival: float | None  # 0.0 when fewer than 2 packets


def encapsulate(
    msgs: MessageSequence, cfg: ProtocolConfig, seed: int
) -> MarkedPacketSequence:
    """Segment messages into plaintext packets of length <= mtu.

    Eager mode emits each message's segments at the message time; nagle mode
    coalesces small writes per direction until a full payload accumulates or
    ``nagle_delay`` elapses.  Packet send times never precede the messages
    they carry.
    """
    cfg.validate()
    if len(msgs) and int(msgs.sizes.min()) < 1:
        raise ValidationError("encapsulate: message size must be >= 1 byte")

    capacity = cfg.mtu - cfg.header_overhead
    if cfg.segmentation == "eager":
        counts = np.ceil(msgs.sizes / capacity).astype(np.int64) if len(msgs) else np.empty(0, np.int64)
        total = int(counts.sum())
        times = np.repeat(msgs.times, counts)
        dirs = np.repeat(msgs.dirs, counts)
        lengths = np.full(total, cfg.mtu, dtype=np.int64)
        if total:
            last = np.cumsum(counts) - 1
            remainder = msgs.sizes - (counts - 1) * capacity
            lengths[last] = cfg.header_overhead + remainder
    else:
        times_l: list[float] = []
        lengths_l: list[int] = []
        dirs_l: list[int] = []
        for direction in (UP, DOWN):
            sel = msgs.dirs == direction
            buf = 0
            t0 = 0.0
            for t, s in zip(msgs.times[sel], msgs.sizes[sel]):
                t = float(t)
                if buf and t - t0 >= cfg.nagle_delay:
                    times_l.append(t0 + cfg.nagle_delay)
                    lengths_l.append(cfg.header_overhead + buf)
                    dirs_l.append(direction)
                    buf = 0
                if not buf:
                    t0 = t
                buf += int(s)
                while buf >= capacity:
                    times_l.append(t)
                    lengths_l.append(cfg.mtu)
                    dirs_l.append(direction)
                    buf -= capacity
                    t0 = t
            if buf:
                times_l.append(t0 + cfg.nagle_delay)
                lengths_l.append(cfg.header_overhead + buf)
                dirs_l.append(direction)
        times = np.array(times_l, dtype=np.float64)
        lengths = np.array(lengths_l, dtype=np.int64)
        dirs = np.array(dirs_l, dtype=np.int8)

    if cfg.pacing_jitter > 0 and times.shape[0]:
        rng = layer_rng(seed, "protocol")
        times = times + np.abs(rng.normal(0.0, cfg.pacing_jitter, times.shape[0]))

    order = np.argsort(times, kind="stable")
    return MarkedPacketSequence(
        times=times[order],
        lengths=lengths[order],
        dirs=dirs[order],
        layer=LAYER_PLAINTEXT,
        window=msgs.window,
        provenance=(msgs.label_id, int(seed)),
    )


def _g_len(lengths: np.ndarray, cfg: EncryptionConfig, seq_seed: int) -> np.ndarray:
    padded = lengths + cfg.record_overhead
    if cfg.pad_policy == "none":
        return padded
    if cfg.pad_policy == "pad_to_block":
        b = cfg.block_size
        return b * ((padded + b - 1) // b)
    if cfg.pad_policy == "pad_to_fixed":
        over = padded > cfg.pad_target
        if over.any():
            raise ValidationError(
                f"encrypt: input length {int(lengths[over][0])} + overhead exceeds "
                f"pad_target {cfg.pad_target}"
            )
        return np.full_like(padded, cfg.pad_target)
    # random_pad: one draw per distinct input length, keyed by the sequence
    # seed, so the transform is a deterministic function of length.
    out = padded.copy()
    for ell in np.unique(lengths):
        rng = layer_rng(seq_seed, "encrypt", stream=int(ell))
        extra = int(rng.integers(0, cfg.pad_max_extra + 1))
        out[lengths == ell] += extra
    return out


def encrypt(pkts: MarkedPacketSequence, cfg: EncryptionConfig) -> MarkedPacketSequence:
    """Apply the deterministic length transform and processing delay."""
    cfg.validate()
    if pkts.layer != LAYER_PLAINTEXT:
        raise ValidationError(f"encrypt: expected plaintext input, got {pkts.layer!r}")
    lengths = _g_len(pkts.lengths, cfg, pkts.provenance[1])
    return MarkedPacketSequence(
        times=pkts.times + cfg.processing_delay,
        lengths=lengths,
        dirs=pkts.dirs,
        layer=LAYER_CIPHERTEXT,
        window=pkts.window,
        provenance=pkts.provenance,
    )


def transmit(
    pkts: MarkedPacketSequence, cfg: NetworkConfig, seed: int
) -> MarkedPacketSequence:
    """Deliver ciphertext packets over a noisy path.

    arrival = send + base latency + half-normal jitter, plus one retransmit
    delay for lost packets (single-retransmit model: every packet arrives
    exactly once).  With reorder > 0, adjacent arrival pairs swap marks with
    that probability; output is re-sorted by arrival time.
    """
    cfg.validate()
    if pkts.layer != LAYER_CIPHERTEXT:
        raise ValidationError(f"transmit: expected ciphertext input, got {pkts.layer!r}")
    n = len(pkts)
    rng = layer_rng(seed, "network")
    lost = rng.random(n) < cfg.loss
    jit = np.abs(rng.normal(0.0, 1.0, n)) * cfg.jitter
    arrivals = pkts.times + cfg.base_latency + jit + lost * cfg.retransmit_delay

    order = np.argsort(arrivals, kind="stable")
    arrivals = arrivals[order]
    lengths = pkts.lengths[order].copy()
    dirs = pkts.dirs[order].copy()

    if cfg.reorder > 0 and n > 1:
        pairs = n // 2
        swap = rng.random(pairs) < cfg.reorder
        left = 2 * np.nonzero(swap)[0]
        right = left + 1
        lengths[left], lengths[right] = lengths[right].copy(), lengths[left].copy()
        dirs[left], dirs[right] = dirs[right].copy(), dirs[left].copy()

    if __debug__ and n:
        assert float((arrivals - pkts.times[order]).min()) >= 0.0

    return MarkedPacketSequence(
        times=arrivals,
        lengths=lengths,
        dirs=dirs,
        layer=LAYER_ARRIVAL,
        window=pkts.window,
        provenance=pkts.provenance,
    )


def observe(
    pkts: MarkedPacketSequence, cfg: ObservationConfig, seed: int
) -> FeatureRecord:
    """Extract the observer's feature record from the arrival sequence.

    Packets are sampled with ``keep_probability``, restricted to the session
    window, then quantized; every feature is computed from that retained
    view only.
    """
    cfg.validate()
    if pkts.layer != LAYER_ARRIVAL:
        raise ValidationError(f"observe: expected arrival input, got {pkts.layer!r}")
    rng = layer_rng(seed, "observe")
    keep = rng.random(len(pkts)) < cfg.keep_probability
    keep &= pkts.times <= pkts.window

    times = pkts.times[keep]
    lengths = pkts.lengths[keep]
    dirs = pkts.dirs[keep]

    if cfg.time_granule > 0:
        times = np.floor(times / cfg.time_granule) * cfg.time_granule
    if cfg.length_granule > 0:
        g = cfg.length_granule
        lengths = g * ((lengths + g - 1) // g)

    want = set(cfg.features)
    n = times.shape[0]
    if "aggregates" in want:
        total_bytes = int(lengths.sum())
        up = int((dirs == UP).sum())
        down = n - up
        gap = float((times[-1] - times[0]) / (n - 1)) if n >= 2 else 0.0
        aggregates = (total_bytes, n, up, down, gap)
    else:
        aggregates = (None, None, None, None, None)

    return FeatureRecord(
        window=pkts.window,
        lengths=lengths if "lengths" in want else None,
        times=times if "times" in want else None,
        directions=dirs if "directions" in want else None,
        total_bytes=aggregates[0],
        packet_count=aggregates[1],
        up_count=aggregates[2],
        down_count=aggregates[3],
        mean_interarrival=aggregates[4],
    )


def insert_cover(
    pkts: MarkedPacketSequence, rate: float, seed: int
) -> MarkedPacketSequence:
    """Insert dummy packets uniformly over the window at the given rate.

    Dummy lengths are resampled from the sequence's own length marginal and
    directions are balanced, so cover traffic is indistinguishable from the
    carried traffic at the mark level.  No-op when rate is 0 or the carrier
    sequence is empty.
    """
    if rate < 0:
        raise ValidationError("cover rate must be non-negative")
    if rate == 0 or len(pkts) == 0:
        return pkts
    rng = layer_rng(seed, "cover")
    count = int(rng.poisson(rate * pkts.window))
    if count == 0:
        return pkts
    times = rng.uniform(0.0, pkts.window, count)
    lengths = rng.choice(pkts.lengths, size=count, replace=True)
    dirs = np.where(rng.random(count) < 0.5, UP, DOWN).astype(np.int8)

    all_times = np.concatenate([pkts.times, times])
    all_lengths = np.concatenate([pkts.lengths, lengths])
    all_dirs = np.concatenate([pkts.dirs, dirs])
    order = np.argsort(all_times, kind="stable")
    return MarkedPacketSequence(
        times=all_times[order],
        lengths=all_lengths[order],
        dirs=all_dirs[order],
        layer=pkts.layer,
        window=pkts.window,
        provenance=pkts.provenance,
    )


@dataclass(frozen=True)
class ChainConfigs:
    """One bundle of per-layer configs for an end-to-end run."""

    protocol: ProtocolConfig = ProtocolConfig()
    encryption: EncryptionConfig = EncryptionConfig()
    network: NetworkConfig = NetworkConfig()
    observation: ObservationConfig = ObservationConfig()
    cover_rate: float = 0.0  # dummy packets/second injected after encryption

    def validate(self) -> None:
        self.protocol.validate()
        self.encryption.validate()
        self.network.validate()
        self.observation.validate()
        if self.cover_rate < 0:
            raise ValidationError("cover_rate must be non-negative")
        if (
            self.encryption.pad_policy == "pad_to_fixed"
            and self.encryption.pad_target < self.protocol.mtu + self.encryption.record_overhead
        ):
            raise ValidationError(
                "encryption: pad_target must cover mtu + record_overhead "
                f"({self.protocol.mtu + self.encryption.record_overhead})"
            )

    def with_defense(
        self,
        pad_policy: str | None = None,
        pad_target: int | None = None,
        added_delay: float = 0.0,
        cover_rate: float = 0.0,
    ) -> "ChainConfigs":
        enc = self.encryption
        if pad_policy is not None:
            enc = replace(enc, pad_policy=pad_policy)
        if pad_target is not None:
            enc = replace(enc, pad_target=pad_target)
        net = replace(self.network, base_latency=self.network.base_latency + added_delay)
        return replace(self, encryption=enc, network=net, cover_rate=cover_rate)


@dataclass(frozen=True, eq=False)
class ChainRun:
    plaintext: MarkedPacketSequence
    ciphertext: MarkedPacketSequence
    arrival: MarkedPacketSequence
    features: FeatureRecord
    messages: MessageSequence


def run_chain(
    label: SemanticLabel,
    profile: TrafficProfile,
    configs: ChainConfigs,
    window: float,
    seed: int,
) -> ChainRun:
    """One end-to-end pass: messages -> packets -> arrivals -> features.

    Layer seeds are fixed labeled splits of the master seed, so rerunning
    with the same arguments reproduces the identical triple.
    """
    configs.validate()
    msgs = generate_session(label, profile, window, seed)
    xi_p = encapsulate(msgs, configs.protocol, seed)
    xi_c = encrypt(xi_p, configs.encryption)
    if configs.cover_rate > 0:
        xi_c = insert_cover(xi_c, configs.cover_rate, seed)
    xi_n = transmit(xi_c, configs.network, seed)
    y = observe(xi_n, configs.observation, seed)
    return ChainRun(plaintext=xi_p, ciphertext=xi_c, arrival=xi_n, features=y, messages=msgs)


def identity_configs() -> ChainConfigs:
    """A chain that changes nothing: useful for degenerate-case checks."""
    return ChainConfigs(
        protocol=ProtocolConfig(pacing_jitter=0.0),
        encryption=EncryptionConfig(
            record_overhead=0, block_size=1, pad_policy="none", processing_delay=0.0
        ),
        network=NetworkConfig(
            base_latency=0.0, jitter=0.0, loss=0.0, retransmit_delay=0.0, reorder=0.0
        ),
        observation=ObservationConfig(
            time_granule=0.0, length_granule=0, keep_probability=1.0
        ),
    )
