"""Exact finite-alphabet channel oracle.

Every inequality the leakage bounds assert is certified against these
brute-force computations on small discrete channels: total variation,
mutual information, Bayes error, Chernoff information, and their behavior
under independent repetition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from pathlib import Path

import numpy as np

from .errors import EnumerationCapError, ValidationError

PRODUCT_ALPHABET_CAP = 1 << 20


@dataclass(frozen=True, eq=False)
class DiscreteChannel:
    """Finite-alphabet channel: priors over inputs, row-stochastic conditionals."""

    priors: np.ndarray  # shape (K,)
    conditionals: np.ndarray  # shape (K, L), rows sum to 1

    def __post_init__(self):
        priors = np.asarray(self.priors, dtype=np.float64)
        cond = np.asarray(self.conditionals, dtype=np.float64)
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "conditionals", cond)
        if priors.ndim != 1 or cond.ndim != 2 or cond.shape[0] != priors.shape[0]:
            raise ValidationError("channel: priors (K,) and conditionals (K, L) required")
        if priors.shape[0] < 2 or cond.shape[1] < 2:
            raise ValidationError("channel: need at least 2 inputs and 2 outputs")
        if np.any(priors < 0) or np.any(cond < 0):
            raise ValidationError("channel: probabilities must be non-negative")
        if abs(float(priors.sum()) - 1.0) > 1e-12:
            raise ValidationError(f"channel: priors sum to {float(priors.sum())!r}")
        rowsums = cond.sum(axis=1)
        bad = np.abs(rowsums - 1.0) > 1e-12
        if bad.any():
            raise ValidationError(
                f"channel: row {int(np.nonzero(bad)[0][0])} sums to "
                f"{float(rowsums[bad][0])!r}"
            )

    @property
    def n_inputs(self) -> int:
        return self.priors.shape[0]

    @property
    def n_outputs(self) -> int:
        return self.conditionals.shape[1]

    def output_marginal(self) -> np.ndarray:
        return self.priors @ self.conditionals

    @classmethod
    def from_text(cls, text: str) -> "DiscreteChannel":
        """Parse the plain-text matrix format: a priors line, then one
        whitespace-separated conditional row per input.  '#' starts a comment.
        """
        rows: list[list[float]] = []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            rows.append([float(tok) for tok in line.split()])
        if len(rows) < 3:
            raise ValidationError(
                "channel text: need a priors line plus at least two conditional rows"
            )
        priors = np.array(rows[0], dtype=np.float64)
        cond = np.array(rows[1:], dtype=np.float64)
        return cls(priors=priors, conditionals=cond)

    @classmethod
    def from_file(cls, path: str | Path) -> "DiscreteChannel":
        return cls.from_text(Path(path).read_text())

    def to_text(self) -> str:
        lines = [" ".join(repr(float(p)) for p in self.priors)]
        for row in self.conditionals:
            lines.append(" ".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"


def bsc(flip: float, priors: tuple[float, float] = (0.5, 0.5)) -> DiscreteChannel:
    """Binary symmetric channel with the given flip probability."""
    if not (0.0 <= flip <= 1.0):
        raise ValidationError(f"bsc: flip {flip} outside [0, 1]")
    return DiscreteChannel(
        priors=np.array(priors),
        conditionals=np.array([[1.0 - flip, flip], [flip, 1.0 - flip]]),
    )


def _check_index(ch: DiscreteChannel, x: int) -> None:
    if not (0 <= x < ch.n_inputs):
        raise ValidationError(f"input index {x} outside [0, {ch.n_inputs})")


def exact_tv(ch: DiscreteChannel, x: int, x2: int) -> float:
    """Total variation between two conditional rows: half the L1 distance."""
    _check_index(ch, x)
    _check_index(ch, x2)
    if x == x2:
        raise ValidationError("exact_tv: input indices must differ")
    return 0.5 * float(np.abs(ch.conditionals[x] - ch.conditionals[x2]).sum())


def exact_mi(ch: DiscreteChannel) -> float:
    """Mutual information of the channel in bits, with 0 log 0 = 0."""
    py = ch.output_marginal()
    joint = ch.priors[:, None] * ch.conditionals
    mask = joint > 0
    ratio = np.zeros_like(joint)
    ratio[mask] = joint[mask] / (ch.priors[:, None] * py[None, :])[mask]
    return float((joint[mask] * np.log2(ratio[mask])).sum())


def exact_bayes_error(ch: DiscreteChannel) -> float:
    """Minimum error probability of the optimal decision rule."""
    return 1.0 - float(np.max(ch.priors[:, None] * ch.conditionals, axis=0).sum())


def _chernoff_objective(log_p: np.ndarray, log_q: np.ndarray) -> callable:
    def f(lam: float) -> float:
        return float(np.exp(lam * log_p + (1.0 - lam) * log_q).sum())

    return f


def exact_chernoff(p: np.ndarray, q: np.ndarray, tol: float = 1e-10) -> float:
    """Chernoff information -ln min_{l in [0,1]} sum_y p^l q^(1-l), in nats.

    The objective is convex in l on a finite support; a coarse grid locates
    the minimum and golden-section refinement pins it to ``tol``.  Disjoint
    supports give +inf (the distributions are perfectly separable).
    """
    if tol <= 0:
        raise ValidationError("exact_chernoff: tol must be positive")
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValidationError("exact_chernoff: distributions need a common support")
    common = (p > 0) & (q > 0)
    if not common.any():
        return math.inf
    log_p = np.log(p[common])
    log_q = np.log(q[common])
    f = _chernoff_objective(log_p, log_q)

    grid = np.linspace(0.0, 1.0, 101)
    values = [f(l) for l in grid]
    k = int(np.argmin(values))
    lo = grid[max(0, k - 1)]
    hi = grid[min(len(grid) - 1, k + 1)]

    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    best = min(values[k], fc, fd)
    return -math.log(best)


def product_channel(ch: DiscreteChannel, n: int, cap: int = PRODUCT_ALPHABET_CAP) -> DiscreteChannel:
    """Channel for n conditionally independent uses: outputs are n-tuples.

    The output alphabet grows as L^n and is enumerated explicitly, so the
    size is capped.
    """
    if n < 1:
        raise ValidationError("product_channel: n must be >= 1")
    if ch.n_outputs**n > cap:
        raise EnumerationCapError(
            f"product_channel: output alphabet {ch.n_outputs}^{n} exceeds cap {cap}"
        )
    if n == 1:
        return ch
    rows = [reduce(np.kron, [ch.conditionals[x]] * n) for x in range(ch.n_inputs)]
    return DiscreteChannel(priors=ch.priors.copy(), conditionals=np.vstack(rows))


def random_channel(
    rng: np.random.Generator,
    n_inputs: int = 2,
    n_outputs: int | None = None,
    equal_priors: bool = False,
) -> DiscreteChannel:
    """Random test instance: Dirichlet rows, Dirichlet or equal priors."""
    if n_outputs is None:
        n_outputs = int(rng.integers(2, 9))
    cond = rng.dirichlet(np.ones(n_outputs), size=n_inputs)
    if equal_priors:
        priors = np.full(n_inputs, 1.0 / n_inputs)
    else:
        priors = rng.dirichlet(np.ones(n_inputs))
        priors = np.maximum(priors, 1e-6)
    priors = priors / priors.sum()
    cond = cond / cond.sum(axis=1, keepdims=True)
    return DiscreteChannel(priors=priors, conditionals=cond)


def sample_channel(
    ch: DiscreteChannel, n: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Draw n iid (input, output) pairs from the channel."""
    xs = rng.choice(ch.n_inputs, size=n, p=ch.priors)
    us = rng.random(n)
    cdf = np.cumsum(ch.conditionals, axis=1)
    ys = (us[:, None] > cdf[xs]).sum(axis=1)
    return xs, ys
