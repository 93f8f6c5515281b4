"""Closed-form leakage bounds and their assembly into a report.

The bound chain starts from three measured quantities (protocol-layer gap,
trace deviation bound, observation preservation ratio) and one declared
constant (the statistic's Lipschitz modulus):

    surviving gap     delta_N = gap - 2 * L * C           (positive iff C < gap / 2L)
    total variation   TV >= rho * delta_N / 2             (observer statistic bounded by 1)
    mutual info       I  >= (2/ln2) p p' (rho delta_N/2)^2     bits
    accuracy          Acc >= min(1, 1/2 + rho delta_N / 4)     binary equal priors
    error exponent    Chernoff >= -0.5 ln(1 - TV^2)            nats

Mutual-information quantities are in bits, Chernoff quantities in nats;
conversion happens only in report formatting, never inside a formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

LN2 = math.log(2.0)


def delta_N(delta_bar: float, L_phi: float, C: float) -> float:
    """Expectation gap surviving transport: delta_bar - 2 * L_phi * C."""
    if not all(math.isfinite(v) for v in (delta_bar, L_phi, C)):
        raise ValidationError("delta_N: inputs must be finite")
    if delta_bar < 0 or C < 0:
        raise ValidationError("delta_N: delta_bar and C must be non-negative")
    if L_phi <= 0:
        raise ValidationError("delta_N: L_phi must be positive")
    return delta_bar - 2.0 * L_phi * C


def tv_lower_bound_from_expectation(delta: float, M: float) -> float:
    """TV(P, Q) >= delta / (2M) for a gap delta of an [-M, M] statistic."""
    if delta < 0:
        raise ValidationError("tv bound: delta must be non-negative")
    if M <= 0:
        raise ValidationError("tv bound: M must be positive")
    return min(1.0, delta / (2.0 * M))


@dataclass(frozen=True)
class BoundInputs:
    """Measured parameters feeding the bound chain.

    delta_bar is in the statistic's units (bounded by 2M), C in metric
    units, rho dimensionless in (0, 1]; priors are the two classes' masses.
    """

    delta_bar: float
    C: float
    L_phi: float
    rho: float
    M: float = 1.0
    prior_x: float = 0.5
    prior_x2: float = 0.5

    def validate(self) -> None:
        if self.M <= 0:
            raise ValidationError("bound inputs: M must be positive")
        if self.delta_bar < 0:
            raise ValidationError("bound inputs: delta_bar must be non-negative")
        if self.delta_bar > 2.0 * self.M + 1e-12:
            raise ValidationError(
                f"bound inputs: delta_bar {self.delta_bar} exceeds 2M = {2.0 * self.M} "
                "(impossible for a bounded statistic)"
            )
        if self.C < 0:
            raise ValidationError("bound inputs: C must be non-negative")
        if self.L_phi <= 0:
            raise ValidationError("bound inputs: L_phi must be positive")
        if not (0.0 < self.rho <= 1.0):
            raise ValidationError(f"bound inputs: rho {self.rho} outside (0, 1]")
        for name in ("prior_x", "prior_x2"):
            p = getattr(self, name)
            if not (0.0 < p <= 1.0):
                raise ValidationError(f"bound inputs: {name} {p} outside (0, 1]")
        if self.prior_x + self.prior_x2 > 1.0 + 1e-12:
            raise ValidationError("bound inputs: the two priors sum past 1")

    def delta_N(self) -> float:
        return delta_N(self.delta_bar, self.L_phi, self.C)


def theorem_mi_lower_bound(inputs: BoundInputs) -> tuple[float, float, bool]:
    """Mutual-information lower bound, general and equal-prior, in bits.

    Returns (general, equal_prior, ok).  When the propagation condition
    fails (surviving gap <= 0) both bounds are 0 and ok is False: the bound
    is vacuous, not violated.
    """
    inputs.validate()
    dn = inputs.delta_N()
    if dn <= 0.0:
        return 0.0, 0.0, False
    half_gap = inputs.rho * dn / 2.0
    general = (2.0 / LN2) * inputs.prior_x * inputs.prior_x2 * half_gap**2
    equal = (1.0 / (2.0 * LN2)) * half_gap**2
    return general, equal, True


def accuracy_lower_bound(rho: float, delta_bar: float, L_phi: float, C: float) -> float:
    """Binary equal-prior Bayes accuracy: min(1, 1/2 + rho * delta_N / 4)."""
    if not (0.0 < rho <= 1.0):
        raise ValidationError(f"accuracy bound: rho {rho} outside (0, 1]")
    dn = max(0.0, delta_N(delta_bar, L_phi, C))
    return min(1.0, 0.5 + rho * dn / 4.0)


def accuracy_from_tv(tv: float) -> float:
    """Exact binary equal-prior optimal accuracy: (1 + TV) / 2."""
    if not (0.0 <= tv <= 1.0):
        raise ValidationError(f"accuracy_from_tv: tv {tv} outside [0, 1]")
    return (1.0 + tv) / 2.0


def binary_entropy(p: float) -> float:
    """H2(p) in bits, with 0 log 0 = 0."""
    if not (0.0 <= p <= 1.0):
        raise ValidationError(f"binary_entropy: p {p} outside [0, 1]")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def fano_error_lower_bound(H_X: float, I: float, M: int) -> float:
    """Multi-class Fano bound: max(0, (H(X) - I - 1) / log2(M - 1)).

    Requires M >= 3 so the denominator is positive; binary problems use
    :func:`fano_binary_error_lower_bound`.
    """
    if M < 3:
        raise ValidationError("fano_error_lower_bound: need M >= 3 classes")
    if I < 0 or H_X < I:
        raise ValidationError("fano_error_lower_bound: need H_X >= I >= 0")
    return max(0.0, (H_X - I - 1.0) / math.log2(M - 1))


def fano_binary_error_lower_bound(I: float, tol: float = 1e-12) -> float:
    """Binary equal-prior Fano bound: the unique p in [0, 1/2] with
    H2(p) = 1 - I, located by bisection.
    """
    if not (0.0 <= I <= 1.0):
        raise ValidationError(f"fano binary bound: I {I} outside [0, 1] bits")
    target = 1.0 - I
    lo, hi = 0.0, 0.5
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if binary_entropy(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def chernoff_lower_bound_from_tv(tv: float) -> float:
    """Chernoff information lower bound -0.5 ln(1 - TV^2), nats.

    TV = 1 means perfectly separable conditionals; the exponent is
    unbounded and reported as +inf.
    """
    if not (0.0 <= tv <= 1.0):
        raise ValidationError(f"chernoff bound: tv {tv} outside [0, 1]")
    if tv == 1.0:
        return math.inf
    return -0.5 * math.log(1.0 - tv * tv)


def bhattacharyya(p: np.ndarray, q: np.ndarray) -> tuple[float, float]:
    """Bhattacharyya coefficient BC = sum sqrt(p q) and distance B = -ln BC.

    Disjoint supports give BC = 0, B = +inf.
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValidationError("bhattacharyya: distributions need a common support")
    bc = float(np.sqrt(p * q).sum())
    b = -math.log(bc) if bc > 0 else math.inf
    return bc, b


@dataclass(frozen=True)
class LeakageReport:
    """Every bound derivable from one BoundInputs, plus optional empirical MI.

    When condition_v_ok is False all leakage fields take their vacuous
    values (0 bounds, 0.5 accuracy).  Units: mutual information in bits,
    Chernoff in nats.
    """

    inputs: BoundInputs
    delta_N: float
    condition_v_ok: bool
    tv_lb: float
    mi_lb_bits: float
    mi_lb_equal_prior_bits: float
    acc_lb: float
    chernoff_lb_nats: float
    empirical_mi_bits: float | None = None
    fano_pe_lb: float | None = None
    consistency_violation: bool | None = None

    FIELD_UNITS = (
        ("delta_N", "statistic units"),
        ("condition_v_ok", "flag"),
        ("tv_lb", "probability"),
        ("mi_lb_bits", "bits"),
        ("mi_lb_equal_prior_bits", "bits"),
        ("acc_lb", "probability"),
        ("chernoff_lb_nats", "nats"),
        ("empirical_mi_bits", "bits"),
        ("fano_pe_lb", "probability"),
        ("consistency_violation", "flag"),
    )

    def rows(self) -> list[tuple[str, object, str]]:
        return [(name, getattr(self, name), unit) for name, unit in self.FIELD_UNITS]


def build_report(inputs: BoundInputs, empirical_mi_bits: float | None = None) -> LeakageReport:
    """Evaluate the full bound chain; pure in its inputs.

    With an empirical mutual information supplied, the binary Fano error
    bound is evaluated at it and the report records whether the empirical
    value undercuts the theoretical lower bound (which flags an estimation
    problem, since the bound is sound for true quantities).
    """
    inputs.validate()
    dn = inputs.delta_N()
    ok = dn > 0.0
    if not ok:
        tv_lb = 0.0
        mi_general = 0.0
        mi_equal = 0.0
        acc = 0.5
        chern = 0.0
    else:
        tv_lb = tv_lower_bound_from_expectation(inputs.rho * dn, 1.0)
        mi_general, mi_equal, _ = theorem_mi_lower_bound(inputs)
        acc = accuracy_lower_bound(inputs.rho, inputs.delta_bar, inputs.L_phi, inputs.C)
        chern = chernoff_lower_bound_from_tv(tv_lb)

    fano = None
    violation = None
    if empirical_mi_bits is not None:
        clipped = min(1.0, max(0.0, empirical_mi_bits))
        fano = fano_binary_error_lower_bound(clipped)
        violation = empirical_mi_bits < mi_general - 1e-12

    return LeakageReport(
        inputs=inputs,
        delta_N=dn,
        condition_v_ok=ok,
        tv_lb=tv_lb,
        mi_lb_bits=mi_general,
        mi_lb_equal_prior_bits=mi_equal,
        acc_lb=acc,
        chernoff_lb_nats=chern,
        empirical_mi_bits=empirical_mi_bits,
        fano_pe_lb=fano,
        consistency_violation=violation,
    )


@dataclass(frozen=True)
class MultiSessionProjection:
    """Accumulation figures for n conditionally independent sessions.

    mi_accumulated_ub_bits is n times the single-session MI lower bound,
    reported as an upper-envelope projection: additivity is exact only for
    conditionally iid observations, so the product is labeled an envelope
    rather than a per-session theorem.
    """

    n: int
    mi_accumulated_ub_bits: float
    error_exponent_lb_nats: float
    pe_envelope: float
    vacuous: bool


def multi_session_projection(report: LeakageReport, n: int) -> MultiSessionProjection:
    """Project a single-session report across n independent sessions."""
    if n < 1:
        raise ValidationError(f"multi_session_projection: n must be >= 1, got {n}")
    if not report.condition_v_ok:
        return MultiSessionProjection(
            n=n,
            mi_accumulated_ub_bits=0.0,
            error_exponent_lb_nats=0.0,
            pe_envelope=1.0,
            vacuous=True,
        )
    exponent = report.chernoff_lb_nats
    return MultiSessionProjection(
        n=n,
        mi_accumulated_ub_bits=n * report.mi_lb_bits,
        error_exponent_lb_nats=exponent,
        pe_envelope=math.exp(-n * exponent) if math.isfinite(exponent) else 0.0,
        vacuous=False,
    )
