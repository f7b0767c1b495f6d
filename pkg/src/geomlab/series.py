"""Randomized series S_n = x0 + sum_i r_i x_i: expectation evaluation, the
submartingale and scaling-monotonicity checks, exhaustive sign suprema, and
the explicit expectation-gain certificate for sign-separated step families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceededError
from .randomvars import (
    DEFAULT_BUDGET,
    ConvexGauge,
    SymmetricRV,
    evaluate_with_adaptive_nodes,
    expect,
    product_grid_chunks,
    tail_mass,
)
from .spaces import NormedSpace

__all__ = [
    "RandomizedSeries",
    "GapCertificate",
    "SignSupResult",
    "SubmartingaleReport",
    "ScalingMonotoneReport",
    "ExpectationGainReport",
    "series_expectation",
    "check_submartingale",
    "check_scaling_monotone",
    "sign_sup",
    "thm13_delta",
    "thm13_verify",
]

SIGN_ENUM_LIMIT = 24
VACUOUS_DELTA = 1e-300


@dataclass(frozen=True)
class RandomizedSeries:
    """A finite randomized series: start vector, step vectors, and one
    independent symmetric model per step."""

    space: NormedSpace
    x0: np.ndarray
    steps: tuple
    rvs: tuple

    def __post_init__(self):
        x0 = self.space.as_vector(self.x0)
        steps = tuple(self.space.as_vector(s) for s in self.steps)
        rvs = tuple(self.rvs)
        if len(steps) != len(rvs):
            raise ValueError("need exactly one random model per step")
        for rv in rvs:
            if not isinstance(rv, SymmetricRV):
                raise ValueError("rvs must be SymmetricRV instances")
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "rvs", rvs)

    @property
    def n(self) -> int:
        return len(self.steps)

    def prefix(self, k: int) -> "RandomizedSeries":
        return RandomizedSeries(self.space, self.x0, self.steps[:k], self.rvs[:k])


def _series_value_on_grids(series, gauge, grids) -> float:
    space = series.space
    steps = np.stack(series.steps) if series.steps else None
    chunk_sums = []
    for V, w in product_grid_chunks(grids):
        if np.iscomplexobj(V) and space.field == "real":
            raise ValueError("complex random models require a complex space")
        rows = series.x0[None, :] + V @ steps
        norms = space.norm_rows(rows)
        chunk_sums.append(float(np.dot(w, gauge(norms))))
    return math.fsum(chunk_sums)


def series_expectation(series: RandomizedSeries, gauge: ConvexGauge, budget=DEFAULT_BUDGET) -> float:
    """E[phi(||x0 + sum_i r_i x_i||)] over the product of the step models."""
    if series.n == 0:
        return float(gauge(series.space.norm(series.x0)))
    return evaluate_with_adaptive_nodes(
        series.rvs, lambda grids: _series_value_on_grids(series, gauge, grids), budget
    )


@dataclass(frozen=True)
class SubmartingaleReport:
    expectations: tuple
    max_violation: float

    def passed(self, tol=1e-10) -> bool:
        return self.max_violation <= tol


def check_submartingale(series: RandomizedSeries, gauge: ConvexGauge, budget=DEFAULT_BUDGET) -> SubmartingaleReport:
    """The n+1 prefix expectations E[phi(||S_k||)] and the largest decrease
    found along the sequence (nonnegative; 0 means monotone)."""
    values = tuple(
        series_expectation(series.prefix(k), gauge, budget) for k in range(series.n + 1)
    )
    worst = 0.0
    for a, b in zip(values, values[1:]):
        worst = max(worst, a - b)
    return SubmartingaleReport(expectations=values, max_violation=worst)


@dataclass(frozen=True)
class ScalingMonotoneReport:
    lambdas: tuple
    psi: tuple
    evenness_violation: float
    monotonicity_violation: float
    convexity_violation: float

    def passed(self, tol=1e-10) -> bool:
        return (
            max(self.evenness_violation, self.monotonicity_violation, self.convexity_violation)
            <= tol
        )


def check_scaling_monotone(space, x, y, gauge, rv, lambdas, budget=DEFAULT_BUDGET) -> ScalingMonotoneReport:
    """Check psi(lambda) = E[phi(||x + lambda r y||)] for evenness, growth on
    the nonnegative grid, and convexity along consecutive grid triples.

    The grid must be symmetric about 0.  Evenness is exact for deterministic
    engines because the node multiset is symmetric.
    """
    lam = np.sort(np.asarray(lambdas, dtype=float))
    if not np.array_equal(lam, -lam[::-1]):
        raise ValueError("lambda grid must be symmetric about 0")
    x = space.as_vector(x)
    y = space.as_vector(y)

    def psi(value):
        scaled = RandomizedSeries(space, x, (value * y,), (rv,))
        return series_expectation(scaled, gauge, budget)

    values = {float(v): psi(float(v)) for v in lam}
    even = max(abs(values[float(v)] - values[float(-v)]) for v in lam)
    nonneg = [float(v) for v in lam if v >= 0]
    mono = 0.0
    for a, b in zip(nonneg, nonneg[1:]):
        mono = max(mono, values[a] - values[b])
    convex = 0.0
    for a, b, c in zip(nonneg, nonneg[1:], nonneg[2:]):
        chord = ((c - b) * values[a] + (b - a) * values[c]) / (c - a)
        convex = max(convex, values[b] - chord)
    return ScalingMonotoneReport(
        lambdas=tuple(float(v) for v in lam),
        psi=tuple(values[float(v)] for v in lam),
        evenness_violation=even,
        monotonicity_violation=mono,
        convexity_violation=convex,
    )


@dataclass(frozen=True)
class SignSupResult:
    value: float
    signs: tuple

    def __iter__(self):
        yield self.value
        yield self.signs


def sign_sup(space: NormedSpace, steps, limit=SIGN_ENUM_LIMIT) -> SignSupResult:
    """sup over sign patterns of ||sum_i eps_i x_i||, exhaustively.

    Only 2^(n-1) patterns are enumerated (eps_1 = +1) since the norm is sign
    symmetric; the returned witness has eps_1 = +1.
    """
    steps = [space.as_vector(s) for s in steps]
    n = len(steps)
    if n < 1:
        raise ValueError("need at least one step vector")
    if n > limit:
        raise BudgetExceededError(f"{n} steps exceed the sign enumeration limit {limit}")
    M = np.stack(steps)
    count = 1 << (n - 1)
    bits = (np.arange(count)[:, None] >> np.arange(n - 1)[None, :]) & 1
    signs = np.hstack([np.ones((count, 1)), 1.0 - 2.0 * bits])
    norms = space.norm_rows(signs @ M)
    best = int(np.argmax(norms))
    return SignSupResult(value=float(norms[best]), signs=tuple(int(s) for s in signs[best]))


@dataclass(frozen=True)
class GapCertificate:
    """The explicit positive expectation-gain constant built from a sign gap
    rho: delta = min of the tail-probability term and the single-step
    strict-convexity gain, with rho capped at 1/2."""

    rho: float
    rho1: float
    delta: float
    witness_signs: tuple | None = None
    numerically_vacuous: bool = field(default=False)

    def to_dict(self) -> dict:
        return {
            "rho": self.rho,
            "rho1": self.rho1,
            "delta": self.delta,
            "witness_signs": list(self.witness_signs) if self.witness_signs else None,
            "numerically_vacuous": self.numerically_vacuous,
        }


def thm13_delta(rho, n, gauge: ConvexGauge, tail_rvs, a=1.0, budget=DEFAULT_BUDGET) -> GapCertificate:
    """delta(rho) = min{ phi(rho1/3) * prod_i P{|r_i - 1| < rho1/(3n)},
    min_j E[phi(a + r_j rho1/(3n))] - phi(a) }, rho1 = min(rho, 1/2).

    ``tail_rvs`` are the models r_2..r_n (n-1 of them); ``a`` is the norm of
    the lead vector.
    """
    rho = float(rho)
    if rho <= 0:
        raise ValueError("rho must be positive")
    n = int(n)
    if n < 2:
        raise ValueError("need n >= 2")
    tail_rvs = list(tail_rvs)
    if len(tail_rvs) != n - 1:
        raise ValueError(f"expected {n - 1} tail models, got {len(tail_rvs)}")
    if not gauge.strictly_convex:
        raise ValueError("the certificate requires a strictly convex gauge")
    rho1 = min(rho, 0.5)
    c = rho1 / (3.0 * n)
    prob = math.prod(tail_mass(rv, c) for rv in tail_rvs)
    term1 = float(gauge(rho1 / 3.0)) * prob
    gains = [
        expect([rv], lambda s: float(gauge(a + s * c)), budget) - float(gauge(a))
        for rv in tail_rvs
    ]
    term2 = min(gains)
    delta = min(term1, term2)
    return GapCertificate(
        rho=rho,
        rho1=rho1,
        delta=delta,
        numerically_vacuous=bool(0 < delta < VACUOUS_DELTA),
    )


@dataclass(frozen=True)
class ExpectationGainReport:
    applicable: bool
    rho: float
    certificate: GapCertificate | None
    lhs: float
    rhs: float
    slack: float
    witness_signs: tuple | None
    reason: str = ""

    def passed(self, tol=1e-10) -> bool:
        return (not self.applicable) or self.slack >= -tol

    def to_dict(self) -> dict:
        return {
            "applicable": self.applicable,
            "rho": self.rho,
            "rho1": self.certificate.rho1 if self.certificate else None,
            "delta": self.certificate.delta if self.certificate else None,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "witness_signs": list(self.witness_signs) if self.witness_signs else None,
            "reason": self.reason,
        }


def thm13_verify(space, steps, gauge: ConvexGauge, tail_rvs, budget=DEFAULT_BUDGET) -> ExpectationGainReport:
    """Verify E[phi(||x1 + r_2 x2 + ... + r_n xn||)] >= phi(||x1||) + delta.

    rho is computed from the exhaustive sign supremum, never trusted as an
    input.  A nonpositive gap is reported as "not applicable" rather than as
    a violation.
    """
    steps = [space.as_vector(s) for s in steps]
    if len(steps) < 2:
        raise ValueError("need at least two step vectors")
    a = space.norm(steps[0])
    sup = sign_sup(space, steps)
    rho = sup.value - a
    if rho <= 0:
        return ExpectationGainReport(
            applicable=False,
            rho=rho,
            certificate=None,
            lhs=math.nan,
            rhs=math.nan,
            slack=math.nan,
            witness_signs=sup.signs,
            reason="no sign gap (rho <= 0)",
        )
    cert = thm13_delta(rho, len(steps), gauge, tail_rvs, a=a, budget=budget)
    cert = GapCertificate(
        rho=cert.rho,
        rho1=cert.rho1,
        delta=cert.delta,
        witness_signs=sup.signs,
        numerically_vacuous=cert.numerically_vacuous,
    )
    lhs = series_expectation(
        RandomizedSeries(space, steps[0], tuple(steps[1:]), tuple(tail_rvs)), gauge, budget
    )
    rhs = float(gauge(a)) + cert.delta
    return ExpectationGainReport(
        applicable=True,
        rho=rho,
        certificate=cert,
        lhs=lhs,
        rhs=rhs,
        slack=lhs - rhs,
        witness_signs=sup.signs,
    )
