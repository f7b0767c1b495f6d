"""Vector-valued harmonic functions on the unit disk with finite Fourier
data, their radial circle p-means and Hardy norm, convergence in the topology
of uniform convergence on compact subsets, and the norm-convergence failure
construction at points that are not strongly extreme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GeomlabError
from .moduli import strong_extreme_modulus
from .spaces import COMPLEX, NormedSpace

__all__ = [
    "HarmonicFunction",
    "KKBetaRecord",
    "KKBetaReport",
    "harmonic_eval",
    "circle_mean_pow",
    "radial_means",
    "hp_norm",
    "beta_distance",
    "beta_convergence_check",
    "abs_cos_pth_mean",
    "kk_beta_demo",
]

DEFAULT_THETA_NODES = 256
MAX_THETA_NODES = 1 << 15
QUAD_TOL = 1e-9


class HarmonicFunction:
    """A harmonic function with finite Fourier data,
    f(r e^(i theta)) = c0 + sum_n r^n (cos(n theta) b_n + sin(n theta) c_n),
    with coefficient vectors in a fixed normed space."""

    def __init__(self, space: NormedSpace, c0, cos_coeffs=None, sin_coeffs=None):
        self.space = space
        self.c0 = space.as_vector(c0)
        n_cos = 0 if cos_coeffs is None else len(cos_coeffs)
        n_sin = 0 if sin_coeffs is None else len(sin_coeffs)
        degree = max(n_cos, n_sin)
        b = np.zeros((degree, space.dim), dtype=space.dtype)
        c = np.zeros((degree, space.dim), dtype=space.dtype)
        for i in range(n_cos):
            b[i] = space.as_vector(cos_coeffs[i])
        for i in range(n_sin):
            c[i] = space.as_vector(sin_coeffs[i])
        self.cos_coeffs = b
        self.sin_coeffs = c

    @property
    def degree(self) -> int:
        return self.cos_coeffs.shape[0]

    @classmethod
    def constant(cls, space, x) -> "HarmonicFunction":
        return cls(space, x)

    @classmethod
    def cos_mode(cls, space, x, n, y) -> "HarmonicFunction":
        """x + Re(z^n) y, i.e. x + r^n cos(n theta) y."""
        n = int(n)
        if n < 1:
            raise ValueError("mode index must be >= 1")
        cos_coeffs = [np.zeros(space.dim)] * (n - 1) + [space.as_vector(y)]
        return cls(space, x, cos_coeffs)

    @classmethod
    def from_complex_coefficients(cls, space, coeffs: dict) -> "HarmonicFunction":
        """Build from a_n coefficients of sum a_n r^|n| e^(i n theta).

        For a real space the conjugate symmetry a_{-n} = conj(a_n) must hold
        (within 1e-12), otherwise the real form would be complex-valued.
        """
        degree = max((abs(int(n)) for n in coeffs), default=0)
        zero = np.zeros(space.dim, dtype=np.complex128)
        get = lambda n: np.asarray(coeffs.get(n, zero), dtype=np.complex128)
        c0 = get(0)
        cos_list, sin_list = [], []
        for n in range(1, degree + 1):
            plus, minus = get(n), get(-n)
            cos_list.append(plus + minus)
            sin_list.append(1j * (plus - minus))
        if space.field != COMPLEX:
            stack = [c0] + cos_list + sin_list
            worst = max((np.abs(v.imag).max() for v in stack), default=0.0)
            if worst > 1e-12:
                raise ValueError("coefficients are not conjugate symmetric over a real space")
            c0 = c0.real
            cos_list = [v.real for v in cos_list]
            sin_list = [v.real for v in sin_list]
        return cls(space, c0, cos_list, sin_list)

    def values_on_circle(self, r, thetas) -> np.ndarray:
        """Rows f(r e^(i theta)) for each theta; r in [0, 1] (the boundary is
        the continuous extension of the finite trigonometric sum)."""
        thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
        out = np.broadcast_to(self.c0, (thetas.size, self.space.dim)).astype(self.space.dtype)
        out = out.copy()
        for n in range(1, self.degree + 1):
            rn = r**n
            out += rn * np.cos(n * thetas)[:, None] * self.cos_coeffs[n - 1][None, :]
            out += rn * np.sin(n * thetas)[:, None] * self.sin_coeffs[n - 1][None, :]
        return out

    def __sub__(self, other: "HarmonicFunction") -> "HarmonicFunction":
        if other.space is not self.space:
            raise ValueError("functions live in different spaces")
        degree = max(self.degree, other.degree)

        def pad(mat, rows):
            out = np.zeros((rows, self.space.dim), dtype=self.space.dtype)
            out[: mat.shape[0]] = mat
            return out

        diff = HarmonicFunction(self.space, self.c0 - other.c0)
        diff.cos_coeffs = pad(self.cos_coeffs, degree) - pad(other.cos_coeffs, degree)
        diff.sin_coeffs = pad(self.sin_coeffs, degree) - pad(other.sin_coeffs, degree)
        return diff

    def scaled(self, factor) -> "HarmonicFunction":
        out = HarmonicFunction(self.space, self.c0 * factor)
        out.cos_coeffs = self.cos_coeffs * factor
        out.sin_coeffs = self.sin_coeffs * factor
        return out


def harmonic_eval(f: HarmonicFunction, r, theta) -> np.ndarray:
    """Evaluate at a point of the open disk (rejects r >= 1)."""
    r = float(r)
    if not 0 <= r < 1:
        raise ValueError("harmonic functions are defined for 0 <= r < 1")
    return f.values_on_circle(r, [theta])[0]


def _node_count(f: HarmonicFunction, p, nodes):
    if nodes is not None:
        return int(nodes), False
    if float(p) == int(p) and int(p) % 2 == 0:
        # ||.||^p can be a trig polynomial of degree <= p*N; this rule makes
        # the periodic trapezoid exact for such integrands.
        return max(DEFAULT_THETA_NODES, 4 * (int(p) * max(f.degree, 1) + 2)), False
    return DEFAULT_THETA_NODES, True


def circle_mean_pow(f: HarmonicFunction, r, p, nodes=None) -> float:
    """(1/2pi) integral of ||f(r e^(i theta))||^p d theta; adaptive node
    doubling unless the even-exponent exactness rule applies."""
    k, adaptive = _node_count(f, p, nodes)

    def mean_at(count):
        thetas = 2.0 * np.pi * np.arange(count) / count
        vals = f.space.norm_rows(f.values_on_circle(r, thetas))
        return float(np.mean(vals**p))

    value = mean_at(k)
    if not adaptive:
        return value
    while k < MAX_THETA_NODES:
        k *= 2
        refined = mean_at(k)
        if abs(refined - value) <= QUAD_TOL * max(1.0, abs(refined)):
            return refined
        value = refined
    return value


def radial_means(f: HarmonicFunction, p, r_grid, nodes=None) -> np.ndarray:
    """The circle p-means m(r)^(1/p) along a radius grid."""
    return np.array([circle_mean_pow(f, r, p, nodes) ** (1.0 / p) for r in r_grid])


def default_radius_grid(levels=12):
    return np.array([0.0] + [1.0 - 0.5**k for k in range(1, levels + 1)])


def hp_norm(f: HarmonicFunction, p, r_grid=None, nodes=None) -> float:
    """sup over r < 1 of the circle p-mean.

    For finite Fourier data the mean extends continuously to r = 1 and is
    nondecreasing in r, so the supremum equals the boundary mean; the grid
    values are still computed and the monotonicity is checked per run (a
    violation beyond quadrature noise is a quadrature bug, not a property of
    the function).
    """
    p = float(p)
    if not (1 < p < math.inf):
        raise ValueError("hp norm requires 1 < p < inf")
    grid = default_radius_grid() if r_grid is None else np.asarray(r_grid, dtype=float)
    if (grid < 0).any() or (grid >= 1).any():
        raise ValueError("radius grid must lie in [0, 1)")
    grid = np.sort(grid)
    means = radial_means(f, p, grid, nodes)
    rises = np.diff(means)
    if rises.size and rises.min() < -1e-10:
        raise GeomlabError(
            f"circle means decreased along the radius grid (worst {rises.min():.3e}); "
            "quadrature is inconsistent"
        )
    boundary = circle_mean_pow(f, 1.0, p, nodes) ** (1.0 / p)
    return float(max(boundary, means.max() if means.size else 0.0))


def beta_distance(f: HarmonicFunction, g: HarmonicFunction, compact_radius, r_steps=25, theta_nodes=256) -> float:
    """sup over |z| <= compact_radius of ||f(z) - g(z)|| on a polar grid."""
    rho = float(compact_radius)
    if not 0 <= rho < 1:
        raise ValueError("compact radius must lie in [0, 1)")
    diff = f - g
    if rho == 0.0:
        return diff.space.norm(diff.values_on_circle(0.0, [0.0])[0])
    thetas = 2.0 * np.pi * np.arange(theta_nodes) / theta_nodes
    best = 0.0
    for r in np.linspace(0.0, rho, r_steps):
        vals = diff.space.norm_rows(diff.values_on_circle(r, thetas))
        best = max(best, float(vals.max()))
    return best


def beta_convergence_check(f_seq, f: HarmonicFunction, compact_radius) -> list:
    """Per-term sup distances to the limit on the closed disk of the given radius."""
    return [beta_distance(fn, f, compact_radius) for fn in f_seq]


def abs_cos_pth_mean(p, nodes=4096) -> float:
    """(1/2pi) integral of |cos theta|^p d theta."""
    thetas = 2.0 * np.pi * np.arange(nodes) / nodes
    return float(np.mean(np.abs(np.cos(thetas)) ** p))


@dataclass(frozen=True)
class KKBetaRecord:
    n: int
    beta_distance: float
    raw_hp: float
    normalized_hp: float
    separation: float


@dataclass(frozen=True)
class KKBetaReport:
    applicable: bool
    premise_modulus: float
    eps: float
    p: float
    separation_floor: float
    records: tuple
    certified: bool
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "applicable": self.applicable,
            "premise_modulus": self.premise_modulus,
            "eps": self.eps,
            "p": self.p,
            "separation_floor": self.separation_floor,
            "certified": self.certified,
            "reason": self.reason,
            "records": [
                {
                    "n": r.n,
                    "beta_distance": r.beta_distance,
                    "raw_hp": r.raw_hp,
                    "normalized_hp": r.normalized_hp,
                    "separation": r.separation,
                }
                for r in self.records
            ],
        }


def kk_beta_demo(
    space: NormedSpace,
    x,
    step_vectors,
    p,
    *,
    compact_radius=0.9,
    premise_tol=1e-4,
    norm_limit_tol=1e-4,
    nodes=None,
    modulus_starts=32,
    seed=0,
) -> KKBetaReport:
    """Exhibit the failure of norm convergence under compact-uniform
    convergence plus convergence of Hardy norms, at a unit vector that is not
    strongly extreme.

    The witnesses are f_n(z) = x + Re(z^n) y_n with ||y_n|| >= eps; each f_n
    is normalized in the Hardy norm so the convergence-of-norms premise holds
    exactly.  Failure is certified when the premise modulus at x vanishes
    (within tolerance), the raw Hardy norms stay within ``norm_limit_tol`` of
    1, and the separation ||f_n - f||_p never drops below
    eps * (mean of |cos|^p)^(1/p) - 1e-6.  At a strongly extreme x the
    premise is not certified and the report says "not applicable".
    """
    p = float(p)
    x = space.as_vector(x)
    nx = space.norm(x)
    if abs(nx - 1.0) > 1e-9:
        x = x / nx
    steps = [space.as_vector(v) for v in step_vectors]
    if not steps:
        raise ValueError("need at least one witness direction")
    eps = min(space.norm(v) for v in steps)
    if eps <= 0:
        raise ValueError("witness directions must be bounded away from zero")
    premise = strong_extreme_modulus(space, x, eps, starts=modulus_starts, seed=seed)
    if premise.value > premise_tol:
        return KKBetaReport(
            applicable=False,
            premise_modulus=premise.value,
            eps=eps,
            p=p,
            separation_floor=math.nan,
            records=(),
            certified=False,
            reason="x is strongly extreme at this scale (modulus above tolerance)",
        )
    f_limit = HarmonicFunction.constant(space, x)
    floor = eps * abs_cos_pth_mean(p) ** (1.0 / p)
    records = []
    for idx, y in enumerate(steps, start=1):
        fn = HarmonicFunction.cos_mode(space, x, idx, y)
        raw = hp_norm(fn, p, nodes=nodes)
        fn_tilde = fn.scaled(1.0 / raw)
        records.append(
            KKBetaRecord(
                n=idx,
                beta_distance=beta_distance(fn_tilde, f_limit, compact_radius),
                raw_hp=raw,
                normalized_hp=hp_norm(fn_tilde, p, nodes=nodes),
                separation=hp_norm(fn_tilde - f_limit, p, nodes=nodes),
            )
        )
    certified = (
        max(abs(r.raw_hp - 1.0) for r in records) <= norm_limit_tol
        and min(r.separation for r in records) >= floor - 1e-6
    )
    return KKBetaReport(
        applicable=True,
        premise_modulus=premise.value,
        eps=eps,
        p=p,
        separation_floor=floor,
        records=tuple(records),
        certified=certified,
    )
