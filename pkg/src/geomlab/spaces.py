"""Finite-dimensional normed spaces, atomic Banach lattices, and derived
constructions: p-convexification, complexification, and Bochner sums over
finite atomic measures.

Every space is immutable after construction and exposes a pure norm oracle:
``norm`` for a single coordinate vector, ``norm_rows`` for a batch given as a
2-D array with one vector per row.  The batch path is what the enumeration
and optimization code rely on for speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

REAL = "real"
COMPLEX = "complex"

__all__ = [
    "REAL",
    "COMPLEX",
    "NormedSpace",
    "LpSpace",
    "KotheLattice",
    "WeightedLpLattice",
    "OrliczLattice",
    "LorentzLattice",
    "PConvexSpace",
    "ComplexifiedLattice",
    "BochnerSpace",
    "PowerYoung",
    "ExpYoung",
    "make_lp",
    "pconvexify",
    "complexify",
    "bochner",
    "lattice_calculus",
    "check_norm_axioms",
    "check_lattice_axioms",
    "AxiomReport",
    "LatticeAxiomReport",
]


class NormedSpace:
    """A finite-dimensional real or complex vector space with a norm oracle."""

    def __init__(self, dim, field=REAL, label=""):
        dim = int(dim)
        if dim < 1:
            raise ValueError("dim must be a positive integer")
        if field not in (REAL, COMPLEX):
            raise ValueError(f"unknown field {field!r}")
        self.dim = dim
        self.field = field
        self.label = label or self.__class__.__name__

    @property
    def dtype(self):
        return np.complex128 if self.field == COMPLEX else np.float64

    def as_vector(self, v) -> np.ndarray:
        arr = np.asarray(v)
        if arr.shape != (self.dim,):
            raise ValueError(
                f"expected a vector of length {self.dim}, got shape {arr.shape}"
            )
        if self.field == REAL and np.iscomplexobj(arr):
            raise ValueError("complex coordinates passed to a real space")
        return arr.astype(self.dtype, copy=False)

    def as_rows(self, rows) -> np.ndarray:
        arr = np.asarray(rows)
        if arr.ndim != 2 or arr.shape[1] != self.dim:
            raise ValueError(
                f"expected rows of shape (k, {self.dim}), got {arr.shape}"
            )
        if self.field == REAL and np.iscomplexobj(arr):
            raise ValueError("complex coordinates passed to a real space")
        return arr.astype(self.dtype, copy=False)

    def norm_rows(self, rows) -> np.ndarray:
        raise NotImplementedError

    def norm(self, v) -> float:
        return float(self.norm_rows(self.as_vector(v)[None, :])[0])

    def random_vector(self, rng) -> np.ndarray:
        if self.field == COMPLEX:
            return rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)
        return rng.standard_normal(self.dim)

    def random_unit(self, rng) -> np.ndarray:
        # Gaussian direction renormalized in this space's norm.
        while True:
            v = self.random_vector(rng)
            n = self.norm(v)
            if n > 1e-8:
                return v / n

    def __repr__(self):
        return f"<{self.label}: dim={self.dim}, {self.field}>"


class LpSpace(NormedSpace):
    """The sequence space l_p^dim; p = inf gives the max norm."""

    def __init__(self, dim, p, field=REAL):
        p = float(p)
        if not p >= 1:
            raise ValueError("p must satisfy p >= 1")
        tag = "inf" if math.isinf(p) else f"{p:g}"
        super().__init__(dim, field, label=f"l{tag}^{dim}")
        self.p = p

    def norm_rows(self, rows):
        a = np.abs(self.as_rows(rows))
        if math.isinf(self.p):
            return a.max(axis=1)
        if self.p == 1.0:
            return a.sum(axis=1)
        if self.p == 2.0:
            return np.sqrt((a * a).sum(axis=1))
        return (a**self.p).sum(axis=1) ** (1.0 / self.p)


def make_lp(dim, p, field=REAL) -> LpSpace:
    """Standard l_p^dim over the given scalar field.  Rejects p < 1."""
    return LpSpace(dim, p, field)


# ---------------------------------------------------------------------------
# Atomic Banach lattices
# ---------------------------------------------------------------------------


class KotheLattice(NormedSpace):
    """An atomic Banach lattice: a positive atomic measure plus a monotone
    base norm evaluated on coordinate moduli.

    Subclasses implement ``base_norm_rows`` on nonnegative arrays; the lattice
    norm of any vector is the base norm of its coordinatewise modulus, which
    makes ``norm(|x|) == norm(x)`` hold exactly.
    """

    def __init__(self, weights, label=""):
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or w.size < 1:
            raise ValueError("weights must be a nonempty 1-D array")
        if not (w > 0).all():
            raise ValueError("measure weights must be strictly positive")
        super().__init__(w.size, REAL, label)
        w.setflags(write=False)
        self.weights = w

    @property
    def atoms(self) -> int:
        return self.dim

    def base_norm_rows(self, moduli) -> np.ndarray:
        raise NotImplementedError

    def norm_rows(self, rows):
        return self.base_norm_rows(np.abs(self.as_rows(rows)))


class WeightedLpLattice(KotheLattice):
    """Weighted L_p over the atomic measure; p = inf is the sup norm."""

    def __init__(self, weights, p, label=""):
        p = float(p)
        if not p >= 1:
            raise ValueError("p must satisfy p >= 1")
        tag = "inf" if math.isinf(p) else f"{p:g}"
        super().__init__(weights, label or f"L{tag}(w)^{len(np.atleast_1d(weights))}")
        self.p = p

    def base_norm_rows(self, a):
        if math.isinf(self.p):
            return a.max(axis=1)
        if self.p == 1.0:
            return a @ self.weights
        if self.p == 2.0:
            return np.sqrt((a * a) @ self.weights)
        return ((a**self.p) @ self.weights) ** (1.0 / self.p)


@dataclass(frozen=True)
class PowerYoung:
    """Young function t^q, q >= 1 (gives back the weighted L_q norm)."""

    q: float

    def __post_init__(self):
        if not self.q >= 1:
            raise ValueError("Young exponent must be >= 1")

    def __call__(self, t):
        return t**self.q

    @property
    def label(self):
        return f"pow:{self.q:g}"


@dataclass(frozen=True)
class ExpYoung:
    """Young function e^t - 1 (a genuinely non-homogeneous Orlicz norm)."""

    def __call__(self, t):
        # Cap the argument: overflow would only mean "modular > 1" anyway.
        return np.expm1(np.minimum(t, 700.0))

    @property
    def label(self):
        return "exp"


class OrliczLattice(KotheLattice):
    """Orlicz space over the atomic measure with the Luxemburg gauge norm.

    The norm is inf{s > 0 : sum_j w_j Phi(|x_j|/s) <= 1}, computed by a
    vectorized geometric bisection to relative tolerance 1e-13.  The bracket
    is valid because the modular is decreasing in s and diverges as s -> 0.
    """

    REL_TOL = 1e-13

    def __init__(self, weights, young, label=""):
        if not callable(young):
            raise ValueError("young must be callable")
        name = getattr(young, "label", "orlicz")
        super().__init__(weights, label or f"Orlicz[{name}]^{len(np.atleast_1d(weights))}")
        self.young = young

    def _modular(self, a, s):
        with np.errstate(over="ignore"):
            vals = self.young(a / s[:, None])
        return vals @ self.weights

    def base_norm_rows(self, a):
        a = np.asarray(a, dtype=float)
        out = np.zeros(a.shape[0])
        top = a.max(axis=1)
        active = top > 0
        if not active.any():
            return out
        # Rescale each row so its max entry is 1 (the gauge is homogeneous);
        # this keeps the brackets far from subnormal territory.
        aa = a[active] / top[active, None]
        hi = np.ones(aa.shape[0])
        for _ in range(200):
            bad = self._modular(aa, hi) > 1.0
            if not bad.any():
                break
            hi[bad] *= 2.0
        lo = hi * 1e-4
        for _ in range(200):
            small = self._modular(aa, lo) <= 1.0
            if not small.any():
                break
            hi[small] = np.minimum(hi[small], lo[small])
            lo[small] *= 1e-2
        for _ in range(100):
            if (hi / lo - 1.0).max() <= self.REL_TOL:
                break
            mid = np.sqrt(lo * hi)
            ok = self._modular(aa, mid) <= 1.0
            hi[ok] = mid[ok]
            lo[~ok] = mid[~ok]
        out[active] = hi * top[active]
        return out


class LorentzLattice(KotheLattice):
    """Classical Lorentz d(sigma, 1) norm: the decreasing rearrangement paired
    with a nonincreasing weight ladder sigma.  sigma is sorted at construction
    so the functional is a norm; a top-k ladder (ones then zeros) is allowed.
    """

    def __init__(self, sigma, weights=None, label=""):
        sig = np.sort(np.asarray(sigma, dtype=float))[::-1].copy()
        if sig.ndim != 1 or sig.size < 1:
            raise ValueError("sigma must be a nonempty 1-D array")
        if not (sig >= 0).all() or sig[0] <= 0:
            raise ValueError("sigma must be nonnegative with sigma[0] > 0")
        if weights is None:
            weights = np.ones(sig.size)
        if len(np.atleast_1d(weights)) != sig.size:
            raise ValueError("weights and sigma must have equal length")
        super().__init__(weights, label or f"Lorentz^{sig.size}")
        sig.setflags(write=False)
        self.sigma = sig

    def base_norm_rows(self, a):
        ordered = np.sort(a, axis=1)[:, ::-1]
        return ordered @ self.sigma


# ---------------------------------------------------------------------------
# Derived constructions
# ---------------------------------------------------------------------------


class PConvexSpace(NormedSpace):
    """p-convexification of a lattice, stored in p-th-root coordinates.

    A stored vector u represents the base-lattice element |u|^p, so vector
    addition and scalar multiplication are the ordinary coordinatewise ones
    and norm(u) = base_norm(|u|^p)^(1/p).  ``power_norm`` returns
    base_norm(|u|^p) itself, on the same arithmetic path, so that
    norm(u)^p == power_norm(u) identities can be tested without rounding
    surprises.
    """

    def __init__(self, base: KotheLattice, p):
        p = float(p)
        if not p > 1:
            raise ValueError("p-convexification requires p > 1")
        if not isinstance(base, KotheLattice):
            raise ValueError("base must be a KotheLattice")
        super().__init__(base.dim, REAL, label=f"{base.label}^({p:g})")
        self.base = base
        self.p = p

    def power_norm_rows(self, rows):
        return self.base.base_norm_rows(np.abs(self.as_rows(rows)) ** self.p)

    def power_norm(self, v) -> float:
        return float(self.power_norm_rows(self.as_vector(v)[None, :])[0])

    def norm_rows(self, rows):
        return self.power_norm_rows(rows) ** (1.0 / self.p)


def pconvexify(lattice: KotheLattice, p) -> PConvexSpace:
    """The p-convexification of an atomic lattice, in root coordinates."""
    return PConvexSpace(lattice, p)


class ComplexifiedLattice(NormedSpace):
    """Lattice complexification: the norm of a complex vector is the base
    norm of its coordinatewise modulus.  Restricted to real vectors it agrees
    with the lattice norm exactly."""

    def __init__(self, base: KotheLattice):
        if not isinstance(base, KotheLattice):
            raise ValueError("complexify expects a KotheLattice")
        super().__init__(base.dim, COMPLEX, label=f"{base.label}+iC")
        self.base = base

    def norm_rows(self, rows):
        return self.base.base_norm_rows(np.abs(self.as_rows(rows)))


def complexify(lattice: KotheLattice) -> ComplexifiedLattice:
    return ComplexifiedLattice(lattice)


class BochnerSpace(NormedSpace):
    """L_p over a finite atomic measure with values in an inner normed space.

    An element assigns an inner-space vector to each atom; its coordinates
    are the concatenation of the atom values (see ``pack``/``unpack``).
    """

    def __init__(self, measure_weights, p, inner: NormedSpace):
        w = np.asarray(measure_weights, dtype=float)
        if w.ndim != 1 or w.size < 1:
            raise ValueError("need at least one measure atom")
        if not (w > 0).all():
            raise ValueError("measure weights must be strictly positive")
        p = float(p)
        if not (1 <= p < math.inf):
            raise ValueError("Bochner exponent must satisfy 1 <= p < inf")
        super().__init__(
            w.size * inner.dim, inner.field, label=f"L{p:g}({w.size} atoms; {inner.label})"
        )
        w.setflags(write=False)
        self.measure_weights = w
        self.n_atoms = w.size
        self.p = p
        self.inner = inner

    def pack(self, atom_values) -> np.ndarray:
        arr = np.asarray(atom_values)
        if arr.shape != (self.n_atoms, self.inner.dim):
            raise ValueError(
                f"expected atom values of shape ({self.n_atoms}, {self.inner.dim})"
            )
        return arr.astype(self.dtype).reshape(self.dim)

    def unpack(self, v) -> np.ndarray:
        return self.as_vector(v).reshape(self.n_atoms, self.inner.dim)

    def norm_rows(self, rows):
        arr = self.as_rows(rows)
        k = arr.shape[0]
        stacked = arr.reshape(k * self.n_atoms, self.inner.dim)
        nu = self.inner.norm_rows(stacked).reshape(k, self.n_atoms)
        if self.p == 1.0:
            return nu @ self.measure_weights
        return ((nu**self.p) @ self.measure_weights) ** (1.0 / self.p)


def bochner(measure_atoms, p, inner: NormedSpace) -> BochnerSpace:
    """L_p(mu; inner) over the finite atomic measure with the given weights."""
    return BochnerSpace(measure_atoms, p, inner)


# ---------------------------------------------------------------------------
# Krivine functional calculus (coordinatewise on atomic lattices)
# ---------------------------------------------------------------------------


def lattice_calculus(lattice: KotheLattice, expression, *vectors) -> np.ndarray:
    """Evaluate a positively homogeneous scalar expression coordinatewise.

    ``expression`` receives one numpy array per input vector and must return
    an array of the same length.  Fractional powers of signed inputs produce
    NaNs, which are rejected: apply such expressions to moduli.
    """
    if not vectors:
        raise ValueError("lattice_calculus needs at least one vector")
    arrays = []
    for v in vectors:
        arr = np.asarray(v)
        if arr.shape != (lattice.dim,):
            raise ValueError(
                f"vector of shape {arr.shape} does not match lattice with {lattice.dim} atoms"
            )
        arrays.append(arr)
    with np.errstate(invalid="ignore"):
        out = np.asarray(expression(*arrays))
    if out.shape != (lattice.dim,):
        raise ValueError("expression did not return one value per atom")
    if np.iscomplexobj(out):
        if np.abs(out.imag).max() > 1e-12:
            raise ValueError("expression returned complex values; apply it to moduli")
        out = out.real
    out = out.astype(float)
    if not np.isfinite(out).all():
        raise ValueError(
            "expression produced non-finite values (negative radicand?); apply it to moduli"
        )
    return out


# ---------------------------------------------------------------------------
# Randomized axiom checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AxiomReport:
    zero: float
    homogeneity: float
    triangle: float

    def max_violation(self) -> float:
        return max(self.zero, self.homogeneity, self.triangle)


@dataclass(frozen=True)
class LatticeAxiomReport:
    monotonicity: float
    modulus_invariance: float

    def max_violation(self) -> float:
        return max(self.monotonicity, self.modulus_invariance)


def check_norm_axioms(space: NormedSpace, seed=0, samples=1000) -> AxiomReport:
    """Sampled homogeneity and triangle checks; returns worst violations."""
    rng = np.random.default_rng(seed)
    u = np.stack([space.random_vector(rng) for _ in range(samples)])
    v = np.stack([space.random_vector(rng) for _ in range(samples)])
    lam = rng.standard_normal(samples) * 3.0
    if space.field == COMPLEX:
        lam = lam * np.exp(1j * rng.uniform(0, 2 * np.pi, samples))
    zero = abs(space.norm(np.zeros(space.dim)))
    nu = space.norm_rows(u)
    homog = np.abs(space.norm_rows(lam[:, None] * u) - np.abs(lam) * nu).max()
    tri = (space.norm_rows(u + v) - nu - space.norm_rows(v)).max()
    return AxiomReport(zero=zero, homogeneity=float(homog), triangle=float(max(tri, 0.0)))


def check_lattice_axioms(lattice: KotheLattice, seed=0, samples=1000) -> LatticeAxiomReport:
    """Sampled lattice monotonicity (|x| <= |y| coordinatewise) and
    modulus-invariance checks."""
    rng = np.random.default_rng(seed)
    y = rng.standard_normal((samples, lattice.dim)) * 2.0
    shrink = rng.uniform(0.0, 1.0, size=y.shape)
    x = y * shrink
    mono = (lattice.norm_rows(x) - lattice.norm_rows(y)).max()
    modinv = np.abs(lattice.norm_rows(np.abs(y)) - lattice.norm_rows(y)).max()
    return LatticeAxiomReport(
        monotonicity=float(max(mono, 0.0)), modulus_invariance=float(modinv)
    )
