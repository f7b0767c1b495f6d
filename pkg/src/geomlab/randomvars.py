"""Symmetric scalar random-variable models, convex gauges, and the
expectation engines behind every E[...] in the package.

Model kinds
-----------
* ``rademacher``        +-1 with equal probability (exact enumeration)
* ``cos_theta``         cos(theta), theta uniform on [0, 2pi)
* ``complex_circle``    e^(i theta), theta uniform on [0, 2pi)
* ``uniform_symmetric`` uniform on [-1, 1]

All laws are symmetric with essential sup 1.  Deterministic engines expose a
finite node/weight support whose node multiset is symmetric by construction,
so symmetry identities hold exactly.  Expectations are accumulated with
``math.fsum``, which is exactly rounded and therefore independent of node
order and of how work is chunked across threads.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceededError

DEFAULT_BUDGET = 2**24
DEFAULT_QUAD_NODES = 256
ADAPTIVE_TOL = 1e-9
# Per-model ceilings for adaptive node doubling.  Circle rules are cheap to
# enlarge; Gauss-Legendre construction cost grows fast with the node count.
_ADAPTIVE_NODE_CAP = {"cos_theta": 1 << 16, "complex_circle": 1 << 16, "uniform_symmetric": 1 << 11}

RADEMACHER = "rademacher"
COS_THETA = "cos_theta"
COMPLEX_CIRCLE = "complex_circle"
UNIFORM_SYMMETRIC = "uniform_symmetric"

_KINDS = (RADEMACHER, COS_THETA, COMPLEX_CIRCLE, UNIFORM_SYMMETRIC)

__all__ = [
    "RADEMACHER",
    "COS_THETA",
    "COMPLEX_CIRCLE",
    "UNIFORM_SYMMETRIC",
    "DEFAULT_BUDGET",
    "ExactEnumeration",
    "Quadrature",
    "MonteCarlo",
    "SymmetricRV",
    "rademacher",
    "cos_theta",
    "complex_circle",
    "uniform_symmetric",
    "ConvexGauge",
    "power_gauge",
    "ABSOLUTE_VALUE",
    "expect",
    "tail_mass",
    "product_grid_chunks",
    "grid_total",
]


# ---------------------------------------------------------------------------
# Engines
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExactEnumeration:
    """Exact finite-support enumeration (Rademacher only)."""


@dataclass(frozen=True)
class Quadrature:
    """Trapezoidal (circle) or Gauss-Legendre (interval) quadrature.

    With ``adaptive`` set, expectation drivers double ``nodes`` until two
    successive estimates agree to 1e-9 or the evaluation budget is hit.
    """

    nodes: int = DEFAULT_QUAD_NODES
    adaptive: bool = True

    def __post_init__(self):
        if self.nodes < 2 or self.nodes % 2:
            raise ValueError("node count must be even and >= 2")


@dataclass(frozen=True)
class MonteCarlo:
    """Seeded antithetic sampling; the seed is mandatory."""

    samples: int
    seed: int

    def __post_init__(self):
        if self.samples < 2:
            raise ValueError("need at least 2 Monte Carlo samples")


@lru_cache(maxsize=32)
def _leggauss_cached(n):
    return np.polynomial.legendre.leggauss(n)


def _default_engine(kind):
    return ExactEnumeration() if kind == RADEMACHER else Quadrature()


@dataclass(frozen=True)
class SymmetricRV:
    """A symmetric scalar random-variable model with an attached engine."""

    kind: str
    engine: object = field(default=None)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown random variable kind {self.kind!r}")
        engine = self.engine if self.engine is not None else _default_engine(self.kind)
        if isinstance(engine, ExactEnumeration) and self.kind != RADEMACHER:
            raise ValueError("exact enumeration is only available for rademacher")
        if isinstance(engine, Quadrature) and self.kind == RADEMACHER:
            engine = ExactEnumeration()
        object.__setattr__(self, "engine", engine)

    @property
    def is_deterministic(self) -> bool:
        return not isinstance(self.engine, MonteCarlo)

    @property
    def is_complex(self) -> bool:
        return self.kind == COMPLEX_CIRCLE

    def nodes_weights(self, nodes=None):
        """Support nodes and weights.  The node multiset is symmetric by
        construction (each value appears with its negative at equal weight),
        and all nodes have modulus <= 1."""
        if isinstance(self.engine, MonteCarlo):
            return self._sampled_support()
        if self.kind == RADEMACHER:
            return np.array([1.0, -1.0]), np.array([0.5, 0.5])
        n = int(nodes or self.engine.nodes)
        if n % 2:
            n += 1
        half = n // 2
        if self.kind == COS_THETA:
            theta = 2.0 * np.pi * np.arange(half) / n
            vals = np.cos(theta)
        elif self.kind == COMPLEX_CIRCLE:
            theta = 2.0 * np.pi * np.arange(half) / n
            vals = np.exp(1j * theta)
        elif self.kind == UNIFORM_SYMMETRIC:
            x, w = _leggauss_cached(n)
            pos = x > 0
            vals, wts = x[pos], w[pos] * 0.5
            return np.concatenate([vals, -vals]), np.concatenate([wts, wts])
        else:  # pragma: no cover
            raise AssertionError(self.kind)
        weights = np.full(n, 1.0 / n)
        return np.concatenate([vals, -vals]), weights

    def _sampled_support(self):
        eng = self.engine
        rng = np.random.default_rng(eng.seed)
        half = eng.samples // 2
        if self.kind == RADEMACHER:
            draws = rng.choice([1.0, -1.0], size=half)
        elif self.kind == COS_THETA:
            draws = np.cos(rng.uniform(0.0, 2.0 * np.pi, half))
        elif self.kind == COMPLEX_CIRCLE:
            draws = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, half))
        else:
            draws = rng.uniform(-1.0, 1.0, half)
        vals = np.concatenate([draws, -draws])
        return vals, np.full(vals.size, 1.0 / vals.size)

    def tail_mass(self, eta) -> float:
        return tail_mass(self, eta)

    def to_json(self) -> dict:
        doc = {"kind": self.kind}
        if isinstance(self.engine, Quadrature):
            doc["engine"] = "quadrature"
            doc["nodes"] = self.engine.nodes
        elif isinstance(self.engine, MonteCarlo):
            doc["engine"] = "monte-carlo"
            doc["samples"] = self.engine.samples
            doc["seed"] = self.engine.seed
        else:
            doc["engine"] = "exact"
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "SymmetricRV":
        kind = doc["kind"]
        engine_tag = doc.get("engine", "exact" if kind == RADEMACHER else "quadrature")
        if engine_tag == "exact":
            engine = ExactEnumeration()
        elif engine_tag == "quadrature":
            engine = Quadrature(nodes=int(doc.get("nodes", DEFAULT_QUAD_NODES)))
        elif engine_tag == "monte-carlo":
            engine = MonteCarlo(samples=int(doc["samples"]), seed=int(doc["seed"]))
        else:
            raise ValueError(f"unknown engine {engine_tag!r}")
        return cls(kind, engine)


def rademacher() -> SymmetricRV:
    return SymmetricRV(RADEMACHER)


def cos_theta(nodes=DEFAULT_QUAD_NODES, adaptive=True) -> SymmetricRV:
    return SymmetricRV(COS_THETA, Quadrature(nodes, adaptive))


def complex_circle(nodes=DEFAULT_QUAD_NODES, adaptive=True) -> SymmetricRV:
    return SymmetricRV(COMPLEX_CIRCLE, Quadrature(nodes, adaptive))


def uniform_symmetric(nodes=64, adaptive=True) -> SymmetricRV:
    return SymmetricRV(UNIFORM_SYMMETRIC, Quadrature(nodes, adaptive))


# ---------------------------------------------------------------------------
# Convex gauges
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvexGauge:
    """A convex gauge phi on the line, evaluated as phi(|t|).

    ``power`` gauges (t -> |t|^p with p > 1) are strictly convex, strictly
    increasing on [0, inf), superadditive on nonnegatives, and have
    phi(0) = 0.  The ``abs`` gauge exists only for the counterexample that
    convexity alone characterizes nothing.
    """

    kind: str
    p: float | None = None

    def __post_init__(self):
        if self.kind == "power":
            if self.p is None or not self.p > 1:
                raise ValueError("power gauge requires p > 1")
        elif self.kind == "abs":
            if self.p is not None:
                raise ValueError("abs gauge takes no exponent")
        else:
            raise ValueError(f"unknown gauge kind {self.kind!r}")

    def __call__(self, t):
        a = np.abs(t)
        if self.kind == "abs":
            return a if isinstance(a, np.ndarray) else float(a)
        out = a**self.p
        return out if isinstance(out, np.ndarray) else float(out)

    def inverse(self, y):
        arr = np.asarray(y, dtype=float)
        if (arr < 0).any():
            raise ValueError("gauge inverse defined on [0, inf) only")
        out = arr if self.kind == "abs" else arr ** (1.0 / self.p)
        return float(out) if np.isscalar(y) or arr.ndim == 0 else out

    @property
    def strictly_convex(self) -> bool:
        return self.kind == "power"

    @property
    def label(self) -> str:
        return "abs" if self.kind == "abs" else f"pow:{self.p:g}"


def power_gauge(p) -> ConvexGauge:
    return ConvexGauge("power", float(p))


ABSOLUTE_VALUE = ConvexGauge("abs")


# ---------------------------------------------------------------------------
# Expectation engine
# ---------------------------------------------------------------------------


def grid_total(grids) -> int:
    return math.prod(len(vals) for vals, _ in grids)


def _expect_on_grids(grids, g) -> float:
    # fsum over the streamed product: exactly rounded, order independent.
    index_ranges = [range(len(vals)) for vals, _ in grids]
    values = [vals for vals, _ in grids]
    weights = [w for _, w in grids]
    return math.fsum(
        math.prod(weights[i][k] for i, k in enumerate(idx))
        * g(*(values[i][k] for i, k in enumerate(idx)))
        for idx in itertools.product(*index_ranges)
    )


def evaluate_with_adaptive_nodes(rvs, evaluate, budget=DEFAULT_BUDGET) -> float:
    """Run ``evaluate(grids)`` while doubling adaptive quadrature nodes until
    two successive values agree to 1e-9, the per-model node ceiling is hit,
    or doubling would exceed ``budget``."""
    rvs = list(rvs)
    node_counts = [
        rv.engine.nodes if isinstance(rv.engine, Quadrature) else None for rv in rvs
    ]
    caps = [_ADAPTIVE_NODE_CAP.get(rv.kind, 1 << 16) for rv in rvs]
    adaptive = [
        isinstance(rv.engine, Quadrature) and rv.engine.adaptive for rv in rvs
    ]

    def grids_at(counts):
        return [rv.nodes_weights(nodes=c) for rv, c in zip(rvs, counts)]

    grids = grids_at(node_counts)
    if grid_total(grids) > budget:
        raise BudgetExceededError(
            f"product support of size {grid_total(grids)} exceeds budget {budget}"
        )
    value = evaluate(grids)
    if not any(adaptive):
        return value
    while True:
        doubled = [
            2 * c if (c and a and 2 * c <= cap) else c
            for c, a, cap in zip(node_counts, adaptive, caps)
        ]
        if doubled == node_counts:
            return value
        grids = grids_at(doubled)
        if grid_total(grids) > budget:
            return value
        refined = evaluate(grids)
        if abs(refined - value) <= ADAPTIVE_TOL * max(1.0, abs(refined)):
            return refined
        value = refined
        node_counts = doubled


def expect(rvs, g, budget=DEFAULT_BUDGET) -> float:
    """E[g(r_1, ..., r_k)] for independent symmetric models.

    Rademacher components are enumerated exactly; quadrature components use
    their (adaptively doubled) node rules; Monte Carlo components use their
    seeded antithetic samples.  ``g`` maps a scalar tuple to a real number.
    """
    rvs = list(rvs)
    if not rvs:
        raise ValueError("expect needs at least one random variable")
    return evaluate_with_adaptive_nodes(rvs, lambda grids: _expect_on_grids(grids, g), budget)


def tail_mass(rv: SymmetricRV, eta) -> float:
    """P{|r - 1| < eta}, closed form for every shipped law."""
    eta = float(eta)
    if eta <= 0:
        raise ValueError("eta must be positive")
    if eta > 2:
        return 1.0
    if rv.kind == RADEMACHER:
        return 0.5 if eta <= 2 else 1.0
    if rv.kind == COS_THETA:
        return math.acos(1.0 - eta) / math.pi
    if rv.kind == UNIFORM_SYMMETRIC:
        return eta / 2.0
    if rv.kind == COMPLEX_CIRCLE:
        return 2.0 * math.asin(eta / 2.0) / math.pi
    raise ValueError(f"unknown kind {rv.kind!r}")  # pragma: no cover


# ---------------------------------------------------------------------------
# Vectorized product-grid enumeration (shared by series / lifting code)
# ---------------------------------------------------------------------------


def product_grid_chunks(grids, max_rows=1 << 16):
    """Yield (V, w) chunks of the product support in deterministic
    mixed-radix order (last coordinate fastest).

    V has one support point per row, one column per variable; w holds the
    product weights.  Chunk boundaries depend only on ``max_rows``, never on
    worker count, so downstream reductions are reproducible.
    """
    sizes = [len(vals) for vals, _ in grids]
    total = math.prod(sizes)
    complex_any = any(np.iscomplexobj(vals) for vals, _ in grids)
    dtype = np.complex128 if complex_any else np.float64
    for start in range(0, total, max_rows):
        stop = min(start + max_rows, total)
        idx = np.arange(start, stop)
        V = np.empty((idx.size, len(grids)), dtype=dtype)
        w = np.ones(idx.size)
        rem = idx
        for pos in range(len(grids) - 1, -1, -1):
            vals, wts = grids[pos]
            digit = rem % sizes[pos]
            rem = rem // sizes[pos]
            V[:, pos] = np.asarray(vals)[digit]
            w *= np.asarray(wts)[digit]
        yield V, w
