"""Optimization-based estimators for convexity and monotonicity moduli:
the averaged convexity modulus, the strongly-extreme-point modulus, the
uniform and local monotonicity moduli of a lattice, and the circle-averaged
complex moduli.

Every estimate is a *witnessed upper bound* on the true infimum: the value is
the objective evaluated at the returned witnesses.  Multistart compass search
is the default method; in low dimension an exhaustive refined grid oracle is
run as a cross-check and the better (smaller) of the two witnesses is kept.
Nothing here claims certified lower bounds.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .optimize import multistart_minimize, refined_grid_minimize
from .randomvars import ConvexGauge, SymmetricRV
from .spaces import COMPLEX, REAL, KotheLattice, NormedSpace

__all__ = [
    "ModulusEstimate",
    "SandwichReport",
    "delta_phi",
    "strong_extreme_modulus",
    "monotonicity_modulus",
    "local_monotonicity_modulus",
    "complex_modulus",
    "classical_convexity_modulus",
    "sandwich_check_eq1_eq2",
    "delta_phi_objective",
    "strong_extreme_objective",
    "monotonicity_objective",
    "complex_circle_objective",
]

ORACLE_AGREE_TOL = 2e-3
_ROW_BUDGET = 4_000_000  # max scalar norm evaluations per internal batch


@dataclass(frozen=True)
class ModulusEstimate:
    """A witnessed upper-bound estimate of a modulus infimum."""

    epsilon: float
    value: float
    witness_x: np.ndarray
    witness_y: np.ndarray
    method: str
    confidence: str
    starts: int = 0
    evals: int = 0
    spread: float = 0.0
    oracle_value: float | None = None
    flags: tuple = field(default_factory=tuple)

    def oracle_gap(self) -> float | None:
        if self.oracle_value is None:
            return None
        return abs(self.value - self.oracle_value)


# ---------------------------------------------------------------------------
# Objectives (public so tests can re-evaluate witnesses independently)
# ---------------------------------------------------------------------------


def _batched_rows(fn, rows, per_row_cost):
    """Evaluate fn on row chunks sized to keep scratch arrays bounded."""
    m = rows.shape[0]
    step = max(1, _ROW_BUDGET // max(per_row_cost, 1))
    if m <= step:
        return fn(rows)
    out = np.empty(m)
    for start in range(0, m, step):
        out[start : start + step] = fn(rows[start : start + step])
    return out


def delta_phi_objective(space: NormedSpace, gauge: ConvexGauge, rv: SymmetricRV, nodes=None):
    """(x, y) -> E[phi(||x + r y||)] - phi(1), vectorized over aligned rows."""
    vals, wts = rv.nodes_weights(nodes)
    if np.iscomplexobj(vals) and space.field == REAL:
        raise ValueError("complex random model over a real space")
    phi1 = float(gauge(1.0))
    k = len(vals)

    def objective(x_rows, y_rows):
        x_rows = np.atleast_2d(x_rows)
        y_rows = np.atleast_2d(y_rows)
        pairs = np.concatenate([x_rows, y_rows], axis=1)

        def run(chunk):
            xs = chunk[:, : space.dim]
            ys = chunk[:, space.dim :]
            m = xs.shape[0]
            S = xs[:, None, :] + vals[None, :, None] * ys[:, None, :]
            norms = space.norm_rows(S.reshape(m * k, space.dim)).reshape(m, k)
            return gauge(norms) @ wts - phi1

        return _batched_rows(run, pairs, per_row_cost=k * space.dim)

    return objective


def strong_extreme_objective(space: NormedSpace, x):
    """y -> max(||x + y||, ||x - y||) - 1 for a fixed unit x."""
    x = space.as_vector(x)

    def objective(y_rows):
        y_rows = np.atleast_2d(y_rows)
        plus = space.norm_rows(x[None, :] + y_rows)
        minus = space.norm_rows(x[None, :] - y_rows)
        return np.maximum(plus, minus) - 1.0

    return objective


def monotonicity_objective(lattice: KotheLattice, p):
    """(x, y) -> || (x^p + y^p)^(1/p) || - 1 on nonnegative rows."""
    p = float(p)
    if not (1 <= p < math.inf):
        raise ValueError("monotonicity exponent must satisfy 1 <= p < inf")

    def objective(x_rows, y_rows):
        x_rows = np.abs(np.atleast_2d(x_rows))
        y_rows = np.abs(np.atleast_2d(y_rows))
        if p == 1.0:
            comb = x_rows + y_rows
        else:
            comb = (x_rows**p + y_rows**p) ** (1.0 / p)
        return lattice.base_norm_rows(comb) - 1.0

    return objective


def complex_circle_objective(space: NormedSpace, p_or_inf, x, theta_nodes=None):
    """y -> circle p-mean (or sup) of ||x + e^(i theta) y|| minus 1.

    The sup case sharpens the node maximum by a parabolic fit through the
    best node and its neighbors; otherwise the minimization could sit in the
    discretization gap below the true circle supremum.
    """
    if space.field != COMPLEX:
        raise ValueError("complex modulus needs a complex space")
    x = space.as_vector(x)
    is_sup = math.isinf(p_or_inf) if isinstance(p_or_inf, float) else p_or_inf == math.inf
    k = int(theta_nodes or (1024 if is_sup else 256))
    phases = np.exp(2j * np.pi * np.arange(k) / k)
    p = None if is_sup else float(p_or_inf)

    def objective(y_rows):
        y_rows = np.atleast_2d(y_rows)

        def run(chunk):
            m = chunk.shape[0]
            S = x[None, None, :] + phases[None, :, None] * chunk[:, None, :]
            norms = space.norm_rows(S.reshape(m * k, space.dim)).reshape(m, k)
            if is_sup:
                idx = norms.argmax(axis=1)
                rows = np.arange(m)
                mid = norms[rows, idx]
                left = norms[rows, (idx - 1) % k]
                right = norms[rows, (idx + 1) % k]
                curv = 2.0 * mid - left - right
                bump = np.where(curv > 1e-15, (right - left) ** 2 / (8.0 * np.maximum(curv, 1e-300)), 0.0)
                return mid + bump - 1.0
            return ((norms**p).mean(axis=1)) ** (1.0 / p) - 1.0

        return _batched_rows(run, y_rows, per_row_cost=k * space.dim)

    return objective


# ---------------------------------------------------------------------------
# Sphere parametrizations (multistart renormalizers and grid decoders)
# ---------------------------------------------------------------------------


def _normalize_block(space, block, radius, positive=False):
    if positive:
        block = np.abs(block)
    norms = space.norm_rows(block)
    fallback = np.zeros(space.dim, dtype=space.dtype)
    fallback[0] = 1.0
    bad = norms < 1e-12
    if bad.any():
        block = block.copy()
        block[bad] = fallback
        norms = np.where(bad, space.norm(fallback), norms)
    return block * (radius / norms)[:, None]


def _pair_renorm(space, eps, positive=False):
    d = space.dim

    def renorm(rows):
        rows = np.atleast_2d(np.asarray(rows, dtype=float))
        x = _normalize_block(space, rows[:, :d], 1.0, positive)
        y = _normalize_block(space, rows[:, d:], eps, positive)
        return np.concatenate([x, y], axis=1)

    return renorm


def _single_renorm(space, radius, positive=False, complex_params=False):
    def renorm(rows):
        rows = np.atleast_2d(np.asarray(rows, dtype=float))
        vec = rows[:, : space.dim] + 1j * rows[:, space.dim :] if complex_params else rows
        vec = _normalize_block(space, vec, radius, positive)
        if complex_params:
            return np.concatenate([vec.real, vec.imag], axis=1)
        return np.asarray(vec, dtype=float)

    return renorm


def _angles_to_unit(space, angles, positive=False):
    """Map angle rows to unit vectors of the space (dim 2 or 3)."""
    angles = np.atleast_2d(angles)
    if space.dim == 2:
        d = np.stack([np.cos(angles[:, 0]), np.sin(angles[:, 0])], axis=1)
    elif space.dim == 3:
        th, ph = angles[:, 0], angles[:, 1]
        d = np.stack(
            [np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=1
        )
    else:
        raise ValueError("angle parametrization only covers dim 2 and 3")
    if positive:
        d = np.abs(d)
    return d / space.norm_rows(d)[:, None]


def _sphere_axes(dim, positive, coarse):
    if dim == 2:
        if positive:
            return [(0.0, math.pi / 2, coarse, False)]
        return [(0.0, 2 * math.pi, 2 * coarse, True)]
    if positive:
        return [(0.0, math.pi / 2, coarse, False), (0.0, math.pi / 2, coarse, False)]
    return [(0.0, math.pi, coarse, False), (0.0, 2 * math.pi, 2 * coarse, True)]


def _canonical_pairs(space, eps):
    """Deterministic starting pairs: coordinate pairs plus sign-pattern mixes.
    The renormalizer rescales them onto the right spheres."""
    del eps
    d = space.dim
    eye = np.eye(d)
    ones = np.ones(d)
    alt = np.array([(-1.0) ** i for i in range(d)])
    combos = [
        (eye[0], eye[0]),
        (eye[0], eye[min(1, d - 1)]),
        (ones, alt),
        (ones, ones),
        (alt, eye[0]),
    ]
    return [np.concatenate([a, b]) for a, b in combos]


def _confidence(ms_value, oracle_value, top_gap):
    if oracle_value is not None:
        return "oracle-agreed" if abs(ms_value - oracle_value) <= ORACLE_AGREE_TOL else "low"
    return "multistart" if top_gap <= 1e-4 else "low"


def _should_cross_check(cross_check, dim, limit):
    if cross_check == "auto":
        return dim <= limit
    return bool(cross_check)


def _flags_for(eps):
    return ("epsilon-exceeds-ball-diameter",) if eps > 2 else ()


# ---------------------------------------------------------------------------
# Estimators
# ---------------------------------------------------------------------------


def delta_phi(
    space: NormedSpace,
    gauge: ConvexGauge,
    rv: SymmetricRV,
    eps,
    *,
    starts=64,
    seed=0,
    cross_check="auto",
    nodes=None,
    step_min=1e-6,
) -> ModulusEstimate:
    """The averaged convexity modulus
    inf{ E[phi(||x + r y||)] - phi(1) : ||x|| = 1, ||y|| = eps }.

    Restricting ||y|| >= eps to the boundary ||y|| = eps is sound because
    lambda -> E[phi(||x + lambda r y||)] is even, convex, hence nondecreasing
    in |lambda|.
    """
    eps = float(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if not gauge.strictly_convex:
        raise ValueError("moduli require a strictly convex gauge")
    objective = delta_phi_objective(space, gauge, rv, nodes)
    d = space.dim

    def batch(rows):
        return objective(rows[:, :d], rows[:, d:])

    renorm = _pair_renorm(space, eps)
    ms = multistart_minimize(
        batch,
        2 * d,
        starts=starts,
        seed=seed,
        renorm=renorm,
        canonical=_canonical_pairs(space, eps),
        step_min=step_min,
    )
    best_rows = renorm(ms.z[None, :])
    wx, wy = best_rows[0, :d], best_rows[0, d:]
    value = float(batch(best_rows)[0])
    oracle_value = None
    if _should_cross_check(cross_check, d, 3) and space.field == REAL:
        coarse = 720 if d == 2 else 24

        def grid_batch(angle_rows):
            na = 1 if d == 2 else 2
            xs = _angles_to_unit(space, angle_rows[:, :na])
            ys = eps * _angles_to_unit(space, angle_rows[:, na:])
            return objective(xs, ys)

        axes = _sphere_axes(d, False, coarse) + _sphere_axes(d, False, coarse)
        pt, oracle_value, _ = refined_grid_minimize(grid_batch, axes, rounds=3)
        if oracle_value < value:
            na = 1 if d == 2 else 2
            wx = _angles_to_unit(space, pt[None, :na])[0]
            wy = eps * _angles_to_unit(space, pt[None, na:])[0]
            value = float(objective(wx[None], wy[None])[0])
    return ModulusEstimate(
        epsilon=eps,
        value=value,
        witness_x=wx,
        witness_y=wy,
        method="multistart+grid" if oracle_value is not None else "multistart",
        confidence=_confidence(value, oracle_value, ms.top_gap),
        starts=ms.starts,
        evals=ms.evals,
        spread=ms.spread,
        oracle_value=oracle_value,
        flags=_flags_for(eps),
    )


def strong_extreme_modulus(
    space: NormedSpace,
    x,
    eps,
    *,
    starts=32,
    seed=0,
    cross_check="auto",
    step_min=1e-6,
) -> ModulusEstimate:
    """inf{ max(||x + y||, ||x - y||) - 1 : ||y|| = eps } at a fixed unit x."""
    eps = float(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    x = space.as_vector(x)
    nx = space.norm(x)
    if abs(nx - 1.0) > 1e-9:
        warnings.warn(f"renormalizing x with ||x|| = {nx!r} to the unit sphere")
        x = x / nx
    objective = strong_extreme_objective(space, x)
    renorm = _single_renorm(space, eps, complex_params=(space.field == COMPLEX))
    nparams = space.dim * (2 if space.field == COMPLEX else 1)

    def batch(rows):
        if space.field == COMPLEX:
            return objective(rows[:, : space.dim] + 1j * rows[:, space.dim :])
        return objective(rows)

    eye = np.eye(nparams)
    canonical = [eye[i] for i in range(min(nparams, 4))] + [np.ones(nparams)]
    ms = multistart_minimize(
        batch,
        nparams,
        starts=starts,
        seed=seed,
        renorm=renorm,
        canonical=canonical,
        step_min=step_min,
    )
    best = renorm(ms.z[None, :])[0]
    wy = best[: space.dim] + 1j * best[space.dim :] if space.field == COMPLEX else best
    value = float(objective(wy[None])[0])
    oracle_value = None
    if _should_cross_check(cross_check, space.dim, 3) and space.field == REAL:
        coarse = 1440 if space.dim == 2 else 90

        def grid_batch(angle_rows):
            return objective(eps * _angles_to_unit(space, angle_rows))

        pt, oracle_value, _ = refined_grid_minimize(
            grid_batch, _sphere_axes(space.dim, False, coarse), rounds=3
        )
        if oracle_value < value:
            wy = eps * _angles_to_unit(space, pt[None, :])[0]
            value = float(objective(wy[None])[0])
    return ModulusEstimate(
        epsilon=eps,
        value=value,
        witness_x=x,
        witness_y=wy,
        method="multistart+grid" if oracle_value is not None else "multistart",
        confidence=_confidence(value, oracle_value, ms.top_gap),
        starts=ms.starts,
        evals=ms.evals,
        spread=ms.spread,
        oracle_value=oracle_value,
        flags=_flags_for(eps),
    )


def monotonicity_modulus(
    lattice: KotheLattice,
    p,
    eps,
    *,
    starts=32,
    seed=0,
    cross_check="auto",
    step_min=1e-6,
) -> ModulusEstimate:
    """M_p(eps) = inf{ ||(x^p + y^p)^(1/p)|| - 1 : ||x|| = 1, ||y|| = eps },
    restricted to nonnegative x, y (the objective only sees moduli)."""
    eps = float(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    objective = monotonicity_objective(lattice, p)
    d = lattice.dim

    def batch(rows):
        return objective(rows[:, :d], rows[:, d:])

    renorm = _pair_renorm(lattice, eps, positive=True)
    ms = multistart_minimize(
        batch,
        2 * d,
        starts=starts,
        seed=seed,
        renorm=renorm,
        canonical=_canonical_pairs(lattice, eps),
        step_min=step_min,
    )
    best_rows = renorm(ms.z[None, :])
    wx, wy = best_rows[0, :d], best_rows[0, d:]
    value = float(batch(best_rows)[0])
    oracle_value = None
    if _should_cross_check(cross_check, d, 3):
        coarse = 721 if d == 2 else 37

        def grid_batch(angle_rows):
            na = 1 if d == 2 else 2
            xs = _angles_to_unit(lattice, angle_rows[:, :na], positive=True)
            ys = eps * _angles_to_unit(lattice, angle_rows[:, na:], positive=True)
            return objective(xs, ys)

        axes = _sphere_axes(d, True, coarse) + _sphere_axes(d, True, coarse)
        pt, oracle_value, _ = refined_grid_minimize(grid_batch, axes, rounds=3)
        if oracle_value < value:
            na = 1 if d == 2 else 2
            wx = _angles_to_unit(lattice, pt[None, :na], positive=True)[0]
            wy = eps * _angles_to_unit(lattice, pt[None, na:], positive=True)[0]
            value = float(objective(wx[None], wy[None])[0])
    return ModulusEstimate(
        epsilon=eps,
        value=value,
        witness_x=wx,
        witness_y=wy,
        method="multistart+grid" if oracle_value is not None else "multistart",
        confidence=_confidence(value, oracle_value, ms.top_gap),
        starts=ms.starts,
        evals=ms.evals,
        spread=ms.spread,
        oracle_value=oracle_value,
        flags=_flags_for(eps),
    )


def local_monotonicity_modulus(
    lattice: KotheLattice,
    p,
    x,
    eps,
    *,
    starts=32,
    seed=0,
    cross_check="auto",
    step_min=1e-6,
) -> ModulusEstimate:
    """N_p(eps; x) = inf{ ||(|x|^p + y^p)^(1/p)|| - 1 : ||y|| = eps } at fixed x."""
    eps = float(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    x = np.abs(lattice.as_vector(x))
    nx = lattice.norm(x)
    if abs(nx - 1.0) > 1e-9:
        warnings.warn(f"renormalizing x with ||x|| = {nx!r} to the unit sphere")
        x = x / nx
    objective = monotonicity_objective(lattice, p)

    def batch(y_rows):
        return objective(np.broadcast_to(x, (y_rows.shape[0], x.size)), y_rows)

    renorm = _single_renorm(lattice, eps, positive=True)
    eye = np.eye(lattice.dim)
    canonical = [eye[i] for i in range(min(lattice.dim, 4))] + [np.ones(lattice.dim)]
    ms = multistart_minimize(
        batch,
        lattice.dim,
        starts=starts,
        seed=seed,
        renorm=renorm,
        canonical=canonical,
        step_min=step_min,
    )
    wy = renorm(ms.z[None, :])[0]
    value = float(batch(wy[None])[0])
    oracle_value = None
    if _should_cross_check(cross_check, lattice.dim, 3):
        coarse = 1441 if lattice.dim == 2 else 91

        def grid_batch(angle_rows):
            return batch(eps * _angles_to_unit(lattice, angle_rows, positive=True))

        pt, oracle_value, _ = refined_grid_minimize(
            grid_batch, _sphere_axes(lattice.dim, True, coarse), rounds=3
        )
        if oracle_value < value:
            wy = eps * _angles_to_unit(lattice, pt[None, :], positive=True)[0]
            value = float(batch(wy[None])[0])
    return ModulusEstimate(
        epsilon=eps,
        value=value,
        witness_x=x,
        witness_y=wy,
        method="multistart+grid" if oracle_value is not None else "multistart",
        confidence=_confidence(value, oracle_value, ms.top_gap),
        starts=ms.starts,
        evals=ms.evals,
        spread=ms.spread,
        oracle_value=oracle_value,
        flags=_flags_for(eps),
    )


def complex_modulus(
    space: NormedSpace,
    p_or_inf,
    x,
    eps,
    *,
    starts=32,
    seed=0,
    cross_check="auto",
    theta_nodes=None,
    step_min=1e-6,
) -> ModulusEstimate:
    """H_p(eps; x) (circle p-mean) or H_inf(eps; x) (circle sup) minimized
    over ||y|| = eps in a complex space.

    The grid oracle (dim <= 2) parametrizes y by modulus direction and one
    relative phase: all shipped complex norms depend on coordinate moduli
    only, and a global phase of y shifts theta, leaving circle means and sups
    unchanged.
    """
    eps = float(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if space.field != COMPLEX:
        raise ValueError("complex modulus requires a complex space")
    x = space.as_vector(x)
    nx = space.norm(x)
    if abs(nx - 1.0) > 1e-9:
        warnings.warn(f"renormalizing x with ||x|| = {nx!r} to the unit sphere")
        x = x / nx
    objective = complex_circle_objective(space, p_or_inf, x, theta_nodes)
    d = space.dim

    def batch(rows):
        return objective(rows[:, :d] + 1j * rows[:, d:])

    renorm = _single_renorm(space, eps, complex_params=True)
    eye = np.eye(2 * d)
    canonical = [eye[i] for i in range(min(2 * d, 4))] + [np.ones(2 * d)]
    ms = multistart_minimize(
        batch,
        2 * d,
        starts=starts,
        seed=seed,
        renorm=renorm,
        canonical=canonical,
        step_min=step_min,
    )
    best = renorm(ms.z[None, :])[0]
    wy = best[:d] + 1j * best[d:]
    value = float(objective(wy[None])[0])
    oracle_value = None
    if _should_cross_check(cross_check, d, 2):
        if d == 1:
            cand = np.array([[eps + 0j]])
            oracle_value = float(objective(cand)[0])
            if oracle_value < value:
                wy, value = cand[0], oracle_value
        else:

            def grid_batch(rows):
                alpha, gamma = rows[:, 0], rows[:, 1]
                dirs = np.stack(
                    [np.cos(alpha) + 0j, np.sin(alpha) * np.exp(1j * gamma)], axis=1
                )
                ys = dirs * (eps / space.norm_rows(dirs))[:, None]
                return objective(ys)

            axes = [(0.0, math.pi / 2, 181, False), (0.0, 2 * math.pi, 360, True)]
            pt, oracle_value, _ = refined_grid_minimize(grid_batch, axes, rounds=3)
            if oracle_value < value:
                dirs = np.array([math.cos(pt[0]), math.sin(pt[0]) * np.exp(1j * pt[1])])
                wy = dirs * (eps / space.norm(dirs))
                value = float(objective(wy[None])[0])
    return ModulusEstimate(
        epsilon=eps,
        value=value,
        witness_x=x,
        witness_y=wy,
        method="multistart+grid" if oracle_value is not None else "multistart",
        confidence=_confidence(value, oracle_value, ms.top_gap),
        starts=ms.starts,
        evals=ms.evals,
        spread=ms.spread,
        oracle_value=oracle_value,
        flags=_flags_for(eps),
    )


def classical_convexity_modulus(
    space: NormedSpace, eps, *, starts=32, seed=0, cross_check="auto", step_min=1e-6
) -> ModulusEstimate:
    """The classical min-max convexity quantity
    inf{ max(||x + y||, ||x - y||) - 1 : ||x|| = 1, ||y|| = eps }."""
    eps = float(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    d = space.dim

    def pair_objective(x_rows, y_rows):
        plus = space.norm_rows(x_rows + y_rows)
        minus = space.norm_rows(x_rows - y_rows)
        return np.maximum(plus, minus) - 1.0

    def batch(rows):
        return pair_objective(rows[:, :d], rows[:, d:])

    renorm = _pair_renorm(space, eps)
    ms = multistart_minimize(
        batch,
        2 * d,
        starts=starts,
        seed=seed,
        renorm=renorm,
        canonical=_canonical_pairs(space, eps),
        step_min=step_min,
    )
    best_rows = renorm(ms.z[None, :])
    wx, wy = best_rows[0, :d], best_rows[0, d:]
    value = float(batch(best_rows)[0])
    oracle_value = None
    if _should_cross_check(cross_check, d, 3) and space.field == REAL:
        coarse = 720 if d == 2 else 24

        def grid_batch(angle_rows):
            na = 1 if d == 2 else 2
            xs = _angles_to_unit(space, angle_rows[:, :na])
            ys = eps * _angles_to_unit(space, angle_rows[:, na:])
            return pair_objective(xs, ys)

        axes = _sphere_axes(d, False, coarse) + _sphere_axes(d, False, coarse)
        pt, oracle_value, _ = refined_grid_minimize(grid_batch, axes, rounds=3)
        if oracle_value < value:
            na = 1 if d == 2 else 2
            wx = _angles_to_unit(space, pt[None, :na])[0]
            wy = eps * _angles_to_unit(space, pt[None, na:])[0]
            value = float(pair_objective(wx[None], wy[None])[0])
    return ModulusEstimate(
        epsilon=eps,
        value=value,
        witness_x=wx,
        witness_y=wy,
        method="multistart+grid" if oracle_value is not None else "multistart",
        confidence=_confidence(value, oracle_value, ms.top_gap),
        starts=ms.starts,
        evals=ms.evals,
        spread=ms.spread,
        oracle_value=oracle_value,
        flags=_flags_for(eps),
    )


# ---------------------------------------------------------------------------
# Sandwich relations between M_p/M_1 and N_p/N_1
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SandwichReport:
    p: float
    eps_grid: tuple
    mp_values: tuple
    m1_values: tuple
    np_values: tuple
    n1_values: tuple
    uniform_rhs_violation: float
    local_rhs_violation: float
    empirical_C_uniform: float
    empirical_C_local: float
    x_used: np.ndarray

    def passed(self, tol=1e-6) -> bool:
        return max(self.uniform_rhs_violation, self.local_rhs_violation) <= tol


def _least_sandwich_constant(m_at, targets, powers, tol=1e-9, rel=1e-6):
    """Least C >= 1 with M(eps^p / C) / C <= target(eps) + tol on the grid.

    The left side is nonincreasing in C (the modulus is nondecreasing and is
    divided by C), so bisection applies.  Returns inf if no C <= 2^60 works.
    """

    def admissible(C):
        return all(
            m_at(arg / C) / C <= target + tol for arg, target in zip(powers, targets)
        )

    lo, hi = 1.0, 1.0
    if admissible(1.0):
        return 1.0
    for _ in range(60):
        hi *= 2.0
        if admissible(hi):
            break
        lo = hi
    else:
        return math.inf
    while hi - lo > rel * hi:
        mid = 0.5 * (lo + hi)
        if admissible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def sandwich_check_eq1_eq2(
    lattice: KotheLattice,
    p,
    eps_grid,
    x=None,
    *,
    starts=12,
    seed=0,
    tol=1e-9,
) -> SandwichReport:
    """Check the two-sided comparison between the p-power and first-power
    monotonicity moduli on an epsilon grid.

    The upper comparisons M_p <= M_1 and N_p <= N_1 are verified directly
    (they follow from (a^p + b^p)^(1/p) <= a + b).  For the lower
    comparisons, the least empirical constant C >= 1 with
    C^-1 M_1(C^-1 eps^p) <= M_p(eps) across the grid is found by bisection.
    The constants are empirical consistency checks, not validated constants
    (the literature value is not reproduced here).
    """
    p = float(p)
    eps_grid = tuple(float(e) for e in eps_grid)
    if not eps_grid or not all(0 < e <= 1 for e in eps_grid):
        raise ValueError("eps grid must lie in (0, 1]")
    if x is None:
        x = np.ones(lattice.dim)
    x = np.abs(lattice.as_vector(x))
    x = x / lattice.norm(x)

    kwargs = dict(starts=starts, seed=seed, cross_check="auto", step_min=1e-5)
    mp_vals = tuple(monotonicity_modulus(lattice, p, e, **kwargs).value for e in eps_grid)
    np_vals = tuple(
        local_monotonicity_modulus(lattice, p, x, e, **kwargs).value for e in eps_grid
    )

    m1_cache: dict = {}
    n1_cache: dict = {}

    def m1(t):
        if t not in m1_cache:
            m1_cache[t] = monotonicity_modulus(lattice, 1.0, t, **kwargs).value
        return m1_cache[t]

    def n1(t):
        if t not in n1_cache:
            n1_cache[t] = local_monotonicity_modulus(lattice, 1.0, x, t, **kwargs).value
        return n1_cache[t]

    m1_vals = tuple(m1(e) for e in eps_grid)
    n1_vals = tuple(n1(e) for e in eps_grid)
    uniform_rhs = max(mp - m1v for mp, m1v in zip(mp_vals, m1_vals))
    local_rhs = max(npv - n1v for npv, n1v in zip(np_vals, n1_vals))
    powers = [e**p for e in eps_grid]
    c_uniform = _least_sandwich_constant(m1, mp_vals, powers, tol=max(tol, 1e-6))
    c_local = _least_sandwich_constant(n1, np_vals, powers, tol=max(tol, 1e-6))
    return SandwichReport(
        p=p,
        eps_grid=eps_grid,
        mp_values=mp_vals,
        m1_values=m1_vals,
        np_values=np_vals,
        n1_values=n1_vals,
        uniform_rhs_violation=float(max(uniform_rhs, 0.0)),
        local_rhs_violation=float(max(local_rhs, 0.0)),
        empirical_C_uniform=float(c_uniform),
        empirical_C_local=float(c_local),
        x_used=x,
    )
