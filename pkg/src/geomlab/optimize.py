"""Derivative-free optimization used by the modulus estimators.

Norm oracles need not be smooth (l1 and max norms are not), so local search
is a batched compass pattern: propose all coordinate moves at the current
step size plus a few seeded random directions, renormalize candidates onto
their constraint set, move to the best strict improvement, halve the step
otherwise.  Multistart wraps this with deterministic seeding and a
lexicographic winner rule, so results are reproducible for any worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .util import parallel_map

__all__ = ["MultistartResult", "compass_minimize", "multistart_minimize", "refined_grid_minimize"]


def compass_minimize(
    batch_fn,
    z0,
    renorm=None,
    step=0.5,
    step_min=1e-6,
    max_evals=20000,
    rng=None,
    extra_dirs=2,
):
    """Batched compass search from one start point.

    ``batch_fn`` maps an (m, k) array of parameter rows to m objective
    values; ``renorm`` projects parameter rows back onto the feasible
    parametrization (applied to every candidate).  Returns (z, value, evals).
    """
    z = np.asarray(z0, dtype=float).copy()
    if renorm is not None:
        z = renorm(z[None, :])[0]
    value = float(batch_fn(z[None, :])[0])
    evals = 1
    k = z.size
    eye = np.eye(k)
    while step >= step_min and evals < max_evals:
        dirs = [eye, -eye]
        if extra_dirs and rng is not None:
            rand = rng.standard_normal((extra_dirs, k))
            norms = np.linalg.norm(rand, axis=1, keepdims=True)
            rand = rand / np.where(norms > 0, norms, 1.0)
            dirs.extend([rand, -rand])
        D = np.vstack(dirs)
        cand = z[None, :] + step * D
        if renorm is not None:
            cand = renorm(cand)
        vals = batch_fn(cand)
        evals += len(vals)
        best = int(np.argmin(vals))
        if vals[best] < value - 1e-15:
            z = cand[best]
            value = float(vals[best])
        else:
            step *= 0.5
    return z, value, evals


@dataclass(frozen=True)
class MultistartResult:
    z: np.ndarray
    value: float
    starts: int
    evals: int
    spread: float
    top_gap: float  # distance between the two best local minima found


def multistart_minimize(
    batch_fn,
    nparams,
    starts=64,
    seed=0,
    renorm=None,
    canonical=None,
    step=0.5,
    step_min=1e-6,
    max_evals=20000,
    extra_dirs=2,
) -> MultistartResult:
    """Seeded multistart compass search with a deterministic winner.

    ``canonical`` starts (if given) are tried first; the remaining starts are
    standard normal draws from child seeds of ``seed``.  The winner is the
    lexicographically smallest (value, parameter bytes) pair, which makes the
    outcome independent of evaluation order and worker count.
    """
    points = [np.asarray(c, dtype=float) for c in (canonical or [])]
    root = np.random.default_rng(seed)
    child_seeds = root.integers(0, 2**63 - 1, size=starts + len(points))
    while len(points) < starts:
        g = np.random.default_rng(child_seeds[len(points)])
        points.append(g.standard_normal(nparams))

    def run(item):
        idx, z0 = item
        rng = np.random.default_rng(int(child_seeds[idx]) ^ 0x9E3779B97F4A7C15)
        return compass_minimize(
            batch_fn,
            z0,
            renorm=renorm,
            step=step,
            step_min=step_min,
            max_evals=max_evals,
            rng=rng,
            extra_dirs=extra_dirs,
        )

    results = parallel_map(run, list(enumerate(points)))
    ordered = sorted(results, key=lambda r: (r[1], r[0].tobytes()))
    z, value, _ = ordered[0]
    values = sorted(r[1] for r in results)
    total_evals = sum(r[2] for r in results)
    top_gap = values[1] - values[0] if len(values) > 1 else 0.0
    return MultistartResult(
        z=z,
        value=value,
        starts=len(points),
        evals=total_evals,
        spread=values[-1] - values[0],
        top_gap=top_gap,
    )


def refined_grid_minimize(batch_fn, axes, rounds=3, factor=10, chunk=262144):
    """Exhaustive grid minimization with local refinement.

    ``axes`` is a list of (lo, hi, count, periodic) tuples.  Each round lays
    a uniform grid over the current boxes, evaluates it in deterministic
    chunks, then shrinks every axis to +-1 grid step around the best cell.
    Returns (point, value, final_steps).
    """
    boxes = [(float(lo), float(hi)) for lo, hi, _, _ in axes]
    counts = [int(c) for _, _, c, _ in axes]
    periodic = [bool(p) for _, _, _, p in axes]
    best_pt = None
    best_val = math.inf
    steps = [0.0] * len(axes)
    for round_idx in range(rounds):
        grids = []
        for (lo, hi), cnt, per in zip(boxes, counts, periodic):
            if per:
                pts = lo + (hi - lo) * np.arange(cnt) / cnt
            else:
                pts = np.linspace(lo, hi, cnt)
            grids.append(pts)
        mesh = np.meshgrid(*grids, indexing="ij")
        flat = np.stack([m.ravel() for m in mesh], axis=1)
        total = flat.shape[0]
        vals = np.empty(total)
        for start in range(0, total, chunk):
            stop = min(start + chunk, total)
            vals[start:stop] = batch_fn(flat[start:stop])
        idx = int(np.argmin(vals))
        round_pt, round_val = flat[idx], float(vals[idx])
        if round_val < best_val:
            best_pt, best_val = round_pt, round_val
        new_boxes = []
        for d, ((lo, hi), cnt, per) in enumerate(zip(boxes, counts, periodic)):
            span = hi - lo
            h = span / cnt if per else span / max(cnt - 1, 1)
            steps[d] = h
            center = round_pt[d]
            new_boxes.append((center - h, center + h))
        boxes = new_boxes
        periodic = [False] * len(axes)  # refinement boxes are plain intervals
        if round_idx == 0:
            counts = [2 * factor + 1] * len(axes)
    return best_pt, best_val, steps
