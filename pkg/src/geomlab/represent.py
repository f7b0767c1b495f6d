"""Quantitative max-norm-cube representability machinery: the sign-gap
rho(X, n) over unit tuples, the embedding bounds it induces, the classical
four-atom isometric-copy construction in an L_1 Bochner space, and the
exponent-lifting bound with its two-case per-atom analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .optimize import multistart_minimize, refined_grid_minimize
from .moduli import _angles_to_unit, _normalize_block, ORACLE_AGREE_TOL
from .series import sign_sup
from .spaces import BochnerSpace, NormedSpace, REAL, bochner

__all__ = [
    "GapReport",
    "EmbeddingReport",
    "Example21Witness",
    "LiftingReport",
    "CasewiseRecord",
    "rho_gap",
    "build_embedding",
    "example21_witness",
    "lifting_check",
    "casewise_check",
]

RHO_APPLICABLE_TOL = 1e-6


# ---------------------------------------------------------------------------
# The sign gap rho(X, n)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GapReport:
    n: int
    rho: float
    witness: tuple
    method: str
    confidence: str
    starts: int = 0
    evals: int = 0
    oracle_value: float | None = None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "rho": self.rho,
            "witness": [list(map(float, v)) for v in self.witness],
            "method": self.method,
            "confidence": self.confidence,
        }


def _tuple_objective(space, n):
    d = space.dim
    count = 1 << (n - 1)
    bits = (np.arange(count)[:, None] >> np.arange(n - 1)[None, :]) & 1
    signs = np.hstack([np.ones((count, 1)), 1.0 - 2.0 * bits])

    def objective(rows):
        # rows: (m, n*d), each row a tuple of unit vectors
        m = rows.shape[0]
        T = rows.reshape(m, n, d)
        combos = np.einsum("pn,mnd->mpd", signs, T).reshape(m * count, d)
        norms = space.norm_rows(combos).reshape(m, count)
        return norms.max(axis=1) - 1.0

    return objective


def _canonical_tuples(space, n):
    """Deterministic starts: the coordinate tuple, a Walsh sign-pattern tuple
    (the rotated basis that witnesses rho = 0 in the two-dimensional L_1
    square), and a mixed tuple."""
    d = space.dim
    eye = np.eye(d)
    basis = np.concatenate([eye[i % d] for i in range(n)])
    walsh = np.array(
        [[(-1.0) ** bin(i & j).count("1") for j in range(d)] for i in range(n)]
    )
    patterns = walsh.reshape(-1)
    mixed = np.concatenate([eye[0] if i % 2 == 0 else np.ones(d) for i in range(n)])
    return [basis, patterns, mixed]


def rho_gap(space: NormedSpace, n, *, starts=48, seed=0, cross_check="auto") -> GapReport:
    """rho = inf over n-tuples of unit vectors of (sup-sign-combination norm) - 1.

    Multistart over the product of unit spheres; for dim 2 and n = 2 an
    exhaustive two-angle grid oracle cross-checks the estimate.
    """
    n = int(n)
    if n < 2:
        raise ValueError("need n >= 2")
    d = space.dim
    objective = _tuple_objective(space, n)

    def renorm(rows):
        rows = np.atleast_2d(np.asarray(rows, dtype=float))
        blocks = [
            _normalize_block(space, rows[:, i * d : (i + 1) * d], 1.0) for i in range(n)
        ]
        return np.concatenate(blocks, axis=1)

    ms = multistart_minimize(
        objective,
        n * d,
        starts=starts,
        seed=seed,
        renorm=renorm,
        canonical=_canonical_tuples(space, n),
    )
    rows = renorm(ms.z[None, :])
    value = float(objective(rows)[0])
    witness = tuple(rows[0].reshape(n, d))
    oracle_value = None
    use_oracle = (cross_check == "auto" and d == 2 and n == 2) or cross_check is True
    if use_oracle and space.field == REAL and d == 2 and n == 2:

        def grid_batch(angle_rows):
            xs = _angles_to_unit(space, angle_rows[:, :1])
            ys = _angles_to_unit(space, angle_rows[:, 1:])
            return objective(np.concatenate([xs, ys], axis=1))

        axes = [(0.0, 2 * math.pi, 1440, True), (0.0, 2 * math.pi, 1440, True)]
        pt, oracle_value, _ = refined_grid_minimize(grid_batch, axes, rounds=3)
        if oracle_value < value:
            xs = _angles_to_unit(space, pt[None, :1])
            ys = _angles_to_unit(space, pt[None, 1:])
            rows = np.concatenate([xs, ys], axis=1)
            value = float(objective(rows)[0])
            witness = tuple(rows[0].reshape(n, d))
    if oracle_value is not None:
        confidence = "oracle-agreed" if abs(value - oracle_value) <= ORACLE_AGREE_TOL else "low"
    else:
        confidence = "multistart" if ms.top_gap <= 1e-4 else "low"
    return GapReport(
        n=n,
        rho=value,
        witness=witness,
        method="multistart+grid" if oracle_value is not None else "multistart",
        confidence=confidence,
        starts=ms.starts,
        evals=ms.evals,
        oracle_value=oracle_value,
    )


# ---------------------------------------------------------------------------
# Embedding bounds from a witness tuple
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EmbeddingReport:
    images: tuple
    lower: float
    upper: float
    distortion: float
    lower_witness: np.ndarray
    samples_used: int
    rho_bound_ok: bool | None

    def to_dict(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "distortion": self.distortion,
            "samples_used": self.samples_used,
            "rho_bound_ok": self.rho_bound_ok,
        }


def build_embedding(
    space: NormedSpace,
    images,
    rho=None,
    *,
    sample_count=10_000,
    seed=0,
    starts=8,
) -> EmbeddingReport:
    """Bounds for the map sending the max-norm cube basis to ``images``.

    upper: exact max over the 2^n sign extremes of ||sum eps_i x_i|| (convexity
    extends it to the whole cube).  lower: estimated min over the cube faces
    (one coefficient pinned to 1, the rest searched in the box, plus seeded
    random face samples).  When ``rho`` is supplied the report asserts
    lower >= 1 - rho - 1e-6, the bound the sign gap guarantees.
    """
    images = [space.as_vector(v) for v in images]
    n = len(images)
    if n < 1:
        raise ValueError("need at least one image vector")
    norms = [space.norm(v) for v in images]
    if any(abs(v - 1.0) > 1e-9 for v in norms):
        raise ValueError("images must be unit vectors (within 1e-9)")
    M = np.stack(images)
    upper = sign_sup(space, images).value

    def lam_norms(lams):
        return space.norm_rows(np.asarray(lams) @ M)

    best_val = math.inf
    best_lam = None
    # Face optimization: lambda_i0 = +1 (sign symmetry covers -1), rest free.
    for i0 in range(n):

        def face_batch(rows):
            lams = np.insert(np.clip(rows, -1.0, 1.0), i0, 1.0, axis=1)
            return lam_norms(lams)

        if n == 1:
            val = float(lam_norms(np.ones((1, 1)))[0])
            cand = np.ones(1)
        else:
            ms = multistart_minimize(
                face_batch,
                n - 1,
                starts=starts,
                seed=seed + i0,
                renorm=lambda rows: np.clip(rows, -1.0, 1.0),
                canonical=[np.zeros(n - 1), np.ones(n - 1), -np.ones(n - 1)],
            )
            val = ms.value
            cand = np.insert(np.clip(ms.z, -1.0, 1.0), i0, 1.0)
        if val < best_val:
            best_val, best_lam = val, cand
    rng = np.random.default_rng(seed)
    used = 0
    if sample_count:
        lams = rng.uniform(-1.0, 1.0, size=(sample_count, n))
        pins = rng.integers(0, n, size=sample_count)
        signs = rng.choice([-1.0, 1.0], size=sample_count)
        lams[np.arange(sample_count), pins] = signs
        vals = lam_norms(lams)
        used = sample_count
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_val, best_lam = float(vals[k]), lams[k]
    rho_ok = None
    if rho is not None:
        rho_ok = bool(best_val >= 1.0 - float(rho) - 1e-6)
    return EmbeddingReport(
        images=tuple(images),
        lower=float(best_val),
        upper=float(upper),
        distortion=float(upper / best_val) if best_val > 0 else math.inf,
        lower_witness=best_lam,
        samples_used=used,
        rho_bound_ok=rho_ok,
    )


# ---------------------------------------------------------------------------
# The four-atom isometric copy in L_1
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Example21Witness:
    space: BochnerSpace
    f: np.ndarray
    g: np.ndarray
    norms: dict

    def max_error(self) -> float:
        return max(abs(v - 1.0) for v in self.norms.values())


def example21_witness(inner_space: NormedSpace, x0) -> Example21Witness:
    """The pair f = r1 x0, g = r2 x0 on the four equal sign atoms of L_1.

    f takes values (+x0, +x0, -x0, -x0) and g takes (+x0, -x0, +x0, -x0) on
    atoms of weight 1/4; then ||f|| = ||g|| = ||f + g|| = ||f - g|| = 1, an
    isometric copy of the two-dimensional max-norm square inside L_1.
    """
    x0 = inner_space.as_vector(x0)
    if abs(inner_space.norm(x0) - 1.0) > 1e-9:
        raise ValueError("x0 must be a unit vector")
    space = bochner([0.25, 0.25, 0.25, 0.25], 1.0, inner_space)
    signs_f = np.array([1.0, 1.0, -1.0, -1.0])
    signs_g = np.array([1.0, -1.0, 1.0, -1.0])
    f = space.pack(signs_f[:, None] * x0[None, :])
    g = space.pack(signs_g[:, None] * x0[None, :])
    norms = {
        "f": space.norm(f),
        "g": space.norm(g),
        "f+g": space.norm(f + g),
        "f-g": space.norm(f - g),
    }
    witness = Example21Witness(space=space, f=f, g=g, norms=norms)
    if witness.max_error() > 1e-12:
        raise ArithmeticError(f"four-atom witness norms drifted: {norms}")
    return witness


# ---------------------------------------------------------------------------
# Lifting bound and the per-atom two-case analysis
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CasewiseRecord:
    q: float
    biggest: float
    smallest: float
    case: int
    lhs: float
    rhs: float
    slack: float
    vacuous: bool


def casewise_check(inner_space: NormedSpace, atom_values, rho, p) -> CasewiseRecord:
    """Replay the two-case per-atom inequality for one measure atom.

    q is the p-th root of the exact sign average of ||sum eps_i v_i||^p; the
    case splits on whether (1 - rho/3) * max_i ||v_i|| >= min_i ||v_i||.
    Case 1 asserts q^p >= (1 + rho/(3n)) * avg ||v_i||^p, case 2 asserts
    q^p >= (1 + rho/2)^p * avg ||v_i||^p.
    """
    vs = [inner_space.as_vector(v) for v in atom_values]
    n = len(vs)
    if n < 2:
        raise ValueError("need at least two vectors per atom")
    rho = float(rho)
    p = float(p)
    norms = [inner_space.norm(v) for v in vs]
    biggest, smallest = max(norms), min(norms)
    avg_p = math.fsum(nu**p for nu in norms) / n
    M = np.stack(vs)
    count = 1 << (n - 1)
    bits = (np.arange(count)[:, None] >> np.arange(n - 1)[None, :]) & 1
    signs = np.hstack([np.ones((count, 1)), 1.0 - 2.0 * bits])
    qp = float(np.mean(inner_space.norm_rows(signs @ M) ** p))
    if biggest == 0.0:
        return CasewiseRecord(
            q=0.0, biggest=0.0, smallest=0.0, case=1, lhs=0.0, rhs=0.0, slack=0.0, vacuous=True
        )
    if (1.0 - rho / 3.0) * biggest >= smallest:
        case = 1
        rhs = (1.0 + rho / (3.0 * n)) * avg_p
    else:
        case = 2
        rhs = (1.0 + rho / 2.0) ** p * avg_p
    return CasewiseRecord(
        q=qp ** (1.0 / p),
        biggest=biggest,
        smallest=smallest,
        case=case,
        lhs=qp,
        rhs=rhs,
        slack=qp - rhs,
        vacuous=False,
    )


@dataclass(frozen=True)
class LiftingReport:
    applicable: bool
    rho: float
    n: int
    p: float
    bound: float
    samples: int
    min_lhs: float
    max_bound_violation: float
    max_submartingale_violation: float
    max_casewise_violation: float
    fubini_gap: float
    reason: str = ""

    def passed(self, tol=1e-9) -> bool:
        if not self.applicable:
            return True
        return (
            max(
                self.max_bound_violation,
                self.max_submartingale_violation,
                self.max_casewise_violation,
            )
            <= tol
        )

    def to_dict(self) -> dict:
        return {
            "applicable": self.applicable,
            "rho": self.rho,
            "n": self.n,
            "p": self.p,
            "bound": self.bound,
            "samples": self.samples,
            "min_lhs": self.min_lhs,
            "max_bound_violation": self.max_bound_violation,
            "max_submartingale_violation": self.max_submartingale_violation,
            "max_casewise_violation": self.max_casewise_violation,
            "fubini_gap": self.fubini_gap,
            "reason": self.reason,
        }


def lifting_check(
    inner_space: NormedSpace,
    p,
    n,
    measure_atoms,
    sample_count,
    seed,
    *,
    rho=None,
    gap_starts=48,
) -> LiftingReport:
    """Sample unit tuples f_1..f_n in L_p(atoms; inner) and verify the exact
    sign average E||r_1 f_1 + ... + r_n f_n||^p against the lifted bound
    min{(1 + rho/2)^p, 1 + rho/(3n)}, where rho is the inner space's sign gap.

    Also checks, per atom: the submartingale consequence q(w) >= max_i
    ||f_i(w)||, the two-case inequality, and the Fubini identity between the
    global average and the atomwise integrals.
    """
    p = float(p)
    if not (1 < p < math.inf):
        raise ValueError("lifting exponent must satisfy 1 < p < inf")
    n = int(n)
    if isinstance(measure_atoms, int):
        measure_atoms = [1.0 / measure_atoms] * measure_atoms
    weights = np.asarray(measure_atoms, dtype=float)
    if rho is None:
        rho = rho_gap(inner_space, n, starts=gap_starts, seed=seed).rho
    rho = float(rho)
    if rho <= RHO_APPLICABLE_TOL:
        return LiftingReport(
            applicable=False,
            rho=rho,
            n=n,
            p=p,
            bound=math.nan,
            samples=0,
            min_lhs=math.nan,
            max_bound_violation=0.0,
            max_submartingale_violation=0.0,
            max_casewise_violation=0.0,
            fubini_gap=0.0,
            reason="inner space has no sign gap (rho ~ 0)",
        )
    space = bochner(weights, p, inner_space)
    bound = min((1.0 + rho / 2.0) ** p, 1.0 + rho / (3.0 * n))
    rng = np.random.default_rng(seed)
    count = 1 << (n - 1)
    bits = (np.arange(count)[:, None] >> np.arange(n - 1)[None, :]) & 1
    signs = np.hstack([np.ones((count, 1)), 1.0 - 2.0 * bits])
    min_lhs = math.inf
    worst_bound = 0.0
    worst_sub = 0.0
    worst_case = 0.0
    worst_fubini = 0.0
    for _ in range(sample_count):
        fs = np.stack([space.random_unit(rng) for _ in range(n)])
        lhs = float(np.mean(space.norm_rows(signs @ fs) ** p))
        min_lhs = min(min_lhs, lhs)
        worst_bound = max(worst_bound, bound - lhs)
        atom_terms = []
        for a in range(space.n_atoms):
            atom_vecs = [space.unpack(fs[i])[a] for i in range(n)]
            rec = casewise_check(inner_space, atom_vecs, rho, p)
            if not rec.vacuous:
                worst_case = max(worst_case, -rec.slack)
            worst_sub = max(worst_sub, rec.biggest - rec.q)
            atom_terms.append(weights[a] * rec.lhs)
        worst_fubini = max(worst_fubini, abs(math.fsum(atom_terms) - lhs))
    return LiftingReport(
        applicable=True,
        rho=rho,
        n=n,
        p=p,
        bound=bound,
        samples=sample_count,
        min_lhs=min_lhs,
        max_bound_violation=worst_bound,
        max_submartingale_violation=worst_sub,
        max_casewise_violation=worst_case,
        fubini_gap=worst_fubini,
    )
