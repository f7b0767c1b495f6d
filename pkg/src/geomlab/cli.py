"""Command-line driver: space definitions, subcommand dispatch, and
deterministic CSV/JSON report emission.

Space definitions are JSON documents:

    {"kind": "lp", "dim": 2, "p": 2, "field": "real"}
    {"kind": "kothe", "family": "weighted_lp", "weights": [1, 1], "p": 1}
    {"kind": "kothe", "family": "orlicz", "weights": [1, 1], "young": "exp"}
    {"kind": "kothe", "family": "orlicz", "weights": [1, 1], "young": {"power": 2}}
    {"kind": "kothe", "family": "top_k_lorentz", "weights": [1, 1], "sigma": [1, 0.5]}
    {"kind": "pconvex", "p": 2, "base": { ...kothe... }}
    {"kind": "complexified", "base": { ...kothe... }}
    {"kind": "bochner", "p": 2, "weights": [0.25, 0.25], "inner": { ...space... }}

Compact mnemonics are accepted wherever a space is expected:
``lp:<p>:<dim>``, ``kothe:<file.json>``, ``pconvex:<p>:<rest>``,
``cplx:<rest>``, or a path to a JSON file.

Exit status: 0 all assertions passed, 1 a violation was found, 2 at least
one check was "not applicable" (vacuous hypothesis), 64+ usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import harmonic as harmonic_mod
from . import lattice_convex as lc
from . import moduli as moduli_mod
from . import represent as rep_mod
from . import series as series_mod
from .errors import GeomlabError, SpaceDefinitionError
from .randomvars import (
    ABSOLUTE_VALUE,
    MonteCarlo,
    SymmetricRV,
    cos_theta,
    complex_circle,
    power_gauge,
    rademacher,
    uniform_symmetric,
)
from .spaces import (
    BochnerSpace,
    ExpYoung,
    KotheLattice,
    LorentzLattice,
    OrliczLattice,
    PowerYoung,
    WeightedLpLattice,
    bochner,
    complexify,
    make_lp,
    pconvexify,
)
from .util import atomic_write_text, format_float

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_NOT_APPLICABLE = 2
EXIT_USAGE = 64
EXIT_CONFIG = 65


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# Space / gauge / model parsing
# ---------------------------------------------------------------------------


def _parse_p(raw):
    if isinstance(raw, str) and raw.lower() in ("inf", "infinity", "oo"):
        return math.inf
    return float(raw)


def space_from_json(doc):
    """Build a space from its JSON document (see the module docstring)."""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise SpaceDefinitionError("space document must be an object with a 'kind'")
    kind = doc["kind"]
    try:
        if kind == "lp":
            return make_lp(int(doc["dim"]), _parse_p(doc["p"]), doc.get("field", "real"))
        if kind == "kothe":
            return _kothe_from_json(doc)
        if kind == "pconvex":
            base = space_from_json(doc["base"])
            if not isinstance(base, KotheLattice):
                raise SpaceDefinitionError("pconvex base must be a kothe lattice")
            return pconvexify(base, float(doc["p"]))
        if kind == "complexified":
            base = space_from_json(doc["base"])
            if not isinstance(base, KotheLattice):
                raise SpaceDefinitionError("complexified base must be a kothe lattice")
            return complexify(base)
        if kind == "bochner":
            return bochner(doc["weights"], float(doc["p"]), space_from_json(doc["inner"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise SpaceDefinitionError(f"bad {kind!r} space document: {exc}") from exc
    raise SpaceDefinitionError(f"unknown space kind {kind!r}")


def _kothe_from_json(doc):
    family = doc.get("family", "weighted_lp")
    weights = doc["weights"]
    if family == "weighted_lp":
        return WeightedLpLattice(weights, _parse_p(doc["p"]))
    if family == "orlicz":
        young = doc.get("young", "exp")
        if young == "exp":
            return OrliczLattice(weights, ExpYoung())
        if isinstance(young, dict) and "power" in young:
            return OrliczLattice(weights, PowerYoung(float(young["power"])))
        raise SpaceDefinitionError(f"unknown young function {young!r}")
    if family == "top_k_lorentz":
        return LorentzLattice(doc["sigma"], weights)
    raise SpaceDefinitionError(f"unknown kothe family {family!r}")


def parse_space(spec: str):
    """Parse a mnemonic or JSON file path into a space."""
    if spec.endswith(".json") and os.path.exists(spec):
        with open(spec, "r", encoding="utf-8") as handle:
            return space_from_json(json.load(handle))
    head, _, rest = spec.partition(":")
    if head == "lp":
        p_raw, _, dim_raw = rest.partition(":")
        if not dim_raw:
            raise SpaceDefinitionError(f"lp mnemonic needs lp:<p>:<dim>, got {spec!r}")
        return make_lp(int(dim_raw), _parse_p(p_raw))
    if head == "kothe":
        if not os.path.exists(rest):
            raise SpaceDefinitionError(f"kothe mnemonic points to a missing file: {rest!r}")
        with open(rest, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
        space = space_from_json(doc)
        if not isinstance(space, KotheLattice):
            raise SpaceDefinitionError("kothe mnemonic file must define a lattice")
        return space
    if head == "pconvex":
        p_raw, _, base_raw = rest.partition(":")
        base = parse_space(base_raw)
        if not isinstance(base, KotheLattice):
            raise SpaceDefinitionError("pconvex base must be a kothe lattice")
        return pconvexify(base, float(p_raw))
    if head == "cplx":
        base = parse_space(rest)
        if not isinstance(base, KotheLattice):
            raise SpaceDefinitionError("cplx base must be a kothe lattice")
        return complexify(base)
    if head == "l1":  # convenience: l1:<dim> lattice
        return WeightedLpLattice(np.ones(int(rest)), 1)
    raise SpaceDefinitionError(f"cannot parse space {spec!r}")


def parse_lattice(spec: str) -> KotheLattice:
    space = parse_space(spec)
    if isinstance(space, KotheLattice):
        return space
    if hasattr(space, "p") and hasattr(space, "dim") and space.__class__.__name__ == "LpSpace":
        # lp mnemonics double as unit-weight lattices for lattice commands
        return WeightedLpLattice(np.ones(space.dim), space.p)
    raise SpaceDefinitionError(f"{spec!r} is not a lattice")


def parse_gauge(spec: str):
    if spec == "abs":
        return ABSOLUTE_VALUE
    head, _, rest = spec.partition(":")
    if head == "pow":
        return power_gauge(float(rest))
    raise SpaceDefinitionError(f"cannot parse gauge {spec!r}; use pow:<p> or abs")


def parse_rv(kind: str, nodes=None, samples=None, seed=None) -> SymmetricRV:
    factories = {
        "rademacher": rademacher,
        "cos-theta": cos_theta,
        "complex-circle": complex_circle,
        "uniform": uniform_symmetric,
    }
    if kind not in factories:
        raise SpaceDefinitionError(f"unknown random model {kind!r}")
    if samples:
        if seed is None:
            raise SpaceDefinitionError("Monte Carlo engines require --seed")
        base = factories[kind]()
        return SymmetricRV(base.kind, MonteCarlo(samples=samples, seed=seed))
    if nodes and kind != "rademacher":
        return factories[kind](nodes)
    return factories[kind]()


def parse_vector(raw: str) -> np.ndarray:
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    try:
        vals = [complex(p) for p in parts]
    except ValueError as exc:
        raise SpaceDefinitionError(f"cannot parse vector {raw!r}") from exc
    if any(v.imag for v in vals):
        return np.array(vals, dtype=complex)
    return np.array([v.real for v in vals], dtype=float)


# ---------------------------------------------------------------------------
# Report emission
# ---------------------------------------------------------------------------


def _cell(value):
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, np.ndarray):
        return ";".join(format_float(v) for v in np.asarray(value).real.ravel()) + (
            "|" + ";".join(format_float(v) for v in np.asarray(value).imag.ravel())
            if np.iscomplexobj(value)
            else ""
        )
    if isinstance(value, (list, tuple)):
        return ";".join(_cell(v) for v in value)
    return "" if value is None else str(value)


def _json_ready(value):
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return {"re": value.real.tolist(), "im": value.imag.tolist()}
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, float) and math.isnan(value):
        return None
    if isinstance(value, dict):
        return {k: _json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_ready(v) for v in value]
    return value


def emit_report(rows, fmt, out_path=None) -> str:
    """Serialize result rows deterministically and write them atomically.

    CSV is RFC-4180 style with a header row and LF endings; JSON keeps the
    construction key order.  Floats carry 17 significant digits.  Returns the
    rendered text (also printed when no output path is given).
    """
    rows = list(rows)
    if fmt == "json":
        text = json.dumps([_json_ready(r) for r in rows], indent=2) + "\n"
    elif fmt == "csv":
        header: list = []
        for row in rows:
            for key in row:
                if key not in header:
                    header.append(key)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(row.get(k)) for k in header])
        text = buf.getvalue()
    else:
        raise SpaceDefinitionError(f"unknown format {fmt!r}")
    if out_path:
        atomic_write_text(out_path, text)
    return text


def _finish(rows, args, statuses) -> int:
    text = emit_report(rows, args.format, args.out)
    if not args.out:
        sys.stdout.write(text)
    if any(s == "violation" for s in statuses):
        return EXIT_VIOLATION
    if any(s == "not-applicable" for s in statuses):
        return EXIT_NOT_APPLICABLE
    return EXIT_OK


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_modulus(args) -> int:
    rows, statuses = [], []
    gauge = parse_gauge(args.phi)
    rv = parse_rv(args.rv, nodes=args.nodes, samples=args.samples, seed=args.seed)
    for eps in args.eps:
        if args.kind == "delta-phi":
            space = parse_space(args.space)
            est = moduli_mod.delta_phi(space, gauge, rv, eps, starts=args.starts, seed=args.seed or 0)
        elif args.kind == "strong-extreme":
            space = parse_space(args.space)
            est = moduli_mod.strong_extreme_modulus(space, parse_vector(args.x), eps, starts=args.starts, seed=args.seed or 0)
        elif args.kind == "monotone":
            est = moduli_mod.monotonicity_modulus(parse_lattice(args.space), args.p, eps, starts=args.starts, seed=args.seed or 0)
        elif args.kind == "local-monotone":
            est = moduli_mod.local_monotonicity_modulus(parse_lattice(args.space), args.p, parse_vector(args.x), eps, starts=args.starts, seed=args.seed or 0)
        elif args.kind == "complex":
            space = parse_space(args.space)
            p_or_inf = math.inf if args.p is None else args.p
            est = moduli_mod.complex_modulus(space, p_or_inf, parse_vector(args.x), eps, starts=args.starts, seed=args.seed or 0)
        else:  # pragma: no cover
            raise SpaceDefinitionError(args.kind)
        rows.append(
            {
                "epsilon": est.epsilon,
                "value": est.value,
                "confidence": est.confidence,
                "witness_x": est.witness_x,
                "witness_y": est.witness_y,
            }
        )
        statuses.append("pass" if est.value >= -args.tol else "violation")
    return _finish(rows, args, statuses)


def _cmd_rho(args) -> int:
    space = parse_space(args.space)
    report = rep_mod.rho_gap(space, args.n, starts=args.starts, seed=args.seed or 0)
    row = report.to_dict()
    emb = rep_mod.build_embedding(
        space, report.witness, rho=report.rho, sample_count=args.samples or 0, seed=args.seed or 0
    )
    row.update({"embed_lower": emb.lower, "embed_upper": emb.upper})
    status = "pass" if (emb.rho_bound_ok in (True, None)) else "violation"
    return _finish([row], args, [status])


def _cmd_lift(args) -> int:
    inner = parse_space(args.inner)
    report = rep_mod.lifting_check(
        inner, args.p, args.n, args.atoms, args.samples, args.seed, gap_starts=args.starts
    )
    status = "pass" if report.passed(args.tol) else "violation"
    if not report.applicable:
        status = "not-applicable"
    return _finish([report.to_dict()], args, [status])


def _cmd_series_check(args) -> int:
    space = parse_space(args.space)
    gauge = parse_gauge(args.phi)
    rng = np.random.default_rng(args.seed)
    rows, statuses = [], []
    r = rademacher()
    for i in range(args.count):
        if args.kind == "submartingale":
            n = int(rng.integers(1, args.n + 1))
            x0 = space.random_vector(rng)
            steps = tuple(space.random_vector(rng) for _ in range(n))
            ser = series_mod.RandomizedSeries(space, x0, steps, (r,) * n)
            rep = series_mod.check_submartingale(ser, gauge)
            rows.append({"index": i, "n": n, "max_violation": rep.max_violation})
            statuses.append("pass" if rep.passed(args.tol) else "violation")
        else:
            x = space.random_vector(rng)
            y = space.random_vector(rng)
            grid = np.linspace(-2.0, 2.0, 41)
            rep = series_mod.check_scaling_monotone(space, x, y, gauge, r, grid)
            worst = max(rep.evenness_violation, rep.monotonicity_violation, rep.convexity_violation)
            rows.append({"index": i, "max_violation": worst})
            statuses.append("pass" if rep.passed(args.tol) else "violation")
    return _finish(rows, args, statuses)


def _cmd_thm13(args) -> int:
    space = parse_space(args.space)
    gauge = parse_gauge(args.phi)
    rng = np.random.default_rng(args.seed)
    rows, statuses = [], []
    r = rademacher()
    for i in range(args.count):
        steps = [space.random_unit(rng) for _ in range(args.n)]
        report = series_mod.thm13_verify(space, steps, gauge, [r] * (args.n - 1))
        rows.append({"index": i, **report.to_dict()})
        if not report.applicable:
            statuses.append("not-applicable")
        else:
            statuses.append("pass" if report.passed(args.tol) else "violation")
    return _finish(rows, args, statuses)


def _cmd_krivine(args) -> int:
    rows, statuses = [], []
    for p in args.p_list:
        kc = lc.krivine_constant(p)
        rows.append(
            {
                "p": kc.p,
                "C": kc.C,
                "max_residual": kc.max_residual,
                "verified_pairs": kc.verified_pairs,
            }
        )
        statuses.append("pass" if kc.holds(args.tol) else "violation")
    return _finish(rows, args, statuses)


def _cmd_verify(args) -> int:
    rows, statuses = [], []
    rng = np.random.default_rng(args.seed)
    if args.target == "eq3":
        lattice = parse_lattice(args.space)
        pconv = pconvexify(lattice, args.p)
        worst = math.inf
        for _ in range(args.samples):
            f = pconv.random_unit(rng)
            g = pconv.random_vector(rng)
            rep = lc.check_eq3(lattice, args.p, f, g)
            worst = min(worst, rep.triangle_slack, rep.krivine_slack)
        rows.append({"target": "eq3", "p": args.p, "samples": args.samples, "min_slack": worst})
        statuses.append("pass" if worst >= -args.tol else "violation")
    elif args.target == "thm33":
        lattice = parse_lattice(args.space)
        rep = lc.monotone_to_convex_bound(lattice, args.p, args.eps_single, args.samples, args.seed)
        rows.append({"target": "thm33", **rep.to_dict()})
        statuses.append("pass" if rep.passed(args.tol) else "violation")
    elif args.target == "thm34":
        lattice = parse_lattice(args.space)
        worst = math.inf
        for _ in range(args.samples):
            x = rng.standard_normal(lattice.dim) + 1j * rng.standard_normal(lattice.dim)
            y = rng.standard_normal(lattice.dim) + 1j * rng.standard_normal(lattice.dim)
            rep = lc.complex_convexity_inequalities(lattice, x, y)
            worst = min(worst, rep.upper_slack, rep.lower_slack)
            pure = lc.mluc_implies_ulum_check(lattice, x.real, y.real)
            worst = min(worst, pure.slack)
        rows.append({"target": "thm34", "samples": args.samples, "min_slack": worst})
        statuses.append("pass" if worst >= -max(args.tol, 1e-6) else "violation")
    elif args.target == "thm24":
        inner = parse_space(args.inner)
        rep = rep_mod.lifting_check(inner, args.p, args.n, args.atoms, args.samples, args.seed)
        rows.append({"target": "thm24", **rep.to_dict()})
        if not rep.applicable:
            statuses.append("not-applicable")
        else:
            statuses.append("pass" if rep.passed(args.tol) else "violation")
    else:  # pragma: no cover
        raise SpaceDefinitionError(args.target)
    return _finish(rows, args, statuses)


def _cmd_harmonic(args) -> int:
    space = parse_space(args.space)
    x = parse_vector(args.x)
    est = moduli_mod.strong_extreme_modulus(space, x, args.eps_single, starts=args.starts, seed=args.seed or 0)
    steps = [est.witness_y] * args.terms
    report = harmonic_mod.kk_beta_demo(space, x, steps, args.p, seed=args.seed or 0)
    status = "pass" if report.certified else "not-applicable"
    if report.applicable and not report.certified:
        status = "violation"
    return _finish([report.to_dict()], args, [status])


# ---------------------------------------------------------------------------
# Argument wiring
# ---------------------------------------------------------------------------


def _add_common(sub):
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--out", default=None, help="output path (atomic write)")
    sub.add_argument("--tol", type=float, default=1e-9)
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--budget", type=int, default=None, help="evaluation budget override")
    sub.add_argument("--starts", type=int, default=32, help="multistart count")
    sub.add_argument("--nodes", type=int, default=None, help="quadrature node count")


def build_parser() -> _Parser:
    parser = _Parser(prog="geomlab", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    subs = parser.add_subparsers(dest="command", required=True)

    m = subs.add_parser("modulus", help="estimate a convexity/monotonicity modulus")
    m.add_argument("--space", required=True)
    m.add_argument("--kind", required=True, choices=("delta-phi", "strong-extreme", "monotone", "local-monotone", "complex"))
    m.add_argument("--phi", default="pow:2")
    m.add_argument("--rv", default="rademacher")
    m.add_argument("--eps", type=float, nargs="+", required=True)
    m.add_argument("--p", type=float, default=None)
    m.add_argument("--x", default=None)
    m.add_argument("--samples", type=int, default=None, help="Monte Carlo sample count")
    _add_common(m)
    m.set_defaults(func=_cmd_modulus)

    g = subs.add_parser("rho", help="sign gap over unit tuples")
    g.add_argument("--space", required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--samples", type=int, default=0, help="embedding lambda samples")
    _add_common(g)
    g.set_defaults(func=_cmd_rho)

    l = subs.add_parser("lift", help="exponent lifting bound in a Bochner space")
    l.add_argument("--inner", required=True)
    l.add_argument("--p", type=float, required=True)
    l.add_argument("--n", type=int, required=True)
    l.add_argument("--atoms", type=int, required=True)
    l.add_argument("--samples", type=int, default=100)
    _add_common(l)
    l.set_defaults(func=_cmd_lift)

    s = subs.add_parser("series-check", help="submartingale / scaling monotonicity sweeps")
    s.add_argument("--space", required=True)
    s.add_argument("--kind", choices=("submartingale", "scaling"), default="submartingale")
    s.add_argument("--count", type=int, default=100)
    s.add_argument("--n", type=int, default=6)
    s.add_argument("--phi", default="pow:2")
    _add_common(s)
    s.set_defaults(func=_cmd_series_check)

    t = subs.add_parser("thm13", help="expectation-gain bound on random instances")
    t.add_argument("--space", required=True)
    t.add_argument("--n", type=int, default=3)
    t.add_argument("--count", type=int, default=100)
    t.add_argument("--phi", default="pow:2")
    _add_common(t)
    t.set_defaults(func=_cmd_thm13)

    k = subs.add_parser("krivine", help="two-point power-mean constants")
    k.add_argument("--p", dest="p_list", type=float, nargs="+", required=True)
    _add_common(k)
    k.set_defaults(func=_cmd_krivine)

    v = subs.add_parser("verify", help="verify a named inequality family")
    v.add_argument("target", choices=("eq3", "thm33", "thm34", "thm24"))
    v.add_argument("--space", default=None)
    v.add_argument("--inner", default=None)
    v.add_argument("--p", type=float, default=2.0)
    v.add_argument("--n", type=int, default=2)
    v.add_argument("--atoms", type=int, default=4)
    v.add_argument("--samples", type=int, default=100)
    v.add_argument("--eps", dest="eps_single", type=float, default=0.5)
    _add_common(v)
    v.set_defaults(func=_cmd_verify)

    h = subs.add_parser("harmonic", help="harmonic Hardy space demos")
    h.add_argument("target", choices=("kk-demo",))
    h.add_argument("--space", required=True)
    h.add_argument("--x", required=True)
    h.add_argument("--eps", dest="eps_single", type=float, default=0.5)
    h.add_argument("--p", type=float, default=2.0)
    h.add_argument("--terms", type=int, default=4)
    _add_common(h)
    h.set_defaults(func=_cmd_harmonic)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.seed is None:
        args.seed = 0
    try:
        return args.func(args)
    except SpaceDefinitionError as exc:
        sys.stderr.write(f"geomlab: config error: {exc}\n")
        return EXIT_CONFIG
    except GeomlabError as exc:
        sys.stderr.write(f"geomlab: error: {exc}\n")
        return EXIT_CONFIG


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
