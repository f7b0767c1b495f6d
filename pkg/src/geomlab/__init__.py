"""geomlab: a numerical laboratory for the geometry of finite-dimensional
Banach spaces.

The package computes expectations of randomized series, estimates convexity
and monotonicity moduli by multistart optimization with low-dimensional grid
oracles, quantifies how far max-norm cubes are from embedding into a space,
and verifies the lattice-convexification and harmonic Hardy-space
inequalities at desk scale.
"""

from .errors import BudgetExceededError, GeomlabError, SpaceDefinitionError
from .spaces import (
    REAL,
    COMPLEX,
    NormedSpace,
    LpSpace,
    KotheLattice,
    WeightedLpLattice,
    OrliczLattice,
    LorentzLattice,
    PConvexSpace,
    ComplexifiedLattice,
    BochnerSpace,
    PowerYoung,
    ExpYoung,
    make_lp,
    pconvexify,
    complexify,
    bochner,
    lattice_calculus,
    check_norm_axioms,
    check_lattice_axioms,
)
from .randomvars import (
    SymmetricRV,
    ExactEnumeration,
    Quadrature,
    MonteCarlo,
    ConvexGauge,
    rademacher,
    cos_theta,
    complex_circle,
    uniform_symmetric,
    power_gauge,
    ABSOLUTE_VALUE,
    expect,
    tail_mass,
)
from .series import (
    RandomizedSeries,
    GapCertificate,
    series_expectation,
    check_submartingale,
    check_scaling_monotone,
    sign_sup,
    thm13_delta,
    thm13_verify,
)
from .moduli import (
    ModulusEstimate,
    delta_phi,
    strong_extreme_modulus,
    monotonicity_modulus,
    local_monotonicity_modulus,
    complex_modulus,
    classical_convexity_modulus,
    sandwich_check_eq1_eq2,
)
from .represent import (
    GapReport,
    EmbeddingReport,
    rho_gap,
    build_embedding,
    example21_witness,
    lifting_check,
    casewise_check,
)
from .lattice_convex import (
    KrivineConstant,
    krivine_constant,
    krivine_residual,
    check_eq3,
    monotone_to_convex_bound,
    complex_convexity_inequalities,
    mluc_implies_ulum_check,
)
from .harmonic import (
    HarmonicFunction,
    harmonic_eval,
    hp_norm,
    circle_mean_pow,
    radial_means,
    beta_distance,
    beta_convergence_check,
    kk_beta_demo,
)

__version__ = "0.1.0"
