"""steinlg: exact and certified-numeric models for B-type Landau-Ginzburg
data on Stein manifolds.

Submodules: poly (exact polynomial algebra and critical ideals), koszul
(truncated contraction complexes), critical (transcendental critical loci),
factorization (matrix factorizations and their hom/disk invariants),
arrangement (central hyperplane arrangement topology), theta (theta-function
factorization checks), problems/cli (batch interface).
"""

__version__ = "0.1.0"

from .scalars import GaussianRational  # noqa: F401
from .poly import (  # noqa: F401
    AffineFrame,
    CompleteIntersectionFrame,
    GroebnerBasis,
    HypersurfaceFrame,
    Ideal,
    Monomial,
    MonomialOrder,
    Poly,
    QuotientBasis,
    buchberger,
    jacobi_dimension,
    jacobi_ideal,
    normal_form,
    quotient_basis,
)
from .koszul import (  # noqa: F401
    KoszulReport,
    TruncatedComplex,
    build_truncated_koszul,
    koszul_cohomology_dims,
)
from .critical import (  # noqa: F401
    CriticalPoint,
    ExpPoly,
    ExpPolySystem,
    NewtonResult,
    critical_system,
    derivative,
    exp_of,
    find_critical_points,
    newton_solve,
    tangent_generators_hypersurface,
)
from .factorization import (  # noqa: F401
    DiskReport,
    HomDims,
    MatrixFactorization,
    disk_algebra_dims,
    defect_operator,
    elementary_factorization,
    hmf_hom_dims,
    quiver_factorization,
    verify_factorization,
)
from .arrangement import (  # noqa: F401
    Arrangement,
    Flat,
    IntersectionLattice,
    MobiusTable,
    h2_rank,
    intersection_lattice,
    mobius_table,
    os_ranks,
    poincare_polynomial,
    supports_nontrivial_elementary,
)
from .theta import (  # noqa: F401
    ThetaSeriesParams,
    TorusPoint,
    section_eval,
    theta_eval,
    theta_identity_report,
    verify_theta_factorization,
)
from .exprparse import parse_exp_poly, parse_poly  # noqa: F401
