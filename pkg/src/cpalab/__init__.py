"""cpalab: exact-arithmetic toolkit for commutative post-Lie products on
nilpotent Lie algebras."""

from .exact import Fraction, Matrix, ParamPoly, solve_linear
from .lie import (
    AlgebraReport,
    LieAlgebra,
    Subspace,
    center,
    centralizer,
    characteristic_ideals,
    classes_and_predicates,
    derived_series,
    is_isomorphic_table,
    lower_central_series,
    product_subspace,
    quotient,
)
from .structures import (
    BilinearProduct,
    PoissonData,
    check_cpa,
    check_implications,
    check_lr,
    check_pa,
    check_poisson,
    is_associative_structure,
    is_central,
    poisson_admissible,
)
from .catalog import (
    CPAFamily,
    build_algebra,
    build_cpa_family,
    build_example_products,
)
from .derivations import (
    DerivationSpace,
    derivation_space,
    is_derivation,
    is_nilpotent_matrix,
    ln_derivation_basis,
    split_nilpotent_derivation,
)
from .solver import (
    PolySystem,
    SolutionBranch,
    build_cpa_system,
    linear_reduce,
    match_solutions,
    prove_annihilation,
    solve_cpa,
    split_solve,
    verify_family,
)

__version__ = "0.1.0"
