"""Exact jet-algebra engine for iterative linear ODE systems."""

from .jets import (
    AlgebraError,
    BasePointMismatchError,
    DEFAULT_ORDER,
    DimensionMismatchError,
    Jet,
    MatrixJet,
    NonUnitError,
    OrderExhaustedError,
    SingularMatrixError,
    UnsupportedExtensionError,
    rat,
)
from .operator import (
    DiffOperator,
    LinearForm,
    LinearSystem,
    apply,
    iterate,
    monicize,
    scalar_K1,
    scalar_K2,
)
from .transform import (
    PointTransformation,
    normal_form_gauge,
    pushforward,
    scalar_normal_gauge,
)
from .iterative import (
    A_entries_2x2,
    A_map,
    CommutingFamily2x2,
    NonCommutingError,
    build_iterative_normal,
    check_an2,
    family_aa2,
    family_diag,
    family_scaled,
    iterative_from_r,
    psi_nor,
    source_solution,
)
from .canonical import (
    CanonicalVerdict,
    NotInCanonicalClassError,
    Witness,
    canonical_class_test,
    uncouple,
)
from .solutions import (
    Residual,
    SolutionBasis,
    SpanReport,
    numeric_crosscheck,
    residual,
    single_solution_basis,
    solution_basis,
    source_solutions,
    span_report,
    superpose,
    superpose_single,
    wronskian,
)

__version__ = "0.1.0"
