"""Exact augmentation solvers for integer and linear programs.

The package builds conformal test sets (and circuit sets) of integer
matrices and uses them as step directions in greedy augmentation loops,
for plain linear objectives, separable-convex composites, highly block
structured families, and two-stage stochastic programs.  All arithmetic
is exact: integers stay Python ints, ratios are fractions.Fraction.
"""

from .errors import (
    BalanceMismatch,
    BoundExceeded,
    DimMismatch,
    DomainError,
    EmptyInterval,
    GraverOptError,
    InconsistentMargins,
    Infeasible,
    InfeasibleBase,
    NotInKernel,
    NotStabilized,
    NTooSmall,
    RationalPoint,
    SearchSpaceTooLarge,
    UnboundedBox,
    UnboundedObjective,
    ZeroVector,
)
from .augment import AugmentTrace, FeasibleBox, naive_lp_greedy, solve_ip_greedy, solve_lp_circuit
from .graver import CircuitSet, Decomposition, GraverBasis, circuits, decompose, graver, graver_composite
from .linalg import Mat, kernel_basis, rank
from .models import (
    DecodeResult,
    DecodingSpec,
    MarginSpec,
    build_3way_linesum,
    build_hierarchical,
    build_transportation,
    decode,
    encode,
    linf_q,
    lp_objective,
    margin_tuples,
)
from .nfold import BlockVector, NFoldInstance, graver_complexity, lift_graver, solve_nfold
from .objective import (
    AbsPower,
    CompositeObjective,
    LinearObjective,
    Poly,
    TableFn,
    ZeroFn,
    evaluate,
    range_bound,
)
from .twostage import TwoStageInstance, TwoStagePoint, extract_building_blocks, solve_twostage

__version__ = "0.1.0"

__all__ = [
    "Mat",
    "kernel_basis",
    "rank",
    "CircuitSet",
    "GraverBasis",
    "Decomposition",
    "circuits",
    "graver",
    "graver_composite",
    "decompose",
    "LinearObjective",
    "CompositeObjective",
    "Poly",
    "AbsPower",
    "TableFn",
    "ZeroFn",
    "evaluate",
    "range_bound",
    "FeasibleBox",
    "AugmentTrace",
    "solve_ip_greedy",
    "solve_lp_circuit",
    "naive_lp_greedy",
    "BlockVector",
    "NFoldInstance",
    "graver_complexity",
    "lift_graver",
    "solve_nfold",
    "TwoStageInstance",
    "TwoStagePoint",
    "extract_building_blocks",
    "solve_twostage",
    "MarginSpec",
    "DecodingSpec",
    "DecodeResult",
    "build_transportation",
    "build_3way_linesum",
    "build_hierarchical",
    "margin_tuples",
    "lp_objective",
    "linf_q",
    "encode",
    "decode",
    "GraverOptError",
    "DimMismatch",
    "ZeroVector",
    "NotInKernel",
    "BoundExceeded",
    "EmptyInterval",
    "InfeasibleBase",
    "UnboundedObjective",
    "UnboundedBox",
    "Infeasible",
    "NotStabilized",
    "NTooSmall",
    "BalanceMismatch",
    "InconsistentMargins",
    "DomainError",
    "RationalPoint",
    "SearchSpaceTooLarge",
    "__version__",
]
