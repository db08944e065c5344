"""Numerical laboratory for quantum Renyi divergences on finite-dimensional algebras."""

from .algebra import (
    Subalgebra,
    SubalgebraChain,
    conditional_expectation,
    corner_restrict,
    martingale_sequence,
    nested_chain_m4,
    pinch,
    restrict_ambient,
    restrict_state,
    tensor_power_state,
)
from .divergences import (
    FdState,
    classical_d,
    classical_q,
    dmax,
    fidelity,
    relative_entropy,
    sandwiched_d,
    sandwiched_q,
    standard_d,
    standard_q,
    support_condition,
)
from .errors import (
    NotConverged,
    NumericalError,
    ParseError,
    QdivError,
    ValidationError,
)
from .gicar import UnitIntervalMeasure, binom_moment, classical_renyi_q, gicar_convergence, gicar_q
from .hypothesis_testing import (
    cutoff_rate,
    degenerate_check,
    hoeffding_anti_divergence,
    min_type1,
    neyman_pearson,
    psi_curve,
    psi_tilde,
    sce_sequence,
)
from .kernels import BACKEND
from .linalg import HermMatrix, Projection
from .measured import Povm, measured_opt, measured_renyi_for_povm, regularized_estimate, test_measured_opt
from .variational import closed_form_optimizer, iterative_solve, objective

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "FdState",
    "HermMatrix",
    "NotConverged",
    "NumericalError",
    "ParseError",
    "Povm",
    "Projection",
    "QdivError",
    "Subalgebra",
    "SubalgebraChain",
    "UnitIntervalMeasure",
    "ValidationError",
    "binom_moment",
    "classical_d",
    "classical_q",
    "classical_renyi_q",
    "closed_form_optimizer",
    "conditional_expectation",
    "corner_restrict",
    "cutoff_rate",
    "degenerate_check",
    "dmax",
    "fidelity",
    "gicar_convergence",
    "gicar_q",
    "hoeffding_anti_divergence",
    "iterative_solve",
    "martingale_sequence",
    "measured_opt",
    "measured_renyi_for_povm",
    "min_type1",
    "nested_chain_m4",
    "neyman_pearson",
    "objective",
    "pinch",
    "psi_curve",
    "psi_tilde",
    "regularized_estimate",
    "relative_entropy",
    "restrict_ambient",
    "restrict_state",
    "sandwiched_d",
    "sandwiched_q",
    "sce_sequence",
    "standard_d",
    "standard_q",
    "support_condition",
    "tensor_power_state",
    "test_measured_opt",
]
