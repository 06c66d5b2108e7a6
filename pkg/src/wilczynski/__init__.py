"""Generalized Wilczynski invariants of ordinary differential equations."""

from .deadline import Deadline
from .diffring import DiffMatrix, DiffPoly, delta, specialize
from .equations import OdeSingle, OdeSystem2, parse_equation, parse_system, total_derivative
from .errors import (
    ComputationTimeout,
    DimensionError,
    ParseError,
    PoleError,
    PreconditionError,
    UnassignedVariableError,
    WilczynskiError,
)
from .examples import ExampleSpec, example, gen_hankel, gen_legendrian7, gen_quadric, gen_trivial
from .expr import Expr, const, var
from .linear import (
    Gl2Rep,
    LinearOde,
    ReducedConnection,
    ad_split,
    companion_connection,
    gl2_rep,
    lf_invariants,
    linear_invariants,
    proportionality_constant,
    seashi_reduce,
    specialize_linear,
    transform_linear,
)
from .matrix import Matrix
from .nonlinear import (
    InvariantSet,
    TrivialityReport,
    generalized_invariants,
    linearization_coeffs,
    point_transform,
    trivializability_check,
)
from .parser import ParseContext, parse
from .systems import (
    LinearSystem,
    MatrixInvariant,
    semi_canonicalize_2nd,
    theta2_linear,
    theta2_nonlinear,
    theta_k_systems,
)

__version__ = "0.1.0"
