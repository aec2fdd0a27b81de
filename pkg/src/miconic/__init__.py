"""miconic: mixed-integer conic optimization by conic outer approximation."""

from . import atoms, cones, instances
from .atoms import atom_library
from .compile import CompilationMap, emit_conic, recover_solution
from .conicio import read_conic, write_conic
from .expr import (
    AFFINE,
    CONCAVE,
    CONSTANT,
    CONVEX,
    UNKNOWN,
    Constant,
    Variable,
    curvature_of,
    evaluate,
    sign_of,
)
from .model import Constraint, DcpModel, DcpReport, dcp_verify
from .modelio import parse_model, print_model
from .oa import (
    ASSUMPTION_FAILURE,
    Cut,
    OaConfig,
    OaOutcome,
    add_cut,
    brute_force_solve,
    oa_solve,
)
from .program import ConicProgram

__version__ = "0.1.0"
