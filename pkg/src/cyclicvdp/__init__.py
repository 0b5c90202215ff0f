"""Sign-variation counters, compound matrices, and cyclic variation-diminishing analysis."""

from .classify import (
    ClassificationReport,
    SsrVerdict,
    classify_matrix,
    cvds_tpds_flowchart,
    diag_scale,
    in_M,
    in_M_plus,
    in_Q,
    in_Q_plus,
    is_irreducible,
    is_metzler,
    ssr_verdict,
)
from .compound import (
    CompoundMatrix,
    add_compound,
    add_compound_fd,
    lex_rank,
    lex_unrank,
    minor,
    mult_compound,
)
from .errors import (
    DimensionMismatch,
    InadmissibleState,
    InputError,
    NonpositiveParameter,
    NonpositiveScale,
    NotInV,
    NotMetzler,
    NumericalAbort,
    OrderOutOfRange,
    OutOfUnitCube,
    ParseError,
    RankOutOfRange,
    ShapeError,
    SingularMatrix,
    StepTooLarge,
    ToolkitError,
    ZeroInitialCondition,
)
from .lindyn import (
    LtvSystem,
    SignEvent,
    Trajectory,
    check_positivity_condition,
    compound_transition,
    simulate,
    transition_matrix,
    verify_cvds,
)
from .rfmr import RfmrParams, link_flows, rfmr_jacobian, rfmr_rhs, simulate_with_variational
from .signvar import (
    SignCountReport,
    s_minus,
    s_minus_rows,
    s_plus,
    s_plus_rows,
    sc_minus,
    sc_minus_rows,
    sc_plus,
    sc_plus_rows,
    sigma,
    sign_report,
)
from .vdp import (
    Counterexample,
    VdpVerdict,
    check_nonstandard_vdp,
    check_prop_sv1,
    check_scvdp,
    check_weak_cvdp,
    gaussian_kernel,
    sample_vdp_counterexample,
)

__version__ = "0.1.0"
