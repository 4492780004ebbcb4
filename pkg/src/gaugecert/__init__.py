"""Certification toolkit for gauge-regularized linear inverse problems.

Decide whether a point is the unique / sharp minimizer of a gauge subject
to linear measurements, construct the dual certificates that witness it,
compute the sharpness constant kappa and the minimum conic singular value
alpha, and verify the linear-rate robust-recovery bounds empirically.
"""

from .certificates import (
    NO,
    UNKNOWN,
    YES,
    CertificateReport,
    InternalDisagreementError,
    analysis_check,
    check_sharp,
    check_sharp_qp,
    check_unique,
    find_dual_certificate,
    fuchs_check,
    nonneg_l1_check,
    nuclear_check,
    sdp_trace_check,
    upper_lipschitz_probe,
    wsl1_check,
)
from .cones import (
    ConeSpec,
    EnumerationCapExceeded,
    LpFailure,
    cone_trivial,
    kernel_basis,
    lp_solve,
    min_conic_singular,
    min_norm_point,
    nsp_constant,
    sphere_min,
)
from .gauges import (
    KINDS,
    AnalysisL1Gauge,
    Gauge,
    GroupL12Gauge,
    L1Gauge,
    NonnegL1Gauge,
    NuclearGauge,
    SdpTraceGauge,
    SortedWeightedL1Gauge,
    VertexCapExceeded,
    sym_basis,
)
from .recovery import (
    CSV_HEADER,
    ProblemInstance,
    RecoveryReport,
    gen_instance,
    rows_to_csv,
    run_recovery,
    sweep,
)
from .solvers import (
    ResidualMonotonicityError,
    SolveResult,
    solve_dual,
    solve_mozorov,
    solve_primal_eq,
    solve_tikhonov,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # gauges
    "Gauge", "L1Gauge", "AnalysisL1Gauge", "SortedWeightedL1Gauge",
    "GroupL12Gauge", "NonnegL1Gauge", "NuclearGauge", "SdpTraceGauge",
    "KINDS", "sym_basis", "VertexCapExceeded",
    # cone engine
    "lp_solve", "kernel_basis", "ConeSpec", "cone_trivial", "min_norm_point",
    "sphere_min", "min_conic_singular", "nsp_constant",
    "EnumerationCapExceeded", "LpFailure",
    # solvers
    "SolveResult", "solve_primal_eq", "solve_dual", "solve_tikhonov",
    "solve_mozorov", "ResidualMonotonicityError",
    # certificates
    "YES", "NO", "UNKNOWN", "CertificateReport", "InternalDisagreementError",
    "check_sharp", "check_unique", "check_sharp_qp", "find_dual_certificate",
    "fuchs_check", "analysis_check", "wsl1_check", "nuclear_check",
    "nonneg_l1_check", "sdp_trace_check", "upper_lipschitz_probe",
    # recovery lab
    "ProblemInstance", "RecoveryReport", "CSV_HEADER", "gen_instance",
    "run_recovery", "sweep", "rows_to_csv",
]
