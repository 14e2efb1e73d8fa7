"""ifmkit: intuitionistic fuzzy metric spaces made executable.

Construct spaces with paired nearness / non-nearness grades, audit their
axioms by seeded sampling with witness minimization, verify contraction
conditions (reciprocal-gap k form and psi-phi control pairs), and compute
fixed points by Picard iteration with Cauchy diagnostics, or by exact
orbit-cycle analysis on finite domains.
"""

from .auditor import AuditReport, AxiomCheck, Witness, audit_space, minimize_witness
from .contraction import (
    AdmissibilityReport,
    ContractionReport,
    ContractionWitness,
    KContraction,
    PsiPhiPair,
    SelfMap,
    check_admissible,
    check_k_contractive,
    check_psi_phi_contractive,
    is_contractive_sequence,
    is_k_contractive_sequence,
    pair_from_k,
    phi_from_k,
    psi_from_k,
)
from .errors import (
    ConfigError,
    DomainError,
    IfmError,
    NonConvergenceError,
    PreconditionError,
    UnitRangeError,
    WitnessIntegrityError,
)
from .norms import (
    NormAxiomReport,
    TConorm,
    TNorm,
    UnitValue,
    check_norm_axioms,
    dual_of,
    tconorm_apply,
    tnorm_apply,
)
from .sampling import EXHAUSTIVE, RANDOM, SamplerConfig
from .solver import (
    FixedPointReport,
    IterationTrace,
    JointContinuityResult,
    ResidualCheck,
    SolverConfig,
    check_joint_continuity,
    detect_g_cauchy,
    detect_m_cauchy,
    edelstein_solve,
    picard_iterate,
    solve_fixed_point,
    trace_to_csv,
    verify_fixed_point,
    write_trace_csv,
)
from .spaces import (
    ARCHIMEDEAN,
    NON_ARCHIMEDEAN,
    FiniteDomain,
    IFSpace,
    IntervalDomain,
    crisp_threshold_space,
    eval_mu,
    eval_nu,
    standard_space,
)

__version__ = "0.1.0"

__all__ = [
    "ARCHIMEDEAN",
    "NON_ARCHIMEDEAN",
    "EXHAUSTIVE",
    "RANDOM",
    "AdmissibilityReport",
    "AuditReport",
    "AxiomCheck",
    "ConfigError",
    "ContractionReport",
    "ContractionWitness",
    "DomainError",
    "FiniteDomain",
    "FixedPointReport",
    "IFSpace",
    "IfmError",
    "IntervalDomain",
    "IterationTrace",
    "JointContinuityResult",
    "KContraction",
    "NonConvergenceError",
    "NormAxiomReport",
    "PreconditionError",
    "PsiPhiPair",
    "ResidualCheck",
    "SamplerConfig",
    "SelfMap",
    "SolverConfig",
    "TConorm",
    "TNorm",
    "UnitRangeError",
    "UnitValue",
    "Witness",
    "WitnessIntegrityError",
    "audit_space",
    "check_admissible",
    "check_joint_continuity",
    "check_k_contractive",
    "check_norm_axioms",
    "check_psi_phi_contractive",
    "crisp_threshold_space",
    "detect_g_cauchy",
    "detect_m_cauchy",
    "dual_of",
    "edelstein_solve",
    "eval_mu",
    "eval_nu",
    "is_contractive_sequence",
    "is_k_contractive_sequence",
    "minimize_witness",
    "pair_from_k",
    "phi_from_k",
    "picard_iterate",
    "psi_from_k",
    "solve_fixed_point",
    "standard_space",
    "tconorm_apply",
    "tnorm_apply",
    "trace_to_csv",
    "verify_fixed_point",
    "write_trace_csv",
]
