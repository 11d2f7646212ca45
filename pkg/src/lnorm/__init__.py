"""Operator norms of structured infinite matrices on lp sequence spaces.

The package estimates, bounds and certifies the lp operator norms of two
families of infinite matrices defined by a scalar sequence (a_n): the
symmetric family entry(i,j) = a_max(i,j) and the terraced (lower
triangular) family entry(i,j) = a_i for j <= i, including the lacunary
variants supported on geometric index sets.
"""

from .analytic import (
    BoundReport,
    DeltaBoundParams,
    LacunaryConstants,
    S_UPPER,
    WitnessParams,
    delta_upper_bound,
    f0_quartic,
    f0_quartic_numerator,
    f_of_s,
    g_and_h,
    gamma_m,
    gamma_ratio_sum,
    lacunary_constants,
    lacunary_norm,
    lacunary_t_opt,
    optimize_delta_params,
    pq_constant,
    s_star,
)
from .critical import (
    BELOW_EVIDENCE,
    CERTIFIED_ABOVE,
    CriticalScan,
    INCONCLUSIVE,
    ScanPoint,
    scan_critical,
    upper_bound_of_record,
)
from .errors import InternalConsistencyError, LnormError, NoValidEpsilonError
from .generators import (
    C,
    CTR,
    GeneratorSequence,
    L,
    StructuredMatrix,
    TruncatedVector,
    materialize_dense,
    matvec,
    matvec_gram,
)
from .normest import (
    NormEstimate,
    log_fit_extrapolation,
    norm2_power,
    normp_boyd,
    rayleigh_p,
    truncation_sweep,
)
from .witness import (
    AsCertificate,
    AsWitness,
    LacunaryCertificate,
    LacunaryWitness,
    PnormCertificate,
    PnormWitness,
    as_witness_decay_band,
    build_as_witness,
    build_lacunary_witness,
    build_pnorm_witness,
    certify_as_witness,
    certify_lacunary_witness,
    certify_pnorm_witness,
    find_epsilon,
    lacunary_matvec_check,
    lacunary_rayleigh_sq,
    lacunary_vector,
    lacunary_y_closed,
    witness_k_values,
    witness_k_values_gamma,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "LnormError", "InternalConsistencyError", "NoValidEpsilonError",
    # generators
    "GeneratorSequence", "StructuredMatrix", "TruncatedVector",
    "L", "C", "CTR", "matvec", "matvec_gram", "materialize_dense",
    # norm estimation
    "NormEstimate", "norm2_power", "normp_boyd", "truncation_sweep",
    "rayleigh_p", "log_fit_extrapolation",
    # analytic bounds
    "BoundReport", "DeltaBoundParams", "WitnessParams", "LacunaryConstants",
    "S_UPPER", "delta_upper_bound", "optimize_delta_params", "f_of_s",
    "s_star", "f0_quartic", "f0_quartic_numerator", "g_and_h",
    "gamma_ratio_sum", "lacunary_constants", "lacunary_norm",
    "lacunary_t_opt", "pq_constant", "gamma_m",
    # witnesses
    "AsWitness", "AsCertificate", "PnormWitness", "PnormCertificate",
    "LacunaryWitness", "LacunaryCertificate", "build_as_witness",
    "certify_as_witness", "as_witness_decay_band", "find_epsilon",
    "build_pnorm_witness", "certify_pnorm_witness", "build_lacunary_witness",
    "certify_lacunary_witness", "lacunary_vector", "lacunary_y_closed",
    "lacunary_rayleigh_sq", "lacunary_matvec_check", "witness_k_values",
    "witness_k_values_gamma",
    # critical scan
    "CriticalScan", "ScanPoint", "scan_critical", "upper_bound_of_record",
    "CERTIFIED_ABOVE", "BELOW_EVIDENCE", "INCONCLUSIVE",
]
