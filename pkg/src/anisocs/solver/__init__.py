"""l1-analysis solvers, an LP oracle and dual-certificate tools."""

from .certificate import (CertificateReport, GolfingSchedule, certificate_check, default_schedule,
                          golfing_certificate, recovery_error_bound, sign_pattern)
from .pdhg import operator_norm, solve_analysis_l1, solve_weighted_l1
from .problem import RecoveryProblem, RecoveryResult, SolverConfig
from .simplex import LPResult, lp_oracle, simplex

__all__ = [
    "RecoveryProblem",
    "RecoveryResult",
    "SolverConfig",
    "solve_analysis_l1",
    "solve_weighted_l1",
    "operator_norm",
    "LPResult",
    "lp_oracle",
    "simplex",
    "CertificateReport",
    "GolfingSchedule",
    "default_schedule",
    "golfing_certificate",
    "certificate_check",
    "recovery_error_bound",
    "sign_pattern",
]
