"""Problem, configuration and result records for the recovery solvers."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import DimensionMismatch
from ..linops import FrameBundle
from ..sampling import SamplingPattern


@dataclass(frozen=True)
class RecoveryProblem:
    """``min ||D g||_1`` subject to ``||P_Omega U g - zeta|| <= epsilon``.

    ``weights`` switches the data norm to the weighted one used with
    variable-density patterns; ``N`` is the count entering ``ceil(N w^2)``
    (defaults to ``len(weights)``).
    """

    U: FrameBundle
    D: FrameBundle
    pattern: SamplingPattern
    zeta: np.ndarray
    epsilon: float = 0.0
    weights: np.ndarray | None = None
    N: int | None = None

    def __post_init__(self):
        z = np.asarray(self.zeta, dtype=complex).ravel()
        object.__setattr__(self, "zeta", z)
        if z.shape[0] != self.pattern.m:
            raise DimensionMismatch(f"zeta has {z.shape[0]} entries, pattern has {self.pattern.m}")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.U.n_cols != self.D.n_cols:
            raise DimensionMismatch("U and D act on different spaces")
        if self.pattern.N > self.U.n_rows:
            raise DimensionMismatch("pattern indexes more rows than U has")

    @property
    def A(self) -> np.ndarray:
        """Sampled measurement rows ``P_Omega U`` (repetitions kept)."""
        return self.U.U[self.pattern.indices]

    @property
    def is_real(self) -> bool:
        return not (np.any(self.A.imag) or np.any(self.D.U.imag) or np.any(self.zeta.imag))


@dataclass(frozen=True)
class SolverConfig:
    """Primal-dual iteration settings.

    ``step_ratio`` is ``sigma / tau`` at the start; ``adaptive`` enables
    residual-balancing step updates.  ``trace_path`` writes a CSV of the
    residual history every ``trace_every`` iterations.
    """

    max_iters: int = 50000
    tol_primal: float = 1e-9
    tol_dual: float = 1e-9
    step_ratio: float = 1.0
    norm_power_iters: int = 100
    adaptive: bool = True
    check_every: int = 10
    raise_on_fail: bool = False
    trace_path: str | None = None
    trace_every: int = 10

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.tol_primal <= 0 or self.tol_dual <= 0:
            raise ValueError("tolerances must be positive")
        if self.step_ratio <= 0:
            raise ValueError("step_ratio must be positive")

    def to_dict(self):
        return asdict(self)


@dataclass
class RecoveryResult:
    g: np.ndarray = field(repr=False)
    objective: float
    constraint_residual: float
    iterations: int
    converged: bool
    primal_residual: float = float("nan")
    dual_residual: float = float("nan")

    def to_dict(self):
        return {
            "g_real": self.g.real.tolist(),
            "g_imag": self.g.imag.tolist(),
            "objective": self.objective,
            "constraint_residual": self.constraint_residual,
            "iterations": self.iterations,
            "converged": self.converged,
            "primal_residual": self.primal_residual,
            "dual_residual": self.dual_residual,
        }
