"""Dual certificates: the golfing construction, an independent checker of
the six sufficient conditions, and the reported recovery error bound.

Index conventions are 0-based; ``delta`` indexes rows of ``D`` and ``omega``
rows of ``U``.  With analysis matrices ``U`` and ``U~`` (dual), the sampled
operator ``E_Omega = U^* P_Omega U^{-*}`` is ``U[Omega]^H U~[Omega]`` and the
pseudo-inverse ``U^{-1}`` is ``U~^H``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..diagnostics import make_delta_subspace
from ..errors import BadSchedule, BadTheta, DimensionMismatch, TooManyResamples
from ..linops import FrameBundle

__all__ = [
    "GolfingSchedule",
    "CertificateReport",
    "default_schedule",
    "golfing_certificate",
    "certificate_check",
    "recovery_error_bound",
    "sign_pattern",
]

CONDITIONS = ("i", "ii", "iii", "iv", "v", "vi")

# relative slack when comparing a computed quantity with its threshold
_SLACK = 1e-12


@dataclass(frozen=True)
class GolfingSchedule:
    """Iteration count ``l`` and per-step ``alpha_i``, ``beta_i``, ``q_i``."""

    l: int
    alphas: tuple
    betas: tuple
    qs: tuple

    def __post_init__(self):
        if self.l < 1:
            raise BadSchedule("l must be >= 1")
        for name in ("alphas", "betas", "qs"):
            v = tuple(float(x) for x in getattr(self, name))
            if len(v) != self.l:
                raise BadSchedule(f"{name} has {len(v)} entries, expected l={self.l}")
            object.__setattr__(self, name, v)
        if any(not 0 < q <= 1 for q in self.qs):
            raise BadSchedule("every q_i must lie in (0, 1]")
        if any(a <= 0 for a in self.alphas) or any(b <= 0 for b in self.betas):
            raise BadSchedule("alpha_i and beta_i must be positive")

    @property
    def Q(self) -> float:
        """``sqrt(2) sum_i q_i^{-1/2} prod_{j<i} alpha_j``."""
        total, prod = 0.0, 1.0
        for q, a in zip(self.qs, self.alphas):
            total += prod / math.sqrt(q)
            prod *= a
        return math.sqrt(2.0) * total


@dataclass
class CertificateReport:
    rho: np.ndarray = field(repr=False)
    rho_prime: np.ndarray = field(repr=False)
    omega: np.ndarray = field(repr=False)
    theta: float
    Q: float
    condition_values: dict
    thresholds: dict
    passed: dict
    all_satisfied: bool
    golfing_iterations: list = field(default_factory=list)

    def to_dict(self):
        return {
            "omega": [int(v) for v in self.omega],
            "theta": self.theta,
            "Q": self.Q,
            "condition_values": dict(self.condition_values),
            "thresholds": dict(self.thresholds),
            "passed": dict(self.passed),
            "all_satisfied": self.all_satisfied,
            "golfing_iterations": list(self.golfing_iterations),
            "rho_prime_norm": float(np.linalg.norm(self.rho_prime)),
        }


def default_schedule(kappa1: float, kappa2: float, delta_size: int, theta: float) -> GolfingSchedule:
    """Schedule of the golfing proof.

    ``l = ceil(log2(k1 sqrt(|delta| k2)) + 2)``; the first two steps use
    ``alpha = 1/(4 sqrt(sqrt(k2) log(|delta| k1^2 k2)))``,
    ``beta = 1/(7 sqrt(|delta| k2))`` and ``q = theta/9``; later steps use
    ``alpha = 1/2``, ``beta = 4 log(|delta| k1^2 k2)/(7 sqrt(|delta|))`` and the
    common ``q`` solving ``(1-q1)(1-q2)(1-q)^(l-2) = 1 - theta``, which is
    the Bernoulli bookkeeping with one draw per step.
    """
    if not 0 < theta <= 1:
        raise BadTheta(f"theta must lie in (0, 1], got {theta}")
    s = delta_size
    lg = math.log(s * kappa1 ** 2 * kappa2)
    l = math.ceil(math.log2(kappa1 * math.sqrt(s * kappa2)) + 2)
    a12 = 1.0 / (4.0 * math.sqrt(math.sqrt(kappa2) * lg))
    b12 = 1.0 / (7.0 * math.sqrt(s * kappa2))
    q12 = theta / 9.0
    alphas = [a12, a12] + [0.5] * (l - 2)
    betas = [b12, b12] + [4.0 * lg / (7.0 * math.sqrt(s))] * (l - 2)
    if l > 2:
        q = 1.0 - ((1.0 - theta) / (1.0 - q12) ** 2) ** (1.0 / (l - 2))
        qs = [q12, q12] + [q] * (l - 2)
    else:
        qs = [q12, q12][:l]
    return GolfingSchedule(l, alphas[:l], betas[:l], qs)


def sign_pattern(Db: FrameBundle, delta, g0=None, seed=0) -> np.ndarray:
    """``sgn(P_delta D g0)`` restricted to ``delta`` (``sgn(0) = 0``).

    Without ``g0`` a seeded pattern of random unit phases is returned.
    """
    delta = list(delta)
    if g0 is None:
        rng = np.random.default_rng(seed)
        return np.exp(2j * np.pi * rng.random(len(delta)))
    x = (Db.U @ np.asarray(g0))[delta]
    mag = np.abs(x)
    return np.where(mag > 0, x / np.where(mag > 0, mag, 1.0), 0.0)


def _leq(value, threshold):
    return bool(value <= threshold * (1 + _SLACK) + _SLACK)


def golfing_certificate(Ub: FrameBundle, Db: FrameBundle, delta, theta: float,
                        schedule: GolfingSchedule | None = None, seed=0,
                        max_total_resamples: int | None = None, N: int | None = None,
                        sign=None) -> CertificateReport:
    """Build ``rho = U^* P_Omega rho'`` by the golfing iteration.

    Step ``i`` draws ``Omega_i ~ Ber(q_i)`` from ``range(N)`` until
    ``||(P_W - q^-1 P_W E P_W) Z|| <= alpha_i ||Z||``,
    ``||q^-1 P_delta^perp D^{-*} P_W^perp E Z||_inf <= beta_i ||Z||`` and
    ``||q^-1 P_W U^{-1} P_Omega U^{-*} P_W Z|| <= 2 k1 ||Z||`` all hold, then
    updates ``Z <- (P_W - q^-1 P_W E P_W) Z``.  ``Omega`` is the union of every
    draw, accepted or not.  Raises :class:`TooManyResamples` (carrying the
    partial report) once more than ``max_total_resamples`` draws (default
    ``64 l``) have been made.
    """
    if not 0 < theta <= 1:
        raise BadTheta(f"theta must lie in (0, 1], got {theta}")
    N = Ub.n_rows if N is None else N
    if not 1 <= N <= Ub.n_rows:
        raise DimensionMismatch(f"N={N} must lie in [1, {Ub.n_rows}]")
    sub = make_delta_subspace(Db, delta)
    delta = list(sub.delta)
    schedule = schedule or default_schedule(Ub.kappa, Db.kappa, len(delta), theta)
    cap = 64 * schedule.l if max_total_resamples is None else max_total_resamples
    rng = np.random.default_rng(seed)
    sgn = sign_pattern(Db, delta, seed=rng.integers(2 ** 63)) if sign is None else np.asarray(sign, complex)
    if sgn.shape != (len(delta),):
        raise DimensionMismatch("sign must have one entry per index of delta")

    q_basis = sub.basis
    qh = q_basis.conj().T
    U, Ut, Dt = Ub.U, Ub.dual, Db.dual
    k1 = Ub.kappa
    off = np.ones(Db.n_rows, dtype=bool)
    off[delta] = False

    z0 = Db.U[delta].conj().T @ sgn
    z = z0.copy()
    rho = np.zeros(Ub.n_cols, dtype=complex)
    rho_prime = np.zeros(Ub.n_rows, dtype=complex)
    drawn = np.zeros(Ub.n_rows, dtype=bool)
    counts = []
    total = 0
    for i in range(schedule.l):
        q, a, b = schedule.qs[i], schedule.alphas[i], schedule.betas[i]
        nz = np.linalg.norm(z)
        r = 0
        while True:
            if total >= cap:
                partial = _report(Ub, Db, delta, drawn, rho, rho_prime, theta, schedule.Q, sgn,
                                  counts + [r])
                raise TooManyResamples(f"no admissible draw for step {i + 1} within {cap} total draws",
                                       partial)
            total += 1
            r += 1
            om = np.flatnonzero(rng.random(N) < q)
            drawn[om] = True
            coeff = Ut[om] @ z                       # P_Omega U^{-*} Z
            ez = U[om].conj().T @ coeff / q           # q^-1 E Z
            pw_ez = q_basis @ (qh @ ez)
            c1 = np.linalg.norm(z - pw_ez)
            perp = ez - pw_ez
            c2 = float(np.abs(Dt[off] @ perp).max(initial=0.0))
            pz = q_basis @ (qh @ z)
            c3 = np.linalg.norm(q_basis @ (qh @ (Ut[om].conj().T @ (Ut[om] @ pz)))) / q
            if _leq(c1, a * nz) and _leq(c2, b * nz) and _leq(c3, 2 * k1 * nz):
                break
        counts.append(r)
        rho += ez
        rho_prime[om] += coeff / q
        z = z - pw_ez
    return _report(Ub, Db, delta, drawn, rho, rho_prime, theta, schedule.Q, sgn, counts)


def _report(Ub, Db, delta, drawn, rho, rho_prime, theta, Q, sgn, counts):
    omega = np.flatnonzero(drawn)
    rep = certificate_check(Ub, Db, delta, omega, rho_prime, theta, Q, sgn)
    rep.golfing_iterations = list(counts)
    return rep


def certificate_check(Ub: FrameBundle, Db: FrameBundle, delta, omega, rho_prime, theta: float,
                      Q: float, sign) -> CertificateReport:
    """Evaluate the six certificate conditions for ``rho = U^* P_Omega rho'``.

    (i)   ``||(theta^-1 P_W U^-1 P_Omega U P_W)^-1||_{W->W} <= 2``
    (ii)  ``||theta^-1 P_W U^-1 P_Omega U^-* P_W||_{W->W} <= 2 k1``
    (iii) ``max_{j not in delta} theta^-1 ||P_Omega U P_W^perp phi~_j||^2 <= 2 k1 k2``
    (iv)  ``||P_W rho - D^* sgn|| <= 1 / (16 k1 sqrt(k2))``
    (v)   ``||P_delta^perp D^-* P_W^perp rho||_inf <= 1/4``
    (vi)  ``||rho'|| <= Q sqrt(k1 k2 |delta|)``

    ``rho_prime`` has one entry per row of ``U`` and must vanish off ``omega``.
    Operators restricted to ``W`` are represented on an orthonormal basis;
    (i) is reported as ``inf`` when the restricted operator is singular.
    """
    if not 0 < theta <= 1:
        raise BadTheta(f"theta must lie in (0, 1], got {theta}")
    rho_prime = np.asarray(rho_prime, dtype=complex)
    if rho_prime.shape != (Ub.n_rows,):
        raise DimensionMismatch(f"rho_prime must have length {Ub.n_rows}")
    omega = np.unique(np.asarray(omega, dtype=np.int64))
    sub = make_delta_subspace(Db, delta)
    delta = list(sub.delta)
    sgn = np.asarray(sign, dtype=complex)
    if sgn.shape != (len(delta),):
        raise DimensionMismatch("sign must have one entry per index of delta")
    outside = np.ones(Ub.n_rows, dtype=bool)
    outside[omega] = False
    if np.any(rho_prime[outside] != 0):
        raise DimensionMismatch("rho_prime is not supported on omega")

    q_basis = sub.basis
    qh = q_basis.conj().T
    U, Ut, Dt = Ub.U, Ub.dual, Db.dual
    k1, k2 = Ub.kappa, Db.kappa
    uo, uto = U[omega], Ut[omega]

    t = (uto @ q_basis).conj().T @ (uo @ q_basis) / theta
    smin = np.linalg.svd(t, compute_uv=False).min() if t.size else 0.0
    v1 = math.inf if smin <= 1e-14 * max(1.0, np.abs(t).max(initial=0.0)) else 1.0 / smin
    t2 = (uto @ q_basis).conj().T @ (uto @ q_basis) / theta
    v2 = float(np.linalg.norm(t2, 2)) if t2.size else 0.0
    off = np.ones(Db.n_rows, dtype=bool)
    off[delta] = False
    phit = Dt[off].conj().T
    perp = phit - q_basis @ (qh @ phit)
    v3 = float((np.linalg.norm(uo @ perp, axis=0) ** 2).max(initial=0.0) / theta)
    rho = U.conj().T @ rho_prime
    z0 = Db.U[delta].conj().T @ sgn
    v4 = float(np.linalg.norm(q_basis @ (qh @ rho) - z0))
    rho_perp = rho - q_basis @ (qh @ rho)
    v5 = float(np.abs(Dt[off] @ rho_perp).max(initial=0.0))
    v6 = float(np.linalg.norm(rho_prime))

    values = dict(zip(CONDITIONS, (float(v1), v2, v3, v4, v5, v6)))
    thresholds = dict(zip(CONDITIONS, (2.0, 2.0 * k1, 2.0 * k1 * k2, 1.0 / (16.0 * k1 * math.sqrt(k2)),
                                       0.25, Q * math.sqrt(k1 * k2 * len(delta)))))
    passed = {k: _leq(values[k], thresholds[k]) for k in CONDITIONS}
    return CertificateReport(rho, rho_prime, omega, float(theta), float(Q), values, thresholds, passed,
                             all(passed.values()))


def recovery_error_bound(sigma_sM: float, kappa1: float, kappa2: float, omega: float, s: int, N: int,
                         m: int, epsilon: float, C2: float = 1.0, w_norm: float | None = None) -> float:
    """``20 k1 sqrt(k2) sigma + C'' k2 sqrt(k1^3 omega s N / m) eps``.

    ``w_norm`` adds the factor ``||w||`` of the weighted variant.  ``C2``
    stands in for the unknown universal constant (default 1).
    """
    second = C2 * kappa2 * math.sqrt(kappa1 ** 3 * omega * s * N / m) * epsilon
    if w_norm is not None:
        second *= w_norm
    return float(20.0 * kappa1 * math.sqrt(kappa2) * sigma_sM + second)
