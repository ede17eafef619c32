"""First-order primal-dual (Chambolle-Pock) solver for l1-analysis recovery.

The problem ``min ||D g||_1  s.t.  ||A g - zeta|| <= eps`` is written as
``min_g F(K g)`` with ``K = [D; A]`` and ``F(u, v) = ||u||_1 + i_B(v)`` where
``B`` is the ball of radius ``eps`` around ``zeta``.  The dual prox of the
first block is the projection onto the unit l_inf ball (complex magnitude
clipping, the conjugate of phase-preserving soft thresholding); the second
block uses Moreau's identity with the projection onto ``B``.
"""

from __future__ import annotations

import csv

import numpy as np

from ..errors import NotConverged, ZeroDivisor
from ..sampling import repetition_counts
from .problem import RecoveryProblem, RecoveryResult, SolverConfig

__all__ = ["solve_analysis_l1", "solve_weighted_l1", "operator_norm"]

# Adaptive step parameters (residual balancing on the relative residuals that
# drive the stopping rule): initial adaptation level, its geometric decay, and
# the tolerated primal/dual imbalance.
_ALPHA0, _ETA, _BALANCE = 0.5, 0.995, 1.5
# The primal step may drift at most this factor from its initial value;
# unbounded drift can freeze the primal iterate.
_MAX_DRIFT = 1e3


def operator_norm(D, A, iters=100, seed=0):
    """Power-method estimate of ``||[D; A]||_2``."""
    rng = np.random.default_rng(seed)
    n = D.shape[1]
    x = rng.standard_normal(n) + (1j * rng.standard_normal(n) if np.iscomplexobj(D) or np.iscomplexobj(A) else 0)
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(iters):
        y = D.conj().T @ (D @ x) + A.conj().T @ (A @ x)
        new = np.linalg.norm(y)
        if new == 0:
            return 0.0
        x = y / new
        if abs(new - lam) <= 1e-12 * new:
            lam = new
            break
        lam = new
    return float(np.sqrt(lam))


def _clip(y):
    mag = np.abs(y)
    return y / np.maximum(mag, 1.0)


def _pdhg(D, A, zeta, eps, cfg: SolverConfig):
    dh, ah = D.conj().T.copy(), A.conj().T.copy()
    n = D.shape[1]
    dtype = np.result_type(D, A, zeta)
    g = np.zeros(n, dtype=dtype)
    y1 = np.zeros(D.shape[0], dtype=dtype)
    y2 = np.zeros(A.shape[0], dtype=dtype)
    L = operator_norm(D, A, cfg.norm_power_iters) * 1.01
    if L == 0:
        return g, 0, True, 0.0, 0.0, []
    tau0 = sig1 = sig2 = 1.0 / L
    scale = np.sqrt(cfg.step_ratio)
    tau, s1, s2 = tau0 / scale, sig1 * scale, sig2 * scale
    alpha = _ALPHA0
    dg, ag = D @ g, A @ g
    kty = dh @ y1 + ah @ y2
    trace = []
    rp = rd = np.inf
    converged = False
    it = 0
    for it in range(1, cfg.max_iters + 1):
        g_new = g - tau * kty
        dg_new, ag_new = D @ g_new, A @ g_new
        y1_new = _clip(y1 + s1 * (2 * dg_new - dg))
        v = y2 + s2 * (2 * ag_new - ag)
        c = v / s2 - zeta
        nc = np.linalg.norm(c)
        if nc > eps:
            c *= eps / nc
        y2_new = v - s2 * (zeta + c)
        dty1, aty2 = dh @ y1_new, ah @ y2_new
        kty_new = dty1 + aty2

        if cfg.adaptive or it % cfg.check_every == 0 or it == cfg.max_iters:
            p = (g - g_new) / tau - (kty - kty_new)
            d1 = (y1 - y1_new) / s1 - (dg - dg_new)
            d2 = (y2 - y2_new) / s2 - (ag - ag_new)
            pn = np.linalg.norm(p)
            dn = np.sqrt(np.linalg.norm(d1) ** 2 + np.linalg.norm(d2) ** 2)
            sp = max(np.linalg.norm(dty1), np.linalg.norm(aty2), 1e-300)
            sd = max(np.sqrt(np.linalg.norm(dg_new) ** 2 + np.linalg.norm(ag_new) ** 2), 1e-300)
            rp, rd = pn / sp, dn / sd
            if cfg.trace_path and it % cfg.trace_every == 0:
                trace.append((it, rp, rd, float(np.abs(dg_new).sum())))
            if rp <= cfg.tol_primal and rd <= cfg.tol_dual:
                g, converged = g_new, True
                break
            if cfg.adaptive and alpha > 1e-8:
                if rp > _BALANCE * rd:
                    f = 1.0 / (1.0 - alpha)
                elif rp * _BALANCE < rd:
                    f = 1.0 - alpha
                else:
                    f = None
                if f is not None and 1 / _MAX_DRIFT <= tau * f * scale / tau0 <= _MAX_DRIFT:
                    tau, s1, s2, alpha = tau * f, s1 / f, s2 / f, alpha * _ETA

        g, dg, ag, y1, y2, kty = g_new, dg_new, ag_new, y1_new, y2_new, kty_new
    return g, it, converged, float(rp), float(rd), trace


def _write_trace(path, trace):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "primal_residual", "dual_residual", "objective"])
        w.writerows(trace)


def _run(problem: RecoveryProblem, cfg: SolverConfig, row_scale=None):
    A = problem.A
    zeta = problem.zeta
    D = problem.D.U
    if row_scale is not None:
        A = A * row_scale[:, None]
        zeta = zeta * row_scale
    real = problem.is_real
    if real:
        A, zeta, D = A.real, zeta.real, D.real
    g, it, ok, rp, rd, trace = _pdhg(D, A, zeta, problem.epsilon, cfg)
    if cfg.trace_path:
        _write_trace(cfg.trace_path, trace)
    g = g.astype(complex)
    res = (A @ g.real if real else A @ g) - zeta
    result = RecoveryResult(
        g=g,
        objective=float(np.abs(problem.D.U @ g).sum()),
        constraint_residual=float(np.linalg.norm(res)),
        iterations=it,
        converged=ok,
        primal_residual=rp,
        dual_residual=rd,
    )
    if not ok and cfg.raise_on_fail:
        raise NotConverged(f"no convergence after {it} iterations (rp={rp:.2e}, rd={rd:.2e})", result)
    return result


def solve_analysis_l1(problem: RecoveryProblem, config: SolverConfig | None = None) -> RecoveryResult:
    """Minimize ``||D g||_1`` subject to ``||P_Omega U g - zeta||_2 <= eps``.

    Real problems (real sampled rows, real ``D`` and real data) are solved in
    real arithmetic.  On non-convergence the last iterate is returned with
    ``converged=False``, or :class:`NotConverged` is raised when
    ``config.raise_on_fail`` is set.
    """
    return _run(problem, config or SolverConfig())


def solve_weighted_l1(problem: RecoveryProblem, config: SolverConfig | None = None) -> RecoveryResult:
    """As :func:`solve_analysis_l1` with the weighted data norm
    ``||eta||_w^2 = sum_i |eta_i|^2 / ceil(N w_{l_i}^2)``.

    Dividing the sampled rows and the data by ``sqrt(ceil(N w^2))`` turns the
    weighted ball into a Euclidean one.  With ``epsilon = 0`` the feasible set
    does not depend on the weights, so the unscaled (better conditioned)
    system is solved instead.  ``constraint_residual`` is reported in the
    weighted norm.
    """
    if problem.weights is None:
        raise ValueError("weighted solve needs problem.weights")
    r = repetition_counts(problem.weights, problem.N)[problem.pattern.indices]
    if np.any(r == 0):
        raise ZeroDivisor("a sampled row has ceil(N w^2) = 0")
    scale = 1.0 / np.sqrt(r)
    res = _run(problem, config or SolverConfig(), scale if problem.epsilon > 0 else None)
    if problem.epsilon == 0:
        res.constraint_residual = float(np.linalg.norm((problem.A @ res.g - problem.zeta) * scale))
    return res
