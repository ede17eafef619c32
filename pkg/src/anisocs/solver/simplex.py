"""Self-contained two-phase tableau simplex used as an exact LP oracle.

Bland's rule (smallest eligible index enters, smallest basic index leaves
among ties) rules out cycling.  Entries with magnitude below ``PIVOT_TOL``
are treated as zero when choosing pivots; reduced costs must be below
``-OPT_TOL`` to enter.
"""

from __future__ import annotations

from collections import namedtuple

import numpy as np

from ..errors import DimensionMismatch, Infeasible, Unbounded

__all__ = ["LPResult", "simplex", "lp_oracle", "PIVOT_TOL", "OPT_TOL"]

PIVOT_TOL = 1e-11
OPT_TOL = 1e-10

LPResult = namedtuple("LPResult", "objective x iterations")


def _pivot(t, row, col):
    t[row] /= t[row, col]
    for r in range(t.shape[0]):
        if r != row and t[r, col] != 0.0:
            t[r] -= t[r, col] * t[row]


def _iterate(t, basis, n_allowed, max_iters):
    """Run Bland pivots on tableau ``t`` (objective in the last row)."""
    m = t.shape[0] - 1
    for it in range(max_iters):
        cost = t[-1, :n_allowed]
        entering = np.flatnonzero(cost < -OPT_TOL)
        if entering.size == 0:
            return it
        col = int(entering[0])
        colv = t[:m, col]
        ok = colv > PIVOT_TOL
        if not ok.any():
            raise Unbounded("objective is unbounded below")
        ratios = np.full(m, np.inf)
        ratios[ok] = t[:m, -1][ok] / colv[ok]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + 1e-12 * max(1.0, abs(best)))
        row = int(min(ties, key=lambda r: basis[r]))
        _pivot(t, row, col)
        basis[row] = col
    raise RuntimeError("simplex iteration limit reached")


def simplex(c, A_eq, b_eq, max_iters=20000) -> LPResult:
    """Solve ``min c.x`` subject to ``A_eq x = b_eq``, ``x >= 0``.

    Raises :class:`Infeasible` or :class:`Unbounded`.
    """
    c = np.asarray(c, dtype=float)
    A = np.array(A_eq, dtype=float, ndmin=2)
    b = np.array(b_eq, dtype=float).ravel()
    m, n = A.shape
    if c.shape != (n,) or b.shape != (m,):
        raise DimensionMismatch("inconsistent LP dimensions")
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1

    # phase 1: artificial variables n..n+m-1
    t = np.zeros((m + 1, n + m + 1))
    t[:m, :n] = A
    t[:m, n:n + m] = np.eye(m)
    t[:m, -1] = b
    t[-1, :n] = -A.sum(axis=0)
    t[-1, -1] = -b.sum()
    basis = list(range(n, n + m))
    iters = _iterate(t, basis, n + m, max_iters)
    scale = max(1.0, float(np.abs(b).max(initial=0.0)))
    if -t[-1, -1] > 1e-9 * scale:
        raise Infeasible(f"phase-1 optimum {-t[-1, -1]:.3e} > 0")

    # drive remaining artificials out of the basis, dropping redundant rows
    keep = []
    for r in range(m):
        if basis[r] >= n:
            cand = np.flatnonzero(np.abs(t[r, :n]) > 1e-9)
            if cand.size == 0:
                continue
            _pivot(t, r, int(cand[0]))
            basis[r] = int(cand[0])
        keep.append(r)
    t2 = np.zeros((len(keep) + 1, n + 1))
    t2[:-1, :n] = t[keep, :n]
    t2[:-1, -1] = t[keep, -1]
    basis = [basis[r] for r in keep]
    t2[-1, :n] = c
    for r, j in enumerate(basis):
        if t2[-1, j] != 0.0:
            t2[-1] -= t2[-1, j] * t2[r]
    iters += _iterate(t2, basis, n, max_iters)
    x = np.zeros(n)
    for r, j in enumerate(basis):
        x[j] = t2[r, -1]
    return LPResult(float(c @ x), x, iters)


def lp_oracle(D, A, zeta) -> LPResult:
    """Exact optimum of ``min ||D g||_1`` subject to ``A g = zeta`` (real data).

    Variables ``(g+, g-, u+, u-) >= 0`` with ``D(g+ - g-) = u+ - u-`` and
    ``A(g+ - g-) = zeta``; the objective is ``sum(u+ + u-)``.  The returned
    ``x`` is the recovered ``g``.
    """
    D = np.asarray(D)
    A = np.asarray(A)
    zeta = np.asarray(zeta)
    for name, arr in (("D", D), ("A", A), ("zeta", zeta)):
        if np.iscomplexobj(arr) and np.any(arr.imag):
            raise ValueError(f"{name} must be real for the LP oracle")
    D, A, zeta = D.real.astype(float), np.atleast_2d(A.real).astype(float), zeta.real.astype(float).ravel()
    J, n = D.shape
    m = A.shape[0]
    if A.shape[1] != n or zeta.shape[0] != m:
        raise DimensionMismatch("inconsistent oracle dimensions")
    eye = np.eye(J)
    top = np.hstack([D, -D, -eye, eye])
    bottom = np.hstack([A, -A, np.zeros((m, 2 * J))])
    c = np.concatenate([np.zeros(2 * n), np.ones(2 * J)])
    res = simplex(c, np.vstack([top, bottom]), np.concatenate([np.zeros(J), zeta]))
    g = res.x[:n] - res.x[n:2 * n]
    return LPResult(res.objective, g, res.iterations)
