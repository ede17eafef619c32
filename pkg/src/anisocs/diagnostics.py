"""Frame-pair diagnostics: coherence, weights, compressibility, localization,
B-factor, balancing residuals, the truncation index M~(alpha) and the
measurement budget.

All index sets are 0-based.  ``delta`` is a subset of ``range(M)`` and the
first ``N`` measurement rows are ``range(N)``.  Frame vectors are recovered
from analysis matrices as ``psi_l = conj(U[l])`` and ``phi_j = conj(D[j])``,
so ``<phi_j, psi_l> = (U D^H)[l, j]``.
"""

from __future__ import annotations

import itertools
import math
from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np

from .errors import BadAlpha, BadRange, DimensionMismatch, IndexOutOfRange, ZeroSubspace
from .linops import RANK_TOL, FrameBundle

__all__ = [
    "CoherenceReport",
    "WeightReport",
    "DeltaSubspace",
    "DeltaMax",
    "BalancingResult",
    "TildeM",
    "mutual_coherence",
    "coherence_weights",
    "best_s_term_error",
    "make_delta_subspace",
    "subspace_basis",
    "b_factor",
    "localization_factor",
    "balancing_residuals",
    "tilde_m",
    "measurement_budget",
    "fit_power_law",
]

FAMILIES = ("phi_psi", "phitilde_psi", "phi_psitilde", "phitilde_psitilde")

WeightReport = namedtuple("WeightReport", "weights norm normalization")
DeltaMax = namedtuple("DeltaMax", "value is_lower_bound delta n_evaluated")
BalancingResult = namedtuple("BalancingResult", "r1 r2 thresholds satisfied is_lower_bound")
TildeM = namedtuple("TildeM", "value not_settled q")


@dataclass(frozen=True)
class CoherenceReport:
    """Mutual coherence with its per-row maxima and per-family suprema."""

    mu: float
    per_pair_max: np.ndarray = field(repr=False)
    family_breakdown: dict = field(default_factory=dict)

    def to_dict(self):
        return {"mu": self.mu, "per_pair_max": self.per_pair_max.tolist(),
                "family_breakdown": dict(self.family_breakdown)}


@dataclass(frozen=True)
class DeltaSubspace:
    """Orthonormal basis of ``W = R(D^* P_delta) + R(D^{-1} P_delta)``."""

    delta: tuple
    basis: np.ndarray = field(repr=False)

    @property
    def dim(self):
        return self.basis.shape[1]

    def project(self, g):
        return self.basis @ (self.basis.conj().T @ g)

    def project_perp(self, g):
        return g - self.project(g)


def _check_pair(Ub: FrameBundle, Db: FrameBundle):
    if Ub.n_cols != Db.n_cols:
        raise DimensionMismatch(f"ambient dimensions differ: {Ub.n_cols} vs {Db.n_cols}")


def mutual_coherence(Ub: FrameBundle, Db: FrameBundle) -> CoherenceReport:
    """Largest inner product between the two frames over all four
    primal/dual pairings, by exhaustive enumeration."""
    _check_pair(Ub, Db)
    tables = {
        "phi_psi": np.abs(Ub.U @ Db.U.conj().T),
        "phitilde_psi": np.abs(Ub.U @ Db.dual.conj().T),
        "phi_psitilde": np.abs(Ub.dual @ Db.U.conj().T),
        "phitilde_psitilde": np.abs(Ub.dual @ Db.dual.conj().T),
    }
    per_row = np.max([t.max(axis=1) for t in tables.values()], axis=0)
    breakdown = {k: float(t.max()) for k, t in tables.items()}
    return CoherenceReport(float(per_row.max()), per_row, breakdown)


def coherence_weights(Ub: FrameBundle, Db: FrameBundle, N: int) -> WeightReport:
    """Tightest admissible coherence weights ``w_l`` for ``l < N``.

    Returns the weights, their Euclidean norm and ``max(norm, 1)``.
    """
    if not 1 <= N <= Ub.n_rows:
        raise DimensionMismatch(f"N={N} must lie in [1, {Ub.n_rows}]")
    w = mutual_coherence(Ub, Db).per_pair_max[:N].copy()
    norm = float(np.linalg.norm(w))
    return WeightReport(w, norm, max(norm, 1.0))


def best_s_term_error(x, s: int, M: int) -> float:
    """l1 distance from ``x`` to the best s-sparse vector supported in ``range(M)``."""
    x = np.asarray(x)
    if not 1 <= s <= M <= len(x):
        raise BadRange(f"need 1 <= s <= M <= len(x), got s={s}, M={M}, len={len(x)}")
    mag = np.abs(x)
    keep = np.argsort(-mag[:M], kind="stable")[:s]
    return float(mag.sum() - mag[keep].sum())


def subspace_basis(generators: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the column span (possibly with zero columns)."""
    n = generators.shape[0]
    if generators.size == 0:
        return np.zeros((n, 0), dtype=complex)
    w, sv, _ = np.linalg.svd(generators, full_matrices=False)
    if sv[0] <= 1e-14 * max(1.0, math.sqrt(n)):
        return np.zeros((n, 0), dtype=complex)
    rank = int(np.count_nonzero(sv > RANK_TOL * sv[0]))
    return w[:, :rank]


def _generators(Db, delta):
    idx = list(delta)
    return np.hstack([Db.U[idx].conj().T, Db.dual[idx].conj().T])


def _check_delta(delta, limit):
    delta = tuple(sorted({int(j) for j in delta}))
    if not delta:
        raise IndexOutOfRange("delta must be nonempty")
    if delta[0] < 0 or delta[-1] >= limit:
        raise IndexOutOfRange(f"delta indices must lie in [0, {limit})")
    return delta


def make_delta_subspace(Db: FrameBundle, delta) -> DeltaSubspace:
    """Orthonormal basis of the span of ``phi_j`` and ``phi~_j`` for ``j`` in ``delta``."""
    delta = _check_delta(delta, Db.n_rows)
    q = subspace_basis(_generators(Db, delta))
    if q.shape[1] == 0:
        raise ZeroSubspace(f"W is trivial for delta={delta}")
    return DeltaSubspace(delta, q)


# -- maxima over support sets -------------------------------------------------

def _subset_count(M, sizes):
    return sum(math.comb(M, k) for k in sizes)


def _maximize_over_deltas(score, M, sizes, cap=5000, seed=0, n_samples=None):
    """Maximize ``score(delta)`` over subsets of ``range(M)`` with sizes in ``sizes``.

    Exhaustive when the number of subsets is at most ``cap``; otherwise
    random sampling followed by single-swap greedy ascent from the best
    sample, in which case the value is only a lower bound.
    Ties keep the first subset in enumeration order.
    """
    sizes = [k for k in sizes if 1 <= k <= M]
    if not sizes:
        raise BadRange("no admissible support size")
    if _subset_count(M, sizes) <= cap:
        best, arg, count = -np.inf, None, 0
        for k in sizes:
            for delta in itertools.combinations(range(M), k):
                v = score(delta)
                count += 1
                if v > best:
                    best, arg = v, delta
        return DeltaMax(float(best), False, arg, count)

    rng = np.random.default_rng(seed)
    n_samples = n_samples or max(1, cap // 2)
    best, arg = -np.inf, None
    cache = {}

    def ev(delta):
        if delta not in cache:
            cache[delta] = score(delta)
        return cache[delta]

    for _ in range(n_samples):
        k = int(rng.choice(sizes))
        delta = tuple(sorted(rng.choice(M, size=k, replace=False).tolist()))
        v = ev(delta)
        if v > best:
            best, arg = v, delta
    improved = True
    while improved and len(cache) < 4 * cap:
        improved = False
        inside = set(arg)
        for j_out in arg:
            for j_in in range(M):
                if j_in in inside:
                    continue
                cand = tuple(sorted(inside - {j_out} | {j_in}))
                v = ev(cand)
                if v > best:
                    best, arg, improved = v, cand, True
                    break
            if improved:
                break
    return DeltaMax(float(best), True, arg, len(cache))


def _max_abs_row_sum(a, b, row_mask=None, chunk=512):
    """Largest absolute row sum of ``a @ b`` without holding it all at once."""
    if a.shape[1] == 1:
        # rank one: |a_i b_j| factorizes exactly
        sums = np.abs(a[:, 0]) * np.abs(b[0]).sum()
        return float(sums.max() if row_mask is None else sums[row_mask].max(initial=0.0))
    best = 0.0
    for start in range(0, a.shape[0], chunk):
        rows = np.abs(a[start:start + chunk] @ b).sum(axis=1)
        if row_mask is not None:
            rows = rows[row_mask[start:start + chunk]]
        if rows.size:
            best = max(best, float(rows.max()))
    return best


def b_factor(Db: FrameBundle, s: int, M: int, cap: int = 5000, seed=0) -> DeltaMax:
    """``B_{s,M}``: max over ``3 <= |delta| <= s`` of ``max(||D^{-*} P_W^perp D^*||_{inf->inf}, 1)``.

    The infinity operator norm is the largest absolute row sum of the
    materialized matrix.
    """
    if not 3 <= s <= M <= Db.n_rows:
        raise BadRange(f"need 3 <= s <= M <= {Db.n_rows}, got s={s}, M={M}")
    if Db.is_unitary:
        return DeltaMax(1.0, False, tuple(range(3)), 0)
    dd, dh = Db.dual, Db.U.conj().T

    def score(delta):
        q = subspace_basis(_generators(Db, delta))
        left = dd - (dd @ q) @ q.conj().T
        return max(_max_abs_row_sum(left, dh), 1.0)

    return _maximize_over_deltas(score, M, range(3, s + 1), cap, seed)


def _l1_sphere_max(b, starts, rng, iters=200):
    """Estimate ``max ||b z||_1`` over unit ``z`` by multi-start sign ascent."""
    r = b.shape[1]
    if r == 0:
        return 0.0
    best = 0.0
    z0 = rng.standard_normal((r, starts)) + 1j * rng.standard_normal((r, starts))
    z0[:, 0] = np.linalg.svd(b, full_matrices=False)[2][0].conj()
    for c in range(starts):
        z = z0[:, c] / np.linalg.norm(z0[:, c])
        val = np.abs(b @ z).sum()
        for _ in range(iters):
            y = b @ z
            sgn = np.where(np.abs(y) > 0, y / np.where(np.abs(y) > 0, np.abs(y), 1), 0)
            g = b.conj().T @ sgn
            ng = np.linalg.norm(g)
            if ng == 0:
                break
            z_new = g / ng
            new = np.abs(b @ z_new).sum()
            if new <= val * (1 + 1e-13):
                val = max(val, new)
                break
            z, val = z_new, new
        best = max(best, float(val))
    return best


def localization_factor(Db: FrameBundle, s: int, M: int, effort: int = 64, seed=0,
                        cap: int = 5000) -> DeltaMax:
    """Lower-bound estimate of the localization factor ``eta_{s,M}``.

    For each support set and for ``D_0 = D``, ``D_1 = D^{-*}`` the inner
    supremum of ``||D_i y||_1 / sqrt(|delta|)`` over unit ``y`` in
    ``R(D_i^* P_delta)`` is estimated with ``effort`` seeded starts of a
    sign fixed-point ascent (each step cannot decrease the objective).
    Exactly 1 for unitary ``D``.
    """
    if not 3 <= s <= M <= Db.n_rows:
        raise BadRange(f"need 3 <= s <= M <= {Db.n_rows}, got s={s}, M={M}")
    if Db.is_unitary:
        return DeltaMax(1.0, False, tuple(range(3)), 0)
    mats = (Db.U, Db.dual)

    def score(delta):
        rng = np.random.default_rng([seed, *delta])
        best = 1.0
        for d in mats:
            v = subspace_basis(d[list(delta)].conj().T)
            best = max(best, _l1_sphere_max(d @ v, effort, rng) / math.sqrt(len(delta)))
        return best

    res = _maximize_over_deltas(score, M, range(3, s + 1), cap, seed)
    return res._replace(is_lower_bound=True)


def balancing_residuals(Ub: FrameBundle, Db: FrameBundle, N: int, M: int, s: int,
                        cap: int = 5000, seed=0) -> BalancingResult:
    """Left-hand sides of the two balancing inequalities, maximized over ``|delta| = s``.

    ``r1 = ||P_W U^* P_N^perp U^{-*} P_W||`` and
    ``r2 = ||P_delta^perp D^{-*} P_W^perp U^* P_N U^{-*} P_W||_{H -> l_inf}``,
    the latter being the largest Euclidean norm of a row functional.
    """
    _check_pair(Ub, Db)
    if not 1 <= s <= M <= Db.n_rows:
        raise BadRange(f"need 1 <= s <= M <= {Db.n_rows}, got s={s}, M={M}")
    if not 1 <= N <= Ub.n_rows:
        raise BadRange(f"N={N} must lie in [1, {Ub.n_rows}]")
    k1, k2 = Ub.kappa, Db.kappa
    t1 = 1.0 / (8.0 * math.sqrt(math.sqrt(k2) * math.log(s * k1 ** 2 * k2)))
    t2 = 1.0 / (14.0 * math.sqrt(s * k2))
    uh = Ub.U.conj().T
    tail = uh[:, N:] @ Ub.dual[N:]
    head = uh[:, :N] @ Ub.dual[:N]
    dd = Db.dual
    found = {}

    def score(delta):
        q = subspace_basis(_generators(Db, delta))
        if q.shape[1] == 0:
            found[delta] = (0.0, 0.0)
            return 0.0
        qh = q.conj().T
        r1 = float(np.linalg.norm(qh @ tail @ q, 2)) if N < Ub.n_rows else 0.0
        hq = head @ q
        rows = dd @ hq - (dd @ q) @ (qh @ hq)
        mask = np.ones(dd.shape[0], dtype=bool)
        mask[list(delta)] = False
        r2 = float(np.linalg.norm(rows[mask], axis=1).max(initial=0.0))
        found[delta] = (r1, r2)
        return max(r1 / t1, r2 / t2)

    res = _maximize_over_deltas(score, M, [s], cap, seed)
    r1 = max(v[0] for v in found.values())
    r2 = max(v[1] for v in found.values())
    return BalancingResult(r1, r2, (t1, t2), bool(r1 <= t1 and r2 <= t2), res.is_lower_bound)


def tilde_m(Ub: FrameBundle, Db: FrameBundle, alpha: float, N: int, M: int,
            J_max: int | None = None) -> TildeM:
    """Smallest ``M~ >= M`` with ``q_j < alpha`` for every ``M~ < j <= J_max`` (1-based j).

    ``q_j = sqrt(k1) ||P_N U phi~_j|| + k1 ||P_W~ phi~_j||`` with ``W~`` built
    from the first ``M`` generators.  ``value`` is a count, so the settled
    columns are ``range(value, J_max)`` in 0-based terms.  ``not_settled`` is
    set when the condition already fails at ``j = J_max`` (and ``J_max > M``).
    """
    _check_pair(Ub, Db)
    if not 0 < alpha <= 1:
        raise BadAlpha(f"alpha must lie in (0, 1], got {alpha}")
    J_max = Db.n_rows if J_max is None else J_max
    if not 1 <= M <= J_max <= Db.n_rows:
        raise BadRange(f"need 1 <= M <= J_max <= {Db.n_rows}")
    k1 = Ub.kappa
    phit = Db.dual[:J_max].conj().T
    q_basis = subspace_basis(_generators(Db, range(M)))
    a = np.linalg.norm(Ub.U[:N] @ phit, axis=0)
    b = np.linalg.norm(q_basis.conj().T @ phit, axis=0)
    q = math.sqrt(k1) * a + k1 * b
    bad = np.nonzero(q[M:] >= alpha)[0]
    value = M if bad.size == 0 else M + int(bad[-1]) + 1
    return TildeM(value, bool(J_max > M and value == J_max), q)


def measurement_budget(kappa1, kappa2, B, eta, omega, N, s, M_tilde, mu=None, w_norm=None,
                       C: float = 1.0) -> float:
    """Right-hand side of the sufficient measurement bound.

    Pass ``mu`` for the uniform-sampling form
    ``C k1 k2 B^2 eta^2 omega^2 mu^2 N s log(k1 k2 M~)``, or ``w_norm`` for the
    weighted form where ``mu^2 N`` becomes ``||w||^2``.  ``C`` is a
    placeholder (the universal constant is not known); default 1.
    """
    if (mu is None) == (w_norm is None):
        raise ValueError("give exactly one of mu and w_norm")
    spread = mu ** 2 * N if mu is not None else w_norm ** 2
    return float(C * kappa1 * kappa2 * B ** 2 * eta ** 2 * omega ** 2 * spread * s
                 * math.log(kappa1 * kappa2 * M_tilde))


def fit_power_law(values, start: int = 1):
    """Least-squares fit ``log v_l = log c + slope log l`` for ``l = start, start+1, ...``.

    Returns ``(slope, c, residual_rms)``; entries with ``v_l <= 0`` are skipped.
    """
    v = np.asarray(values, dtype=float)
    l = np.arange(start, start + len(v), dtype=float)
    keep = v > 0
    x, y = np.log(l[keep]), np.log(v[keep])
    if len(x) < 2:
        return 0.0, float(v[keep][0]) if keep.any() else 0.0, 0.0
    a = np.vstack([x, np.ones_like(x)]).T
    (slope, icpt), *_ = np.linalg.lstsq(a, y, rcond=None)
    resid = y - a @ np.array([slope, icpt])
    return float(slope), float(math.exp(icpt)), float(np.sqrt(np.mean(resid ** 2)))
