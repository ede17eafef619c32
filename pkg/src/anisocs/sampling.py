"""Sampling schemes: uniform subsets, Bernoulli masks, variable density from
coherence weights, virtual frames, the log scheme, the weighted measurement
norm and the hypergeometric/multinomial replacement ratio.

Indices are 0-based.  Randomness comes from ``numpy.random.default_rng``
(PCG64) seeded explicitly; the seed is stored in every pattern.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import namedtuple
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (BadComposition, BadRange, BadTheta, DimensionMismatch, ZeroDivisor,
                     ZeroWeights)
from .linops import DenseOperator, FrameBundle

__all__ = [
    "SamplingPattern",
    "LogScheme",
    "repetition_counts",
    "uniform_subset",
    "bernoulli_mask",
    "variable_density",
    "virtual_frame",
    "log_scheme",
    "virtual_frame_frequencies",
    "weighted_norm",
    "replacement_ratio",
    "replacement_sweep",
]

SCHEMES = ("uniform", "bernoulli", "variable_density", "log_scheme")

LogScheme = namedtuple("LogScheme", "freqs multiplicities")

# N w^2 values this close to an integer are treated as that integer, so that
# weights such as 1/sqrt(l) do not pick up a spurious extra repetition from
# rounding (8 * (1/sqrt(8))**2 evaluates to 1.0000000000000002).
_SNAP = 1e-9


@dataclass(frozen=True)
class SamplingPattern:
    """Ordered multiset of measurement rows drawn from ``range(N)``."""

    indices: np.ndarray
    scheme: str
    N: int
    seed: int | None = None
    counts: np.ndarray | None = field(default=None, repr=False)
    probabilities: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64).ravel()
        idx.flags.writeable = False
        object.__setattr__(self, "indices", idx)
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if idx.size and (idx.min() < 0 or idx.max() >= self.N):
            raise BadRange(f"indices must lie in [0, {self.N})")
        if self.probabilities is not None:
            p = np.asarray(self.probabilities, dtype=float)
            if abs(p.sum() - 1) > 1e-12 or np.any(p < 0):
                raise ValueError("probabilities must be nonnegative and sum to 1")
            object.__setattr__(self, "probabilities", p)
        if self.counts is not None:
            object.__setattr__(self, "counts", np.asarray(self.counts, dtype=np.int64))

    @property
    def m(self):
        return len(self.indices)

    def __len__(self):
        return len(self.indices)

    def to_dict(self):
        return {
            "indices": self.indices.tolist(),
            "scheme": self.scheme,
            "N": self.N,
            "seed": self.seed,
            "counts": None if self.counts is None else self.counts.tolist(),
            "probabilities": None if self.probabilities is None else self.probabilities.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["indices"], d["scheme"], d["N"], d.get("seed"), d.get("counts"),
                   d.get("probabilities"))

    def to_json(self):
        return json.dumps(self.to_dict())


def repetition_counts(w, N: int | None = None) -> np.ndarray:
    """Integer counts ``ceil(N w_l^2)``; ``N`` defaults to ``len(w)``."""
    w = np.asarray(w, dtype=float)
    N = len(w) if N is None else N
    x = N * w * w
    near = np.rint(x)
    snapped = np.abs(x - near) <= _SNAP * np.maximum(1.0, near)
    return np.where(snapped, near, np.ceil(x)).astype(np.int64)


def uniform_subset(N: int, m: int, seed=0) -> SamplingPattern:
    """``m`` distinct rows chosen uniformly (partial Fisher-Yates), stored sorted."""
    if not 1 <= m <= N:
        raise BadRange(f"need 1 <= m <= N, got m={m}, N={N}")
    rng = np.random.default_rng(seed)
    perm = np.arange(N)
    for i in range(m):
        j = int(rng.integers(i, N))
        perm[i], perm[j] = perm[j], perm[i]
    return SamplingPattern(np.sort(perm[:m]), "uniform", N, seed)


def bernoulli_mask(N: int, theta: float, seed=0) -> SamplingPattern:
    """Each row kept independently with probability ``theta``."""
    if not 0 < theta <= 1:
        raise BadTheta(f"theta must lie in (0, 1], got {theta}")
    rng = np.random.default_rng(seed)
    keep = rng.random(N) < theta
    return SamplingPattern(np.flatnonzero(keep), "bernoulli", N, seed)


def _draw_categorical(counts, m, rng):
    cum = np.cumsum(counts)
    u = rng.random(m) * cum[-1]
    return np.searchsorted(cum, u, side="right")


def variable_density(w, m: int, seed=0, N: int | None = None) -> SamplingPattern:
    """``m`` i.i.d. draws with ``nu_l`` proportional to ``ceil(N w_l^2)``.

    Repetitions are kept and the draw order is preserved.
    """
    w = np.asarray(w, dtype=float)
    if np.any(w < 0) or not np.any(w > 0):
        raise ZeroWeights("weights must be nonnegative and not all zero")
    if m < 1:
        raise BadRange("m must be >= 1")
    counts = repetition_counts(w, N)
    rng = np.random.default_rng(seed)
    idx = _draw_categorical(counts, m, rng)
    return SamplingPattern(idx, "variable_density", len(w), seed, counts, counts / counts.sum())


def virtual_frame(Ub: FrameBundle, w, upsilon: int = 1, N: int | None = None):
    """Repeat row ``l`` of the frame ``r_l = upsilon * ceil(N w_l^2)`` times, scaled by ``1/sqrt(r_l)``.

    ``w`` has one entry per row; ``N`` (default ``len(w)``) enters only the
    ceiling.  The frame operator is unchanged, so the canonical dual of the
    result is the same construction applied to the dual frame and the bounds
    carry over.  Returns the new bundle and the map from virtual to original
    row indices; rows with ``r_l = 0`` are dropped.
    """
    w = np.asarray(w, dtype=float)
    if len(w) != Ub.n_rows:
        raise DimensionMismatch(f"need one weight per row ({Ub.n_rows}), got {len(w)}")
    if np.any(w < 0) or not np.any(w > 0):
        raise ZeroWeights("weights must be nonnegative and not all zero")
    if upsilon < 1:
        raise BadRange("upsilon must be >= 1")
    r = upsilon * repetition_counts(w, N)
    index_map = np.repeat(np.arange(len(r)), r)
    scale = 1.0 / np.sqrt(r[index_map])[:, None]
    op = DenseOperator(Ub.U[index_map] * scale)
    dual = DenseOperator(Ub.dual[index_map] * scale)
    return FrameBundle(op, dual, Ub.lower_bound, Ub.upper_bound, Ub.kappa), index_map


def log_scheme(N: int, C1: float, count: int, mirror: bool = False) -> LogScheme:
    """Frequencies ``ceil(exp(l / (C1^2 N)))`` for ``l = 1..count``, with multiplicities.

    With ``mirror`` the negated frequencies are added (same multiplicities)
    and the result is sorted ascending.
    """
    if C1 <= 0 or count < 1:
        raise BadRange("need C1 > 0 and count >= 1")
    l = np.arange(1, count + 1)
    k = np.ceil(np.exp(l / (C1 * C1 * N))).astype(np.int64)
    freqs, mult = np.unique(k, return_counts=True)
    if mirror:
        freqs = np.concatenate([-freqs[::-1], freqs])
        mult = np.concatenate([mult[::-1], mult])
    return LogScheme(freqs, mult)


def virtual_frame_frequencies(N: int, C1: float, count: int | None = None) -> np.ndarray:
    """Frequency sequence of the virtual Fourier frame with ``w_k = C1 / sqrt(k)``.

    Positive frequency ``k = 1..N`` is repeated ``ceil(C1^2 N / k)`` times;
    the first ``count`` virtual indices are returned.
    """
    k = np.arange(1, N + 1)
    reps = repetition_counts(C1 / np.sqrt(k), N)
    seq = np.repeat(k, reps)
    return seq if count is None else seq[:count]


def weighted_norm(residual, pattern: SamplingPattern, w, N: int | None = None) -> float:
    """``sqrt(sum_i |eta_i|^2 / ceil(N w_{l_i}^2))``."""
    eta = np.asarray(residual)
    if eta.shape != (pattern.m,):
        raise DimensionMismatch(f"residual has shape {eta.shape}, pattern has {pattern.m} entries")
    r = repetition_counts(w, N)[pattern.indices]
    if np.any(r == 0):
        raise ZeroDivisor("a sampled row has ceil(N w^2) = 0")
    return float(np.sqrt(np.sum(np.abs(eta) ** 2 / r)))


def _log_comb(n, k):
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def replacement_ratio(s_counts, m: int, upsilon: int, composition, exact: bool = False):
    """Hypergeometric over multinomial probability of the composition ``k``.

    The hypergeometric law draws ``m`` items without replacement from a
    population holding ``upsilon * s_l`` copies of each label ``l``; the
    multinomial law draws ``m`` labels with replacement with
    ``p_l = s_l / sum(s)``.  Population sizes up to 170 use exact integer
    arithmetic, larger ones log-gamma.  ``exact=True`` forces the integer
    path at any size and returns a :class:`fractions.Fraction`.
    """
    s = [int(v) for v in s_counts]
    k = [int(v) for v in composition]
    if len(s) != len(k) or any(v < 1 for v in s):
        raise BadComposition("need one positive s_l per composition entry")
    if sum(k) != m or any(v < 0 for v in k):
        raise BadComposition(f"composition {k} does not sum to m={m}")
    if any(kl > upsilon * sl for kl, sl in zip(k, s)):
        raise BadComposition("composition exceeds the available population")
    total = sum(s)
    if exact or upsilon * total <= 170:
        hyper = Fraction(math.prod(math.comb(upsilon * sl, kl) for sl, kl in zip(s, k)),
                         math.comb(upsilon * total, m))
        multi = Fraction(math.factorial(m) * math.prod(sl ** kl for sl, kl in zip(s, k)),
                         math.prod(math.factorial(kl) for kl in k) * total ** m)
        ratio = hyper / multi
        return ratio if exact else float(ratio)
    log_h = sum(_log_comb(upsilon * sl, kl) for sl, kl in zip(s, k)) - _log_comb(upsilon * total, m)
    log_m = (math.lgamma(m + 1) - sum(math.lgamma(kl + 1) for kl in k)
             + sum(kl * math.log(sl / total) for sl, kl in zip(s, k)))
    return math.exp(log_h - log_m)


def _compositions(m, n):
    for cut in itertools.combinations(range(m + n - 1), n - 1):
        prev, parts = -1, []
        for c in cut + (m + n - 1,):
            parts.append(c - prev - 1)
            prev = c
        yield tuple(parts)


def replacement_sweep(m_max: int = 4, N_max: int = 4, s_max: int = 3):
    """Exhaustive minimum of the replacement ratio with ``upsilon = 2 m^2``.

    Returns ``(min_ratio, argmin, n_cases)`` with ``min_ratio`` exact.
    """
    best, arg, n = None, None, 0
    for m in range(1, m_max + 1):
        ups = 2 * m * m
        for N in range(1, N_max + 1):
            for s in itertools.product(range(1, s_max + 1), repeat=N):
                for k in _compositions(m, N):
                    r = replacement_ratio(s, m, ups, k, exact=True)
                    n += 1
                    if best is None or r < best:
                        best, arg = r, {"m": m, "N": N, "s": list(s), "k": list(k)}
    return best, arg, n
