"""Concrete measurement and sparsifying systems, materialized as dense operators.

* ordered Fourier systems on the uniform grid of ``[0, 1]^d``,
* periodized orthonormal wavelets (Haar, separable in ``d`` dimensions, and
  Daubechies 2-4 in one dimension), rows ordered coarsest scale first,
* Fourier frames at arbitrary real frequencies on a symmetric box,
* a seeded perturbation of the Fourier system whose remainders have summable,
  decaying Fourier coefficients (a stand-in for CGO solutions).

Signals on a grid with ``n`` points per axis are flattened in C order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import Aliasing, BadGridSize, BadLambda, BadRange, TooFewPoints
from .linops import DenseOperator

__all__ = [
    "FrequencyOrdering",
    "NonuniformSamplingSet",
    "build_ordering",
    "build_dft",
    "build_dirac",
    "build_haar",
    "build_db",
    "daubechies_lowpass",
    "wavelet_analysis_matrix",
    "make_sampling_set",
    "build_nonuniform_fourier",
    "density",
    "separation",
    "density_and_separation",
    "build_cgo_like",
    "grid_points",
]

_NORMS = ("l2", "l1", "linf")


@dataclass(frozen=True)
class FrequencyOrdering:
    """First ``len(freqs)`` points of ``Z^d`` in nondecreasing norm order."""

    d: int
    freqs: np.ndarray = field(repr=False)
    norm_tag: str = "l2"

    def __post_init__(self):
        f = np.asarray(self.freqs, dtype=np.int64).reshape(-1, self.d)
        f.flags.writeable = False
        object.__setattr__(self, "freqs", f)
        if len({tuple(k) for k in f.tolist()}) != len(f):
            raise ValueError("frequency ordering must be injective")
        norms = _int_norm(f, self.norm_tag)
        if np.any(np.diff(norms) < 0):
            raise ValueError("frequencies are not in nondecreasing norm order")

    def __len__(self):
        return len(self.freqs)

    def norms(self) -> np.ndarray:
        """Norms of the frequencies in the ordering's own norm."""
        n = _int_norm(self.freqs, self.norm_tag).astype(float)
        return np.sqrt(n) if self.norm_tag == "l2" else n


def _int_norm(f, tag):
    f = np.asarray(f, dtype=np.int64)
    if tag == "l2":
        return np.sum(f * f, axis=-1)
    if tag == "l1":
        return np.sum(np.abs(f), axis=-1)
    if tag == "linf":
        return np.max(np.abs(f), axis=-1)
    raise ValueError(f"unknown norm tag {tag!r}; expected one of {_NORMS}")


def build_ordering(d: int, count: int, norm_tag: str = "l2") -> FrequencyOrdering:
    """Deterministic nondecreasing ordering of ``Z^d`` truncated to ``count``.

    Ties in the norm are broken lexicographically on ``(k_1, ..., k_d)``, so
    in one dimension the ordering starts ``0, -1, 1, -2, 2, ...``.
    """
    if d < 1 or count < 1:
        raise BadRange("need d >= 1 and count >= 1")
    _int_norm(np.zeros((1, d)), norm_tag)
    r = 0
    while True:
        axis = np.arange(-r, r + 1)
        box = np.array(list(itertools.product(axis, repeat=d)), dtype=np.int64)
        norms = _int_norm(box, norm_tag)
        # Every norm ball of radius r lies inside the box [-r, r]^d, so all
        # points with norm <= r are present and correctly ranked.
        limit = r * r if norm_tag == "l2" else r
        if np.count_nonzero(norms <= limit) >= count:
            keys = [box[:, i] for i in reversed(range(d))] + [norms]
            order = np.lexsort(keys)
            return FrequencyOrdering(d, box[order[:count]], norm_tag)
        r = max(1, 2 * r)


def grid_points(grid_n: int, d: int, lo=0.0, hi=1.0, midpoint=False) -> np.ndarray:
    """Points of the uniform tensor grid, shape ``(grid_n**d, d)``, C order."""
    h = (hi - lo) / grid_n
    axis = lo + h * (np.arange(grid_n) + (0.5 if midpoint else 0.0))
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def _check_alias(freqs, grid_n):
    lo, hi = -(grid_n // 2), (grid_n + 1) // 2 - 1
    bad = (freqs < lo) | (freqs > hi)
    if np.any(bad):
        k = freqs[np.argmax(bad.any(axis=1))]
        raise Aliasing(f"frequency {tuple(int(v) for v in k)} outside [{lo}, {hi}] for grid_n={grid_n}")


def build_dft(ordering: FrequencyOrdering, grid_n: int) -> DenseOperator:
    """Rows ``exp(-2 pi i k_l . x) / grid_n^(d/2)`` sampled on the grid of ``[0,1]^d``.

    Frequencies must lie in the alias-free range ``[-floor(n/2), ceil(n/2) - 1]``
    on every axis, otherwise :class:`Aliasing` is raised.
    """
    d = ordering.d
    if grid_n ** d < len(ordering):
        raise Aliasing(f"{len(ordering)} frequencies do not fit on a grid with {grid_n ** d} points")
    _check_alias(ordering.freqs, grid_n)
    x = grid_points(grid_n, d)
    phase = ordering.freqs @ x.T
    return DenseOperator(np.exp(-2j * np.pi * phase) / grid_n ** (d / 2))


def build_dirac(n: int) -> DenseOperator:
    return DenseOperator(np.eye(n))


# -- wavelets ---------------------------------------------------------------

def daubechies_lowpass(p: int) -> np.ndarray:
    """Orthonormal Daubechies scaling filter with ``p`` vanishing moments.

    Obtained by spectral factorization, keeping the roots inside the unit
    circle.  ``p = 1`` is the Haar filter.
    """
    if p < 1:
        raise BadRange("order must be >= 1")
    if p == 1:
        return np.array([1.0, 1.0]) / math.sqrt(2.0)
    c = [math.comb(p - 1 + k, k) for k in range(p)]
    zs = []
    for y in np.roots(c[::-1]):
        a = 2.0 - 4.0 * y
        disc = np.sqrt(a * a - 4.0 + 0j)
        z1, z2 = (a + disc) / 2, (a - disc) / 2
        zs.append(z1 if abs(z1) < 1 else z2)
    q = np.real(np.poly(zs))
    binom = np.array([math.comb(p, k) for k in range(p + 1)], dtype=float)
    h = np.convolve(q, binom)
    return h * math.sqrt(2.0) / h.sum()


def _periodized_filter_matrix(taps, n):
    """Rows ``k`` hold ``taps`` starting at column ``2k`` with wrap-around."""
    m = np.zeros((n // 2, n))
    for k in range(n // 2):
        for i, t in enumerate(taps):
            m[k, (2 * k + i) % n] += t
    return m


def wavelet_analysis_matrix(lowpass, grid_n: int, levels: int, d: int = 1) -> np.ndarray:
    """Real orthogonal matrix of the periodized separable wavelet transform.

    Rows are ordered: coarsest approximation, then detail subbands from the
    coarsest to the finest level.  Within a level the ``2^d - 1`` subbands are
    in lexicographic order of their (low/high per axis) tags, and within a
    subband coefficients follow grid position in C order.
    """
    if grid_n < 2 or grid_n & (grid_n - 1):
        raise BadGridSize(f"grid_n={grid_n} is not a power of two >= 2")
    if levels < 1 or 2 ** levels > grid_n:
        raise BadRange(f"levels={levels} must lie in [1, log2(grid_n)]")
    lo = np.asarray(lowpass, dtype=float)
    hi = np.array([(-1) ** i * lo[len(lo) - 1 - i] for i in range(len(lo))])
    approx = np.eye(grid_n ** d)
    details = []
    n = grid_n
    for _ in range(levels):
        filt = (_periodized_filter_matrix(lo, n), _periodized_filter_matrix(hi, n))
        bands = {}
        for tag in itertools.product((0, 1), repeat=d):
            k = filt[tag[0]]
            for t in tag[1:]:
                k = np.kron(k, filt[t])
            bands[tag] = k @ approx
        approx = bands.pop((0,) * d)
        details.append([bands[t] for t in sorted(bands)])
        n //= 2
    blocks = [approx]
    for level in reversed(details):
        blocks.extend(level)
    return np.vstack(blocks)


def build_haar(grid_n: int, levels: int, d: int = 1) -> DenseOperator:
    """Orthonormal separable Haar analysis operator, coarsest scale first."""
    return DenseOperator(wavelet_analysis_matrix(daubechies_lowpass(1), grid_n, levels, d))


def build_db(order_p: int, grid_n: int, levels: int) -> DenseOperator:
    """Periodized one-dimensional Daubechies-``order_p`` analysis operator."""
    if order_p not in (2, 3, 4):
        raise BadRange("order_p must be 2, 3 or 4")
    return DenseOperator(wavelet_analysis_matrix(daubechies_lowpass(order_p), grid_n, levels, 1))


# -- nonuniform Fourier frames ------------------------------------------------

@dataclass(frozen=True)
class NonuniformSamplingSet:
    """Real frequencies on the box ``E = prod_i [-a_i, a_i]``.

    ``density`` and ``separation`` are computed by :func:`make_sampling_set`;
    ``separation`` is ``None`` for a single point.
    """

    points: np.ndarray = field(repr=False)
    half_widths: np.ndarray
    density: float
    separation: float | None

    @property
    def d(self):
        return self.points.shape[1]


def _as_points(points):
    p = np.asarray(points, dtype=float)
    if p.ndim == 1:
        p = p[:, None]
    if p.shape[0] == 0:
        raise TooFewPoints("no sampling points given")
    return p


def _half_widths(half_widths, d):
    a = np.broadcast_to(np.asarray(half_widths, dtype=float), (d,)).copy()
    if np.any(a <= 0):
        raise ValueError("box half-widths must be positive")
    return a


def density(points, half_widths, probe_window=None, probe_n: int | None = None) -> float:
    """Sup over a probe grid of the ``|.|_{E°}`` distance to the nearest point.

    For the box ``E = prod [-a_i, a_i]`` the polar gauge is
    ``|y|_{E°} = sum_i a_i |y_i|``.  The probe window defaults to the bounding
    box of the points; pass ``probe_window=(lo, hi)`` (scalars or length-d) to
    override it.
    """
    p = _as_points(points)
    d = p.shape[1]
    a = _half_widths(half_widths, d)
    if probe_window is None:
        lo, hi = p.min(axis=0), p.max(axis=0)
    else:
        lo = np.broadcast_to(np.asarray(probe_window[0], dtype=float), (d,))
        hi = np.broadcast_to(np.asarray(probe_window[1], dtype=float), (d,))
    if probe_n is None:
        probe_n = {1: 4001, 2: 201}.get(d, 41)
    axes = [np.linspace(lo[i], hi[i], probe_n) for i in range(d)]
    probes = np.stack([m.ravel() for m in np.meshgrid(*axes, indexing="ij")], axis=-1)
    best = 0.0
    for start in range(0, len(probes), 4096):
        chunk = probes[start:start + 4096]
        dist = np.abs(chunk[:, None, :] - p[None, :, :]) @ a
        best = max(best, float(dist.min(axis=1).max()))
    return best


def separation(points) -> float:
    """Minimum pairwise Euclidean distance between the points."""
    p = _as_points(points)
    if len(p) < 2:
        raise TooFewPoints("separation needs at least two points")
    best = np.inf
    for i in range(len(p) - 1):
        best = min(best, float(np.min(np.linalg.norm(p[i + 1:] - p[i], axis=1))))
    return best


def density_and_separation(points, half_widths, probe_window=None, probe_n=None):
    p = _as_points(points)
    if len(p) < 2:
        raise TooFewPoints("need at least two points")
    return density(p, half_widths, probe_window, probe_n), separation(p)


def make_sampling_set(points, half_widths=0.5, probe_window=None, probe_n=None) -> NonuniformSamplingSet:
    p = _as_points(points)
    a = _half_widths(half_widths, p.shape[1])
    p.flags.writeable = False
    sep = separation(p) if len(p) > 1 else None
    return NonuniformSamplingSet(p, a, density(p, a, probe_window, probe_n), sep)


def build_nonuniform_fourier(points: NonuniformSamplingSet, grid_n: int) -> DenseOperator:
    """Fourier frame rows ``exp(-2 pi i k . x) * sqrt(h^d)`` on the midpoint grid of E.

    A function on E is represented by its midpoint samples scaled by
    ``sqrt(h^d)`` (cell volume), which turns the midpoint quadrature of the
    L2 inner product into the Euclidean one.
    """
    if not isinstance(points, NonuniformSamplingSet):
        points = make_sampling_set(points)
    a = points.half_widths
    d = points.d
    mesh = np.meshgrid(*[(-a[i] + (2 * a[i] / grid_n) * (np.arange(grid_n) + 0.5)) for i in range(d)],
                       indexing="ij")
    x = np.stack([m.ravel() for m in mesh], axis=-1)
    cell = float(np.prod(2 * a / grid_n))
    return DenseOperator(np.exp(-2j * np.pi * (points.points @ x.T)) * math.sqrt(cell))


# -- CGO-like perturbed Fourier frame -----------------------------------------

def build_cgo_like(ordering: FrequencyOrdering, grid_n: int, lam: float, decay_b: float = 1.0,
                   seed=0, n_terms: int = 8) -> DenseOperator:
    """Fourier system with multiplicative remainders, ``psi_l = e_{k_l} (1 + rho_l)``.

    Each ``rho_l`` is a seeded random trigonometric polynomial on the first
    ``n_terms`` frequencies of the ordering, with coefficients decaying like
    ``1 / (1 + |h|^b)`` and rescaled so that
    ``||F rho_l||_1 = 1 / (2 lam (|k_l|^b + 1) c0)``, where
    ``c0 = (sum_k (|k|^b + 1)^-2)^(1/2)`` runs over the ordering.  Summing the
    row errors gives ``||U - F|| <= ||U - F||_Frobenius <= 1 / (2 lam)``.
    ``lam = inf`` returns the plain Fourier operator.
    """
    if not lam >= 2:
        raise BadLambda(f"lambda must be >= 2, got {lam}")
    f = build_dft(ordering, grid_n)
    if math.isinf(lam):
        return f
    d = ordering.d
    k_norm = np.linalg.norm(ordering.freqs.astype(float), axis=1)
    decay = k_norm ** decay_b + 1.0
    c0 = math.sqrt(float(np.sum(decay ** -2.0)))
    n_terms = min(n_terms, len(ordering))
    h = ordering.freqs[:n_terms]
    _check_alias(h, grid_n)
    x = grid_points(grid_n, d)
    basis = np.exp(2j * np.pi * (h @ x.T))
    rng = np.random.default_rng(seed)
    coef = rng.standard_normal((len(ordering), n_terms)) + 1j * rng.standard_normal((len(ordering), n_terms))
    coef /= decay[:n_terms][None, :]
    target = 1.0 / (2.0 * lam * decay * c0)
    coef *= (target / np.sum(np.abs(coef), axis=1))[:, None]
    rho = coef @ basis
    # f rows are conj(e_k)/sqrt(n^d); conj(psi_l) = conj(e_k) * conj(1 + rho_l)
    return DenseOperator(f.matrix * np.conj(1.0 + rho))
