import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from anisocs.errors import Aliasing, BadGridSize, BadLambda, RankDeficient, TooFewPoints
from anisocs.linops import frame_bounds, make_bundle
from anisocs.sampling import log_scheme
from anisocs.transforms import (build_cgo_like, build_db, build_dft, build_haar, build_nonuniform_fourier,
                                build_ordering, daubechies_lowpass, density, density_and_separation,
                                make_sampling_set, separation)


def test_ordering_1d():
    assert build_ordering(1, 5).freqs.ravel().tolist() == [0, -1, 1, -2, 2]


def test_ordering_2d():
    assert build_ordering(2, 1).freqs.tolist() == [[0, 0]]
    assert build_ordering(2, 5).freqs.tolist() == [[0, 0], [-1, 0], [0, -1], [0, 1], [1, 0]]


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(1, 200))
def test_ordering_invariants(d, count):
    o = build_ordering(d, count)
    assert len({tuple(k) for k in o.freqs}) == count
    assert np.all(np.diff(o.norms()) >= 0)
    assert np.array_equal(o.freqs, build_ordering(d, count).freqs)


def test_dft_examples():
    f = build_dft(build_ordering(1, 8), 8)
    assert frame_bounds(f) == pytest.approx((1, 1), abs=1e-12)
    assert np.allclose(f.matrix[0], 1 / np.sqrt(8))
    o = build_ordering(1, 8).freqs.ravel().tolist()
    r1, r2 = f.matrix[o.index(1)], f.matrix[o.index(2)]
    assert abs(np.vdot(r1, r2)) < 1e-12


def test_dft_2d_constant_row():
    f = build_dft(build_ordering(2, 9), 4)
    assert np.allclose(f.matrix[0], 1 / 4)


def test_dft_aliasing():
    with pytest.raises(Aliasing):
        build_dft(build_ordering(1, 9), 8)


def test_haar_two_point():
    h = build_haar(2, 1).matrix
    s = 1 / np.sqrt(2)
    assert np.allclose(h, [[s, s], [s, -s]])


def test_haar_bad_grid():
    with pytest.raises(BadGridSize):
        build_haar(6, 1)
    with pytest.raises(BadGridSize):
        build_db(2, 12, 1)


def test_db2_filter():
    h = daubechies_lowpass(2)
    assert np.sum(h ** 2) == pytest.approx(1.0, abs=1e-12)
    assert np.sum(h) == pytest.approx(np.sqrt(2), abs=1e-12)
    assert np.allclose(h, [0.48296291314453, 0.83651630373781, 0.22414386804201, -0.12940952255126], atol=1e-12)


@pytest.mark.parametrize("build", [
    lambda: build_haar(64, 6),
    lambda: build_haar(8, 2, d=2),
    lambda: build_db(2, 64, 4),
    lambda: build_db(3, 64, 3),
    lambda: build_db(4, 64, 3),
])
def test_wavelets_orthonormal_and_round_trip(build):
    op = build()
    assert frame_bounds(op) == pytest.approx((1, 1), abs=1e-8)
    a = op.matrix
    rng = np.random.default_rng(11)
    g = rng.standard_normal((a.shape[1], 100))
    assert np.abs(a.conj().T @ (a @ g) - g).max() <= 1e-8


def test_haar_coarsest_first():
    a = build_haar(8, 3).matrix
    assert np.allclose(a[0], 1 / np.sqrt(8))
    # finest detail rows have support of length 2
    assert np.count_nonzero(np.abs(a[-1]) > 1e-12) == 2


def test_nonuniform_lattice_is_unitary():
    n = 16
    s = make_sampling_set(np.arange(-n // 2, n // 2), 0.5)
    op = build_nonuniform_fourier(s, n)
    assert np.allclose(op.matrix.conj().T @ op.matrix, np.eye(n), atol=1e-10)


def test_nonuniform_single_point_rank_one():
    op = build_nonuniform_fourier(make_sampling_set([0.3], 0.5), 8)
    with pytest.raises(RankDeficient):
        frame_bounds(op)


def test_nonuniform_log_points_regression():
    pts = log_scheme(16, 1.0, 64, mirror=True).freqs
    op = build_nonuniform_fourier(make_sampling_set(pts, 0.5), 16)
    # independent oracle: eigenvalues of the midpoint Gram matrix
    x = -0.5 + (np.arange(16) + 0.5) / 16
    g = np.exp(-2j * np.pi * np.outer(pts.astype(float), x)) / 4.0
    ev = np.linalg.eigvalsh(g.conj().T @ g)
    a, b = frame_bounds(op)
    assert 0 < a <= b
    assert (a, b) == pytest.approx((ev[0], ev[-1]), abs=1e-10)
    assert (a, b) == pytest.approx((3.0, 6.0), abs=1e-10)


def test_density_of_integers():
    delta, sep = density_and_separation(np.arange(-10, 11), 0.5, probe_window=(-5, 5))
    assert delta == pytest.approx(0.25, abs=1e-9)
    assert sep == 1.0


def test_separation_duplicates_and_single_point():
    assert separation([1.0, 1.0, 3.0]) == 0.0
    with pytest.raises(TooFewPoints):
        separation([1.0])
    assert density([0.0], 0.5, probe_window=(-2, 3)) == pytest.approx(1.5)


def test_cgo_limits_and_bounds():
    o = build_ordering(1, 64)
    f = build_dft(o, 64).matrix
    assert np.array_equal(build_cgo_like(o, 64, np.inf).matrix, f)
    for lam in (2.0, 10.0, 84 * 8):
        u = build_cgo_like(o, 64, lam, seed=3).matrix
        assert np.linalg.norm(u - f, 2) <= 1 / lam
        b = make_bundle(u)
        assert np.sqrt(b.upper_bound) <= 1.5 and 1 / np.sqrt(b.lower_bound) <= 2.0
    with pytest.raises(BadLambda):
        build_cgo_like(o, 64, 1.5)


def test_cgo_seeded():
    o = build_ordering(2, 9)
    assert np.array_equal(build_cgo_like(o, 4, 3.0, seed=1).matrix, build_cgo_like(o, 4, 3.0, seed=1).matrix)
