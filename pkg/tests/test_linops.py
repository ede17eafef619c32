import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from anisocs.errors import DimensionMismatch, RankDeficient
from anisocs.linops import (DenseOperator, dual_frame, frame_bounds, make_bundle, pseudo_inverse_apply,
                            read_binary, read_csv, write_binary, write_csv)

from conftest import mercedes_benz, random_frame


def test_identity_bounds():
    assert frame_bounds(DenseOperator(np.eye(4))) == pytest.approx((1.0, 1.0), abs=1e-14)


def test_stacked_identity_parseval():
    op = DenseOperator(np.vstack([np.eye(3), np.eye(3)]) / np.sqrt(2))
    assert frame_bounds(op) == pytest.approx((1.0, 1.0), abs=1e-14)
    assert make_bundle(op).is_parseval


def test_mercedes_benz_bounds_against_eigensolver():
    u = mercedes_benz()
    oracle = np.linalg.eigvalsh(u.T @ u)
    a, b = frame_bounds(DenseOperator(u))
    assert (a, b) == pytest.approx((1.5, 1.5), abs=1e-12)
    assert (a, b) == pytest.approx(tuple(oracle), abs=1e-12)


def test_dual_of_unitary_is_itself():
    q, _ = np.linalg.qr(np.random.default_rng(0).standard_normal((5, 5)) + 0j)
    assert np.allclose(dual_frame(DenseOperator(q)).matrix, q, atol=1e-12)


def test_scalar_dual():
    assert dual_frame(DenseOperator([[2.0]])).matrix[0, 0] == pytest.approx(0.5)


def test_mercedes_benz_dual_scaling(mb_bundle):
    assert np.allclose(mb_bundle.dual, mercedes_benz() * 2 / 3, atol=1e-12)


def test_pinv_identity_and_parseval():
    y = np.arange(4.0) + 1j
    assert np.allclose(pseudo_inverse_apply(DenseOperator(np.eye(4)), y), y)
    p = np.vstack([np.eye(3), np.eye(3)]) / np.sqrt(2)
    y6 = np.random.default_rng(1).standard_normal(6)
    assert np.allclose(pseudo_inverse_apply(DenseOperator(p), y6), p.T @ y6, atol=1e-12)


def test_pinv_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        pseudo_inverse_apply(DenseOperator(np.eye(3)), np.ones(4))


def test_bundle_examples(mb_bundle):
    assert make_bundle(np.eye(8)).kappa == 1.0
    b = make_bundle(2 * np.eye(3))
    assert (b.lower_bound, b.upper_bound, b.kappa) == pytest.approx((4, 4, 4))
    assert mb_bundle.kappa == pytest.approx(1.5)


def test_rank_deficient():
    with pytest.raises(RankDeficient):
        frame_bounds(DenseOperator([[1.0, 0.0], [2.0, 0.0]]))
    with pytest.raises(RankDeficient):
        make_bundle(np.ones((3, 1)) @ np.ones((1, 2)))


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        DenseOperator([[np.nan]])


def test_operator_is_immutable():
    op = DenseOperator(np.eye(2))
    with pytest.raises(ValueError):
        op.matrix[0, 0] = 5


frames = st.tuples(st.integers(1, 12), st.integers(0, 8), st.integers(0, 2 ** 32 - 1))


@settings(max_examples=60, deadline=None)
@given(frames)
def test_frame_invariants(dims):
    n, extra, seed = dims
    rng = np.random.default_rng(seed)
    u = random_frame(rng, n + extra, n)
    b = make_bundle(u)
    g = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    # left inverse
    assert np.linalg.norm(b.pinv_apply(u @ g) - g) <= 1e-10 * np.linalg.norm(g) * b.kappa
    # dual-frame reconstruction: sum_l <g, psi_l> psi~_l = U~^H U g
    assert np.allclose(b.dual.conj().T @ (u @ g), g, atol=1e-9 * b.kappa)
    # norm bounds
    assert np.linalg.norm(u, 2) <= np.sqrt(b.kappa) * (1 + 1e-12)
    assert np.linalg.norm(b.dual, 2) <= np.sqrt(b.kappa) * (1 + 1e-12)
    # dual bounds are reversed reciprocals
    a2, b2 = frame_bounds(DenseOperator(b.dual))
    assert a2 == pytest.approx(1 / b.upper_bound, rel=1e-10)
    assert b2 == pytest.approx(1 / b.lower_bound, rel=1e-10)


def test_file_round_trips(tmp_path):
    rng = np.random.default_rng(3)
    op = DenseOperator(random_frame(rng, 5, 3))
    write_csv(op, tmp_path / "a.csv")
    write_binary(op, tmp_path / "a.bin")
    assert np.array_equal(read_csv(tmp_path / "a.csv").matrix, op.matrix)
    assert np.array_equal(read_binary(tmp_path / "a.bin").matrix, op.matrix)
    raw = (tmp_path / "a.bin").read_bytes()
    assert raw[:8] == b"ANISOCS1"
    assert int.from_bytes(raw[8:16], "little") == 5 and int.from_bytes(raw[16:24], "little") == 3
