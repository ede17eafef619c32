import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from anisocs.errors import Infeasible, Unbounded
from anisocs.solver import lp_oracle, simplex


def test_identity_oracle():
    g0 = np.array([1.5, -2.0, 0.0, 0.25])
    res = lp_oracle(np.eye(4), np.eye(4), g0)
    assert res.objective == pytest.approx(np.abs(g0).sum(), abs=1e-12)
    assert np.allclose(res.x, g0)


def test_single_constraint():
    res = lp_oracle(np.eye(2), np.array([[1.0, 1.0]]), np.array([2.0]))
    assert res.objective == pytest.approx(2.0, abs=1e-12)
    assert res.x.sum() == pytest.approx(2.0)


def test_infeasible_and_unbounded():
    with pytest.raises(Infeasible):
        simplex([1.0], [[1.0]], [-1.0])
    with pytest.raises(Infeasible):
        simplex([1.0, 1.0], [[1.0, 1.0], [1.0, 1.0]], [1.0, 2.0])
    with pytest.raises(Unbounded):
        simplex([-1.0, 0.0], [[1.0, -1.0]], [0.0])


def test_redundant_rows():
    res = simplex([1.0, 2.0], [[1.0, 1.0], [2.0, 2.0]], [1.0, 2.0])
    assert res.objective == pytest.approx(1.0)


def test_complex_input_rejected():
    with pytest.raises(ValueError):
        lp_oracle(np.eye(2), np.array([[1j, 0]]), np.array([1.0]))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_simplex_matches_linprog(seed):
    optimize = pytest.importorskip("scipy.optimize")
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(1, 5)), int(rng.integers(2, 8))
    A = rng.standard_normal((m, n))
    x0 = rng.random(n)
    b = A @ x0
    c = rng.random(n)
    ref = optimize.linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    res = simplex(c, A, b)
    assert res.objective == pytest.approx(ref.fun, abs=1e-8)
    assert np.allclose(A @ res.x, b, atol=1e-9) and np.all(res.x >= -1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_random_oracle_8x12(seed):
    optimize = pytest.importorskip("scipy.optimize")
    rng = np.random.default_rng(seed)
    D, A = rng.standard_normal((12, 12)), rng.standard_normal((8, 12))
    z = A @ rng.standard_normal(12)
    # independent formulation: min 1.t s.t. -t <= D g <= t, A g = z
    c = np.concatenate([np.zeros(12), np.ones(12)])
    ub = np.block([[D, -np.eye(12)], [-D, -np.eye(12)]])
    ref = optimize.linprog(c, A_ub=ub, b_ub=np.zeros(24), A_eq=np.hstack([A, np.zeros((8, 12))]), b_eq=z,
                           bounds=[(None, None)] * 12 + [(0, None)] * 12, method="highs")
    assert lp_oracle(D, A, z).objective == pytest.approx(ref.fun, abs=1e-7)
