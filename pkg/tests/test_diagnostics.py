import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from anisocs.diagnostics import (b_factor, balancing_residuals, best_s_term_error, coherence_weights,
                                 fit_power_law, localization_factor, make_delta_subspace, measurement_budget,
                                 mutual_coherence, tilde_m)
from anisocs.errors import BadAlpha, BadRange, DimensionMismatch, IndexOutOfRange, ZeroSubspace
from anisocs.linops import make_bundle
from anisocs.transforms import build_dft, build_haar, build_ordering

from conftest import mercedes_benz, random_frame


@pytest.fixture(scope="module")
def dft_haar64():
    return make_bundle(build_dft(build_ordering(1, 64), 64)), make_bundle(build_haar(64, 6))


def brute_coherence(U, D):
    """Independent four-family enumeration from explicit frame vectors."""
    psi = [U.U[l].conj() for l in range(U.n_rows)]
    psit = [U.dual[l].conj() for l in range(U.n_rows)]
    phi = [D.U[j].conj() for j in range(D.n_rows)]
    phit = [D.dual[j].conj() for j in range(D.n_rows)]
    best = 0.0
    for l in range(U.n_rows):
        for j in range(D.n_rows):
            for a, b in ((phi[j], psi[l]), (phit[j], psi[l]), (phi[j], psit[l]), (phit[j], psit[l])):
                best = max(best, abs(np.vdot(b, a)))
    return best


def test_identity_coherence():
    i4 = make_bundle(np.eye(4))
    assert mutual_coherence(i4, i4).mu == 1.0
    assert np.all(coherence_weights(i4, i4, 4).weights == 1.0)


@pytest.mark.parametrize("n", [8, 16, 64])
def test_dft_dirac_coherence(n):
    f = make_bundle(build_dft(build_ordering(1, n), n))
    rep = mutual_coherence(f, make_bundle(np.eye(n)))
    assert rep.mu == pytest.approx(1 / math.sqrt(n), abs=1e-12)
    assert np.allclose(coherence_weights(f, make_bundle(np.eye(n)), n).weights, 1 / math.sqrt(n), atol=1e-12)


def test_mercedes_benz_coherence(mb_bundle):
    rep = mutual_coherence(mb_bundle, make_bundle(np.eye(2)))
    assert rep.mu == pytest.approx(brute_coherence(mb_bundle, make_bundle(np.eye(2))), abs=1e-12)
    assert rep.mu == pytest.approx(1.0, abs=1e-12)
    assert sorted(rep.family_breakdown.values()) == pytest.approx([2 / 3, 2 / 3, 1, 1], abs=1e-12)


def test_coherence_report_invariants():
    rng = np.random.default_rng(4)
    U, D = make_bundle(random_frame(rng, 7, 4)), make_bundle(random_frame(rng, 5, 4))
    rep = mutual_coherence(U, D)
    assert rep.mu == pytest.approx(brute_coherence(U, D), abs=1e-12)
    assert rep.mu == rep.per_pair_max.max()
    assert all(rep.mu >= v for v in rep.family_breakdown.values())
    assert coherence_weights(U, D, 5).weights.max() == rep.per_pair_max[:5].max()
    assert set(rep.to_dict()) >= {"mu", "per_pair_max", "family_breakdown"}
    with pytest.raises(DimensionMismatch):
        mutual_coherence(U, make_bundle(np.eye(3)))
    with pytest.raises(DimensionMismatch):
        coherence_weights(U, D, 8)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_coherence_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    U, D = random_frame(rng, 6, 4), random_frame(rng, 5, 4)
    q, _ = np.linalg.qr(random_frame(rng, 4, 4))
    a = mutual_coherence(make_bundle(U), make_bundle(D)).mu
    b = mutual_coherence(make_bundle(U @ q), make_bundle(D @ q)).mu
    assert a == pytest.approx(b, abs=1e-10)


def test_parseval_families_coincide():
    p = np.vstack([np.eye(3), np.eye(3)]) / math.sqrt(2)
    rng = np.random.default_rng(2)
    rep = mutual_coherence(make_bundle(p), make_bundle(np.linalg.qr(random_frame(rng, 3, 3))[0]))
    vals = list(rep.family_breakdown.values())
    assert np.ptp(vals) <= 1e-12


def test_dft_haar_weights_decay(dft_haar64):
    F, H = dft_haar64
    w = coherence_weights(F, H, 64).weights
    slope, c1, _ = fit_power_law(w)
    assert -0.65 <= slope <= -0.35
    l = np.arange(1, 65)
    assert np.all(w <= np.max(np.sqrt(l) * w) / np.sqrt(l) + 1e-12)


def test_best_s_term():
    assert best_s_term_error([3, 0, 1, 0], 1, 4) == 1
    assert best_s_term_error([0, 2, 0, 5, 0], 2, 4) == 0
    assert best_s_term_error([1, 2, 3], 1, 2) == 4
    with pytest.raises(BadRange):
        best_s_term_error([1, 2], 3, 2)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=3, max_size=12), st.data())
def test_best_s_term_monotone(x, data):
    n = len(x)
    M = data.draw(st.integers(2, n))
    s = data.draw(st.integers(1, M - 1))
    e = best_s_term_error(x, s, M)
    assert best_s_term_error(x, s + 1, M) <= e + 1e-12
    if M < n:
        assert best_s_term_error(x, s, M + 1) <= e + 1e-12


def test_delta_subspace():
    q, _ = np.linalg.qr(np.random.default_rng(0).standard_normal((6, 6)))
    sub = make_delta_subspace(make_bundle(q), [1, 4])
    assert sub.dim == 2
    assert np.allclose(sub.basis.conj().T @ sub.basis, np.eye(2), atol=1e-10)
    rng = np.random.default_rng(1)
    gen = make_delta_subspace(make_bundle(random_frame(rng, 9, 6)), [0, 5])
    assert gen.dim <= 4
    assert np.allclose(gen.basis.conj().T @ gen.basis, np.eye(gen.dim), atol=1e-10)
    g = rng.standard_normal(6)
    assert np.allclose(gen.project(g) + gen.project_perp(g), g)
    with pytest.raises(IndexOutOfRange):
        make_delta_subspace(make_bundle(q), [6])


def test_delta_subspace_zero_rows():
    d = np.vstack([np.zeros((3, 2)), np.eye(2)])
    with pytest.raises(ZeroSubspace):
        make_delta_subspace(make_bundle(d), [0, 1, 2])


def test_b_factor_unitary():
    q, _ = np.linalg.qr(np.random.default_rng(3).standard_normal((8, 8)))
    assert b_factor(make_bundle(q), 3, 8).value == 1.0


def _degenerate_frame(K):
    f = np.concatenate([np.zeros(3), 1.0 / np.arange(1, K + 1)])
    return f / np.linalg.norm(f)


def test_b_factor_degenerate_growth():
    # closed form: with W = {0} the value is c^2 H_K, c^2 = 1 / sum_j j^-2
    vals = []
    for K in (10, 100, 1000, 10000):
        j = np.arange(1, K + 1)
        oracle = np.sum(1.0 / j) / np.sum(1.0 / j ** 2)
        v = b_factor(make_bundle(_degenerate_frame(K)[:, None]), 3, 3).value
        assert v == pytest.approx(oracle, rel=1e-10)
        vals.append(v)
    assert np.all(np.diff(vals) > 0)


@pytest.mark.slow
def test_b_factor_degenerate_exceeds_ten():
    assert b_factor(make_bundle(_degenerate_frame(10 ** 7)[:, None]), 3, 3).value > 10


def test_b_factor_two_onbs_exhaustive():
    q, _ = np.linalg.qr(np.random.default_rng(5).standard_normal((6, 6)))
    P = make_bundle(np.vstack([np.eye(6), q.T]) / math.sqrt(2))
    res = b_factor(P, 3, 6)
    best = 1.0
    for d in itertools.combinations(range(6), 3):
        g = np.hstack([P.U[list(d)].conj().T, P.dual[list(d)].conj().T])
        pw = g @ np.linalg.pinv(g)
        best = max(best, np.abs(P.dual @ (np.eye(6) - pw) @ P.U.conj().T).sum(axis=1).max())
    assert not res.is_lower_bound and res.n_evaluated == 20
    assert res.value == pytest.approx(best, abs=1e-12)
    assert res.value == pytest.approx(1.7085344901681456, abs=1e-10)


def test_b_factor_range():
    with pytest.raises(BadRange):
        b_factor(make_bundle(np.eye(4)), 2, 4)


def test_localization_factor():
    assert localization_factor(make_bundle(np.eye(5)), 3, 5).value == 1.0
    dup = make_bundle(np.vstack([np.eye(4), np.eye(4)[:1]]))
    est = localization_factor(dup, 3, 5)
    # certificate x = e_0 on the duplicated pair gives ||D D^* x||_1 / sqrt(3) with ||D^* x|| = 1
    x = np.zeros(5)
    x[[0, 4]] = 1 / math.sqrt(2)
    cert = np.abs(dup.U @ (dup.U.conj().T @ x)).sum() / math.sqrt(3) / np.linalg.norm(dup.U.conj().T @ x)
    assert est.is_lower_bound and est.value > 1 and est.value >= cert - 1e-12


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_factors_at_least_one(seed):
    D = make_bundle(random_frame(np.random.default_rng(seed), 6, 4))
    assert b_factor(D, 3, 5).value >= 1
    assert localization_factor(D, 3, 5, effort=8).value >= 1


@pytest.mark.parametrize("seed", range(5))
def test_balancing_full_rows(seed):
    rng = np.random.default_rng(seed)
    U, D = make_bundle(random_frame(rng, 8, 5)), make_bundle(random_frame(rng, 7, 5))
    r = balancing_residuals(U, D, 8, 5, 3)
    assert r.r1 <= 1e-12 and r.r2 <= 1e-12 and r.satisfied


def test_balancing_dft_haar_sweep(dft_haar64):
    F, H = dft_haar64
    r57 = balancing_residuals(F, H, 57, 16, 4)
    r58 = balancing_residuals(F, H, 58, 16, 4)
    assert not r57.satisfied and r58.satisfied
    assert r58.thresholds == pytest.approx((1 / (8 * math.sqrt(math.log(4))), 1 / (14 * 2)))
    assert (r58.r1, r58.r2) == pytest.approx((0.011970039567091912, 0.032270691149945095), rel=1e-8)


def test_tilde_m(dft_haar64):
    F, H = dft_haar64
    assert tilde_m(F, H, 0.5, 32, 16, J_max=16).value == 16
    q = tilde_m(F, make_bundle(np.eye(64)), 1.0, 64, 8).q
    assert np.all(q[:8] >= 1.0)
    with pytest.raises(BadAlpha):
        tilde_m(F, H, 0.0, 32, 16)


def test_measurement_budget():
    N, s, Mt = 64, 4, 20
    v = measurement_budget(1, 1, 1, 1, 1, N, s, Mt, mu=1 / math.sqrt(N))
    assert v == pytest.approx(s * math.log(Mt))
    assert measurement_budget(1, 1, 1, 1, 2, N, s, Mt, mu=1 / math.sqrt(N)) == pytest.approx(4 * v)
    c1 = 1.3
    wn = c1 * math.sqrt(math.log(N) + 1)
    wv = measurement_budget(1, 1, 1, 1, 1, N, s, N, w_norm=wn)
    assert wv == pytest.approx(c1 ** 2 * (math.log(N) + 1) * s * math.log(N))
