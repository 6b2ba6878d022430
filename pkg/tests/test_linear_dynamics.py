import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.linalg import solve_continuous_lyapunov

from _systems import random_physical_system
from coupled_optomech.errors import EigFailure, UnstableSystem
from coupled_optomech.gaussian import symplectic_eigenvalues
from coupled_optomech.linear_dynamics import (
    build_diffusion,
    drift_matrix,
    linear_model,
    lyapunov_residual,
    solve_lyapunov,
    stability,
    steady_covariance,
)
from coupled_optomech.params import CavityParams, SystemParams, angular, derive
from coupled_optomech.steady_state import coupling_fixed_point, pinned_fixed_point

WM = angular(10e6)


def cavity(**kw):
    vals = dict(
        length=1e-3,
        mass=5e-12,
        wavelength=810e-9,
        omega_m=WM,
        gamma_m=angular(100.0),
        kappa=angular(14e6),
        delta0=WM,
        power=35e-3,
        temperature=0.4,
    )
    vals.update(kw)
    return CavityParams(**vals)


def template(w1, w2, g1, g2, k1, k2, d1, d2, G1, G2, xi, eta):
    """Drift matrix written out row by row (order q1 p1 X1 Y1 q2 p2 X2 Y2)."""
    return np.array(
        [
            [-g1, w1, 0, 0, 0, -eta, 0, 0],
            [-w1, -g1, G1, 0, eta, 0, 0, 0],
            [0, 0, -k1, d1, 0, 0, 0, -xi],
            [G1, 0, -d1, -k1, 0, 0, xi, 0],
            [0, -eta, 0, 0, -g2, w2, 0, 0],
            [eta, 0, 0, 0, -w2, -g2, G2, 0],
            [0, 0, 0, -xi, 0, 0, -k2, d2],
            [0, 0, xi, 0, G2, 0, -d2, -k2],
        ]
    )


rates = st.floats(0.01, 5.0)


@settings(max_examples=100)
@given(v=st.tuples(*([rates] * 8)), d=st.tuples(st.floats(-3, 3), st.floats(-3, 3)), hop=st.tuples(rates, rates))
def test_drift_template(v, d, hop):
    w1, w2, g1, g2, k1, k2, G1, G2 = v
    xi, eta = hop
    A = drift_matrix([w1, w2], [g1, g2], [k1, k2], list(d), [G1, G2], xi, eta)
    T = template(w1, w2, g1, g2, k1, k2, d[0], d[1], G1, G2, xi, eta)
    np.testing.assert_array_equal(A, T)
    assert A[0, 5] == -eta and A[3, 6] == xi and A[7, 4] == G2


def test_no_hopping_is_block_diagonal():
    A = drift_matrix(1.0, 1e-3, 1.4, 1.0, 0.5, 0.0, 0.0)
    assert not A[:4, 4:].any() and not A[4:, :4].any()


def test_decoupled_eigenvalues():
    A = drift_matrix([1.0, 1.3], [1e-3, 2e-3], [1.4, 0.7], [0.9, -0.4], 0.0, 0.0, 0.0)
    expected = []
    for w, g, k, d in [(1.0, 1e-3, 1.4, 0.9), (1.3, 2e-3, 0.7, -0.4)]:
        expected += [-g + 1j * w, -g - 1j * w, -k + 1j * d, -k - 1j * d]
    got = np.linalg.eigvals(A)
    np.testing.assert_allclose(np.sort_complex(got), np.sort_complex(np.array(expected)), atol=1e-13)


def test_diffusion_entries():
    p = SystemParams(cavity(temperature=0.0), cavity(temperature=0.4, gamma_m=angular(200.0)))
    Q = build_diffusion(p)
    n = derive(p).n_bar
    g1, g2 = p.per_cavity("gamma_m")
    k = p.cavity_1.kappa
    np.testing.assert_allclose(np.diag(Q), [g1, g1, k, k, g2 * (2 * n[1] + 1), g2 * (2 * n[1] + 1), k, k], rtol=1e-15)
    assert np.count_nonzero(Q - np.diag(np.diag(Q))) == 0


def test_diffusion_literal_occupation():
    # an occupation of exactly 836 gives a mechanical entry of gamma * 1673
    p = SystemParams.symmetric(cavity())
    d = derive(p)
    d836 = type(d)(n_bar=np.array([836.0, 836.0]), E=d.E, g0=d.g0, g=d.g, omega_c=d.omega_c)
    Q = build_diffusion(p, d836)
    assert Q[0, 0] == pytest.approx(p.cavity_1.gamma_m * 1673, rel=1e-15)
    d_hot = type(d)(n_bar=2 * d.n_bar + 0.5, E=d.E, g0=d.g0, g=d.g, omega_c=d.omega_c)
    Q2 = build_diffusion(p, d_hot)
    np.testing.assert_allclose(Q2[0, 0], 2 * Q[0, 0] * (d.n_bar[0] + 0.5) / (836.5), rtol=1e-12)
    Q1 = build_diffusion(p, d)
    np.testing.assert_allclose(Q2[0, 0], 2 * Q1[0, 0], rtol=1e-12)
    assert Q2[2, 2] == Q1[2, 2]


def test_uncoupled_stability_margin():
    A = drift_matrix(1.0, 1e-5, 1.4, 1.0, 0.0, 0.0, 0.0)
    v = stability(A)
    assert v.stable
    assert v.max_real_eig == pytest.approx(-1e-5, rel=1e-9)


def _fig2_verdict(xi, eta):
    p = SystemParams.symmetric(cavity(), xi * WM, eta * WM)
    d = derive(p)
    fp = pinned_fixed_point(p, WM, d)
    return linear_model(p, fp, d).stability()


def test_fig2_blue_detuned_points():
    assert _fig2_verdict(0.5, 0.0).stable
    assert not _fig2_verdict(0.9, 0.0).stable
    assert _fig2_verdict(0.9, 0.3).stable


def test_marginal_and_failure():
    A = np.diag([-1.0, 0.0])
    v = stability(A)
    assert v.marginal and not v.stable
    with pytest.raises(EigFailure):
        stability(np.array([[np.nan]]))
    with pytest.raises(UnstableSystem):
        solve_lyapunov(np.eye(2), np.eye(2))


def test_lyapunov_scalar_balance():
    nu = solve_lyapunov(-0.5 * np.eye(8), np.eye(8)).nu
    np.testing.assert_allclose(nu, np.eye(8), atol=1e-14)


def test_cold_decoupled_cavity_is_vacuum():
    A = drift_matrix(1.0, 1e-3, 1.4, 1.0, 0.0, 0.0, 0.0)
    Q = np.diag([1e-3, 1e-3, 1.4, 1.4] * 2)
    np.testing.assert_allclose(solve_lyapunov(A, Q).nu, 0.5 * np.eye(8), atol=1e-12)


def test_thermal_mirror_block():
    A = drift_matrix(1.0, 1e-5, 1.4, 1.0, 0.0, 0.0, 0.0)
    m = 1e-5 * (2 * 836 + 1)
    nu = solve_lyapunov(A, np.diag([m, m, 1.4, 1.4] * 2)).nu
    np.testing.assert_allclose(nu[:2, :2], 836.5 * np.eye(2), rtol=1e-9, atol=1e-9)


def test_fig3_base_point_physical():
    p = SystemParams.symmetric(cavity())
    d = derive(p)
    nu = steady_covariance(p, d, pinned_fixed_point(p, WM, d)).nu
    assert symplectic_eigenvalues(nu).min() >= 0.5 - 1e-8
    assert np.max(np.abs(nu - nu.T)) <= 1e-12 * np.max(np.abs(nu))
    assert np.linalg.eigvalsh(nu).min() > 0


def test_uncoupled_product_state():
    p = SystemParams.symmetric(cavity())
    d = derive(p)
    fp = coupling_fixed_point(p, 0.0, WM, d)
    nu = steady_covariance(p, d, fp).nu
    expected = np.diag([d.n_bar[0] + 0.5] * 2 + [0.5] * 2 + [d.n_bar[1] + 0.5] * 2 + [0.5] * 2)
    np.testing.assert_allclose(nu, expected, rtol=1e-9, atol=1e-12)


@settings(max_examples=200)
@given(
    M=arrays(np.float64, (8, 8), elements=st.floats(-2, 2)),
    shift=st.floats(1e-3, 1.0),
    B=arrays(np.float64, (8, 8), elements=st.floats(-1, 1)),
)
def test_lyapunov_shifted_spectra(M, shift, B):
    A = M - (np.max(np.linalg.eigvals(M).real) + shift) * np.eye(8)
    Q = B @ B.T + 1e-3 * np.eye(8)
    nu = solve_lyapunov(A, Q).nu
    # skip systems so ill-conditioned that float64 rounding alone exceeds the bound
    assume(np.finfo(float).eps * np.abs(A).max() * np.abs(nu).max() <= 1e-12 * np.abs(Q).max())
    assert lyapunov_residual(A, nu, Q) <= 1e-10
    np.testing.assert_allclose(nu, nu.T, rtol=0, atol=1e-12 * np.max(np.abs(nu)))


def test_lyapunov_matches_scipy():
    rng = np.random.default_rng(7)
    for _ in range(50):
        A, Q = random_physical_system(rng)
        nu = solve_lyapunov(A, Q).nu
        ref = solve_continuous_lyapunov(A, -Q)
        np.testing.assert_allclose(nu, ref, rtol=1e-7, atol=1e-9 * np.max(np.abs(ref)))
        assert symplectic_eigenvalues(nu).min() >= 0.5 - 1e-8


def test_model_normalization_invariance():
    p = SystemParams.symmetric(cavity(), 0.2 * WM, 0.1 * WM)
    d = derive(p)
    fp = pinned_fixed_point(p, WM, d)
    m = linear_model(p, fp, d)
    direct = solve_lyapunov(m.A, m.Q, omega_ref=WM).nu
    scaled = steady_covariance(p, d, fp).nu
    np.testing.assert_allclose(direct, scaled, rtol=1e-8)
