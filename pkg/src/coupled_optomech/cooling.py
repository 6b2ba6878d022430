"""Collective-mode cooling model and its second-moment equations.

For two identical cavities the symmetric combinations
``a = (a1 + a2)/sqrt(2)``, ``b = (b1 + b2)/sqrt(2)`` form a single
optomechanical cavity with detuning ``Delta - xi``, mechanical frequency
``omega_m - eta`` and light-enhanced coupling ``g_eff = g |a_s|``:

    H = Delta_c a^dag a + omega_eff b^dag b - g_eff (a + a^dag)(b + b^dag)

Damping follows the Langevin picture used for the drift matrix: amplitudes
decay at ``kappa`` and ``gamma_m``, i.e. the Lindblad dissipators are
``kappa D[a] + gamma_m (n+1) D[b] + gamma_m n D[b^dag]`` with
``D[o] rho = [o rho, o^dag] + [o, rho o^dag]``. Occupations and the
self-correlations ``<a^2>``, ``<b^2>`` therefore relax at ``2 kappa`` and
``2 gamma_m``.

The moment vector is ordered
``(N_a, N_b, <a^dag b>, <a b^dag>, <a b>, <a^dag b^dag>, <a^2>, <a^dag^2>, <b^2>, <b^dag^2>)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AsymmetricParams, StepTooLarge, UnstableMomentSystem
from .linear_dynamics import drift_matrix, solve_lyapunov
from .params import DerivedParams, SystemParams, derive
from .steady_state import ClassicalFixedPoint

__all__ = [
    "EffectiveParams",
    "MomentSystem",
    "MomentVector",
    "MOMENT_LABELS",
    "effective_reduction",
    "build_moment_system",
    "steady_moments",
    "evolve_moments",
    "quadrature_model",
    "quadrature_occupations",
]

MOMENT_LABELS = ("N_a", "N_b", "ad_b", "a_bd", "a_b", "ad_bd", "a_a", "ad_ad", "b_b", "bd_bd")
NA, NB, ADB, ABD, AB, ADBD, AA, ADAD, BB, BDBD = range(10)


@dataclass(frozen=True)
class EffectiveParams:
    """Parameters of the symmetric collective mode (rates in rad/s).

    ``kappa`` and ``gamma_m`` are amplitude damping rates, as elsewhere in
    the package. The quadrature coupling is ``G = 2 g_eff``.
    """

    delta_eff_c: float
    omega_eff: float
    g_eff: float
    kappa: float
    gamma_m: float
    n_bar: float

    @property
    def G(self) -> float:
        return 2.0 * self.g_eff


def effective_reduction(
    params: SystemParams, fp: ClassicalFixedPoint, derived: DerivedParams | None = None, rtol: float = 1e-9
) -> EffectiveParams:
    derived = derive(params) if derived is None else derived
    pairs = {
        "kappa": params.per_cavity("kappa"),
        "gamma_m": params.per_cavity("gamma_m"),
        "omega_m": params.per_cavity("omega_m"),
        "g": np.asarray(derived.g),
        "n_bar": np.asarray(derived.n_bar),
        "delta_eff": np.asarray(fp.delta_eff),
        "|a_s|": np.abs(fp.a_s),
    }
    for name, (x, y) in pairs.items():
        if not np.isclose(x, y, rtol=rtol, atol=0.0):
            raise AsymmetricParams(f"cavities differ in {name}: {x!r} vs {y!r}")
    cav = params.cavity_1
    return EffectiveParams(
        delta_eff_c=float(fp.delta_eff[0] - params.xi),
        omega_eff=cav.omega_m - params.eta,
        g_eff=float(derived.g[0] * abs(fp.a_s[0])),
        kappa=cav.kappa,
        gamma_m=cav.gamma_m,
        n_bar=float(derived.n_bar[0]),
    )


@dataclass(frozen=True)
class MomentSystem:
    B: np.ndarray
    D: np.ndarray

    @property
    def diagonal(self) -> np.ndarray:
        return np.diag(self.B)


@dataclass(frozen=True)
class MomentVector:
    values: np.ndarray

    @property
    def N_a(self) -> float:
        return float(self.values[NA].real)

    @property
    def N_b(self) -> float:
        return float(self.values[NB].real)

    def as_dict(self) -> dict:
        return dict(zip(MOMENT_LABELS, self.values))


def build_moment_system(ep: EffectiveParams) -> MomentSystem:
    """Drift ``B`` and inhomogeneity ``D`` of ``dLambda/dt = B Lambda + D``."""
    k = 2.0 * ep.kappa  # occupation decay rates
    y = 2.0 * ep.gamma_m
    d, w, g = ep.delta_eff_c, ep.omega_eff, ep.g_eff
    ig = 1j * g
    half = -(k + y) / 2.0

    B = np.zeros((10, 10), dtype=complex)
    D = np.zeros(10, dtype=complex)

    B[NA, NA] = -k
    B[NA, [ADB, ABD, AB, ADBD]] = [ig, -ig, -ig, ig]

    B[NB, NB] = -y
    B[NB, [ADB, ABD, AB, ADBD]] = [-ig, ig, -ig, ig]
    D[NB] = y * ep.n_bar

    B[ADB, ADB] = half + 1j * (d - w)
    B[ADB, [NA, NB, ADAD, BB]] = [ig, -ig, ig, -ig]

    B[ABD, ABD] = half - 1j * (d - w)
    B[ABD, [NA, NB, AA, BDBD]] = [-ig, ig, -ig, ig]

    B[AB, AB] = half - 1j * (d + w)
    B[AB, [NA, NB, AA, BB]] = [ig, ig, ig, ig]
    D[AB] = ig

    B[ADBD, ADBD] = half + 1j * (d + w)
    B[ADBD, [NA, NB, ADAD, BDBD]] = [-ig, -ig, -ig, -ig]
    D[ADBD] = -ig

    B[AA, AA] = -k - 2j * d
    B[AA, [AB, ABD]] = 2 * ig
    B[ADAD, ADAD] = -k + 2j * d
    B[ADAD, [ADB, ADBD]] = -2 * ig

    B[BB, BB] = -y - 2j * w
    B[BB, [ADB, AB]] = 2 * ig
    B[BDBD, BDBD] = -y + 2j * w
    B[BDBD, [ABD, ADBD]] = -2 * ig

    return MomentSystem(B, D)


def steady_moments(ms: MomentSystem) -> MomentVector:
    eig = np.linalg.eigvals(ms.B)
    if not np.all(eig.real < 0):
        raise UnstableMomentSystem(f"max Re eig of B = {eig.real.max():.6e}")
    return MomentVector(np.linalg.solve(ms.B, -ms.D))


def _rk4_propagator(B, D, h):
    n = B.shape[0]
    hB = h * B
    eye = np.eye(n)
    phi = eye + hB / 2 + hB @ hB / 6 + hB @ hB @ hB / 24
    return eye + hB @ phi, h * phi @ D


def evolve_moments(
    ms: MomentSystem,
    lambda0,
    t_final: float,
    dt: float,
    sample_every: int = 1,
    rtol: float = 1e-8,
) -> tuple[np.ndarray, np.ndarray]:
    """Fixed-step classical RK4 integration of the moment equations.

    Returns ``(times, states)`` with one row per reported sample. Every
    sample is compared against a run with half the step; if the relative
    difference exceeds ``rtol`` (or ``dt`` times the spectral radius of
    ``B`` exceeds 0.1) :class:`StepTooLarge` is raised.
    """
    if dt <= 0 or t_final < 0:
        raise ValueError("need dt > 0 and t_final >= 0")
    rho = float(np.max(np.abs(np.linalg.eigvals(ms.B)))) if np.any(ms.B) else 0.0
    if dt * rho > 0.1:
        raise StepTooLarge(f"dt * spectral radius = {dt * rho:.3g} > 0.1")
    n_steps = int(round(t_final / dt))
    if not np.isclose(n_steps * dt, t_final, rtol=1e-12, atol=0.0) and t_final > 0:
        raise ValueError("t_final must be an integer multiple of dt")

    P1, c1 = _rk4_propagator(ms.B, ms.D, dt)
    P2, c2 = _rk4_propagator(ms.B, ms.D, dt / 2)
    y = np.array(lambda0, dtype=complex)
    z = y.copy()
    times, states = [0.0], [y.copy()]
    scale = max(float(np.max(np.abs(y))), 1e-300)
    for step in range(1, n_steps + 1):
        y = P1 @ y + c1
        z = P2 @ (P2 @ z + c2) + c2
        if step % sample_every == 0 or step == n_steps:
            scale = max(scale, float(np.max(np.abs(z))))
            err = float(np.max(np.abs(y - z))) / scale
            if err > rtol:
                raise StepTooLarge(f"step-halving error {err:.3e} > {rtol:.1e} at t = {step * dt:.6g}")
            times.append(step * dt)
            states.append(y.copy())
    return np.array(times), np.array(states)


def quadrature_model(ep: EffectiveParams) -> tuple[np.ndarray, np.ndarray]:
    """4x4 drift and diffusion of the collective mode in ``(q, p, X, Y)``."""
    A8 = drift_matrix(ep.omega_eff, ep.gamma_m, ep.kappa, ep.delta_eff_c, ep.G, 0.0, 0.0)
    mech = ep.gamma_m * (2.0 * ep.n_bar + 1.0)
    return A8[:4, :4], np.diag([mech, mech, ep.kappa, ep.kappa])


def quadrature_occupations(ep: EffectiveParams, omega_ref: float = 1.0) -> tuple[float, float]:
    """``(N_a, N_b)`` from the Lyapunov solution of :func:`quadrature_model`."""
    A, Q = quadrature_model(ep)
    nu = solve_lyapunov(A / omega_ref, Q / omega_ref).nu
    n_b = (nu[0, 0] + nu[1, 1] - 1.0) / 2.0
    n_a = (nu[2, 2] + nu[3, 3] - 1.0) / 2.0
    return float(n_a), float(n_b)
