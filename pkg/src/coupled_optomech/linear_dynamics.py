"""Linearized quadrature dynamics, stability and the stationary covariance matrix.

Quadratures are ordered ``(q1, p1, X1, Y1, q2, p2, X2, Y2)`` with
``X = (a + a^dagger) / sqrt(2)``, so the vacuum variance is 1/2. The drift
matrix couples them as

    mirror j:  dq = -gamma q + omega p  (+/- eta to the other mirror)
    field j:   dX = -kappa X + Delta Y  (+/- xi to the other field)

and the optomechanical coupling ``G`` enters at ``(p_j, X_j)`` and
``(Y_j, q_j)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EigFailure, UnstableSystem
from .params import DerivedParams, SystemParams, derive
from .steady_state import ClassicalFixedPoint, FixedPointOptions, solve_fixed_point

__all__ = [
    "MODE_ORDER",
    "LinearModel",
    "CovarianceMatrix",
    "StabilityVerdict",
    "drift_matrix",
    "build_drift",
    "build_diffusion",
    "linear_model",
    "stability",
    "solve_lyapunov",
    "lyapunov_residual",
    "steady_covariance",
]

MODE_ORDER = ("q1", "p1", "X1", "Y1", "q2", "p2", "X2", "Y2")
DEFAULT_MARGIN = 1e-9


def drift_matrix(omega_m, gamma_m, kappa, delta, G, xi, eta) -> np.ndarray:
    """8x8 drift matrix from per-cavity rates (length-2 arrays) and the two hoppings.

    Any consistent unit works; the matrix is linear in all rates.
    """
    omega_m, gamma_m, kappa, delta, G = (
        np.broadcast_to(np.asarray(v, dtype=float), (2,)) for v in (omega_m, gamma_m, kappa, delta, G)
    )
    A = np.zeros((8, 8))
    for j, o in enumerate((0, 4)):
        q, p, X, Y = o, o + 1, o + 2, o + 3
        A[q, q] = A[p, p] = -gamma_m[j]
        A[q, p] = omega_m[j]
        A[p, q] = -omega_m[j]
        A[X, X] = A[Y, Y] = -kappa[j]
        A[X, Y] = delta[j]
        A[Y, X] = -delta[j]
        A[p, X] = G[j]
        A[Y, q] = G[j]
    # phonon tunneling
    A[0, 5] = -eta
    A[1, 4] = eta
    A[4, 1] = -eta
    A[5, 0] = eta
    # photon hopping
    A[2, 7] = -xi
    A[3, 6] = xi
    A[6, 3] = -xi
    A[7, 2] = xi
    return A


@dataclass(frozen=True)
class StabilityVerdict:
    max_real_eig: float
    stable: bool
    margin: float

    @property
    def marginal(self) -> bool:
        return abs(self.max_real_eig) <= self.margin


@dataclass(frozen=True)
class LinearModel:
    A: np.ndarray
    Q: np.ndarray
    omega_ref: float = 1.0
    mode_order: tuple = MODE_ORDER

    def stability(self) -> StabilityVerdict:
        return stability(self.A, omega_ref=self.omega_ref)


@dataclass(frozen=True)
class CovarianceMatrix:
    """Symmetrized second moments ``(<mu_l mu_m + mu_m mu_l>) / 2``."""

    nu: np.ndarray

    def submatrix(self, indices) -> np.ndarray:
        idx = list(indices)
        return self.nu[np.ix_(idx, idx)]


def build_drift(fp: ClassicalFixedPoint, params: SystemParams) -> np.ndarray:
    return drift_matrix(
        params.per_cavity("omega_m"),
        params.per_cavity("gamma_m"),
        params.per_cavity("kappa"),
        fp.delta_eff,
        fp.G,
        params.xi,
        params.eta,
    )


def build_diffusion(params: SystemParams, derived: DerivedParams | None = None) -> np.ndarray:
    """Diagonal diffusion matrix; the optical bath is taken at zero occupation."""
    derived = derive(params) if derived is None else derived
    diag = []
    for cav, n in zip(params.cavities, derived.n_bar):
        mech = cav.gamma_m * (2.0 * n + 1.0)
        diag += [mech, mech, cav.kappa, cav.kappa]
    return np.diag(diag)


def linear_model(params: SystemParams, fp: ClassicalFixedPoint, derived: DerivedParams | None = None) -> LinearModel:
    derived = derive(params) if derived is None else derived
    return LinearModel(build_drift(fp, params), build_diffusion(params, derived), omega_ref=params.omega_ref)


def stability(A, omega_ref: float = 1.0, margin: float = DEFAULT_MARGIN) -> StabilityVerdict:
    """Largest real part of the spectrum of ``A``; stable iff below ``-margin * omega_ref``."""
    A = np.asarray(A, dtype=float)
    if not np.all(np.isfinite(A)):
        raise EigFailure("drift matrix has non-finite entries")
    try:
        eig = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise EigFailure(str(exc)) from exc
    m = float(np.max(eig.real))
    tol = margin * omega_ref
    return StabilityVerdict(max_real_eig=m, stable=m < -tol, margin=tol)


def lyapunov_residual(A, nu, Q) -> float:
    """``max|A nu + nu A^T + Q| / max|Q|``."""
    R = A @ nu + nu @ A.T + Q
    return float(np.max(np.abs(R)) / np.max(np.abs(Q)))


def solve_lyapunov(A, Q, omega_ref: float = 1.0) -> CovarianceMatrix:
    """Solve ``A nu + nu A^T = -Q`` for a stable ``A``.

    The n^2 unknowns are solved as one dense linear system followed by a
    single step of iterative refinement.
    """
    A = np.asarray(A, dtype=float)
    Q = np.asarray(Q, dtype=float)
    verdict = stability(A, omega_ref=omega_ref)
    if not verdict.stable:
        raise UnstableSystem(f"drift matrix not stable (max Re eig = {verdict.max_real_eig:.6e})")
    n = A.shape[0]
    eye = np.eye(n)
    # row-major vec: vec(A X) = (A kron I) vec(X), vec(X A^T) = (I kron A) vec(X)
    K = np.kron(A, eye) + np.kron(eye, A)
    rhs = -Q.reshape(-1)
    x = np.linalg.solve(K, rhs)
    x += np.linalg.solve(K, rhs - K @ x)
    nu = x.reshape(n, n)
    nu = 0.5 * (nu + nu.T)
    return CovarianceMatrix(nu)


def steady_covariance(
    params: SystemParams,
    derived: DerivedParams | None = None,
    fp: ClassicalFixedPoint | None = None,
    opts: FixedPointOptions | None = None,
) -> CovarianceMatrix:
    """Stationary 8x8 covariance matrix of the fluctuations.

    Without ``fp`` the classical steady state is solved at the bare
    detunings. Raises :class:`UnstableSystem` outside the stable region.
    """
    derived = derive(params) if derived is None else derived
    if fp is None:
        fp = solve_fixed_point(params, derived, opts)
    model = linear_model(params, fp, derived)
    w = model.omega_ref
    # nu is invariant under a common rescaling of A and Q
    return solve_lyapunov(model.A / w, model.Q / w, omega_ref=1.0)
