"""Random physical test systems in units of the mechanical frequency."""

import numpy as np

from coupled_optomech.linear_dynamics import drift_matrix


def random_physical_system(rng, gamma_range=(1e-5, 1e-1), margin=1e-6):
    """Stable drift and diffusion of two random coupled cavities.

    Parameters are drawn until the drift matrix is stable by at least
    ``margin``; returns ``(A, Q)``.
    """
    while True:
        omega = rng.uniform(0.5, 2.0, 2)
        gamma = np.exp(rng.uniform(*np.log(gamma_range), 2))
        kappa = rng.uniform(0.2, 3.0, 2)
        delta = rng.uniform(-2.0, 2.0, 2)
        G = rng.uniform(0.0, 1.5, 2)
        xi, eta = rng.uniform(0.0, 1.0, 2)
        n_bar = rng.uniform(0.0, 1000.0, 2)
        A = drift_matrix(omega, gamma, kappa, delta, G, xi, eta)
        if np.max(np.linalg.eigvals(A).real) < -margin:
            diag = []
            for j in range(2):
                m = gamma[j] * (2 * n_bar[j] + 1)
                diag += [m, m, kappa[j], kappa[j]]
            return A, np.diag(diag)


def two_mode_squeezed(r):
    c, s = np.cosh(2 * r) / 2, np.sinh(2 * r) / 2
    z = np.diag([1.0, -1.0])
    return np.block([[c * np.eye(2), s * z], [s * z, c * np.eye(2)]])
