"""Bipartite Gaussian correlation measures on the stationary covariance matrix.

Covariance matrices use the vacuum-variance-1/2 convention throughout. The
Renyi-2 entropies entering the steering measure are evaluated on ``2 nu``
(vacuum = identity), and the Schur-complement form correspondingly reads
``-ln(2 sqrt(det M))``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NonPositiveDeterminant, SingularBlock, UnphysicalState

__all__ = [
    "Mode",
    "Bipartition",
    "FIELD_MIRROR",
    "TwoModeCM",
    "SteeringResult",
    "SteeringClass",
    "symplectic_form",
    "symplectic_eigenvalues",
    "reduce",
    "log_negativity",
    "partial_transpose_invariants",
    "partial_transpose_spectrum",
    "renyi2_entropy",
    "steering",
    "steering_schur",
    "classify_steering",
    "STEERING_EPS",
]

PHYSICAL_TOL = 1e-6
STEERING_EPS = 1e-10
_SCHUR_AGREEMENT = 1e-10


class Mode(enum.Enum):
    """Mode label -> offset of its (position, momentum) pair in the 8-vector."""

    mech1 = 0
    cav1 = 2
    mech2 = 4
    cav2 = 6

    @property
    def indices(self) -> tuple[int, int]:
        return (self.value, self.value + 1)


class Bipartition(NamedTuple):
    a: Mode
    b: Mode

    @classmethod
    def parse(cls, text: str) -> "Bipartition":
        try:
            left, right = (s.strip() for s in text.replace(",", "-").split("-"))
            pair = cls(Mode[left], Mode[right])
        except (KeyError, ValueError):
            raise ValueError(f"bad bipartition {text!r}; expected e.g. 'cav1-mech1'") from None
        if pair.a is pair.b:
            raise ValueError("bipartition needs two distinct modes")
        return pair

    def __str__(self) -> str:
        return f"{self.a.name}-{self.b.name}"


FIELD_MIRROR = Bipartition(Mode.cav1, Mode.mech1)


@dataclass(frozen=True)
class TwoModeCM:
    nu1: np.ndarray
    nu2: np.ndarray
    nuc: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return np.block([[self.nu1, self.nuc], [self.nuc.T, self.nu2]])

    @classmethod
    def from_matrix(cls, m) -> "TwoModeCM":
        m = np.asarray(m, dtype=float)
        return cls(m[:2, :2].copy(), m[2:, 2:].copy(), m[:2, 2:].copy())


def symplectic_form(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def symplectic_eigenvalues(nu) -> np.ndarray:
    """Sorted symplectic spectrum (moduli of the eigenvalues of ``i Omega nu``)."""
    nu = np.asarray(nu, dtype=float)
    n = nu.shape[0] // 2
    ev = np.abs(np.linalg.eigvals(1j * symplectic_form(n) @ nu))
    ev = np.sort(ev)
    # eigenvalues come in +/- pairs
    return ev[::2]


def reduce(nu, pair: Bipartition = FIELD_MIRROR) -> TwoModeCM:
    nu = getattr(nu, "nu", nu)
    nu = np.asarray(nu, dtype=float)
    idx = list(pair.a.indices) + list(pair.b.indices)
    return TwoModeCM.from_matrix(nu[np.ix_(idx, idx)])


def _check_physical(cm: TwoModeCM, tol: float = PHYSICAL_TOL):
    low = symplectic_eigenvalues(cm.matrix)[0]
    if low < 0.5 - tol:
        raise UnphysicalState(f"smallest symplectic eigenvalue {low:.10g} < 1/2")


def partial_transpose_invariants(cm: TwoModeCM) -> tuple[float, float]:
    """``(chi, det nu)`` with ``chi = det nu1 + det nu2 - 2 det nuc`` (signed).

    The partially transposed spectrum satisfies
    ``theta_-^2 + theta_+^2 = chi`` and ``theta_- theta_+ = sqrt(det nu)``.
    """
    chi = np.linalg.det(cm.nu1) + np.linalg.det(cm.nu2) - 2.0 * np.linalg.det(cm.nuc)
    return float(chi), float(np.linalg.det(cm.matrix))


def partial_transpose_spectrum(cm: TwoModeCM) -> np.ndarray:
    """Symplectic eigenvalues ``(theta_-, theta_+)`` of the partially transposed state.

    Taken from the eigenvalues of ``i Omega nu~`` rather than from the
    roots of ``x^2 - chi x + det nu``, whose discriminant loses half the
    digits when the two values nearly coincide (pure, weakly correlated
    states).
    """
    flip = np.diag([1.0, 1.0, 1.0, -1.0])
    return symplectic_eigenvalues(flip @ cm.matrix @ flip)


def log_negativity(cm: TwoModeCM) -> float:
    """Logarithmic negativity ``max(0, -ln(2 theta_-))``."""
    _check_physical(cm)
    theta = partial_transpose_spectrum(cm)[0]
    if theta == 0.0:
        return float("inf")
    return max(0.0, float(-np.log(2.0 * theta)))


def renyi2_entropy(sigma) -> float:
    """``ln det(sigma) / 2`` for a covariance matrix in the vacuum = identity scaling."""
    d = np.linalg.det(np.asarray(sigma, dtype=float))
    if not d > 0:
        raise NonPositiveDeterminant(f"det = {d!r}")
    return 0.5 * float(np.log(d))


class SteeringClass(str, enum.Enum):
    no_way = "no_way"
    one_way = "one_way"
    two_way = "two_way"


@dataclass(frozen=True)
class SteeringResult:
    g_a_to_b: float
    g_b_to_a: float
    asymmetry: float
    steering_class: SteeringClass


def classify_steering(g_ab: float, g_ba: float, epsilon: float = STEERING_EPS) -> SteeringClass:
    if g_ab < 0 or g_ba < 0:
        raise ValueError("steering values must be >= 0")
    count = (g_ab > epsilon) + (g_ba > epsilon)
    return (SteeringClass.no_way, SteeringClass.one_way, SteeringClass.two_way)[count]


def _check_blocks(cm: TwoModeCM):
    for name, blk in (("nu1", cm.nu1), ("nu2", cm.nu2)):
        if np.linalg.cond(blk) > 1e12 or np.linalg.det(blk) <= 0:
            raise SingularBlock(f"{name} is singular")


def steering_schur(cm: TwoModeCM) -> tuple[float, float]:
    """Unclamped steering values from the Schur complements of each party."""
    _check_blocks(cm)
    m_b = cm.nu2 - cm.nuc.T @ np.linalg.solve(cm.nu1, cm.nuc)
    m_a = cm.nu1 - cm.nuc @ np.linalg.solve(cm.nu2, cm.nuc.T)
    d_b, d_a = np.linalg.det(m_b), np.linalg.det(m_a)
    if d_b <= 0 or d_a <= 0:
        raise UnphysicalState("Schur complement with non-positive determinant")
    return float(-np.log(2.0 * np.sqrt(d_b))), float(-np.log(2.0 * np.sqrt(d_a)))


def _steering_entropy(cm: TwoModeCM) -> tuple[float, float]:
    s_r = renyi2_entropy(2.0 * cm.matrix)
    return renyi2_entropy(2.0 * cm.nu1) - s_r, renyi2_entropy(2.0 * cm.nu2) - s_r


def steering(cm: TwoModeCM, epsilon: float = STEERING_EPS) -> SteeringResult:
    """Two-way Gaussian Renyi-2 steering of a two-mode state.

    ``g_a_to_b`` is the ability of mode A (``nu1``) to steer mode B. The
    entropy-difference and Schur-complement expressions are both evaluated
    and must agree before clamping at zero.
    """
    _check_physical(cm)
    _check_blocks(cm)
    ent = _steering_entropy(cm)
    sch = steering_schur(cm)
    for e, s in zip(ent, sch):
        if abs(e - s) > _SCHUR_AGREEMENT * max(1.0, abs(e)):
            raise UnphysicalState(f"steering forms disagree: {e!r} vs {s!r}")
    g_ab, g_ba = max(0.0, ent[0]), max(0.0, ent[1])
    return SteeringResult(g_ab, g_ba, abs(g_ab - g_ba), classify_steering(g_ab, g_ba, epsilon))
