"""Classical mean-field steady state of the two driven cavities.

The stationary amplitudes obey

    b_j = (i g_j n_j beta_k - eta g_k n_k) / (beta_1 beta_2 + eta^2)
    a_j = (alpha_k E_j + i xi E_k) / (alpha_1 alpha_2 + xi^2)

with ``k = 3 - j``, ``n_j = |a_j|^2``, ``beta_j = gamma_j + i omega_j`` and
``alpha_j = kappa_j + i Delta_j``. The effective detuning
``Delta_j = Delta0_j - 2 g_j Re(b_j)`` closes the loop, which makes the
problem a cubic-type nonlinearity with possible multistability.

Three ways to obtain an operating point are offered:

* :func:`solve_fixed_point` -- bare detuning given, self-consistent solve;
* :func:`pinned_fixed_point` -- effective detuning given (what a laser lock
  on the shifted resonance does); the field follows in closed form;
* :func:`coupling_fixed_point` -- effective coupling ``G`` given directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameters, NonConvergence
from .params import DerivedParams, SystemParams, derive

__all__ = [
    "ClassicalFixedPoint",
    "FixedPointOptions",
    "solve_fixed_point",
    "pinned_fixed_point",
    "coupling_fixed_point",
    "effective_coupling",
    "implied_bare_detuning",
    "mirror_amplitude",
    "field_amplitude",
]


@dataclass(frozen=True)
class FixedPointOptions:
    tol: float = 1e-12
    max_iter: int = 10_000
    damping: float = 0.5
    continuation_steps: int = 32

    def __post_init__(self):
        if not self.tol > 0:
            raise InvalidParameters("tol must be > 0")
        if not 0 < self.damping <= 1:
            raise InvalidParameters("damping must lie in (0, 1]")
        if self.max_iter < 1 or self.continuation_steps < 1:
            raise InvalidParameters("max_iter and continuation_steps must be >= 1")


@dataclass(frozen=True)
class ClassicalFixedPoint:
    """Stationary mean fields, one entry per cavity.

    ``delta_eff`` is stored exactly as ``delta0 - 2 g Re(b_s)`` for points
    returned by :func:`solve_fixed_point`.
    """

    a_s: np.ndarray  # complex
    b_s: np.ndarray  # complex
    delta_eff: np.ndarray  # rad/s
    G: np.ndarray  # rad/s, 2 g |a_s|
    iterations: int = 0
    residual: float = 0.0


def _readonly(x, dtype):
    arr = np.array(x, dtype=dtype)
    arr.setflags(write=False)
    return arr


def _make(a, b, delta, g, iterations=0, residual=0.0) -> ClassicalFixedPoint:
    a = _readonly(a, complex)
    return ClassicalFixedPoint(
        a_s=a,
        b_s=_readonly(b, complex),
        delta_eff=_readonly(delta, float),
        G=_readonly(2.0 * np.asarray(g) * np.abs(a), float),
        iterations=iterations,
        residual=float(residual),
    )


def mirror_amplitude(params: SystemParams, g: np.ndarray, n: np.ndarray) -> np.ndarray:
    """Stationary mechanical amplitudes for intracavity photon numbers ``n``."""
    beta = params.per_cavity("gamma_m") + 1j * params.per_cavity("omega_m")
    eta = params.eta
    den = beta[0] * beta[1] + eta**2
    b1 = (1j * g[0] * n[0] * beta[1] - eta * g[1] * n[1]) / den
    b2 = (1j * g[1] * n[1] * beta[0] - eta * g[0] * n[0]) / den
    return np.array([b1, b2])


def field_amplitude(params: SystemParams, E: np.ndarray, delta: np.ndarray) -> np.ndarray:
    """Stationary intracavity amplitudes for effective detunings ``delta``."""
    alpha = params.per_cavity("kappa") + 1j * np.asarray(delta, dtype=float)
    xi = params.xi
    den = alpha[0] * alpha[1] + xi**2
    a1 = (alpha[1] * E[0] + 1j * xi * E[1]) / den
    a2 = (alpha[0] * E[1] + 1j * xi * E[0]) / den
    return np.array([a1, a2])


def _relative_change(new, old) -> float:
    scale = np.maximum(np.abs(new), np.abs(old))
    diff = np.abs(new - old)
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.where(scale > 0, diff / scale, 0.0)
    return float(np.max(rel))


def _iterate(params, E, g, delta0, a, b, opts, budget):
    d = opts.damping
    for it in range(1, budget + 1):
        b_new = mirror_amplitude(params, g, np.abs(a) ** 2)
        delta = delta0 - 2.0 * g * b_new.real
        a_new = field_amplitude(params, E, delta)
        res = max(_relative_change(a_new, a), _relative_change(b_new, b))
        a = (1.0 - d) * a + d * a_new
        b = (1.0 - d) * b + d * b_new
        if res <= opts.tol:
            return a, b, it
    raise NonConvergence(
        f"fixed-point iteration did not converge within {budget} iterations "
        f"(last relative change {res:.3e}); try a smaller damping"
    )


def solve_fixed_point(
    params: SystemParams,
    derived: DerivedParams | None = None,
    opts: FixedPointOptions | None = None,
) -> ClassicalFixedPoint:
    """Self-consistent steady state at the bare detunings ``cavity_j.delta0``.

    The branch connected to zero drive is followed by ramping the power
    geometrically from ``1e-6 P`` to ``P`` and warm-starting each solve.
    ``max_iter`` bounds the total number of iterations over the ramp.
    """
    derived = derive(params) if derived is None else derived
    opts = FixedPointOptions() if opts is None else opts
    E = np.asarray(derived.E, dtype=float)
    g = np.asarray(derived.g, dtype=float)
    delta0 = params.per_cavity("delta0")
    if not np.any(E > 0):
        return _make(np.zeros(2), np.zeros(2), delta0, g)

    a = np.zeros(2, dtype=complex)
    b = np.zeros(2, dtype=complex)
    total = 0
    fractions = np.geomspace(1e-6, 1.0, opts.continuation_steps) if opts.continuation_steps > 1 else [1.0]
    for frac in fractions:
        a, b, used = _iterate(params, E * np.sqrt(frac), g, delta0, a, b, opts, opts.max_iter - total)
        total += used

    # Store a consistent triple: b from a, delta from b, then check a.
    b = mirror_amplitude(params, g, np.abs(a) ** 2)
    delta = delta0 - 2.0 * g * b.real
    a_chk = field_amplitude(params, E, delta)
    residual = _relative_change(a_chk, a)
    if residual > opts.tol:
        a = a_chk
        b = mirror_amplitude(params, g, np.abs(a) ** 2)
        delta = delta0 - 2.0 * g * b.real
        residual = max(
            _relative_change(field_amplitude(params, E, delta), a),
            _relative_change(mirror_amplitude(params, g, np.abs(a) ** 2), b),
        )
        if residual > opts.tol:
            raise NonConvergence(f"final residual {residual:.3e} exceeds tol {opts.tol:.1e}")
    return _make(a, b, delta, g, iterations=total, residual=residual)


def pinned_fixed_point(
    params: SystemParams,
    delta_eff,
    derived: DerivedParams | None = None,
) -> ClassicalFixedPoint:
    """Steady state with the shifted detunings held at ``delta_eff`` (rad/s).

    No iteration is needed: the field follows from the linear equation at
    fixed detuning, the mirror displacement from the field. The bare
    detuning that produces this point is :func:`implied_bare_detuning`.
    """
    derived = derive(params) if derived is None else derived
    delta_eff = np.broadcast_to(np.asarray(delta_eff, dtype=float), (2,))
    g = np.asarray(derived.g, dtype=float)
    a = field_amplitude(params, np.asarray(derived.E, dtype=float), delta_eff)
    b = mirror_amplitude(params, g, np.abs(a) ** 2)
    return _make(a, b, delta_eff, g)


def coupling_fixed_point(
    params: SystemParams,
    G,
    delta_eff,
    derived: DerivedParams | None = None,
) -> ClassicalFixedPoint:
    """Operating point specified by the effective coupling ``G`` directly.

    The field amplitude is taken real, ``a_s = G / (2 g)``; the drive that
    would produce it is not needed by the linearized dynamics.
    """
    derived = derive(params) if derived is None else derived
    G = np.broadcast_to(np.asarray(G, dtype=float), (2,))
    if np.any(G < 0):
        raise InvalidParameters("G must be >= 0")
    delta_eff = np.broadcast_to(np.asarray(delta_eff, dtype=float), (2,))
    g = np.asarray(derived.g, dtype=float)
    a = (G / (2.0 * g)).astype(complex)
    b = mirror_amplitude(params, g, np.abs(a) ** 2)
    return _make(a, b, delta_eff, g)


def effective_coupling(fp: ClassicalFixedPoint, derived: DerivedParams) -> np.ndarray:
    """``G_j = 2 g_j |a_j|`` in rad/s (magnitude; the optical phase is a local gauge)."""
    return 2.0 * np.asarray(derived.g) * np.abs(fp.a_s)


def implied_bare_detuning(fp: ClassicalFixedPoint, derived: DerivedParams) -> np.ndarray:
    return fp.delta_eff + 2.0 * np.asarray(derived.g) * fp.b_s.real
