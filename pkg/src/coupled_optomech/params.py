"""System parameters, unit handling and derived quantities.

Every angular frequency and rate is stored in rad/s. Values quoted as
``f = omega / 2 pi`` (Hz) must be converted with :func:`angular` before they
enter a :class:`CavityParams`.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .constants import C_LIGHT, HBAR, K_B, TWO_PI
from .errors import InvalidParameters

__all__ = [
    "CavityParams",
    "SystemParams",
    "DerivedParams",
    "NormalizedParams",
    "angular",
    "thermal_occupation",
    "drive_amplitude",
    "single_photon_coupling",
    "derive",
    "normalize",
    "denormalize",
]


def angular(f_hz: float) -> float:
    """Convert an ordinary frequency in Hz to rad/s."""
    return TWO_PI * f_hz


@dataclass(frozen=True)
class CavityParams:
    """One optomechanical cavity: geometry, mirror, bath and drive.

    ``delta0`` is the bare laser detuning ``omega_cav - omega_L``; the
    radiation-pressure shifted detuning is produced by
    :mod:`coupled_optomech.steady_state`.
    """

    length: float  # m
    mass: float  # kg
    wavelength: float  # m
    omega_m: float  # rad/s
    gamma_m: float  # rad/s
    kappa: float  # rad/s
    delta0: float  # rad/s
    power: float  # W
    temperature: float  # K

    def __post_init__(self):
        positive = ("length", "mass", "wavelength", "omega_m", "gamma_m", "kappa")
        for name in positive:
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidParameters(f"{name} must be finite and > 0, got {value!r}")
        for name in ("power", "temperature"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise InvalidParameters(f"{name} must be finite and >= 0, got {value!r}")
        if not math.isfinite(self.delta0):
            raise InvalidParameters(f"delta0 must be finite, got {self.delta0!r}")

    def replace(self, **changes) -> "CavityParams":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class SystemParams:
    """Two cavities linked by photon hopping ``xi`` and phonon tunneling ``eta``."""

    cavity_1: CavityParams
    cavity_2: CavityParams
    xi: float = 0.0  # rad/s
    eta: float = 0.0  # rad/s

    def __post_init__(self):
        for name in ("xi", "eta"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise InvalidParameters(f"{name} must be finite and >= 0, got {value!r}")

    @classmethod
    def symmetric(cls, cavity: CavityParams, xi: float = 0.0, eta: float = 0.0) -> "SystemParams":
        return cls(cavity, cavity, xi, eta)

    @property
    def cavities(self) -> tuple[CavityParams, CavityParams]:
        return (self.cavity_1, self.cavity_2)

    @property
    def omega_ref(self) -> float:
        """Reference frequency for normalization (mechanical frequency of cavity 1)."""
        return self.cavity_1.omega_m

    def per_cavity(self, name: str) -> np.ndarray:
        return np.array([getattr(self.cavity_1, name), getattr(self.cavity_2, name)], dtype=float)

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def replace_both(self, **changes) -> "SystemParams":
        """Apply the same field changes to both cavities."""
        return dataclasses.replace(
            self,
            cavity_1=self.cavity_1.replace(**changes),
            cavity_2=self.cavity_2.replace(**changes),
        )

    def is_symmetric(self, rtol: float = 1e-12) -> bool:
        a, b = self.cavity_1, self.cavity_2
        for f in dataclasses.fields(CavityParams):
            x, y = getattr(a, f.name), getattr(b, f.name)
            if not math.isclose(x, y, rel_tol=rtol, abs_tol=0.0):
                return False
        return True


def thermal_occupation(omega, temperature):
    """Bose-Einstein occupation ``1 / (exp(hbar omega / k_B T) - 1)``.

    Exactly zero at ``T = 0``. Works elementwise on arrays.
    """
    omega = np.asarray(omega, dtype=float)
    temperature = np.asarray(temperature, dtype=float)
    if np.any(omega <= 0):
        raise InvalidParameters("omega must be > 0")
    if np.any(temperature < 0):
        raise InvalidParameters("temperature must be >= 0")
    with np.errstate(divide="ignore", over="ignore"):
        x = np.where(temperature > 0, HBAR * omega / (K_B * np.where(temperature > 0, temperature, 1.0)), np.inf)
        n = 1.0 / np.expm1(x)
    n = np.where(temperature > 0, n, 0.0)
    return float(n) if n.ndim == 0 else n


def drive_amplitude(power: float, kappa: float, wavelength: float) -> float:
    """Drive rate ``E = sqrt(2 P kappa / (hbar omega_L))`` in 1/s."""
    if power < 0 or kappa <= 0 or wavelength <= 0:
        raise InvalidParameters("need power >= 0, kappa > 0, wavelength > 0")
    omega_l = TWO_PI * C_LIGHT / wavelength
    return math.sqrt(2.0 * power * kappa / (HBAR * omega_l))


def single_photon_coupling(wavelength: float, length: float, mass: float, omega_m: float) -> float:
    """Single-photon coupling ``(omega_c / L) sqrt(hbar / (m omega_m))`` in rad/s.

    This is the coupling to the dimensionless mirror position
    ``q = (b + b^dagger) / sqrt(2)``. The ladder-operator coupling that
    multiplies ``a^dagger a (b + b^dagger)`` is smaller by ``sqrt(2)``, see
    :attr:`DerivedParams.g`.
    """
    if min(wavelength, length, mass, omega_m) <= 0:
        raise InvalidParameters("all arguments must be > 0")
    omega_c = TWO_PI * C_LIGHT / wavelength
    return omega_c / length * math.sqrt(HBAR / (mass * omega_m))


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DerivedParams:
    """Quantities computed from :class:`SystemParams`, one entry per cavity.

    Attributes
    ----------
    n_bar : thermal phonon occupation of each mirror bath
    E : drive amplitude (1/s)
    g0 : single-photon coupling to the dimensionless position (rad/s)
    g : ladder-operator radiation-pressure coupling ``g0 / sqrt(2)`` (rad/s)
    omega_c : optical angular frequency (rad/s)
    """

    n_bar: np.ndarray
    E: np.ndarray
    g0: np.ndarray
    g: np.ndarray
    omega_c: np.ndarray


def derive(params: SystemParams) -> DerivedParams:
    n_bar, E, g0, wc = [], [], [], []
    for cav in params.cavities:
        n_bar.append(thermal_occupation(cav.omega_m, cav.temperature))
        E.append(drive_amplitude(cav.power, cav.kappa, cav.wavelength))
        g0.append(single_photon_coupling(cav.wavelength, cav.length, cav.mass, cav.omega_m))
        wc.append(TWO_PI * C_LIGHT / cav.wavelength)
    g0 = np.array(g0)
    return DerivedParams(
        n_bar=_frozen(n_bar),
        E=_frozen(E),
        g0=_frozen(g0),
        g=_frozen(g0 / math.sqrt(2.0)),
        omega_c=_frozen(wc),
    )


_RATE_FIELDS = ("omega_m", "gamma_m", "kappa", "delta0")
_PLAIN_FIELDS = ("length", "mass", "wavelength", "power", "temperature")


@dataclass(frozen=True)
class NormalizedParams:
    """Rates divided by the mechanical frequency of cavity 1.

    ``cavities`` holds one dict per cavity: rate fields are dimensionless,
    the remaining fields are copied unchanged. ``E`` and ``g0`` are the
    derived drive and coupling in the same units.
    """

    omega_ref: float
    cavities: tuple[dict, dict]
    xi: float
    eta: float
    E: tuple[float, float]
    g0: tuple[float, float]


def normalize(params: SystemParams, derived: DerivedParams | None = None) -> NormalizedParams:
    derived = derive(params) if derived is None else derived
    w = params.omega_ref
    cavs = []
    for cav in params.cavities:
        d = {name: getattr(cav, name) / w for name in _RATE_FIELDS}
        d.update({name: getattr(cav, name) for name in _PLAIN_FIELDS})
        cavs.append(d)
    return NormalizedParams(
        omega_ref=w,
        cavities=(cavs[0], cavs[1]),
        xi=params.xi / w,
        eta=params.eta / w,
        E=tuple(float(x) for x in derived.E / w),
        g0=tuple(float(x) for x in derived.g0 / w),
    )


def denormalize(norm: NormalizedParams) -> SystemParams:
    w = norm.omega_ref
    cavs = []
    for d in norm.cavities:
        kw = {name: d[name] * w for name in _RATE_FIELDS}
        kw.update({name: d[name] for name in _PLAIN_FIELDS})
        cavs.append(CavityParams(**kw))
    return SystemParams(cavs[0], cavs[1], xi=norm.xi * w, eta=norm.eta * w)
