import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coupled_optomech.constants import HBAR, K_B
from coupled_optomech.errors import InvalidParameters
from coupled_optomech.params import (
    CavityParams,
    SystemParams,
    angular,
    denormalize,
    derive,
    drive_amplitude,
    normalize,
    single_photon_coupling,
    thermal_occupation,
)

WM = angular(10e6)
KAPPA = angular(14e6)

# frozen with 40-digit mpmath evaluations of the closed forms
NBAR_04K = 832.96486491733122
NBAR_20K = 41672.738248654831
E_35MW = 5010800536889.2606
G0_REF = 1347.344632566003


def base_cavity(**kw):
    vals = dict(
        length=1e-3,
        mass=5e-12,
        wavelength=810e-9,
        omega_m=WM,
        gamma_m=angular(100.0),
        kappa=KAPPA,
        delta0=WM,
        power=35e-3,
        temperature=0.4,
    )
    vals.update(kw)
    return CavityParams(**vals)


def test_thermal_occupation_reference_values():
    assert thermal_occupation(WM, 0.4) == pytest.approx(NBAR_04K, rel=1e-12)
    assert thermal_occupation(WM, 20.0) == pytest.approx(NBAR_20K, rel=1e-12)


def test_thermal_occupation_zero_temperature():
    assert thermal_occupation(WM, 0.0) == 0.0
    assert thermal_occupation(1e3, 0.0) == 0.0


def test_thermal_occupation_rejects_bad_input():
    with pytest.raises(InvalidParameters):
        thermal_occupation(-1.0, 1.0)
    with pytest.raises(InvalidParameters):
        thermal_occupation(WM, -0.1)


@given(
    w=st.floats(1e3, 1e12),
    t=st.floats(1e-3, 1e3),
    f=st.floats(1.01, 10.0),
)
def test_thermal_occupation_monotone(w, t, f):
    n = thermal_occupation(w, t)
    if n > 1e-300:
        assert thermal_occupation(w * f, t) < n
        assert thermal_occupation(w, t * f) > n


@given(x=st.floats(1e-9, 1e-3))
def test_thermal_occupation_high_temperature_asymptote(x):
    T = 1.0
    w = x * K_B * T / HBAR
    n = thermal_occupation(w, T)
    assert n == pytest.approx(1.0 / x - 0.5, rel=1e-6)


def test_drive_amplitude_values():
    assert drive_amplitude(35e-3, KAPPA, 810e-9) == pytest.approx(E_35MW, rel=1e-12)
    assert drive_amplitude(0.0, KAPPA, 810e-9) == 0.0
    assert drive_amplitude(4 * 35e-3, KAPPA, 810e-9) == pytest.approx(2 * E_35MW, rel=1e-15)


@given(p=st.floats(1e-9, 10.0), k=st.floats(1e3, 1e10), lam=st.floats(1e-7, 1e-5))
def test_drive_amplitude_sqrt_scaling(p, k, lam):
    assert drive_amplitude(4 * p, k, lam) == pytest.approx(2 * drive_amplitude(p, k, lam), rel=4e-16)


def test_single_photon_coupling_reference():
    g0 = single_photon_coupling(810e-9, 1e-3, 5e-12, WM)
    assert g0 == pytest.approx(G0_REF, rel=1e-12)
    assert g0 / WM == pytest.approx(2.1e-5, rel=0.05)


def test_single_photon_coupling_scalings():
    g0 = single_photon_coupling(810e-9, 1e-3, 5e-12, WM)
    assert single_photon_coupling(810e-9, 1e-3, 4 * 5e-12, WM) == pytest.approx(g0 / 2, rel=1e-15)
    assert single_photon_coupling(810e-9, 2e-3, 5e-12, WM) == pytest.approx(g0 / 2, rel=1e-15)


def test_derived_ladder_coupling():
    d = derive(SystemParams.symmetric(base_cavity()))
    np.testing.assert_allclose(d.g, d.g0 / math.sqrt(2), rtol=1e-15)
    np.testing.assert_allclose(d.n_bar, NBAR_04K, rtol=1e-12)
    with pytest.raises(ValueError):
        d.E[0] = 1.0


def test_normalize_reference_ratios():
    n = normalize(SystemParams.symmetric(base_cavity()))
    c = n.cavities[0]
    assert c["kappa"] == pytest.approx(1.4, rel=1e-15)
    assert c["gamma_m"] == pytest.approx(1e-5, rel=1e-15)
    assert c["omega_m"] == 1.0


@settings(max_examples=50)
@given(
    f=st.floats(1e5, 1e8),
    k=st.floats(0.01, 10.0),
    d=st.floats(-3.0, 3.0),
    xi=st.floats(0.0, 2.0),
    eta=st.floats(0.0, 2.0),
    t=st.floats(0.0, 300.0),
)
def test_normalize_round_trip(f, k, d, xi, eta, t):
    w = angular(f)
    cav1 = base_cavity(omega_m=w, kappa=k * w, delta0=d * w, temperature=t)
    cav2 = base_cavity(omega_m=1.3 * w, kappa=0.5 * k * w)
    p = SystemParams(cav1, cav2, xi * w, eta * w)
    back = denormalize(normalize(p))
    for a, b in zip(p.cavities, back.cavities):
        for name in CavityParams.__dataclass_fields__:
            assert getattr(b, name) == pytest.approx(getattr(a, name), rel=1e-14, abs=1e-300)
    assert back.xi == pytest.approx(p.xi, rel=1e-14, abs=1e-300)
    assert back.eta == pytest.approx(p.eta, rel=1e-14, abs=1e-300)


@pytest.mark.parametrize(
    "field, value",
    [("omega_m", 0.0), ("kappa", -1.0), ("gamma_m", 0.0), ("mass", -1.0), ("length", 0.0),
     ("wavelength", float("nan")), ("temperature", -1.0), ("power", -1e-3), ("delta0", float("inf"))],
)  # fmt: skip
def test_cavity_validation(field, value):
    with pytest.raises(InvalidParameters):
        base_cavity(**{field: value})


def test_negative_hopping_rejected():
    with pytest.raises(InvalidParameters):
        SystemParams.symmetric(base_cavity(), xi=-1.0)
    with pytest.raises(InvalidParameters):
        SystemParams.symmetric(base_cavity(), eta=-1.0)


def test_symmetry_helpers():
    p = SystemParams.symmetric(base_cavity(), 1.0, 2.0)
    assert p.is_symmetric()
    q = p.replace(cavity_2=base_cavity(kappa=2 * KAPPA))
    assert not q.is_symmetric()
    r = q.replace_both(power=1e-3)
    assert r.cavity_1.power == r.cavity_2.power == 1e-3
    np.testing.assert_array_equal(q.per_cavity("kappa"), [KAPPA, 2 * KAPPA])
