import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from xeit.errors import ConfigError
from xeit.params import (
    UNITS,
    CavityParams,
    HyperfineField,
    NaturalUnits,
    delta_c_from_angle,
    derive_collective,
    group_velocity,
    mixing_angle,
    phi_from_field,
)


def test_natural_units_fixed():
    assert (UNITS.gamma, UNITS.tau0, UNITS.c_scaled) == (1.0, 1.0, 1.0)
    with pytest.raises(ConfigError):
        NaturalUnits(gamma=2.0)
    assert NaturalUnits.ns_to_tau0(141.0) == 1.0


def test_phi_calibration():
    assert phi_from_field(6.4) == pytest.approx(6.0, rel=1e-15)
    assert phi_from_field(0.0) == 0.0
    np.testing.assert_allclose(phi_from_field(np.array([3.2, 12.8])), [3.0, 12.0], rtol=1e-15)
    with pytest.raises(ConfigError):
        phi_from_field(-1.0)


def test_field_split_and_orientation():
    f = HyperfineField(6.4)
    assert f.phi == pytest.approx(6.0) and f.delta_g == f.delta_e
    f2 = HyperfineField(6.4, -1, delta_g=4.0, delta_e=8.0)
    assert f2.phi == pytest.approx(6.0)
    with pytest.raises(ConfigError):
        HyperfineField(6.4, 0)
    with pytest.raises(ConfigError):
        HyperfineField(6.4, delta_g=4.0)
    with pytest.raises(ConfigError):
        HyperfineField(6.4, delta_g=1.0, delta_e=1.0)


def test_cavity_validation():
    with pytest.raises(ConfigError):
        CavityParams(kappa=1.0, kappa_R=2.0)
    with pytest.raises(ConfigError):
        CavityParams(kappa=-1.0, kappa_R=0.5)
    with pytest.raises(ConfigError, match="bad-cavity"):
        CavityParams(kappa=100.0, kappa_R=50.0, g=20.0)
    # guard can be relaxed explicitly
    CavityParams(kappa=100.0, kappa_R=50.0, g=20.0, bad_cavity_ratio=0.0)


def test_collective_quantities_closed_form(eit_params):
    cq = derive_collective(eit_params)
    # 1 + (4/3) * 2500^2 / 4.6e5
    assert cq.gamma_prime == pytest.approx(1 + 4 / 3 * 6.25e6 / 4.6e5, rel=1e-14)
    assert cq.gamma_prime == pytest.approx(19.116, abs=1e-3)
    assert cq.delta_ls == 0.0
    assert cq.omega_drive == pytest.approx(math.sqrt(6.2e5) / 4.6e5, rel=1e-14)


def test_collective_detuned_cavity():
    p = CavityParams(kappa=4.6e5, kappa_R=3.1e5, delta_c=2.0e5, g=2500.0)
    cq = derive_collective(p)
    d = 4.6e5**2 + 2.0e5**2
    assert cq.zeta_s == pytest.approx(4.6e5 / d)
    assert cq.delta_ls == pytest.approx(-2.0e5 / d)


def test_desk_velocity():
    # 1 / (1 + 2*100/(3*36)) = 108/308
    assert group_velocity(6.0, 10.0, 1) == pytest.approx(108 / 308, rel=1e-15)
    assert group_velocity(0.0, 10.0, 1) == 0.0
    assert group_velocity(6.0, 0.0, 1) == 1.0


def test_mixing_angle_limits():
    assert mixing_angle(0.0, 10.0, 1) == (0.0, 1.0)
    assert mixing_angle(5.0, 0.0, 1) == (1.0, 0.0)
    with pytest.raises(ConfigError):
        mixing_angle(0.0, 0.0, 1)


@given(st.floats(0.0, 1e4), st.floats(1e-3, 1e3), st.floats(1.0, 1e6))
def test_pythagoras(phi, g, n):
    c, s = mixing_angle(phi, g, n)
    assert abs(c * c + s * s - 1.0) <= 1e-14
    assert c * c == pytest.approx(group_velocity(phi, g, n), rel=1e-12, abs=1e-300)


@given(st.floats(0.0, 100.0), st.floats(0.0, 100.0))
def test_velocity_monotone_in_phi(a, b):
    lo, hi = sorted((a, b))
    assert group_velocity(lo, 10.0, 1) <= group_velocity(hi, 10.0, 1)


def test_delta_c_from_angle():
    assert delta_c_from_angle(3466.0, 5.0) == 0.0
    assert delta_c_from_angle(3476.0, 5.0) == 50.0
