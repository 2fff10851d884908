import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import constants as const

from iongate import (AxialPotential, ConfigError, PhysicalParams, UnitSystem, b_parameter,
                     make_params, potential_from_b)


def test_defaults_are_yb_baseline():
    p = make_params({})
    assert p.ion_mass == pytest.approx(171 * const.atomic_mass, rel=1e-15)
    assert p.omega_x == pytest.approx(2 * math.pi * 5e6, rel=1e-15)
    assert p.doppler_temperature == pytest.approx(2 * math.pi * 1e7, rel=1e-15)
    assert p.beam_waist == 4e-6
    assert p.coulomb_coupling == pytest.approx(const.e**2 / (4 * math.pi * const.epsilon_0), rel=1e-15)


def test_make_params_explicit_keys():
    p = make_params({"mass_amu": 171, "omega_x_hz": 5e6, "omega_y_hz": 4e6})
    assert p.omega_x == 2 * math.pi * 5e6
    assert p.omega_y == 2 * math.pi * 4e6


def test_temperature_in_kelvin():
    p = make_params({"temperature_k": 1e-3})
    assert p.temperature_kelvin == pytest.approx(1e-3, rel=1e-12)


@pytest.mark.parametrize("config", [
    {"mass_amu": -1},
    {"omega_x_hz": 0},
    {"waist_m": "wide"},
    {"omega_xhz": 5e6},
    {"temperature_k": 1e-3, "temperature_hz": 1e7},
])
def test_make_params_rejects(config):
    with pytest.raises(ConfigError):
        make_params(config)


def test_params_validate_on_construction():
    with pytest.raises(ConfigError):
        PhysicalParams(beam_waist=-1.0)


def test_potential_variants():
    with pytest.raises(ConfigError):
        AxialPotential(alpha2=-1.0, alpha4=0.0)
    with pytest.raises(ConfigError):
        AxialPotential(alpha2=1.0, alpha4=-1.0, kind="quartic")
    assert AxialPotential(alpha2=-1.0, alpha4=2.0).kind == "quartic"


def test_b_parameter_value(params):
    # alpha2 picked so |alpha2/e2|^(2/3) alpha2/alpha4 = -6.1 with alpha4 = e2 / (100 um)^5
    e2 = params.coulomb_coupling
    alpha4 = e2 / (1e-4) ** 5
    alpha2 = -((6.1 * alpha4 * e2 ** (2 / 3)) ** 0.6)
    assert b_parameter(AxialPotential(alpha2, alpha4), params) == pytest.approx(-6.1, rel=1e-12)
    assert b_parameter(AxialPotential(0.0, alpha4, kind="quartic"), params) == 0.0


def test_b_parameter_needs_quartic(params):
    with pytest.raises(ConfigError):
        b_parameter(AxialPotential.harmonic(1e5, params), params)


def test_pure_quartic_from_b(params):
    pot = potential_from_b(0.0, 1e-4, params)
    assert pot.alpha2 == 0.0 and pot.alpha4 > 0


@given(b=st.floats(-50, 50), scale=st.floats(1e-6, 1e-3))
def test_b_round_trip(b, scale):
    params = make_params()
    pot = potential_from_b(b, scale, params)
    assert b_parameter(pot, params) == pytest.approx(b, rel=1e-12, abs=1e-12)
    assert UnitSystem.natural(pot, params).length_unit == pytest.approx(scale, rel=1e-12)


@given(b=st.floats(-50, 50).filter(lambda x: abs(x) > 1e-6))
def test_reduced_quadratic_coefficient(b):
    params = make_params()
    pot = potential_from_b(b, 1e-4, params)
    c2, c4 = UnitSystem.natural(pot, params).potential_coefficients(pot)
    assert c4 == pytest.approx(1.0, rel=1e-12)
    assert c2 == pytest.approx(math.copysign(abs(b) ** 0.6, b), rel=1e-12)


@pytest.mark.parametrize("kind", ["length", "energy", "frequency", "time", "force"])
def test_unit_round_trip(params, kind):
    units = UnitSystem.natural(potential_from_b(-6.1, 1.37e-4, params), params)
    values = np.array([1e-9, 3.3e-6, 2.0, 7.1e5])
    back = units.to_physical(units.to_dimensionless(values, kind), kind)
    np.testing.assert_allclose(back, values, rtol=1e-12)


def test_harmonic_units_make_frequency_unit_omega_z(params):
    omega_z = 2 * math.pi * 1e6
    units = UnitSystem.natural(AxialPotential.harmonic(omega_z, params), params)
    assert units.frequency_unit == pytest.approx(omega_z, rel=1e-13)
