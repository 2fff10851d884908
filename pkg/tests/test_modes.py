import math
from types import SimpleNamespace

import mpmath
import numpy as np
import pytest

from iongate import (AxialPotential, ConfigError, StabilityError, anisotropy_bound_harmonic,
                     axial_position_fluctuation, diagonalize, hessian, lamb_dicke, make_params,
                     solve_equilibrium, stability_threshold_exact, stability_threshold_uniform,
                     thermal_state)
from iongate.modes import ModeSet, transverse_threshold, truncated_modes
from iongate.units import HBAR

OMEGA_Z = 2 * math.pi * 1e6


def harmonic(n, params, omega_z=OMEGA_Z):
    return solve_equilibrium(AxialPotential.harmonic(omega_z, params), params, n, n_edge=0)


def test_two_ion_spectra(params):
    chain = harmonic(2, params)
    x = np.linalg.eigvalsh(hessian(chain, "x"))
    z = np.linalg.eigvalsh(hessian(chain, "z"))
    np.testing.assert_allclose(x, [params.omega_x**2 - OMEGA_Z**2, params.omega_x**2], rtol=1e-10)
    np.testing.assert_allclose(z, [OMEGA_Z**2, 3 * OMEGA_Z**2], rtol=1e-10)
    modes = diagonalize(chain, "x")
    np.testing.assert_allclose(modes.frequencies, np.sqrt(x[::-1]), rtol=1e-12)


def test_three_ion_axial(params):
    z = np.linalg.eigvalsh(hessian(harmonic(3, params), "z")) / OMEGA_Z**2
    np.testing.assert_allclose(z, [1, 3, 29 / 5], rtol=1e-8)


@pytest.mark.parametrize("axis", ["x", "y"])
def test_transverse_is_half_axial_coulomb(baseline, axis):
    chain = baseline.chain
    axial = hessian(chain, "z")
    coulomb = axial - np.diag(chain.potential.force_constant(chain.positions) / chain.params.ion_mass)
    omega_t = chain.params.transverse_frequency(axis)
    expected = omega_t**2 * np.eye(chain.n_ions) - coulomb / 2
    np.testing.assert_allclose(hessian(chain, axis), expected, rtol=0, atol=1e-12 * omega_t**2)


def test_orthonormal_and_residual(baseline):
    for modes in (baseline.transverse, baseline.axial):
        b = modes.vectors
        assert np.abs(b.T @ b - np.eye(len(b))).max() < 1e-9
        a = hessian(baseline.chain, modes.axis)
        resid = np.abs(a @ b - b * modes.frequencies**2).max(axis=0)
        assert np.all(resid < 1e-8 * modes.frequencies**2)


def test_sort_and_sign_convention(baseline):
    assert np.all(np.diff(baseline.transverse.frequencies) <= 0)
    assert np.all(np.diff(baseline.axial.frequencies) >= 0)
    for modes in (baseline.transverse, baseline.axial):
        b = modes.vectors
        mag = np.abs(b)
        first = np.argmax(mag >= mag.max(axis=0) - 1e-9, axis=0)
        assert np.all(b[first, np.arange(b.shape[1])] > 0)


def test_sum_rule(baseline):
    a = hessian(baseline.chain, "x")
    assert np.sum(baseline.transverse.frequencies**2) == pytest.approx(np.trace(a), rel=1e-8)


@pytest.mark.parametrize("n", range(2, 11))
def test_centre_of_mass_modes(params, n):
    chain = harmonic(n, params, 2 * math.pi * 2e5)
    x = diagonalize(chain, "x")
    assert x.frequencies[0] == pytest.approx(params.omega_x, rel=1e-9)
    np.testing.assert_allclose(x.vectors[:, 0], np.full(n, 1 / math.sqrt(n)), rtol=1e-9)
    z = diagonalize(chain, "z")
    assert z.frequencies[0] == pytest.approx(2 * math.pi * 2e5, rel=1e-9)


def test_quartic_transverse_band(baseline):
    omega = baseline.transverse.frequencies
    assert np.all(omega <= baseline.params.omega_x * (1 + 1e-12))
    assert omega.min() / baseline.params.omega_x > 0.99


def test_zigzag_raises(params):
    chain = harmonic(40, params)
    with pytest.raises(StabilityError) as info:
        diagonalize(chain, "x")
    assert info.value.min_eigenvalue < 0


def test_uniform_threshold(params):
    # closed form, with zeta(3) from mpmath and SI constants
    expected = math.sqrt(7 * float(mpmath.zeta(3)) * params.e2_over_m / (2 * (10e-6) ** 3))
    omega = stability_threshold_uniform(10e-6, params)
    assert omega == pytest.approx(expected, rel=1e-14)
    assert omega / (2 * math.pi) == pytest.approx(294.26e3, rel=1e-4)
    assert stability_threshold_uniform(80e-6, params) == pytest.approx(omega * 8**-1.5, rel=1e-13)
    assert 7 * 1.2020569031595943 / 2 == pytest.approx(4.207, abs=1e-3)


def test_exact_threshold_two_ions(params):
    assert stability_threshold_exact(harmonic(2, params)) == pytest.approx(OMEGA_Z, rel=1e-10)


def test_exact_threshold_matches_bisection(baseline):
    # oracle: bisect on omega_x using the StabilityError signal of the full diagonalisation
    chain = baseline.chain
    lo, hi = 2 * math.pi * 1e4, 2 * math.pi * 5e6
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        probe = make_params({"omega_x_hz": mid / (2 * math.pi)})
        try:
            diagonalize(type(chain)(**{**chain.__dict__, "params": probe}), "x")
            hi = mid
        except StabilityError:
            lo = mid
    assert stability_threshold_exact(chain) == pytest.approx(hi, rel=1e-3)
    # measured 306.76 kHz for the optimised chain
    assert stability_threshold_exact(chain) / (2 * math.pi) == pytest.approx(306.76e3, rel=1e-3)


def test_uniform_chain_threshold_from_below(params):
    ratio = transverse_threshold(np.arange(200) * 10e-6, params) / stability_threshold_uniform(10e-6, params)
    assert 0.97 < ratio < 1.0


@pytest.mark.parametrize("n, expected", [(120, 42.2), (10, 5.07)])
def test_anisotropy_bound(n, expected):
    assert anisotropy_bound_harmonic(n) == pytest.approx(expected, abs=0.05)


def test_anisotropy_monotone():
    values = [anisotropy_bound_harmonic(n) for n in range(3, 500)]
    assert np.all(np.diff(values) > 0)


def test_thermal_occupations(baseline):
    th = baseline.thermal_z
    assert th.nbar[0] == pytest.approx(1019.7, rel=1e-3)
    assert np.all(th.beta_bar > 1) and np.all(th.nbar > 0)
    assert np.all(np.diff(th.nbar) <= 0)
    tx = baseline.thermal_x
    assert tx.nbar[0] == pytest.approx(2.0, rel=1e-12)


def test_beta_conventions(baseline, params):
    printed = thermal_state(baseline.transverse, params, "paper")
    standard = thermal_state(baseline.transverse, params, "standard")
    x = baseline.transverse.frequencies / params.doppler_temperature
    np.testing.assert_allclose(printed.beta_bar, 1 / np.tanh(x), rtol=1e-14)
    np.testing.assert_allclose(standard.beta_bar, 1 / np.tanh(x / 2), rtol=1e-14)
    with pytest.raises(ConfigError):
        thermal_state(baseline.transverse, params, "bogus")


def test_zero_temperature_limit(baseline, params):
    th = thermal_state(baseline.transverse, params, temperatures=0.0)
    np.testing.assert_allclose(th.beta_bar, 1.0)


def test_single_mode_fluctuation(params):
    omega = 2 * math.pi * 1e6
    modes = ModeSet("axial", np.array([omega]), np.ones((1, 1)), SimpleNamespace(), np.arange(1))
    th = thermal_state(modes, params, temperatures=0.0)
    dz = axial_position_fluctuation(SimpleNamespace(params=params), modes, th)
    assert dz[0] == pytest.approx(math.sqrt(HBAR / (2 * params.ion_mass * omega)) * 2**0.25, rel=1e-14)


def test_fluctuation_matches_rms(baseline):
    # independent: thermal variance of each ion from the inverse Hessian in the classical limit
    chain = baseline.chain
    th = thermal_state(baseline.axial, chain.params, "standard")
    dz = axial_position_fluctuation(chain, baseline.axial, th)
    kt_over_m = HBAR * chain.params.doppler_temperature / chain.params.ion_mass
    var = kt_over_m * np.diag(np.linalg.inv(hessian(chain, "z")))
    np.testing.assert_allclose(dz, 2**0.25 * np.sqrt(var), rtol=1e-3)


def test_lamb_dicke(params):
    eta = lamb_dicke(params, params.omega_x)
    assert eta == pytest.approx(0.038, abs=5e-4)
    assert lamb_dicke(params, 4 * params.omega_x) == pytest.approx(eta / 2, rel=1e-14)
    heavy = make_params({"mass_amu": 4 * 171})
    assert lamb_dicke(heavy, params.omega_x) == pytest.approx(eta / 2, rel=1e-14)


def test_truncated_modes_full_window(baseline):
    full = truncated_modes(baseline.chain, "x", range(baseline.chain.n_ions))
    np.testing.assert_allclose(full.frequencies, baseline.transverse.frequencies, rtol=1e-14)


def test_truncated_modes_submatrix(baseline):
    window = np.arange(56, 64)
    small = truncated_modes(baseline.chain, "x", window)
    sub = hessian(baseline.chain, "x")[np.ix_(window, window)]
    np.testing.assert_allclose(np.sort(small.frequencies**2), np.linalg.eigvalsh(sub), rtol=1e-13)
    assert small.local_index(58) == 2
    with pytest.raises(ConfigError):
        small.local_index(10)
