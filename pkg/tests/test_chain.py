import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from iongate import (AxialPotential, BoundaryMinimumError, ConfigError, UnitSystem, make_params,
                     optimize_b, potential_from_b, quartic_chain, solve_equilibrium, spacing_stats)
from iongate.chain import reduced_gradient, window_stats

# 4-ion harmonic equilibrium in units of (e2 / m w_z^2)^(1/3), from mpmath.findroot at 30 digits
FOUR_ION = (0.45437928068567089882, 1.43680199192417546045)


def harmonic_chain(n, params, omega_z=2 * math.pi * 1e6):
    return solve_equilibrium(AxialPotential.harmonic(omega_z, params), params, n, n_edge=0)


def harmonic_length(params, omega_z=2 * math.pi * 1e6):
    return (params.e2_over_m / omega_z**2) ** (1 / 3)


def test_two_ions(params):
    z = harmonic_chain(2, params).positions
    assert z[1] - z[0] == pytest.approx(2 ** (1 / 3) * harmonic_length(params), rel=1e-10)


def test_three_ions(params):
    z = harmonic_chain(3, params).positions / harmonic_length(params)
    np.testing.assert_allclose(z, [-(5 / 4) ** (1 / 3), 0.0, (5 / 4) ** (1 / 3)], rtol=1e-10, atol=1e-12)


def test_four_ions(params):
    z = harmonic_chain(4, params).positions / harmonic_length(params)
    a, b = FOUR_ION
    np.testing.assert_allclose(z, [-b, -a, a, b], rtol=1e-8)


def test_residual_and_mirror_symmetry(baseline):
    chain = baseline.chain
    u = chain.reduced_positions
    c2, c4 = chain.units.potential_coefficients(chain.potential)
    assert np.max(np.abs(reduced_gradient(u, c2, c4))) < 1e-10
    assert np.all(np.diff(chain.positions) > 0)
    np.testing.assert_allclose(u, -u[::-1], atol=1e-8)


def test_energy_decreases_during_newton(params):
    pot = potential_from_b(-6.1, 1.4e-4, params)
    chain = solve_equilibrium(pot, params, 120)
    e = np.array(chain.energy_history)
    assert chain.iterations <= 30
    assert np.all(np.diff(e) <= 16 * np.finfo(float).eps * np.abs(e[:-1]))


def test_scaling_covariance(params):
    # doubling the unit length at fixed B doubles every position
    small = solve_equilibrium(potential_from_b(-4.0, 5e-5, params), params, 40)
    large = solve_equilibrium(potential_from_b(-4.0, 1e-4, params), params, 40)
    np.testing.assert_allclose(large.positions, 2 * small.positions, rtol=1e-10)


def test_unit_system_independence(params):
    pot = potential_from_b(-6.1, 1.4e-4, params)
    natural = solve_equilibrium(pot, params, 60)
    other = solve_equilibrium(pot, params, 60, units=UnitSystem.from_length(2.3e-5, params))
    np.testing.assert_allclose(other.positions, natural.positions, rtol=1e-10)


def test_si_force_balance(params):
    pot = potential_from_b(-6.1, 1.4e-4, params)
    z = solve_equilibrium(pot, params, 30).positions
    e2 = params.coulomb_coupling
    d = z[:, None] - z[None, :]
    np.fill_diagonal(d, np.inf)
    coulomb = e2 * np.sum(np.sign(d) / d**2, axis=1)
    trap = pot.alpha2 * z + pot.alpha4 * z**3
    np.testing.assert_allclose(trap, coulomb, rtol=1e-9, atol=1e-12 * np.abs(coulomb).max())


def test_initial_guess_is_used(params):
    pot = potential_from_b(-3.0, 1e-4, params)
    ref = solve_equilibrium(pot, params, 20)
    again = solve_equilibrium(pot, params, 20, initial_guess=ref.positions)
    assert again.iterations == 0
    with pytest.raises(ConfigError):
        solve_equilibrium(pot, params, 20, initial_guess=ref.positions[::-1])


def test_rejects_bad_sizes(params):
    pot = potential_from_b(-3.0, 1e-4, params)
    with pytest.raises(ConfigError):
        solve_equilibrium(pot, params, 1)
    with pytest.raises(ConfigError):
        solve_equilibrium(pot, params, 20, n_edge=10)


def test_uniform_positions_have_zero_spread():
    stats = window_stats(np.arange(30) * 7e-6, 5)
    assert stats.s_z == pytest.approx(0.0, abs=1e-20)
    assert stats.qubit_mean == pytest.approx(7e-6)


def test_window_convention(baseline):
    stats = spacing_stats(baseline.chain)
    assert len(stats.spacings) == 119
    window = stats.spacings[10:109]
    assert stats.qubit_mean == pytest.approx(window.mean(), rel=1e-14)
    assert stats.s_z == pytest.approx(np.sqrt(np.mean((window - window.mean()) ** 2)), rel=1e-12)


def test_harmonic_chain_is_not_uniform(params):
    chain = solve_equilibrium(AxialPotential.harmonic(2 * math.pi * 1e4, params), params, 120, n_edge=10)
    # measured: 0.1239
    assert spacing_stats(chain).relative_deviation == pytest.approx(0.1239, abs=5e-4)


def test_quartic_chain_spacing_by_bisection(params):
    # independent route: bisect on the unit length with full solves until the mean spacing is 10 um
    direct = quartic_chain(-6.1, 10e-6, params, 120, 10)

    def mean_spacing(scale):
        chain = solve_equilibrium(potential_from_b(-6.1, scale, params), params, 120, n_edge=10)
        return spacing_stats(chain).qubit_mean

    lo, hi = 1e-5, 1e-3
    for _ in range(60):
        mid = math.sqrt(lo * hi)
        lo, hi = (mid, hi) if mean_spacing(mid) < 10e-6 else (lo, mid)
    assert direct.units.length_unit == pytest.approx(lo, rel=1e-10)
    assert direct.potential.alpha2 < 0 < direct.potential.alpha4


def test_small_chain_b_optimum(params):
    b_opt, curve = optimize_b(params, 4, 0, (-12.0, 4.0))
    grid = np.array(curve)
    best = quartic_chain(b_opt, 10e-6, params, 4, 0)
    assert spacing_stats(best).s_z <= grid[:, 1].min() * (1 + 1e-9)
    assert b_opt == pytest.approx(1.293, abs=2e-3)


def test_boundary_minimum_is_reported(params):
    with pytest.raises(BoundaryMinimumError) as info:
        optimize_b(params, 120, 10, (-30.0, -15.0))
    assert info.value.value == -15.0
    assert len(info.value.curve) >= 50


def test_b_range_validation(params):
    with pytest.raises(ConfigError):
        optimize_b(params, 10, 2, (1.0, -1.0))


@settings(max_examples=15, deadline=None)
@given(b=st.floats(-10, 3), n=st.integers(2, 40))
def test_solver_invariants(b, n):
    params = make_params()
    chain = quartic_chain(b, 10e-6, params, n, 0)
    u = chain.reduced_positions
    c2, c4 = chain.units.potential_coefficients(chain.potential)
    assert np.all(np.diff(u) > 0)
    assert np.max(np.abs(reduced_gradient(u, c2, c4))) < 1e-10
    np.testing.assert_allclose(u, -u[::-1], atol=1e-8)
    assert spacing_stats(chain).relative_deviation < 1
