"""Axial equilibrium of a linear ion chain and spacing statistics."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import BoundaryMinimumError, ConfigError, ConvergenceError, OrderingError
from .units import (AxialPotential, PhysicalParams, UnitSystem, potential_from_b,
                    reduced_quadratic)

FORCE_TOL = 1e-10
MAX_ITER = 500
DEFAULT_EDGE = 10


def default_edge(n_ions: int) -> int:
    return min(DEFAULT_EDGE, max(0, (n_ions - 2) // 2))


@dataclass(frozen=True, eq=False)
class IonChain:
    """Equilibrium axial positions (metres, strictly increasing)."""

    n_ions: int
    n_edge: int
    positions: np.ndarray
    potential: AxialPotential
    params: PhysicalParams
    units: UnitSystem
    iterations: int = 0
    energy_history: tuple = ()

    @property
    def reduced_positions(self) -> np.ndarray:
        return self.units.to_dimensionless(self.positions, "length")

    @property
    def qubit_slice(self) -> slice:
        """Ion indices (0-based) of the computational ions."""
        return slice(self.n_edge, self.n_ions - self.n_edge)


@dataclass(frozen=True)
class SpacingStats:
    spacings: np.ndarray
    qubit_mean: float
    s_z: float
    relative_deviation: float


def _pair_terms(u):
    d = u[:, None] - u[None, :]
    np.fill_diagonal(d, np.inf)
    return d


def reduced_energy(u, c2, c4):
    d = u[:, None] - u[None, :]
    iu = np.triu_indices(len(u), 1)
    return float(np.sum(c2 * u**2 / 2 + c4 * u**4 / 4) + np.sum(1.0 / np.abs(d[iu])))


def reduced_gradient(u, c2, c4):
    d = _pair_terms(u)
    return c2 * u + c4 * u**3 - np.sum(np.sign(d) / d**2, axis=1)


def coulomb_curvature(u):
    """Matrix ``K`` with ``K_in = 2/|u_i-u_n|^3`` off-diagonal and zero diagonal."""
    d = _pair_terms(u)
    return 2.0 / np.abs(d) ** 3


def reduced_axial_hessian(u, c2, c4):
    k = coulomb_curvature(u)
    h = -k
    h[np.diag_indices_from(h)] = c2 + 3 * c4 * u**2 + k.sum(axis=1)
    return h


def _extent_guess(n, c2, c4):
    # outermost ion balances the trap against a uniformly spaced chain behind it
    pull = np.sum(1.0 / np.arange(1, n) ** 2) * (n - 1) ** 2 / 4

    def balance(half):
        return c2 * half + c4 * half**3 - pull / half**2

    lo = math.sqrt(max(-c2 / c4, 0.0)) if c4 > 0 else 0.0
    lo = max(lo, 1e-6)
    hi = 2 * lo + 1.0
    while balance(hi) <= 0:
        hi *= 2
    return brentq(balance, lo, hi, xtol=1e-12)


def _force_noise(u):
    """Rounding floor of the net force: a few hundred ulps of the largest one-sided Coulomb push."""
    d = _pair_terms(u)
    push = np.sum(1.0 / d**2, axis=1)
    return 256 * np.finfo(float).eps * float(push.max())


def initial_positions(n, c2, c4):
    if n == 1:
        return np.zeros(1)
    half = _extent_guess(n, c2, c4)
    return np.linspace(-half, half, n)


def _solve_reduced(c2, c4, n, u0=None, tol=FORCE_TOL, max_iter=MAX_ITER):
    """Damped Newton with an exact Hessian; backtracks to keep order and lower energy."""
    u = initial_positions(n, c2, c4) if u0 is None else np.array(u0, dtype=float)
    if u.shape != (n,) or np.any(np.diff(u) <= 0):
        raise ConfigError("initial guess must be a strictly increasing list of n positions")
    energy = reduced_energy(u, c2, c4)
    history = [energy]
    eps = np.finfo(float).eps
    for it in range(max_iter + 1):
        g = reduced_gradient(u, c2, c4)
        gmax = np.max(np.abs(g))
        if gmax < max(tol, _force_noise(u)):
            return u, it, history
        if it == max_iter:
            break
        h = reduced_axial_hessian(u, c2, c4)
        try:
            chol = np.linalg.cholesky(h)
            step = -np.linalg.solve(chol.T, np.linalg.solve(chol, g))
        except np.linalg.LinAlgError:
            step = -g / np.max(np.abs(np.diag(h)))
        slope = float(g @ step)
        t = 1.0
        for _ in range(80):
            trial = u + t * step
            if np.all(np.diff(trial) > 0):
                e_trial = reduced_energy(trial, c2, c4)
                if e_trial <= energy + 1e-4 * t * slope:
                    break
                # near the solution the energy change drowns in rounding
                if (e_trial - energy <= 16 * eps * abs(energy)
                        and np.max(np.abs(reduced_gradient(trial, c2, c4))) < gmax):
                    break
            t *= 0.5
        else:
            if not np.all(np.diff(u + t * step) > 0):
                raise OrderingError("ion ordering collapsed during line search")
            raise ConvergenceError(f"line search failed at iteration {it}, max force {gmax:.3e}")
        u, energy = trial, e_trial
        history.append(energy)
    raise ConvergenceError(f"no convergence in {max_iter} iterations (max force {gmax:.3e})")


def solve_equilibrium(pot: AxialPotential, params: PhysicalParams, n_ions: int,
                      initial_guess=None, n_edge: int | None = None,
                      units: UnitSystem | None = None) -> IonChain:
    """Solve ``dU/dz_i = 0`` for ``n_ions`` ions in ``pot``.

    The solve runs in the trap's natural units unless ``units`` is given.
    ``initial_guess`` is in metres.
    """
    if n_ions < 2:
        raise ConfigError("need at least two ions")
    if n_edge is None:
        n_edge = default_edge(n_ions)
    if n_edge < 0 or n_ions - 2 * n_edge < 2:
        raise ConfigError(f"n_edge={n_edge} leaves no qubit spacings in a {n_ions}-ion chain")
    units = units or UnitSystem.natural(pot, params)
    c2, c4 = units.potential_coefficients(pot)
    u0 = None if initial_guess is None else units.to_dimensionless(np.asarray(initial_guess, float), "length")
    u, iterations, history = _solve_reduced(c2, c4, n_ions, u0)
    return IonChain(n_ions=n_ions, n_edge=n_edge, positions=units.to_physical(u, "length"),
                    potential=pot, params=params, units=units, iterations=iterations,
                    energy_history=tuple(history))


def window_stats(positions, n_edge: int) -> SpacingStats:
    spacings = np.diff(np.asarray(positions, dtype=float))
    window = spacings[n_edge:len(spacings) - n_edge]
    mean = float(window.mean())
    s_z = float(window.std())
    return SpacingStats(spacings=spacings, qubit_mean=mean, s_z=s_z,
                        relative_deviation=s_z / mean)


def spacing_stats(chain: IonChain) -> SpacingStats:
    """Spacing statistics over the qubit window.

    The window covers spacing indices ``n_edge .. N-n_edge-2`` (0-based), i.e.
    the gaps between consecutive computational ions.
    """
    return window_stats(chain.positions, chain.n_edge)


def _relative_deviation(b, n_ions, n_edge):
    u, _, _ = _solve_reduced(reduced_quadratic(b), 1.0, n_ions)
    return window_stats(u, n_edge).relative_deviation


def quartic_chain(b: float, mean_spacing: float, params: PhysicalParams, n_ions: int,
                  n_edge: int | None = None) -> IonChain:
    """Quartic-trap chain at parameter ``b`` scaled so the qubit spacing averages ``mean_spacing``."""
    if n_edge is None:
        n_edge = default_edge(n_ions)
    u, _, _ = _solve_reduced(reduced_quadratic(b), 1.0, n_ions)
    length = mean_spacing / window_stats(u, n_edge).qubit_mean
    pot = potential_from_b(b, length, params)
    return solve_equilibrium(pot, params, n_ions, initial_guess=u * length, n_edge=n_edge)


def optimize_b(params: PhysicalParams, n_ions: int, n_edge: int, b_range=(-12.0, -1.0),
               mean_spacing: float = 10e-6, n_grid: int = 56, threads: int = 1, xtol: float = 1e-5):
    """Find the quartic parameter B that makes the qubit spacings most uniform.

    A coarse grid over ``b_range`` brackets the minimum of ``s_z`` which is then
    refined by golden-section search.  The mean qubit spacing is pinned to
    ``mean_spacing`` at every B, so ``s_z`` is reported in metres.

    Returns ``(b_opt, curve)`` with ``curve`` a list of ``(B, s_z)`` grid points.
    Raises :class:`BoundaryMinimumError` when the grid minimum is on the range edge.
    """
    lo, hi = map(float, b_range)
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ConfigError("b_range must be a finite interval with lower < upper")
    if n_grid < 50:
        raise ConfigError("coarse grid needs at least 50 points")
    grid = np.linspace(lo, hi, n_grid)

    def objective(b):
        return _relative_deviation(b, n_ions, n_edge)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            rel = list(pool.map(objective, grid))
        rel = np.array(rel)
    else:
        rel = np.array([objective(b) for b in grid])
    curve = [(float(b), float(r * mean_spacing)) for b, r in zip(grid, rel)]
    i = int(np.argmin(rel))
    if i == 0 or i == len(grid) - 1:
        raise BoundaryMinimumError(f"s_z minimum at range boundary B={grid[i]:g}", float(grid[i]), curve)
    res = minimize_scalar(objective, bracket=(grid[i - 1], grid[i], grid[i + 1]),
                          method="golden", tol=xtol)
    b_opt = float(res.x)
    if not (grid[i - 1] <= b_opt <= grid[i + 1]) or res.fun > rel[i]:
        b_opt = float(grid[i])
    return b_opt, curve
