"""Normal modes, linear-chain stability and thermal quantities."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import IonChain, coulomb_curvature
from .errors import ConfigError, StabilityError
from .units import HBAR, PhysicalParams

ZETA3 = 1.2020569031595943
AXES = ("transverse_x", "transverse_y", "axial")
_AXIS_ALIASES = {"x": "transverse_x", "y": "transverse_y", "z": "axial"}
BETA_CONVENTIONS = ("paper", "standard")


def _axis(axis: str) -> str:
    axis = _AXIS_ALIASES.get(axis, axis)
    if axis not in AXES:
        raise ConfigError(f"unknown axis {axis!r}")
    return axis


@dataclass(frozen=True, eq=False)
class ModeSet:
    """Eigenfrequencies (rad/s) and orthonormal mode vectors for one axis.

    ``vectors[:, k]`` is mode ``k`` with one entry per ion in ``ion_indices``
    (all ions for a full solve, a window for a truncated one).  Transverse
    modes are sorted by descending frequency, axial ones ascending.
    """

    axis: str
    frequencies: np.ndarray
    vectors: np.ndarray
    chain: IonChain
    ion_indices: np.ndarray

    def local_index(self, ion: int) -> int:
        """Row of ``vectors`` belonging to 0-based chain index ``ion``."""
        hits = np.flatnonzero(self.ion_indices == ion)
        if hits.size == 0:
            raise ConfigError(f"ion {ion + 1} has no dynamical coordinate in this mode set")
        return int(hits[0])


@dataclass(frozen=True, eq=False)
class ThermalState:
    temperatures: np.ndarray
    nbar: np.ndarray
    beta_bar: np.ndarray
    convention: str


def hessian(chain: IonChain, axis: str) -> np.ndarray:
    """Mass-weighted Hessian ``d2U/dq_i dq_n / m`` at equilibrium, in rad^2/s^2."""
    axis = _axis(axis)
    scale = chain.units.frequency_unit**2
    k = coulomb_curvature(chain.reduced_positions) * scale
    if axis == "axial":
        a = -k
        a[np.diag_indices_from(a)] = (chain.potential.force_constant(chain.positions) / chain.params.ion_mass
                                      + k.sum(axis=1))
        return a
    omega_t = chain.params.transverse_frequency(axis)
    a = 0.5 * k
    a[np.diag_indices_from(a)] = omega_t**2 - 0.5 * k.sum(axis=1)
    return a


def _fix_signs(vectors):
    mags = np.abs(vectors)
    # first entry within rounding of the largest magnitude decides the sign
    lead = np.argmax(mags >= mags.max(axis=0) * (1 - 1e-9), axis=0)
    signs = np.sign(vectors[lead, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def modes_from_matrix(matrix, axis, chain, ion_indices) -> ModeSet:
    evals, evecs = np.linalg.eigh(matrix)
    if evals[0] <= 0:
        raise StabilityError(
            f"{axis} Hessian has non-positive eigenvalue {evals[0]:.6e} rad^2/s^2: "
            "the linear chain is unstable", float(evals[0]))
    if axis != "axial":
        evals, evecs = evals[::-1], evecs[:, ::-1]
    return ModeSet(axis=axis, frequencies=np.sqrt(evals), vectors=_fix_signs(evecs),
                   chain=chain, ion_indices=np.asarray(ion_indices))


def diagonalize(chain: IonChain, axis: str) -> ModeSet:
    """Normal modes of ``chain`` along ``axis``.

    Raises :class:`StabilityError` (carrying the most negative eigenvalue) when
    a transverse direction has gone soft, i.e. the chain wants to zigzag.
    """
    axis = _axis(axis)
    return modes_from_matrix(hessian(chain, axis), axis, chain, np.arange(chain.n_ions))


def truncated_modes(chain: IonChain, axis: str, free_ions) -> ModeSet:
    """Modes when only ``free_ions`` (0-based) may move and the rest stay pinned.

    Pinned ions keep their curvature contribution on the diagonal, so this is
    the principal submatrix of the full Hessian.
    """
    axis = _axis(axis)
    free = np.asarray(sorted(free_ions))
    a = hessian(chain, axis)[np.ix_(free, free)]
    return modes_from_matrix(a, axis, chain, free)


def stability_threshold_uniform(d0: float, params: PhysicalParams) -> float:
    """Minimum transverse frequency (rad/s) keeping an infinite uniform chain linear."""
    if not d0 > 0:
        raise ConfigError("d0 must be positive")
    return math.sqrt(7 * ZETA3 * params.e2_over_m / (2 * d0**3))


def transverse_threshold(positions, params: PhysicalParams) -> float:
    """Smallest transverse frequency (rad/s) for which ions at ``positions`` stay linear.

    The transverse Hessian is ``omega_t^2 I`` plus a Coulomb part, so the
    threshold is the square root of minus that part's lowest eigenvalue.
    """
    z = np.asarray(positions, dtype=float)
    scale = np.median(np.diff(z))
    k = coulomb_curvature(z / scale) * (params.e2_over_m / scale**3)
    coulomb = 0.5 * k
    coulomb[np.diag_indices_from(coulomb)] = -0.5 * k.sum(axis=1)
    lowest = np.linalg.eigvalsh(coulomb)[0]
    return math.sqrt(max(-lowest, 0.0))


def stability_threshold_exact(chain: IonChain) -> float:
    return transverse_threshold(chain.positions, chain.params)


def anisotropy_bound_harmonic(n_ions: int) -> float:
    """Required ``omega_xy / omega_z`` for a harmonic chain, ``0.77 N / sqrt(ln N)``."""
    if n_ions < 2:
        raise ConfigError("need at least two ions")
    return 0.77 * n_ions / math.sqrt(math.log(n_ions))


def thermal_state(modes: ModeSet, params: PhysicalParams, convention: str = "paper",
                  temperatures=None) -> ThermalState:
    """Occupations and thermal weights for each mode.

    ``temperatures`` are ``k_B T_k / hbar`` in rad/s (default: the Doppler
    temperature for every mode).  ``convention`` selects the weight
    ``beta_bar``: ``"paper"`` uses ``coth(hbar w / k_B T)``, ``"standard"`` uses
    ``coth(hbar w / 2 k_B T)`` (which is ``2 n + 1`` for a Bose occupation).
    """
    if convention not in BETA_CONVENTIONS:
        raise ConfigError(f"unknown beta convention {convention!r}")
    omega = modes.frequencies
    if np.any(omega <= 0):
        raise ConfigError("mode frequencies must be positive")
    if temperatures is None:
        temps = np.full_like(omega, params.doppler_temperature)
    else:
        temps = np.broadcast_to(np.asarray(temperatures, dtype=float), omega.shape).copy()
    with np.errstate(divide="ignore"):
        x = omega / temps
    nbar = temps / omega
    if convention == "standard":
        x = x / 2
    beta = 1.0 / np.tanh(x)
    return ThermalState(temperatures=temps, nbar=nbar, beta_bar=beta, convention=convention)


def axial_position_fluctuation(chain: IonChain, axial_modes: ModeSet, thermal: ThermalState) -> np.ndarray:
    """Thermal axial fluctuation ``(<z'^4> - <z'^2>^2)^(1/4)`` of each ion, in metres.

    For Gaussian thermal motion this is ``2^(1/4)`` times the rms displacement,
    with each mode weighted by ``thermal.beta_bar`` (the ``2 n + 1`` factor).
    """
    if axial_modes.axis != "axial":
        raise ConfigError("need axial modes")
    b = axial_modes.vectors
    weight = thermal.beta_bar / axial_modes.frequencies
    total = np.sqrt(2) * (b**2 @ weight)
    return math.sqrt(HBAR / (2 * chain.params.ion_mass)) * np.sqrt(total)


def lamb_dicke(params: PhysicalParams, omega) -> float:
    """``eta = |k| sqrt(hbar / 2 m omega)``."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise ConfigError("omega must be positive")
    eta = params.effective_wavevector * np.sqrt(HBAR / (2 * params.ion_mass * omega))
    return float(eta) if eta.ndim == 0 else eta
