"""Scalar infidelity estimates for thermal and addressing errors."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chain import IonChain, spacing_stats
from .errors import ConfigError
from .modes import ModeSet, ThermalState, axial_position_fluctuation, lamb_dicke

LAMB_DICKE_NOTE = (
    "pi^2 eta^4 (n^2 + n + 1/8) at eta=0.038, n=2.0 evaluates to 1.26e-4; "
    "a published estimate of ~7e-4 for the same inputs is not reproduced by this formula"
)


def _positive(**values):
    for name, value in values.items():
        if not value > 0:
            raise ConfigError(f"{name} must be positive, got {value!r}")


def crosstalk(spacing: float, waist: float) -> float:
    """Intensity of a neighbour's Gaussian beam at an ion, ``exp(-2 (d/w)^2)``."""
    _positive(spacing=spacing)
    if waist == 0:
        return 0.0
    _positive(waist=waist)
    return math.exp(-2 * (spacing / waist) ** 2)


def axial_rabi_infidelity(delta_z: float, waist: float) -> float:
    """Pi-pulse error from Rabi-frequency fluctuation, ``(pi^2/4) (dz/w)^4``."""
    _positive(waist=waist)
    return (math.pi**2 / 4) * (delta_z / waist) ** 4


def anharmonic_infidelity(delta_z: float, spacing: float) -> float:
    """Order-of-magnitude error from anharmonic motion, ``(dz/d)^2``."""
    _positive(spacing=spacing)
    return (delta_z / spacing) ** 2


def lamb_dicke_infidelity(eta: float, nbar: float) -> float:
    """Second-order Lamb-Dicke error, ``pi^2 eta^4 (n^2 + n + 1/8)``."""
    return math.pi**2 * eta**4 * (nbar**2 + nbar + 0.125)


@dataclass(frozen=True)
class ErrorBudget:
    crosstalk_p: float
    axial_rabi_infidelity: float
    anharmonic_infidelity: float
    lamb_dicke_infidelity: float
    waist: float
    spacing: float
    delta_z: float
    eta_x: float
    nbar_x: float
    notes: tuple = field(default=(LAMB_DICKE_NOTE,))

    def as_dict(self) -> dict:
        return {
            "crosstalk_p": self.crosstalk_p,
            "axial_rabi_infidelity": self.axial_rabi_infidelity,
            "anharmonic_infidelity": self.anharmonic_infidelity,
            "lamb_dicke_infidelity": self.lamb_dicke_infidelity,
            "inputs": {"waist_m": self.waist, "spacing_m": self.spacing, "delta_z_m": self.delta_z,
                       "eta_x": self.eta_x, "nbar_x": self.nbar_x},
            "notes": list(self.notes),
        }

    def table(self) -> str:
        rows = [
            ("crosstalk P_c", self.crosstalk_p),
            ("axial Rabi dF1", self.axial_rabi_infidelity),
            ("anharmonic dF2", self.anharmonic_infidelity),
            ("Lamb-Dicke dF3 *", self.lamb_dicke_infidelity),
        ]
        lines = [f"{name:<20s} {value:10.3e}" for name, value in rows]
        lines.append(f"(w={self.waist * 1e6:.2f} um, d={self.spacing * 1e6:.2f} um, "
                     f"dz={self.delta_z * 1e6:.3f} um, eta_x={self.eta_x:.4f}, n_x={self.nbar_x:.3f})")
        lines.append(f"* {LAMB_DICKE_NOTE}")
        return "\n".join(lines)


def full_budget(chain: IonChain, axial_modes: ModeSet, axial_thermal: ThermalState,
                transverse_modes: ModeSet | None = None) -> ErrorBudget:
    """All four estimates for ``chain`` with the mean qubit-window fluctuation.

    ``eta_x`` and ``nbar_x`` are taken at the transverse centre-of-mass mode
    (``omega_x`` itself when ``transverse_modes`` is not given).
    """
    params = chain.params
    dz = axial_position_fluctuation(chain, axial_modes, axial_thermal)[chain.qubit_slice]
    delta_z = float(np.mean(dz))
    spacing = spacing_stats(chain).qubit_mean
    omega_x = params.omega_x if transverse_modes is None else float(transverse_modes.frequencies.max())
    eta = lamb_dicke(params, omega_x)
    nbar = params.doppler_temperature / omega_x
    waist = params.beam_waist
    return ErrorBudget(
        crosstalk_p=crosstalk(spacing, waist),
        axial_rabi_infidelity=axial_rabi_infidelity(delta_z, waist),
        anharmonic_infidelity=anharmonic_infidelity(delta_z, spacing),
        lamb_dicke_infidelity=lamb_dicke_infidelity(eta, nbar),
        waist=waist, spacing=spacing, delta_z=delta_z, eta_x=eta, nbar_x=nbar,
    )
