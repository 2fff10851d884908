"""Physical parameters, axial potentials and the dimensionless unit system.

Coulomb interactions use the Gaussian convention: ``coulomb_coupling`` is
``e**2`` with dimensions energy*length (``q**2 / (4 pi eps0)`` in SI), so the
pair energy is simply ``e2 / r``.  Everything else is SI.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from scipy import constants as const

from .errors import ConfigError

AMU = const.atomic_mass
HBAR = const.hbar
KB = const.k
ELEMENTARY_COULOMB = const.e**2 / (4 * math.pi * const.epsilon_0)

# 171Yb+ at 5 MHz transverse confinement, Doppler cooled on a 2pi x 10 MHz half-linewidth.
DEFAULTS = {
    "mass_amu": 171.0,
    "omega_x_hz": 5e6,
    "omega_y_hz": 5e6,
    "temperature_hz": 1e7,
    "wavevector_per_m": 1.56e7,
    "waist_m": 4e-6,
}
PARAM_KEYS = frozenset(DEFAULTS) | {"temperature_k"}


@dataclass(frozen=True)
class PhysicalParams:
    """Ion species, trap and laser constants (SI, angular frequencies in rad/s).

    ``doppler_temperature`` is stored as ``k_B T / hbar`` in rad/s so that
    thermal occupations are simply ``doppler_temperature / omega``.
    """

    ion_mass: float = DEFAULTS["mass_amu"] * AMU
    coulomb_coupling: float = ELEMENTARY_COULOMB
    omega_x: float = 2 * math.pi * DEFAULTS["omega_x_hz"]
    omega_y: float = 2 * math.pi * DEFAULTS["omega_y_hz"]
    doppler_temperature: float = 2 * math.pi * DEFAULTS["temperature_hz"]
    effective_wavevector: float = DEFAULTS["wavevector_per_m"]
    beam_waist: float = DEFAULTS["waist_m"]

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be positive and finite, got {value!r}")

    @property
    def e2_over_m(self) -> float:
        return self.coulomb_coupling / self.ion_mass

    @property
    def temperature_kelvin(self) -> float:
        return self.doppler_temperature * HBAR / KB

    def transverse_frequency(self, axis: str) -> float:
        if axis in ("x", "transverse_x"):
            return self.omega_x
        if axis in ("y", "transverse_y"):
            return self.omega_y
        raise ValueError(f"not a transverse axis: {axis!r}")


def make_params(config: Mapping[str, float] | None = None) -> PhysicalParams:
    """Build validated :class:`PhysicalParams` from a flat key-value map.

    Recognised keys are ``mass_amu``, ``omega_x_hz``, ``omega_y_hz``,
    ``wavevector_per_m``, ``waist_m`` and exactly one of ``temperature_k``
    (kelvin) or ``temperature_hz`` (``k_B T / h`` in Hz).  Omitted keys take
    the Yb+ baseline defaults; unknown keys are rejected.
    """
    config = dict(config or {})
    unknown = set(config) - PARAM_KEYS
    if unknown:
        raise ConfigError(f"unknown parameter key(s): {', '.join(sorted(unknown))}")
    if "temperature_k" in config and "temperature_hz" in config:
        raise ConfigError("give only one of temperature_k and temperature_hz")

    values = {}
    for key in PARAM_KEYS:
        if key not in config:
            continue
        try:
            values[key] = float(config[key])
        except (TypeError, ValueError):
            raise ConfigError(f"{key} must be a number, got {config[key]!r}") from None
        if not (math.isfinite(values[key]) and values[key] > 0):
            raise ConfigError(f"{key} must be positive, got {config[key]!r}")

    merged = {**DEFAULTS, **values}
    if "temperature_k" in values:
        temperature = values["temperature_k"] * KB / HBAR
    else:
        temperature = 2 * math.pi * merged["temperature_hz"]

    return PhysicalParams(
        ion_mass=merged["mass_amu"] * AMU,
        omega_x=2 * math.pi * merged["omega_x_hz"],
        omega_y=2 * math.pi * merged["omega_y_hz"],
        doppler_temperature=temperature,
        effective_wavevector=merged["wavevector_per_m"],
        beam_waist=merged["waist_m"],
    )


@dataclass(frozen=True)
class AxialPotential:
    """``V(z) = alpha2 z^2 / 2 + alpha4 z^4 / 4`` (J/m^2 and J/m^4)."""

    alpha2: float
    alpha4: float = 0.0
    kind: str = field(default="")

    def __post_init__(self):
        kind = self.kind or ("harmonic" if self.alpha4 == 0 else "quartic")
        object.__setattr__(self, "kind", kind)
        if kind == "harmonic":
            if self.alpha4 != 0 or not self.alpha2 > 0:
                raise ConfigError("harmonic potential needs alpha2 > 0 and alpha4 = 0")
        elif kind == "quartic":
            if not self.alpha4 > 0:
                raise ConfigError("quartic potential needs alpha4 > 0")
            if not math.isfinite(self.alpha2):
                raise ConfigError("alpha2 must be finite")
        else:
            raise ConfigError(f"unknown potential kind {kind!r}")

    @classmethod
    def harmonic(cls, omega_z: float, params: PhysicalParams) -> "AxialPotential":
        return cls(alpha2=params.ion_mass * omega_z**2, alpha4=0.0, kind="harmonic")

    def force_constant(self, z):
        """Second derivative ``V''(z)``."""
        return self.alpha2 + 3 * self.alpha4 * z**2


def b_parameter(pot: AxialPotential, params: PhysicalParams) -> float:
    """Dimensionless quartic trap parameter ``|alpha2/e2|^(2/3) * alpha2/alpha4``."""
    if pot.kind != "quartic":
        raise ConfigError("B is only defined for a quartic potential")
    e2 = params.coulomb_coupling
    return abs(pot.alpha2 / e2) ** (2 / 3) * (pot.alpha2 / pot.alpha4)


def reduced_quadratic(b: float) -> float:
    """Quadratic coefficient of the quartic potential in natural units."""
    return math.copysign(abs(b) ** 0.6, b)


def potential_from_b(b: float, length_scale: float, params: PhysicalParams) -> AxialPotential:
    """Quartic potential with trap parameter ``b`` and unit length ``(e2/alpha4)^(1/5)``."""
    if not (length_scale > 0 and math.isfinite(length_scale)):
        raise ConfigError("length_scale must be positive")
    if not math.isfinite(b):
        raise ConfigError("b must be finite")
    e2 = params.coulomb_coupling
    alpha4 = e2 / length_scale**5
    alpha2 = reduced_quadratic(b) * e2 / length_scale**3
    return AxialPotential(alpha2=alpha2, alpha4=alpha4, kind="quartic")


@dataclass(frozen=True)
class UnitSystem:
    """Length, energy and angular-frequency units for a given trap.

    In these units the Coulomb pair energy is ``1/|u_i - u_j|`` and the axial
    potential is ``quadratic * u^2/2 + quartic * u^4/4``.
    """

    length_unit: float
    energy_unit: float
    frequency_unit: float

    _dims = {"length": (1, 0, 0), "energy": (0, 1, 0), "frequency": (0, 0, 1),
             "time": (0, 0, -1), "force": (-1, 1, 0)}

    @classmethod
    def natural(cls, pot: AxialPotential, params: PhysicalParams) -> "UnitSystem":
        e2 = params.coulomb_coupling
        if pot.kind == "quartic":
            length = (e2 / pot.alpha4) ** 0.2
        else:
            length = (e2 / pot.alpha2) ** (1 / 3)
        return cls.from_length(length, params)

    @classmethod
    def from_length(cls, length: float, params: PhysicalParams) -> "UnitSystem":
        energy = params.coulomb_coupling / length
        return cls(length, energy, math.sqrt(energy / (params.ion_mass * length**2)))

    def _scale(self, kind: str) -> float:
        try:
            pl, pe, pf = self._dims[kind]
        except KeyError:
            raise ValueError(f"unknown quantity kind {kind!r}") from None
        return self.length_unit**pl * self.energy_unit**pe * self.frequency_unit**pf

    def to_dimensionless(self, value, kind: str):
        return value / self._scale(kind)

    def to_physical(self, value, kind: str):
        return value * self._scale(kind)

    def potential_coefficients(self, pot: AxialPotential) -> tuple[float, float]:
        """(quadratic, quartic) coefficients of ``pot`` in these units."""
        e2 = self.energy_unit * self.length_unit
        return (pot.alpha2 * self.length_unit**3 / e2,
                pot.alpha4 * self.length_unit**5 / e2)
