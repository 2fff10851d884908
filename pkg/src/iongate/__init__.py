"""Equilibrium, normal modes, segmented-pulse phase gates and error budgets for long
linear ion chains in anharmonic traps."""

__version__ = "0.1.0"

from .chain import IonChain, SpacingStats, optimize_b, quartic_chain, solve_equilibrium, spacing_stats
from .errbudget import (ErrorBudget, anharmonic_infidelity, axial_rabi_infidelity, crosstalk,
                        full_budget, lamb_dicke_infidelity)
from .errors import (BoundaryMinimumError, ConfigError, ConvergenceError, DegenerateDetuningError,
                     IongateError, OrderingError, PhysicsError, StabilityError)
from .gate import (GateResult, PulseSchedule, ResponseProfile, evaluate_gate, optimize_segments,
                   response_profile, scan_detuning, truncated_chain_gate)
from .kernels import segment_alpha_kernel, segment_phi_kernel
from .modes import (ModeSet, ThermalState, anisotropy_bound_harmonic, axial_position_fluctuation,
                    diagonalize, hessian, lamb_dicke, stability_threshold_exact,
                    stability_threshold_uniform, thermal_state)
from .units import (AxialPotential, PhysicalParams, UnitSystem, b_parameter, make_params,
                    potential_from_b)
