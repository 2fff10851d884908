"""Baseline 120-ion configuration and the data behind each figure.

Each ``figure_*`` function returns ``{filename: (header, rows)}`` tables plus a
summary dict; nothing here touches the filesystem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import IonChain, optimize_b, quartic_chain, spacing_stats
from .gate import optimize_segments, response_profile, scan_detuning, truncated_chain_gate
from .modes import ModeSet, ThermalState, axial_position_fluctuation, diagonalize, thermal_state
from .units import PhysicalParams, make_params

N_IONS = 120
N_EDGE = 10
MEAN_SPACING = 10e-6
B_RANGE = (-12.0, -1.0)
PAIR = (59, 62)
SEGMENTS = 5
TAU_PERIODS = (50, 100, 250, 500)
MU_REL = 9.3e-3
SCAN_RANGE = (0.0, 0.03)
SCAN_POINTS = 301


@dataclass(frozen=True, eq=False)
class Baseline:
    params: PhysicalParams
    b_opt: float
    b_curve: list
    chain: IonChain
    transverse: ModeSet
    axial: ModeSet
    thermal_x: ThermalState
    thermal_z: ThermalState

    @property
    def period(self) -> float:
        """Transverse oscillation period ``2 pi / omega_x``."""
        return 2 * math.pi / self.params.omega_x

    def mu(self, mu_rel: float) -> float:
        return self.params.omega_x * (1 + mu_rel)


def build_baseline(params: PhysicalParams | None = None, n_ions: int = N_IONS, n_edge: int = N_EDGE,
                   mean_spacing: float = MEAN_SPACING, b: float | None = None,
                   convention: str = "paper", threads: int = 1) -> Baseline:
    """Optimise B (unless given), solve the chain and diagonalise both axes."""
    params = params or make_params()
    curve = []
    if b is None:
        b, curve = optimize_b(params, n_ions, n_edge, B_RANGE, mean_spacing, threads=threads)
    chain = quartic_chain(b, mean_spacing, params, n_ions, n_edge)
    transverse = diagonalize(chain, "x")
    axial = diagonalize(chain, "z")
    return Baseline(params=params, b_opt=b, b_curve=curve, chain=chain, transverse=transverse,
                    axial=axial, thermal_x=thermal_state(transverse, params, convention),
                    thermal_z=thermal_state(axial, params, convention))


def scan_grid(lo=SCAN_RANGE[0], hi=SCAN_RANGE[1], points=SCAN_POINTS) -> np.ndarray:
    return np.linspace(lo, hi, points)


def figure_2b(base: Baseline):
    rows = [(b, s) for b, s in base.b_curve]
    stats = spacing_stats(base.chain)
    summary = {"b_opt": base.b_opt, "s_z_m": stats.s_z, "relative_deviation": stats.relative_deviation}
    return {"fig2b_b_curve.csv": (("B", "s_z_m"), rows)}, summary


def figure_2c(base: Baseline):
    stats = spacing_stats(base.chain)
    rows = [(n + 1, d) for n, d in enumerate(stats.spacings)]
    summary = {"b_opt": base.b_opt, "qubit_mean_m": stats.qubit_mean,
               "relative_deviation": stats.relative_deviation,
               "qubit_spacing_index_range": [base.chain.n_edge + 1, base.chain.n_ions - base.chain.n_edge - 1]}
    return {"fig2c_spacings.csv": (("n", "spacing_m"), rows)}, summary


def figure_3a(base: Baseline, tau_periods=TAU_PERIODS, grid=None, threads: int = 1):
    grid = scan_grid() if grid is None else np.asarray(grid)
    columns = {}
    for tp in tau_periods:
        points = scan_detuning(PAIR, base.mu(grid), tp * base.period, SEGMENTS, base.transverse,
                               base.thermal_x, base.params, threads=threads)
        columns[tp] = [p.infidelity for p in points]
    header = ("mu_rel",) + tuple(f"dF_tau{tp}" for tp in tau_periods)
    rows = [(float(g),) + tuple(columns[tp][n] for tp in tau_periods) for n, g in enumerate(grid)]
    omega = base.transverse.frequencies
    summary = {
        "band_rel": [float(omega.min() / base.params.omega_x - 1), float(omega.max() / base.params.omega_x - 1)],
        "best": {str(tp): {"mu_rel": float(grid[int(np.nanargmin(columns[tp]))]),
                           "infidelity": float(np.nanmin(columns[tp]))} for tp in tau_periods},
    }
    return {"fig3a_detuning_scan.csv": (header, rows)}, summary


def optimum_gate(base: Baseline, mu_rel: float = MU_REL, tau_periods: float = 500):
    return optimize_segments(PAIR, base.mu(mu_rel), tau_periods * base.period, SEGMENTS,
                             base.transverse, base.thermal_x, base.params)


def figure_3b(base: Baseline, mu_rel: float = MU_REL, windows=(4, 8)):
    full = optimum_gate(base, mu_rel)
    columns = [full.schedule.amplitudes]
    summary = {"mu_rel": mu_rel, "infidelity": full.infidelity_exact, "phase": full.phase, "windows": {}}
    for w in windows:
        res, dist = truncated_chain_gate(PAIR, w, base.mu(mu_rel), 500 * base.period, SEGMENTS,
                                         base.transverse, base.thermal_x, base.params, full=full)
        amps = res.schedule.amplitudes
        if np.linalg.norm(amps - full.schedule.amplitudes) > np.linalg.norm(amps + full.schedule.amplitudes):
            amps = -amps
        columns.append(amps)
        summary["windows"][str(w)] = {"relative_l2": dist, "infidelity": res.infidelity_exact}
    header = ("segment", "t_start_s", "omega_full") + tuple(f"omega_window{w}" for w in windows)
    edges = full.schedule.edges
    rows = [(s + 1, edges[s]) + tuple(float(c[s]) for c in columns) for s in range(SEGMENTS)]
    return {"fig3b_amplitudes.csv": (header, rows)}, summary


def figure_3c(base: Baseline, mu_rel: float = MU_REL):
    full = optimum_gate(base, mu_rel)
    prof = response_profile(full, base.transverse, base.params)
    rows = [(n + 1, q, r) for n, (q, r) in enumerate(zip(prof.displacement, prof.normalized))]
    return {"fig3c_response.csv": (("n", "max_shift_m", "relative"), rows)}, {"branch": list(prof.branch)}


def figure_4(base: Baseline):
    dz = axial_position_fluctuation(base.chain, base.axial, base.thermal_z)
    window = dz[base.chain.qubit_slice]
    rows = [(n + 1, d) for n, d in enumerate(dz)]
    summary = {"qubit_mean_dz_m": float(window.mean()), "qubit_min_dz_m": float(window.min()),
               "qubit_max_dz_m": float(window.max()), "beta_convention": base.thermal_z.convention}
    return {"fig4_fluctuation.csv": (("n", "delta_z_m"), rows)}, summary


FIGURES = {"fig2b": figure_2b, "fig2c": figure_2c, "fig3a": figure_3a,
           "fig3b": figure_3b, "fig3c": figure_3c, "fig4": figure_4}
