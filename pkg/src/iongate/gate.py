"""Two-qubit phase gates driven by segmented spin-dependent forces.

For a pair ``(i, j)`` driven with the same piecewise-constant Rabi frequency
``Omega(t)`` and beat note ``mu``, the residual mode displacements and the
two-qubit phase are linear and quadratic in the segment amplitudes ``v``:

    alpha_n^k = eta_k b_n^k (C v)_k,      phi_ij = v^T G v,

and the small-displacement infidelity is the quadratic form ``v^T Q v``.
Optimising amplitudes then reduces to a generalised eigenproblem on ``(G, Q)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from .errors import ConfigError, DegenerateDetuningError
from .kernels import alpha_kernels, phi_kernels, segment_alpha_kernel
from .modes import ModeSet, ThermalState, lamb_dicke, thermal_state, truncated_modes
from .units import HBAR, PhysicalParams

TARGET_PHASE = math.pi / 4


@dataclass(frozen=True, eq=False)
class PulseSchedule:
    """Equal-length segments of constant Rabi frequency on both target ions.

    ``target_pair`` is 1-based; ``amplitudes`` are in rad/s, negative values
    meaning a pi phase flip of the drive.
    """

    target_pair: tuple
    detuning_mu: float
    gate_time: float
    amplitudes: np.ndarray

    def __post_init__(self):
        i, j = self.target_pair
        if i == j:
            raise ConfigError("target ions must differ")
        if not self.gate_time > 0:
            raise ConfigError("gate_time must be positive")
        amps = np.atleast_1d(np.asarray(self.amplitudes, dtype=float))
        if amps.ndim != 1 or amps.size < 1:
            raise ConfigError("need at least one segment amplitude")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "target_pair", (int(i), int(j)))

    @property
    def n_segments(self) -> int:
        return self.amplitudes.size

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(0.0, self.gate_time, self.n_segments + 1)


@dataclass(frozen=True, eq=False)
class GateResult:
    alpha_residuals: np.ndarray  # (2, K): rows are ions i and j
    phase: float
    infidelity_exact: float
    infidelity_quadratic: float
    schedule: PulseSchedule
    beta_convention: str


@dataclass(frozen=True, eq=False)
class ResponseProfile:
    displacement: np.ndarray  # metres, one entry per chain ion
    normalized: np.ndarray
    branch: tuple


@dataclass(frozen=True, eq=False)
class GateForms:
    """Quadratic-form ingredients for one (pair, mu, tau, M) setting."""

    kernels: np.ndarray  # (K, M)
    g_i: np.ndarray
    g_j: np.ndarray
    beta_bar: np.ndarray
    surrogate: np.ndarray  # Q
    phase: np.ndarray  # G


def _check_pair(pair, modes: ModeSet, check_window: bool):
    chain = modes.chain
    i, j = pair
    if i == j:
        raise ConfigError("target ions must differ")
    for ion in (i, j):
        if not 1 <= ion <= chain.n_ions:
            raise ConfigError(f"ion {ion} outside a {chain.n_ions}-ion chain")
        if check_window and not chain.n_edge < ion <= chain.n_ions - chain.n_edge:
            raise ConfigError(f"ion {ion} is a cooling ion, not in the qubit window")
    return modes.local_index(i - 1), modes.local_index(j - 1)


def gate_forms(pair, mu, tau, n_segments, modes: ModeSet, thermal: ThermalState,
               params: PhysicalParams, check_window: bool = True) -> GateForms:
    if modes.axis != "transverse_x":
        raise ConfigError("gates couple to transverse-x modes")
    if n_segments < 1 or not tau > 0:
        raise ConfigError("need n_segments >= 1 and tau > 0")
    li, lj = _check_pair(pair, modes, check_window)
    omega = modes.frequencies
    eta = lamb_dicke(params, omega)
    g_i = eta * modes.vectors[li]
    g_j = eta * modes.vectors[lj]
    edges = np.linspace(0.0, tau, n_segments + 1)
    c = alpha_kernels(omega, mu, edges)
    beta = thermal.beta_bar
    weight = 0.25 * beta * (g_i**2 + g_j**2)
    q = np.einsum("k,km,kn->mn", weight, c, c.conj()).real
    lower = np.einsum("k,kmn->mn", 2 * g_i * g_j, phi_kernels(omega, mu, edges, alpha=c))
    diag = np.diag(np.diag(lower))
    off = lower - diag
    g = diag + 0.5 * (off + off.T)
    return GateForms(kernels=c, g_i=g_i, g_j=g_j, beta_bar=beta, surrogate=0.5 * (q + q.T), phase=g)


def _infidelity(alpha_i, alpha_j, beta):
    def loss(a):
        # 1 - Gamma, kept accurate when Gamma is close to 1
        return -np.expm1(-0.5 * np.sum(np.abs(a) ** 2 * beta))

    return float((2 * loss(alpha_i) + 2 * loss(alpha_j) + loss(alpha_i + alpha_j)
                  + loss(alpha_i - alpha_j)) / 8)


def _result_from_forms(forms: GateForms, schedule: PulseSchedule, convention: str) -> GateResult:
    v = schedule.amplitudes
    displacement = forms.kernels @ v
    alpha_i = forms.g_i * displacement
    alpha_j = forms.g_j * displacement
    quad = float(0.25 * np.sum(forms.beta_bar * (np.abs(alpha_i) ** 2 + np.abs(alpha_j) ** 2)))
    return GateResult(alpha_residuals=np.vstack([alpha_i, alpha_j]), phase=float(v @ forms.phase @ v),
                      infidelity_exact=_infidelity(alpha_i, alpha_j, forms.beta_bar),
                      infidelity_quadratic=quad, schedule=schedule, beta_convention=convention)


def evaluate_gate(schedule: PulseSchedule, modes: ModeSet, thermal: ThermalState,
                  params: PhysicalParams, check_window: bool = True) -> GateResult:
    """Residual displacements, accumulated phase and infidelity of ``schedule``."""
    forms = gate_forms(schedule.target_pair, schedule.detuning_mu, schedule.gate_time,
                       schedule.n_segments, modes, thermal, params, check_window)
    return _result_from_forms(forms, schedule, thermal.convention)


def _canonical_sign(v):
    lead = np.argmax(np.abs(v) >= np.abs(v).max() * (1 - 1e-9))
    return v if v[lead] >= 0 else -v


def optimize_segments(pair, mu, tau, n_segments, modes: ModeSet, thermal: ThermalState,
                      params: PhysicalParams, check_window: bool = True) -> GateResult:
    """Segment amplitudes minimising infidelity at a two-qubit phase of ``+-pi/4``.

    Every generalised eigenvector of ``G v = kappa Q v`` is a stationary point
    of ``v^T Q v`` on the constraint surface; each is scaled onto ``|phi| = pi/4``
    and the one with the lowest exact infidelity wins.
    """
    forms = gate_forms(pair, mu, tau, n_segments, modes, thermal, params, check_window)
    q, g = forms.surrogate, forms.phase
    scale = max(np.trace(q) / n_segments, np.finfo(float).tiny)
    _, vecs = eigh(g, q + 1e-12 * scale * np.eye(n_segments))
    g_norm = np.abs(g).max()
    best = None
    for v in vecs.T:
        v = v / np.linalg.norm(v)
        phase = v @ g @ v
        if g_norm == 0 or abs(phase) <= 1e-13 * g_norm:
            continue
        v = _canonical_sign(v * math.sqrt(TARGET_PHASE / abs(phase)))
        schedule = PulseSchedule(tuple(pair), mu, tau, v)
        result = _result_from_forms(forms, schedule, thermal.convention)
        if best is None or result.infidelity_exact < best.infidelity_exact:
            best = result
    if best is None:
        raise DegenerateDetuningError(f"no amplitude pattern produces a two-qubit phase at mu={mu:.9e}")
    return best


@dataclass(frozen=True)
class ScanPoint:
    mu: float
    infidelity: float
    phase: float
    amplitudes: tuple
    error: str = ""


def scan_detuning(pair, mu_grid, tau, n_segments, modes: ModeSet, thermal: ThermalState,
                  params: PhysicalParams, threads: int = 1) -> list:
    """Optimised infidelity at each detuning; degenerate points carry ``error`` and NaN."""

    def point(mu):
        try:
            r = optimize_segments(pair, mu, tau, n_segments, modes, thermal, params)
        except DegenerateDetuningError as exc:
            return ScanPoint(float(mu), math.nan, math.nan, (), str(exc))
        return ScanPoint(float(mu), r.infidelity_exact, r.phase, tuple(r.schedule.amplitudes))

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(point, mu_grid))
    return [point(mu) for mu in mu_grid]


def centered_window(pair, size: int, n_ions: int) -> np.ndarray:
    """0-based indices of ``size`` consecutive ions centred on the target pair."""
    i, j = sorted(pair)
    if size >= n_ions:
        return np.arange(n_ions)
    start = int(math.floor((i + j) / 2 - (size - 1) / 2))
    start = min(max(start, 1), n_ions - size + 1)
    window = np.arange(start - 1, start - 1 + size)
    if not (window[0] <= i - 1 and j - 1 <= window[-1]):
        raise ConfigError(f"a {size}-ion window cannot cover ions {i} and {j}")
    return window


def amplitude_distance(a, b) -> float:
    """Relative L2 distance between amplitude vectors, up to a global sign."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    return float(min(np.linalg.norm(a - b), np.linalg.norm(a + b)) / np.linalg.norm(b))


def truncated_chain_gate(pair, free_window, mu, tau, n_segments, modes: ModeSet,
                         thermal: ThermalState, params: PhysicalParams, full: GateResult | None = None):
    """Re-optimise with only ``free_window`` ions around the pair free to move.

    Returns ``(result, distance)`` where ``distance`` is the relative L2 gap
    between the truncated and full-chain optimal amplitudes.
    """
    chain = modes.chain
    if free_window < 2 or (free_window % 2 and free_window < chain.n_ions):
        raise ConfigError("free_window must be an even number of at least 2 ions")
    window = centered_window(pair, free_window, chain.n_ions)
    temps = np.unique(thermal.temperatures)
    if temps.size != 1:
        raise ConfigError("truncation needs a single temperature for all modes")
    small = truncated_modes(chain, modes.axis, window)
    small_thermal = thermal_state(small, params, thermal.convention, temperatures=temps[0])
    result = optimize_segments(pair, mu, tau, n_segments, small, small_thermal, params)
    if full is None:
        full = optimize_segments(pair, mu, tau, n_segments, modes, thermal, params)
    return result, amplitude_distance(result.schedule.amplitudes, full.schedule.amplitudes)


def _mode_displacements(schedule: PulseSchedule, omega, times):
    """``int_0^t Omega(t') sin(mu t') exp(i w_k t') dt'`` for each mode and time, ``(K, T)``."""
    edges = schedule.edges
    m = schedule.n_segments
    amps = schedule.amplitudes
    seg = np.minimum(np.searchsorted(edges, times, side="right") - 1, m - 1)
    full = alpha_kernels(omega, schedule.detuning_mu, edges) * amps
    prefix = np.concatenate([np.zeros((len(omega), 1), complex), np.cumsum(full, axis=1)], axis=1)
    partial = segment_alpha_kernel(omega[:, None], schedule.detuning_mu, edges[seg][None, :], times[None, :])
    return prefix[:, seg] + amps[seg] * partial


def response_profile(result: GateResult, modes: ModeSet, params: PhysicalParams, branch=(1, 1),
                     samples_per_period: int = 20, refine: int = 4) -> ResponseProfile:
    """Largest spin-dependent displacement of every ion during the gate.

    With the pair in spin branch ``(s_i, s_j)`` each mode is coherently
    displaced by ``beta_k(t) = i (s_i g_i^k + s_j g_j^k) A_k(t)``, where
    ``A_k(t)`` is the accumulated drive integral, so the mean transverse
    position of ion ``n`` is

        <q_n>(t) = sum_k b_n^k sqrt(2 hbar / m w_k) Re[beta_k(t) exp(-i w_k t)].

    The maximum of ``|<q_n>|`` is taken on a grid of ``samples_per_period``
    points per transverse period, refined ``refine``-fold around each ion's
    coarse maximum.  Pinned ions (outside a truncated window) read zero.
    """
    schedule = result.schedule
    s_i, s_j = branch
    if {abs(s_i), abs(s_j)} != {1}:
        raise ConfigError("spin branch entries must be +1 or -1")
    chain = modes.chain
    omega = modes.frequencies
    eta = lamb_dicke(params, omega)
    li, lj = (modes.local_index(x - 1) for x in schedule.target_pair)
    coupling = 1j * eta * (s_i * modes.vectors[li] + s_j * modes.vectors[lj])
    lengths = np.sqrt(2 * HBAR / (params.ion_mass * omega))
    to_ion = modes.vectors * lengths

    def positions(times):
        beta = coupling[:, None] * _mode_displacements(schedule, omega, times)
        return to_ion @ np.real(beta * np.exp(-1j * omega[:, None] * times[None, :]))

    period = 2 * math.pi / params.omega_x
    n_coarse = int(math.ceil(schedule.gate_time / period * samples_per_period)) + 1
    coarse = np.linspace(0.0, schedule.gate_time, n_coarse)
    q = np.abs(positions(coarse))
    peak = q.max(axis=1)
    if refine > 1:
        step = coarse[1] - coarse[0]
        offsets = np.linspace(-step, step, 2 * refine + 1)
        centres = coarse[np.argmax(q, axis=1)]
        fine = np.clip(centres[:, None] + offsets[None, :], 0.0, schedule.gate_time)
        qf = np.abs(positions(fine.ravel())).reshape(len(centres), len(centres), -1)
        own = qf[np.arange(len(centres)), np.arange(len(centres))]
        peak = np.maximum(peak, own.max(axis=1))

    displacement = np.zeros(chain.n_ions)
    displacement[modes.ion_indices] = peak
    reference = 0.5 * (peak[li] + peak[lj])
    return ResponseProfile(displacement=displacement, normalized=displacement / reference,
                           branch=(int(s_i), int(s_j)))
