"""Closed-form time integrals for piecewise-constant spin-dependent forces.

The drive on an ion is ``Omega_s sin(mu t)`` on segment ``s``.  Two integrals
are needed per phonon mode of frequency ``w``:

* ``F = int_a^b sin(mu t) exp(i w t) dt`` (mode displacement), and
* ``D = int_a^b dt2 int_a^t2 dt1 sin(mu t2) sin(mu t1) sin(w (t2 - t1))``
  (geometric phase from a single segment).

Both are written as divided differences of ``exp`` on purely imaginary nodes,
evaluated without cancellation so resonances (``mu = +-w``) and ``w = 0`` are
handled exactly.
"""

from __future__ import annotations

import math

import numpy as np

_SERIES_SPAN = 0.5
_SERIES_TERMS = 24


def exp_dd1(y0, y1):
    """First divided difference of ``exp`` at nodes ``i*y0``, ``i*y1``."""
    y0 = np.asarray(y0, dtype=float)
    y1 = np.asarray(y1, dtype=float)
    return np.exp(0.5j * (y0 + y1)) * np.sinc((y1 - y0) / (2 * np.pi))


def exp_dd2(y0, y1, y2):
    """Second divided difference of ``exp`` at nodes ``i*y0``, ``i*y1``, ``i*y2``."""
    y = np.stack(np.broadcast_arrays(np.asarray(y0, float), np.asarray(y1, float),
                                     np.asarray(y2, float)))
    y = np.sort(y, axis=0)
    lo, mid, hi = y
    span = hi - lo
    out = np.empty(lo.shape, dtype=complex)

    wide = span > _SERIES_SPAN
    if np.any(wide):
        out[wide] = ((exp_dd1(mid[wide], hi[wide]) - exp_dd1(lo[wide], mid[wide]))
                     / (1j * span[wide]))

    narrow = ~wide
    if np.any(narrow):
        # Taylor series about the node centroid: sum_k h_k(d) / (k+2)!
        centre = (lo[narrow] + mid[narrow] + hi[narrow]) / 3
        d = [1j * (v[narrow] - centre) for v in (lo, mid, hi)]
        h = [np.ones_like(d[0])]
        for k in range(1, _SERIES_TERMS):
            h.append(d[0] ** k)
        for dj in d[1:]:
            for k in range(1, _SERIES_TERMS):
                h[k] = h[k] + dj * h[k - 1]
        total = sum(h[k] / math.factorial(k + 2) for k in reversed(range(_SERIES_TERMS)))
        out[narrow] = np.exp(1j * centre) * total
    return out


def _phase_integral(nu, a, b):
    """``int_a^b exp(i nu t) dt``."""
    width = b - a
    return width * np.exp(0.5j * nu * (a + b)) * np.sinc(nu * width / (2 * np.pi))


def segment_alpha_kernel(omega_k, mu, t_a, t_b):
    """``int_{t_a}^{t_b} sin(mu t) exp(i omega_k t) dt`` (broadcasts over arrays)."""
    omega_k = np.asarray(omega_k, dtype=float)
    t_a = np.asarray(t_a, dtype=float)
    t_b = np.asarray(t_b, dtype=float)
    if np.any(t_b < t_a):
        raise ValueError("need t_a <= t_b")
    out = (_phase_integral(omega_k + mu, t_a, t_b) - _phase_integral(omega_k - mu, t_a, t_b)) / 2j
    return out[()] if out.ndim == 0 else out


def _triangle(omega_k, mu, a, b):
    width = b - a
    total = 0j
    for p in (1, -1):
        for q in (1, -1):
            for r in (1, -1):
                nu2 = p * mu + r * omega_k
                nu1 = q * mu - r * omega_k
                shape = exp_dd2(0.0, nu2 * width, (nu1 + nu2) * width)
                total = total + (1j * p * q * r / 8) * np.exp(1j * (nu1 + nu2) * a) * shape
    return (width**2 * total).real


def _rectangle(omega_k, mu, later, earlier):
    f2 = segment_alpha_kernel(omega_k, mu, *later)
    f1 = segment_alpha_kernel(omega_k, mu, *earlier)
    return np.imag(f2 * np.conj(f1))


def segment_phi_kernel(omega_k, mu, segment, segment_prime):
    """Phase integral for the ordered segment pair ``(segment, segment_prime)``.

    Computes ``int_{t2 in segment} int_{t1 in segment_prime, t1 < t2}
    sin(mu t2) sin(mu t1) sin(omega_k (t2 - t1))``.  ``segment_prime`` must be
    the same segment or an earlier, non-overlapping one.
    """
    a2, b2 = map(float, segment)
    a1, b1 = map(float, segment_prime)
    if not (a2 <= b2 and a1 <= b1):
        raise ValueError("segments must be (start, end) with start <= end")
    if (a1, b1) == (a2, b2):
        out = _triangle(np.asarray(omega_k, float), mu, a2, b2)
    elif b1 <= a2:
        out = _rectangle(np.asarray(omega_k, float), mu, (a2, b2), (a1, b1))
    else:
        raise ValueError("segment_prime must not come after segment")
    return out[()] if np.ndim(out) == 0 else out


def alpha_kernels(omegas, mu, edges) -> np.ndarray:
    """Displacement kernels for every mode and segment, shape ``(K, M)``."""
    omegas = np.asarray(omegas, dtype=float)[:, None]
    edges = np.asarray(edges, dtype=float)
    return segment_alpha_kernel(omegas, mu, edges[None, :-1], edges[None, 1:])


def phi_kernels(omegas, mu, edges, alpha=None) -> np.ndarray:
    """Per-mode phase matrices, shape ``(K, M, M)``, lower triangle including diagonal.

    Entry ``[k, s, s']`` (``s' <= s``) is the ordered double integral for segment
    ``s`` (later time) and ``s'``.
    """
    omegas = np.asarray(omegas, dtype=float)
    edges = np.asarray(edges, dtype=float)
    m = len(edges) - 1
    if alpha is None:
        alpha = alpha_kernels(omegas, mu, edges)
    out = np.imag(alpha[:, :, None] * np.conj(alpha[:, None, :]))
    out = np.tril(out, k=-1)
    diag = _triangle(omegas[:, None], mu, edges[None, :-1], edges[None, 1:])
    out[:, np.arange(m), np.arange(m)] = diag
    return out
