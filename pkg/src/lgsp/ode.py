"""Embedded Dormand-Prince 5(4) integrator for complex matrix/vector ODEs.

Plain explicit adaptive stepper (no FSAL reuse, seven stages per step)
with an optional post-step hook invoked after every accepted step so
density-matrix propagation can re-symmetrize in place.
"""

from __future__ import annotations

import numpy as np

from .errors import StiffnessError

# Butcher tableau of the Dormand-Prince 5(4) pair.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# b5 - b4: coefficients of the embedded local error estimate
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])

DEFAULT_RTOL = 1e-8
DEFAULT_ATOL = 1e-10
_SAFETY, _MIN_FACTOR, _MAX_FACTOR = 0.9, 0.2, 5.0


def _error_norm(err, y0, y1, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.sqrt(np.mean(np.abs(err / scale) ** 2)))


def _initial_step(f, t0, y0, f0, rtol, atol, span):
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean(np.abs(y0 / scale) ** 2))
    d1 = np.sqrt(np.mean(np.abs(f0 / scale) ** 2))
    h0 = 1e-6 * span if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + h0 * f0
    f1 = f(t0 + h0, y1)
    d2 = np.sqrt(np.mean(np.abs((f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6 * span, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, span)


def integrate(f, y0, t0, t1, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL,
              post_step=None, max_steps=1_000_000):
    """Advance y' = f(t, y) from t0 to t1 and return y(t1).

    `post_step(y) -> y` runs after every accepted step (and on the final
    state).  Raises StiffnessError with the last accepted state when the
    step size underflows.
    """
    if t1 == t0:
        return np.array(y0, copy=True)
    y = np.array(y0, dtype=complex, copy=True)
    t = t0
    span = abs(t1 - t0)
    ft = f(t, y)
    h = _initial_step(f, t, y, ft, rtol, atol, span)
    k = [None] * 7
    for _ in range(max_steps):
        h = min(h, t1 - t)
        if h < 1e-14 * span:
            raise StiffnessError(f"step size underflow at t={t:.6g}", t=t, state=y)
        k[0] = ft
        for s in range(1, 7):
            ys = y + h * sum(a * k[m] for m, a in enumerate(_A[s]) if a != 0.0)
            k[s] = f(t + _C[s] * h, ys)
        y_new = y + h * sum(b * k[m] for m, b in enumerate(_B5) if b != 0.0)
        err = h * sum(e * k[m] for m, e in enumerate(_E) if e != 0.0)
        norm = _error_norm(err, y, y_new, rtol, atol)
        if norm <= 1.0:
            t += h
            y = y_new if post_step is None else post_step(y_new)
            if t >= t1 - 1e-14 * span:
                return y
            ft = f(t, y)
        factor = _MAX_FACTOR if norm == 0.0 else min(
            _MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * norm ** -0.2))
        h *= factor
    raise StiffnessError(f"exceeded {max_steps} steps at t={t:.6g}", t=t, state=y)


def integrate_on_grid(f, y0, times, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL,
                      post_step=None):
    """Integrate through an increasing time grid; returns the states at each node."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) == 0 or np.any(np.diff(times) <= 0):
        raise ValueError("sample times must be a strictly increasing 1-D grid")
    y = np.array(y0, dtype=complex, copy=True)
    t_prev = 0.0
    states = []
    for tk in times:
        if tk < t_prev:
            raise ValueError("sample times must not precede the current time")
        if tk > t_prev:
            y = integrate(f, y, t_prev, tk, rtol=rtol, atol=atol, post_step=post_step)
            t_prev = tk
        states.append(y.copy())
    return states
