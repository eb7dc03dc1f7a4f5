"""Spectral filters for energy-lowering jump operators.

The smooth filter window in the frequency domain is

    f_hat(w) = [erf((w + a)/delta_a) - erf((w + b)/delta_b)] / 2,

approximately the indicator of [-a, -b]: close to 1 well inside the
window and decaying to 0 outside with erf tails set by delta_a, delta_b.
Its inverse Fourier transform

    f(s) = (exp(i a s - delta_a^2 s^2 / 4) - exp(i b s - delta_b^2 s^2 / 4)) / (2 pi i s)

decays rapidly in |s|, so the time-domain jump construction can truncate
to |s| <= S_s and use a trapezoidal grid.  An exact indicator variant
("ideal filter") is provided for eigenbasis constructions in gap tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, pi

import numpy as np
from scipy.special import erf


@dataclass(frozen=True)
class FilterParams:
    """erf window parameters: cutoff a, gap b, tail widths delta_a/delta_b (Hartree)."""

    a: float
    b: float
    delta_a: float
    delta_b: float

    def __post_init__(self):
        if not self.a > self.b > 0:
            raise ValueError(f"need a > b > 0, got a={self.a}, b={self.b}")
        if self.delta_a <= 0 or self.delta_b <= 0:
            raise ValueError("smoothing widths must be positive")

    def freq(self, omega):
        return filter_freq(omega, self)

    def time(self, s):
        return filter_time(s, self)


def filter_freq(omega, p: FilterParams):
    """Frequency-domain filter value; accepts scalars or arrays."""
    omega = np.asarray(omega, dtype=float)
    out = 0.5 * (erf((omega + p.a) / p.delta_a) - erf((omega + p.b) / p.delta_b))
    return float(out) if out.ndim == 0 else out


def filter_time(s, p: FilterParams):
    """Time-domain filter f(s); the s -> 0 limit (a-b)/(2 pi) is used below
    |s| < 1e-8/a to avoid cancellation in the difference of exponentials."""
    s = np.asarray(s, dtype=float)
    scalar = s.ndim == 0
    s = np.atleast_1d(s)
    out = np.empty(s.shape, dtype=complex)
    small = np.abs(s) < 1e-8 / p.a
    out[small] = (p.a - p.b) / (2 * pi)
    sb = s[~small]
    num = (np.exp(1j * p.a * sb - (p.delta_a * sb) ** 2 / 4)
           - np.exp(1j * p.b * sb - (p.delta_b * sb) ** 2 / 4))
    out[~small] = num / (2j * pi * sb)
    return complex(out[0]) if scalar else out


@dataclass(frozen=True)
class IdealFilter:
    """Exact indicator filter: 1 for w <= -gap, 0 for w >= 0.

    On the open interval (-gap, 0) the value interpolates smoothly with an
    erf profile.  That region is a documented choice, not part of the
    indicator contract: eigenbasis constructions that rely on exact 0/1
    values must only ever evaluate the filter outside (-gap, 0).
    """

    gap: float

    def __post_init__(self):
        if self.gap <= 0:
            raise ValueError("gap must be positive")

    def freq(self, omega):
        omega = np.asarray(omega, dtype=float)
        out = np.zeros(omega.shape)
        out[omega <= -self.gap] = 1.0
        mid = (omega > -self.gap) & (omega < 0)
        if np.any(mid):
            out[mid] = 0.5 * (1.0 - erf((omega[mid] + self.gap / 2) * 8.0 / self.gap))
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class QuadratureGrid:
    """Truncated symmetric trapezoidal grid on [-S_s, S_s].

    2*m + 1 nodes s_l = l * (S_s / m); endpoint weights S_s/(2m), interior
    weights S_s/m, so the weights sum to 2*S_s.
    """

    s_max: float
    m: int

    def __post_init__(self):
        if self.s_max <= 0 or self.m < 1:
            raise ValueError("need s_max > 0 and at least one node per half-interval")

    @property
    def ds(self) -> float:
        return self.s_max / self.m

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(-self.m, self.m + 1) * self.ds

    @property
    def weights(self) -> np.ndarray:
        w = np.full(2 * self.m + 1, self.ds)
        w[0] = w[-1] = self.ds / 2
        return w

    def refine(self, factor: int = 2) -> "QuadratureGrid":
        return QuadratureGrid(self.s_max, self.m * factor)


def default_filter_params(norm_h: float, gap: float):
    """Default erf filter and grid from a spectral-norm bound and a gap.

    a = 2.5*norm_h, delta_a = a/5, b = delta_b = gap; truncation
    S_s = 10/gap with ceil(S_s / (pi/(2a))) nodes per half-interval.
    """
    if norm_h <= 0 or gap <= 0:
        raise ValueError("norm_h and gap must be positive")
    if gap >= norm_h:
        raise ValueError(f"gap {gap} >= norm bound {norm_h}: degenerate filter window")
    a = 2.5 * norm_h
    params = FilterParams(a=a, b=gap, delta_a=a / 5, delta_b=gap)
    s_max = 10.0 / gap
    m = ceil(s_max / (pi / (2 * a)))
    return params, QuadratureGrid(s_max, m)
