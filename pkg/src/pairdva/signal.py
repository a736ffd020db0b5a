"""Resampling, smoothing, differentiation, and peak detection on traces.

The differential voltage is defined as -dV/dQ so that discharge peaks point
upward. Curves live on a uniform charge grid so a fixed-width
Savitzky-Golay window has a fixed physical span.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.signal import savgol_filter

from .errors import ConfigError, EmptyWindowError, FormatError, NoPeakError, SpanError

VOLTAGE_WINDOW = (3.7, 3.9)

_SOURCES = ("pair", "cell-1", "cell-2")


@dataclass(frozen=True)
class SmoothingConfig:
    dq_ah: float = 0.05
    sg_window: int = 25
    sg_order: int = 3

    def __post_init__(self):
        if not (self.dq_ah > 0.0):
            raise ConfigError("dq_ah must be positive")
        if self.sg_window % 2 != 1 or self.sg_window <= self.sg_order + 1:
            raise ConfigError(
                "sg_window must be odd and greater than sg_order + 1")
        if self.sg_order < 1:
            raise ConfigError("sg_order must be at least 1")


@dataclass
class DvDqCurve:
    q: np.ndarray
    v: np.ndarray
    dvdq: np.ndarray
    dq: float
    source: str
    smoothing: SmoothingConfig = None

    def __len__(self):
        return len(self.q)


class PeakSample(NamedTuple):
    height: float
    q_at_peak: float
    v_at_peak: float


def _source_columns(trace, source):
    if source == "pair":
        return trace.q_pair, trace.v_t
    if source == "cell-1":
        return trace.q1, trace.v_t
    if source == "cell-2":
        if not trace.has_cell2:
            raise ConfigError("trace carries no cell-2 data")
        return trace.q2, trace.v_t
    raise ConfigError(f"unknown source {source!r}; expected one of {_SOURCES}")


def resample_uniform_q(trace, dq: float, source: str = "pair"):
    """Linearly interpolate voltage onto a uniform charge grid.

    Returns (q, v) arrays spanning the trace's charge range at spacing dq.
    """
    if not (dq > 0.0):
        raise ConfigError("dq must be positive")
    q_raw, v_raw = _source_columns(trace, source)
    if len(q_raw) < 2:
        raise SpanError("trace too short to resample")
    if np.any(np.diff(q_raw) <= 0.0):
        raise FormatError(f"charge column for source {source!r} is not "
                          "strictly increasing")
    n = int(np.floor((q_raw[-1] - q_raw[0]) / dq)) + 1
    if n < 2:
        raise SpanError("charge span shorter than one grid step")
    q = q_raw[0] + dq * np.arange(n)
    v = np.interp(q, q_raw, v_raw)
    return q, v


def dvdq_curve(trace, config: SmoothingConfig = None,
               source: str = "pair") -> DvDqCurve:
    """Smooth the resampled voltage and differentiate to -dV/dQ.

    Central differences inside, one-sided at the ends.
    """
    config = config if config is not None else SmoothingConfig()
    q, v = resample_uniform_q(trace, config.dq_ah, source)
    if len(q) < 2 * config.sg_window:
        raise SpanError(
            f"{len(q)} samples; need at least twice the filter window "
            f"({2 * config.sg_window})")
    v_smooth = savgol_filter(v, config.sg_window, config.sg_order,
                             mode="interp")
    dvdq = -np.gradient(v_smooth, config.dq_ah)
    return DvDqCurve(q=q, v=v, dvdq=dvdq, dq=config.dq_ah, source=source,
                     smoothing=config)


def downselect_window(curve: DvDqCurve, v_lo: float = VOLTAGE_WINDOW[0],
                      v_hi: float = VOLTAGE_WINDOW[1]) -> DvDqCurve:
    """Contiguous sub-curve where v_lo <= v <= v_hi, grid spacing kept.

    On a monotone discharge curve the in-window samples form one run; if
    smoothing noise fragments the mask, the longest run wins.
    """
    if not (v_lo < v_hi):
        raise EmptyWindowError("degenerate voltage window (v_lo >= v_hi)")
    mask = (curve.v >= v_lo) & (curve.v <= v_hi)
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        raise EmptyWindowError(
            f"no samples with voltage in [{v_lo:g}, {v_hi:g}]")
    runs = np.split(idx, np.flatnonzero(np.diff(idx) > 1) + 1)
    run = max(runs, key=len)
    sl = slice(run[0], run[-1] + 1)
    return DvDqCurve(q=curve.q[sl].copy(), v=curve.v[sl].copy(),
                     dvdq=curve.dvdq[sl].copy(), dq=curve.dq,
                     source=curve.source, smoothing=curve.smoothing)


def peak_height(curve: DvDqCurve) -> PeakSample:
    """Largest strict local maximum of dvdq; ties break toward smaller q."""
    y = curve.dvdq
    if len(y) < 3:
        raise NoPeakError("curve too short to hold an interior maximum")
    interior = (y[1:-1] > y[:-2]) & (y[1:-1] > y[2:])
    cand = np.flatnonzero(interior) + 1
    if cand.size == 0:
        raise NoPeakError("windowed curve is monotone; no local maximum")
    best = cand[int(np.argmax(y[cand]))]
    return PeakSample(height=float(y[best]), q_at_peak=float(curve.q[best]),
                      v_at_peak=float(curve.v[best]))
