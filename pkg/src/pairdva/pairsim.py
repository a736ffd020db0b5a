"""Parallel pair construction and constant-current discharge simulation.

A pair is two OCV-R cells sharing a terminal voltage. The strong cell
(index 1) has the larger capacity and smaller resistance; imbalance is
parameterized by alpha = C2/C1 <= 1 and beta = R2/R1 >= 1. Discharge
integrates dz_i/dt = i_i / (3600 * C_i) with the algebraic current split
re-evaluated at every RK4 stage.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError, IntegrationError
from .halfcell import _checked

SECONDS_PER_HOUR = 3600.0

_REASONS = {1: "v_cutoff", 2: "soc_floor", 3: "t_max"}


@dataclass(frozen=True)
class CellParams:
    """One cell: capacity in amp-hours, ohmic resistance in ohms."""

    capacity_ah: float
    resistance_ohm: float

    def __post_init__(self):
        if not (self.capacity_ah > 0.0):
            raise ConfigError("cell capacity must be positive")
        if not (self.resistance_ohm > 0.0):
            raise ConfigError("cell resistance must be positive")


@dataclass(frozen=True)
class PairParams:
    """Two parallel cells; cell1 is the strong one (C1 >= C2, R1 <= R2)."""

    cell1: CellParams
    cell2: CellParams

    def __post_init__(self):
        if self.cell2.capacity_ah > self.cell1.capacity_ah:
            raise ConfigError("cell2 must not exceed cell1 in capacity")
        if self.cell2.resistance_ohm < self.cell1.resistance_ohm:
            raise ConfigError("cell2 resistance must be >= cell1 resistance")

    @property
    def r_tot(self) -> float:
        return self.cell1.resistance_ohm + self.cell2.resistance_ohm

    @property
    def alpha(self) -> float:
        return self.cell2.capacity_ah / self.cell1.capacity_ah

    @property
    def beta(self) -> float:
        return self.cell2.resistance_ohm / self.cell1.resistance_ohm


@dataclass(frozen=True)
class SimConfig:
    """Constant-current discharge settings.

    t_max defaults to five nominal discharge durations as a runaway guard.
    """

    c_rate: float = 1.0 / 3.0
    dt: float = 1.0
    z0: float = 1.0
    v_cutoff: float = 3.0
    soc_floor: float = 0.02
    t_max: float = None

    def __post_init__(self):
        if not (self.c_rate > 0.0):
            raise ConfigError("c_rate must be positive")
        if not (self.dt > 0.0):
            raise ConfigError("dt must be positive")
        if not (0.0 < self.z0 <= 1.0):
            raise ConfigError("z0 must lie in (0, 1]")
        if not (0.0 <= self.soc_floor <= 0.1):
            raise ConfigError("soc_floor must lie in [0, 0.1]")
        if self.t_max is None:
            object.__setattr__(
                self, "t_max", 5.0 * (1.0 / self.c_rate) * SECONDS_PER_HOUR)
        if not (self.t_max > 0.0):
            raise ConfigError("t_max must be positive")
        lo, hi = kernels.ocv(0.0), kernels.ocv(1.0)
        if not (lo <= self.v_cutoff <= hi):
            raise ConfigError(
                f"v_cutoff {self.v_cutoff:g} outside the OCV range "
                f"[{lo:.4f}, {hi:.4f}]")


@dataclass
class SimTrace:
    """Per-sample discharge record; q columns are discharge amp-hours."""

    t: np.ndarray
    i_total: np.ndarray
    i1: np.ndarray
    i2: np.ndarray
    z1: np.ndarray
    z2: np.ndarray
    q_pair: np.ndarray
    q1: np.ndarray
    q2: np.ndarray
    v_t: np.ndarray
    reason: str = "unknown"
    params: object = None
    config: SimConfig = None
    has_cell2: bool = True
    # diagnostic: set when either cell's current ever reverses sign
    current_reversal: bool = False

    def __len__(self):
        return len(self.t)


def make_pair(alpha: float, beta: float, c_total: float = 120.0,
              r_parallel: float = 0.001) -> PairParams:
    """Build an imbalanced pair with fixed total capacity and parallel
    resistance.

    C1 + C2 == c_total and R1*R2/(R1+R2) == r_parallel by construction, so
    sweeps over (alpha, beta) hold the pair-level nameplate constant.
    """
    if not (0.0 < alpha <= 1.0):
        raise ConfigError("alpha must lie in (0, 1] (cell2 is the weak cell)")
    if not (beta >= 1.0):
        raise ConfigError("beta must be >= 1 (cell2 is the weak cell)")
    if not (c_total > 0.0) or not (r_parallel > 0.0):
        raise ConfigError("c_total and r_parallel must be positive")
    c1 = c_total / (1.0 + alpha)
    c2 = c_total * alpha / (1.0 + alpha)
    r1 = r_parallel * (1.0 + beta) / beta
    r2 = r_parallel * (1.0 + beta)
    return PairParams(CellParams(c1, r1), CellParams(c2, r2))


def current_split(z1, z2, params: PairParams, i_total):
    """Split the pair current between the cells at the given SOCs.

    Returns (i1, i2) with i1 + i2 == i_total; both cells see the same
    terminal voltage under this split.
    """
    return kernels.split_currents(
        _checked(z1), _checked(z2),
        params.cell1.resistance_ohm, params.cell2.resistance_ohm,
        float(i_total))


def terminal_voltage(z1, z2, params: PairParams, i_total):
    """Pair terminal voltage at the given SOCs and total current."""
    return kernels.pair_terminal_voltage(
        _checked(z1), _checked(z2),
        params.cell1.resistance_ohm, params.cell2.resistance_ohm,
        float(i_total))


def _n_max(config: SimConfig) -> int:
    return int(np.floor(config.t_max / config.dt)) + 2


def simulate_cc_discharge(params: PairParams,
                          config: SimConfig = None) -> SimTrace:
    """Integrate a constant-current discharge of the pair.

    The discharge current is -c_rate * (C1 + C2). Terminates at the first
    of: terminal voltage at/below v_cutoff, either SOC at/below soc_floor,
    or t >= t_max; the reason is recorded on the trace.
    """
    config = config if config is not None else SimConfig()
    c1 = params.cell1
    c2 = params.cell2
    i_total = -config.c_rate * (c1.capacity_ah + c2.capacity_ah)
    if i_total == 0.0:
        raise ConfigError("discharge current is zero")
    z1, z2, i1, i2, vt, n, reason = kernels.pair_rk4(
        config.z0, config.z0,
        c1.capacity_ah * SECONDS_PER_HOUR, c2.capacity_ah * SECONDS_PER_HOUR,
        c1.resistance_ohm, c2.resistance_ohm, i_total,
        config.dt, _n_max(config), config.v_cutoff, config.soc_floor,
        config.t_max)
    if reason == 4:
        raise IntegrationError(
            "SOC left [-1e-9, 1+1e-9] during integration; reduce dt")
    t = np.arange(n) * config.dt
    q_pair = np.abs(i_total) * t / SECONDS_PER_HOUR
    q1 = c1.capacity_ah * (config.z0 - z1)
    q2 = c2.capacity_ah * (config.z0 - z2)
    reversal = bool(np.any(i1 > 0.0) or np.any(i2 > 0.0))
    return SimTrace(
        t=t, i_total=np.full(n, i_total), i1=i1, i2=i2, z1=z1, z2=z2,
        q_pair=q_pair, q1=q1, q2=q2, v_t=vt,
        reason=_REASONS.get(reason, "n_max"), params=params, config=config,
        has_cell2=True, current_reversal=reversal)


def single_cell_reference(capacity_ah: float, resistance_ohm: float,
                          config: SimConfig = None) -> SimTrace:
    """Discharge one OCV-R cell under the same CC profile.

    The result reuses the SimTrace shape with the cell carried in the
    cell-1 columns; cell-2 columns are zeroed and has_cell2 is False.
    """
    config = config if config is not None else SimConfig()
    cell = CellParams(capacity_ah, resistance_ohm)
    i_total = -config.c_rate * capacity_ah
    if i_total == 0.0:
        raise ConfigError("discharge current is zero")
    z, vt, n, reason = kernels.single_rk4(
        config.z0, capacity_ah * SECONDS_PER_HOUR, resistance_ohm, i_total,
        config.dt, _n_max(config), config.v_cutoff, config.soc_floor,
        config.t_max)
    if reason == 4:
        raise IntegrationError(
            "SOC left [-1e-9, 1+1e-9] during integration; reduce dt")
    t = np.arange(n) * config.dt
    cur = np.full(n, i_total)
    q = np.abs(i_total) * t / SECONDS_PER_HOUR
    zeros = np.zeros(n)
    return SimTrace(
        t=t, i_total=cur, i1=cur.copy(), i2=zeros, z1=z, z2=zeros.copy(),
        q_pair=q, q1=capacity_ah * (config.z0 - z), q2=zeros.copy(), v_t=vt,
        reason=_REASONS.get(reason, "n_max"), params=cell, config=config,
        has_cell2=False, current_reversal=bool(np.any(cur > 0.0)))
