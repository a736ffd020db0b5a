"""Pair construction, current split, and the CC discharge integrator."""

import numpy as np
import pytest

from pairdva import (CellParams, ConfigError, DomainError, IntegrationError,
                     SimConfig, current_split, make_pair, ocv,
                     simulate_cc_discharge, single_cell_reference,
                     terminal_voltage)
from pairdva import kernels


def consistency_residuals(tr):
    kcl = np.abs(tr.i1 + tr.i2 - tr.i_total).max()
    qbal = np.abs(tr.q1 + tr.q2 - tr.q_pair).max()
    v1 = ocv(tr.z1) + tr.params.cell1.resistance_ohm * tr.i1
    v2 = ocv(tr.z2) + tr.params.cell2.resistance_ohm * tr.i2
    vcons = max(np.abs(v1 - tr.v_t).max(), np.abs(v2 - tr.v_t).max())
    return kcl, qbal, vcons


# --- pair construction ------------------------------------------------------

def test_make_pair_balanced():
    p = make_pair(1.0, 1.0)
    assert (p.cell1.capacity_ah, p.cell2.capacity_ah) == (60.0, 60.0)
    assert (p.cell1.resistance_ohm, p.cell2.resistance_ohm) == (0.002, 0.002)


def test_make_pair_capacity_imbalance():
    p = make_pair(0.5, 1.0)
    assert (p.cell1.capacity_ah, p.cell2.capacity_ah) == (80.0, 40.0)
    assert (p.cell1.resistance_ohm, p.cell2.resistance_ohm) == (0.002, 0.002)


def test_make_pair_resistance_imbalance():
    p = make_pair(1.0, 2.0)
    assert (p.cell1.capacity_ah, p.cell2.capacity_ah) == (60.0, 60.0)
    assert (p.cell1.resistance_ohm, p.cell2.resistance_ohm) == (0.0015, 0.003)


def test_make_pair_preserves_totals_and_ratios():
    rng = np.random.default_rng(7)
    for _ in range(50):
        a = float(rng.uniform(0.05, 1.0))
        b = float(rng.uniform(1.0, 5.0))
        p = make_pair(a, b)
        c1, c2 = p.cell1.capacity_ah, p.cell2.capacity_ah
        r1, r2 = p.cell1.resistance_ohm, p.cell2.resistance_ohm
        assert c1 + c2 == pytest.approx(120.0, rel=1e-12)
        assert 1.0 / (1.0 / r1 + 1.0 / r2) == pytest.approx(0.001, rel=1e-12)
        assert p.alpha == pytest.approx(a, rel=1e-12)
        assert p.beta == pytest.approx(b, rel=1e-12)
        assert c2 <= c1 and r2 >= r1


def test_make_pair_rejects_bad_ratios():
    for a, b in ((0.0, 1.0), (-0.5, 1.0), (1.2, 1.0), (1.0, 0.5), (1.0, 0.0)):
        with pytest.raises(ConfigError):
            make_pair(a, b)
    with pytest.raises(ConfigError):
        make_pair(1.0, 1.0, c_total=0.0)
    with pytest.raises(ConfigError):
        make_pair(1.0, 1.0, r_parallel=-1.0)


def test_cell_params_validated():
    with pytest.raises(ConfigError):
        CellParams(capacity_ah=0.0, resistance_ohm=0.001)
    with pytest.raises(ConfigError):
        CellParams(capacity_ah=60.0, resistance_ohm=0.0)


def test_sim_config_validated():
    with pytest.raises(ConfigError):
        SimConfig(dt=0.0)
    with pytest.raises(ConfigError):
        SimConfig(z0=0.0)
    with pytest.raises(ConfigError):
        SimConfig(z0=1.1)
    with pytest.raises(ConfigError):
        SimConfig(soc_floor=0.5)
    with pytest.raises(ConfigError):
        SimConfig(c_rate=-1.0)
    with pytest.raises(ConfigError):
        SimConfig(v_cutoff=10.0)
    # default time limit covers the discharge with margin
    assert SimConfig().t_max == pytest.approx(54000.0)


# --- algebraic split and voltage -------------------------------------------

def test_equal_soc_split_is_resistive_divider():
    p = make_pair(1.0, 2.0)        # r1 = 1.5 mOhm, r2 = 3 mOhm
    i1, i2 = current_split(1.0, 1.0, p, -40.0)
    assert i1 == pytest.approx(-40.0 * 2.0 / 3.0, abs=1e-12)
    assert i2 == pytest.approx(-40.0 / 3.0, abs=1e-12)


def test_higher_soc_cell_carries_more_current():
    p = make_pair(1.0, 1.0)
    i1, i2 = current_split(0.6, 0.5, p, -40.0)
    assert i1 + i2 == pytest.approx(-40.0, abs=1e-12)
    assert abs(i1) > abs(i2)


def test_terminal_voltage_consistent_with_both_cells():
    rng = np.random.default_rng(11)
    p = make_pair(0.7, 1.6)
    r1 = p.cell1.resistance_ohm
    r2 = p.cell2.resistance_ohm
    for _ in range(100):
        z1 = float(rng.uniform(0.05, 1.0))
        z2 = float(rng.uniform(0.05, 1.0))
        i_total = float(rng.uniform(-120.0, 0.0))
        v = terminal_voltage(z1, z2, p, i_total)
        i1, i2 = current_split(z1, z2, p, i_total)
        assert v == pytest.approx(float(ocv(z1)) + r1 * i1, abs=1e-12)
        assert v == pytest.approx(float(ocv(z2)) + r2 * i2, abs=1e-12)


def test_split_rejects_out_of_range_soc():
    p = make_pair(1.0, 1.0)
    with pytest.raises(DomainError):
        current_split(1.2, 0.5, p, -40.0)
    with pytest.raises(DomainError):
        terminal_voltage(0.5, -0.1, p, -40.0)


# --- integration ------------------------------------------------------------

def test_balanced_trace_shape(balanced_trace):
    tr = balanced_trace
    assert len(tr) == 10585
    assert tr.reason == "soc_floor"
    assert tr.i_total == pytest.approx(-40.0)
    assert tr.v_t[-1] == pytest.approx(3.284279622032658, abs=1e-9)
    assert not tr.current_reversal


def test_balanced_cells_stay_identical(balanced_trace):
    tr = balanced_trace
    assert np.abs(tr.z1 - tr.z2).max() == 0.0
    assert np.abs(tr.i1 - tr.i2).max() == 0.0


def test_conservation_on_varied_scenarios():
    cases = [(1.0, 1.0, {}), (0.7, 1.6, {}), (0.5, 2.0, {}),
             (0.6, 1.0, dict(c_rate=1.0, dt=0.2)),
             (1.0, 1.9, dict(z0=0.9))]
    for a, b, kw in cases:
        tr = simulate_cc_discharge(make_pair(a, b), config=SimConfig(**kw))
        kcl, qbal, vcons = consistency_residuals(tr)
        assert kcl < 1e-9
        assert qbal < 1e-9
        assert vcons < 1e-9


def test_charge_bookkeeping_linear_in_time():
    tr = simulate_cc_discharge(make_pair(0.8, 1.3))
    expected = np.abs(tr.i_total) * tr.t / 3600.0
    assert np.allclose(tr.q_pair, expected, rtol=0.0, atol=1e-12)
    # per-cell coulombs come from SOC drops
    c1 = tr.params.cell1.capacity_ah
    c2 = tr.params.cell2.capacity_ah
    assert np.allclose(tr.q1, c1 * (1.0 - tr.z1), rtol=0.0, atol=1e-12)
    assert np.allclose(tr.q2, c2 * (1.0 - tr.z2), rtol=0.0, atol=1e-12)


def test_soc_monotone_under_discharge():
    tr = simulate_cc_discharge(make_pair(0.6, 1.8))
    assert np.all(np.diff(tr.z1) < 0.0)
    assert np.all(np.diff(tr.z2) < 0.0)


def test_nullified_pairs_track_balanced(balanced_trace):
    for a, b in ((0.5, 2.0), (0.8, 1.25)):
        tr = simulate_cc_discharge(make_pair(a, b))
        assert np.abs(tr.z1 - tr.z2).max() < 1e-9
        n = min(len(tr), len(balanced_trace))
        assert np.abs(tr.v_t[:n] - balanced_trace.v_t[:n]).max() < 1e-9


def test_termination_reasons():
    tr = simulate_cc_discharge(make_pair(1.0, 1.0), config=SimConfig(t_max=100.0))
    assert tr.reason == "t_max"
    assert len(tr) == 101 and tr.t[-1] == 100.0

    tr = simulate_cc_discharge(make_pair(1.0, 1.0), config=SimConfig(v_cutoff=3.6))
    assert tr.reason == "v_cutoff"
    assert tr.v_t[-1] <= 3.6

    tr = simulate_cc_discharge(make_pair(1.0, 1.0))
    assert tr.reason == "soc_floor"
    assert min(tr.z1[-1], tr.z2[-1]) <= 0.02


def test_oversized_step_raises_integration_error():
    # one 700 s step at 3C jumps straight past the SOC floor
    cfg = SimConfig(c_rate=3.0, dt=700.0, soc_floor=0.0, t_max=7000.0)
    with pytest.raises(IntegrationError):
        simulate_cc_discharge(make_pair(1.0, 1.0), config=cfg)


def test_kernel_flags_soc_excursion_when_charging():
    out = kernels.pair_rk4(0.99, 0.99, 3600.0 * 60.0, 3600.0 * 60.0,
                           0.002, 0.002, 40.0, 60.0, 1000, 3.0, 0.02, 1.0e9)
    assert out[6] == 4


def test_step_halving_converged():
    p = make_pair(0.7, 1.6)
    tr1 = simulate_cc_discharge(p, config=SimConfig(dt=1.0))
    tr2 = simulate_cc_discharge(p, config=SimConfig(dt=0.5))
    n = min(len(tr1), (len(tr2) + 1) // 2)
    assert np.abs(tr1.v_t[:n] - tr2.v_t[::2][:n]).max() < 1e-6


def test_random_scenarios_stay_consistent():
    rng = np.random.default_rng(2024)
    for _ in range(15):
        a = float(rng.uniform(0.3, 1.0))
        b = float(rng.uniform(1.0, 2.5))
        c_rate = float(rng.uniform(0.2, 1.5))
        dt = float(rng.choice([0.5, 1.0, 2.0]))
        tr = simulate_cc_discharge(make_pair(a, b),
                                   config=SimConfig(c_rate=c_rate, dt=dt))
        assert tr.reason in ("v_cutoff", "soc_floor", "t_max")
        kcl, qbal, vcons = consistency_residuals(tr)
        assert kcl < 1e-9 and qbal < 1e-9 and vcons < 1e-9
        assert np.all(np.diff(tr.z1) < 0.0)


def test_single_cell_reference_matches_ohmic_model():
    tr = single_cell_reference(120.0, 0.001)
    assert not tr.has_cell2
    assert np.all(tr.i2 == 0.0) and np.all(tr.z2 == 0.0)
    v = ocv(tr.z1) + 0.001 * tr.i1
    assert np.abs(v - tr.v_t).max() < 1e-12


def test_parallel_pair_equals_lumped_single_cell(balanced_trace):
    single = single_cell_reference(120.0, 0.001)
    n = min(len(balanced_trace), len(single))
    assert np.abs(balanced_trace.v_t[:n] - single.v_t[:n]).max() < 1e-9


def test_current_reversal_flag_set_when_weak_cell_recharges():
    # strong resistance imbalance with a small weak cell forces a sign flip
    tr = simulate_cc_discharge(make_pair(0.1, 1.0), config=SimConfig(c_rate=1.0))
    assert tr.current_reversal == bool((tr.i1 > 0).any() or (tr.i2 > 0).any())
