"""CSV and JSON serialization with reproducible float formatting.

Every float is written with 12 significant digits, so identical inputs
produce byte-identical files. Sidecar JSONs echo the fully resolved
configuration so any output can regenerate its run.
"""

import json
from pathlib import Path

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import FormatError
from .features import PeakFeatures, SurrogateFit
from .pairsim import CellParams, PairParams, SimConfig, SimTrace
from .signal import DvDqCurve, SmoothingConfig
from .sweep import FeatureMap, IdentificationResult, ProductBin, ProductCurve

TRACE_HEADER = "t_s,i_total_A,i1_A,i2_A,z1,z2,q_pair_Ah,q1_Ah,q2_Ah,vt_V"
CURVE_HEADER = "q_Ah,v_V,dvdq_V_per_Ah"
FEATUREMAP_HEADER = "alpha,beta,product,height_V_per_Ah,skewness,status"
PRODUCT_CURVE_HEADER = ("product,mean_height,mean_skewness,spread_height,"
                        "spread_skewness,n")

_TRACE_COLUMNS = TRACE_HEADER.split(",")
_REQUIRED_COLUMNS = ("t_s", "i_total_A", "vt_V")


def fmt(x) -> str:
    """Canonical 12-significant-digit text form of a float."""
    return f"{float(x):.12g}"


def _round12(x):
    return float(fmt(x))


def _rounded(obj):
    """Recursively round floats for JSON output."""
    if isinstance(obj, float):
        return _round12(obj)
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v) for v in obj]
    return obj


def write_json(obj, path):
    Path(path).write_text(json.dumps(_rounded(obj), indent=2) + "\n")


def dumps_json(obj) -> str:
    return json.dumps(_rounded(obj), indent=2) + "\n"


# --- simulation traces -----------------------------------------------------

def write_trace_csv(trace: SimTrace, path):
    cols = (trace.t, trace.i_total, trace.i1, trace.i2, trace.z1, trace.z2,
            trace.q_pair, trace.q1, trace.q2, trace.v_t)
    lines = [TRACE_HEADER]
    for k in range(len(trace)):
        lines.append(",".join(fmt(c[k]) for c in cols))
    Path(path).write_text("\n".join(lines) + "\n")


def _cell_dict(cell: CellParams):
    return {"capacity_ah": cell.capacity_ah,
            "resistance_ohm": cell.resistance_ohm}


def params_dict(params):
    if isinstance(params, PairParams):
        return {"cell1": _cell_dict(params.cell1),
                "cell2": _cell_dict(params.cell2),
                "r_tot_ohm": params.r_tot,
                "alpha": params.alpha,
                "beta": params.beta}
    if isinstance(params, CellParams):
        return {"cell": _cell_dict(params)}
    return None


def sim_config_dict(config: SimConfig):
    if config is None:
        return None
    return {"c_rate": config.c_rate, "dt": config.dt, "z0": config.z0,
            "v_cutoff": config.v_cutoff, "soc_floor": config.soc_floor,
            "t_max": config.t_max}


def smoothing_dict(config: SmoothingConfig):
    if config is None:
        return None
    return {"dq_ah": config.dq_ah, "sg_window": config.sg_window,
            "sg_order": config.sg_order}


def trace_sidecar(trace: SimTrace, run_config: dict = None) -> dict:
    side = {
        "kind": "sim_trace",
        "params": params_dict(trace.params),
        "sim_config": sim_config_dict(trace.config),
        "termination_reason": trace.reason,
        "single_cell": not trace.has_cell2,
        "current_reversal": trace.current_reversal,
    }
    if run_config is not None:
        side["run_config"] = dict(run_config)
    return side


def read_trace_csv(path) -> SimTrace:
    """Read a trace CSV; only t_s, i_total_A, vt_V are required.

    Missing charge columns are rebuilt by integrating |i_total| over time,
    so measured pair-level data fits through the same format.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise FormatError(f"cannot read {path}: {err}") from err
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError(f"{path} is empty")
    header = [h.strip() for h in lines[0].split(",")]
    unknown = set(header) - set(_TRACE_COLUMNS)
    if unknown:
        raise FormatError(f"unknown trace columns: {sorted(unknown)}")
    missing = [c for c in _REQUIRED_COLUMNS if c not in header]
    if missing:
        raise FormatError(f"trace file missing required columns: {missing}")
    try:
        data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    except ValueError as err:
        raise FormatError(f"non-numeric cell in {path}: {err}") from err
    if data.ndim != 2 or data.shape[0] < 2 or data.shape[1] != len(header):
        raise FormatError(f"{path} has no usable data rows")
    col = {name: data[:, i] for i, name in enumerate(header)}

    t = col["t_s"]
    i_total = col["i_total_A"]
    v_t = col["vt_V"]
    n = len(t)
    if "q_pair_Ah" in col:
        q_pair = col["q_pair_Ah"]
    else:
        q_pair = cumulative_trapezoid(np.abs(i_total), t, initial=0.0) / 3600.0
    per_cell = all(name in col for name in
                   ("i1_A", "i2_A", "z1", "z2", "q1_Ah", "q2_Ah"))
    zeros = np.zeros(n)
    return SimTrace(
        t=t, i_total=i_total,
        i1=col.get("i1_A", zeros), i2=col.get("i2_A", zeros),
        z1=col.get("z1", zeros), z2=col.get("z2", zeros),
        q_pair=q_pair,
        q1=col.get("q1_Ah", zeros), q2=col.get("q2_Ah", zeros),
        v_t=v_t, reason="unknown", params=None, config=None,
        has_cell2=per_cell)


# --- dV/dQ curves -----------------------------------------------------------

def write_curve_csv(curve: DvDqCurve, path):
    lines = [CURVE_HEADER]
    for k in range(len(curve)):
        lines.append(f"{fmt(curve.q[k])},{fmt(curve.v[k])},"
                     f"{fmt(curve.dvdq[k])}")
    Path(path).write_text("\n".join(lines) + "\n")


def curve_sidecar(curve: DvDqCurve, run_config: dict = None) -> dict:
    side = {"kind": "dvdq_curve", "source": curve.source,
            "smoothing": smoothing_dict(curve.smoothing)}
    if run_config is not None:
        side["run_config"] = dict(run_config)
    return side


# --- features ----------------------------------------------------------------

def features_dict(features: PeakFeatures) -> dict:
    fit = features.fit
    return {
        "height_V_per_Ah": features.height,
        "q_at_peak_Ah": features.q_at_peak,
        "v_at_peak_V": features.v_at_peak,
        "skewness": features.skewness,
        "fit": {
            "a": fit.a, "b": fit.b, "c": fit.c,
            "d": fit.d, "e": fit.e, "f": fit.f,
            "residual_rms_V": fit.residual_rms,
            "converged": fit.converged,
        },
        "window_V": [features.window[0], features.window[1]],
    }


def write_features_json(features: PeakFeatures, path):
    write_json(features_dict(features), path)


def read_features_json(path) -> PeakFeatures:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as err:
        raise FormatError(f"cannot parse features file {path}: {err}") from err
    try:
        fit = doc["fit"]
        return PeakFeatures(
            height=float(doc["height_V_per_Ah"]),
            q_at_peak=float(doc["q_at_peak_Ah"]),
            v_at_peak=float(doc["v_at_peak_V"]),
            skewness=float(doc["skewness"]),
            fit=SurrogateFit(
                a=float(fit["a"]), b=float(fit["b"]), c=float(fit["c"]),
                d=float(fit["d"]), e=float(fit["e"]), f=float(fit["f"]),
                residual_rms=float(fit["residual_rms_V"]),
                converged=bool(fit["converged"])),
            window=tuple(doc["window_V"]))
    except (KeyError, TypeError, ValueError) as err:
        raise FormatError(
            f"features file {path} missing field: {err}") from err


# --- sweeps ------------------------------------------------------------------

def write_featuremap_csv(fmap: FeatureMap, path):
    lines = [FEATUREMAP_HEADER]
    for cell in fmap.cells:
        if cell.ok:
            h = fmt(cell.features.height)
            s = fmt(cell.features.skewness)
        else:
            h = "nan"
            s = "nan"
        lines.append(f"{fmt(cell.alpha)},{fmt(cell.beta)},"
                     f"{fmt(cell.product)},{h},{s},{cell.status}")
    Path(path).write_text("\n".join(lines) + "\n")


def sweep_sidecar(fmap: FeatureMap, run_config: dict = None) -> dict:
    side = {
        "kind": "feature_map",
        "alpha_grid": [float(a) for a in fmap.alpha_grid],
        "beta_grid": [float(b) for b in fmap.beta_grid],
        "c_total_ah": fmap.c_total,
        "r_parallel_ohm": fmap.r_parallel,
        "sim_config": sim_config_dict(fmap.sim_config),
        "smoothing": smoothing_dict(fmap.smoothing),
        "n_ok": sum(1 for c in fmap.cells if c.ok),
        "n_cells": len(fmap.cells),
    }
    if run_config is not None:
        side["run_config"] = dict(run_config)
    return side


def write_product_curve_csv(curve: ProductCurve, path):
    lines = [PRODUCT_CURVE_HEADER]
    for r in curve.rows:
        lines.append(f"{fmt(r.product)},{fmt(r.mean_height)},"
                     f"{fmt(r.mean_skewness)},{fmt(r.spread_height)},"
                     f"{fmt(r.spread_skewness)},{r.n}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_product_curve_csv(path) -> ProductCurve:
    path = Path(path)
    try:
        lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    except OSError as err:
        raise FormatError(f"cannot read {path}: {err}") from err
    if not lines or lines[0] != PRODUCT_CURVE_HEADER:
        raise FormatError(f"{path} is not a product-curve CSV")
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 6:
            raise FormatError(f"bad product-curve row: {ln!r}")
        try:
            rows.append(ProductBin(
                product=float(parts[0]), mean_height=float(parts[1]),
                mean_skewness=float(parts[2]), spread_height=float(parts[3]),
                spread_skewness=float(parts[4]), n=int(parts[5])))
        except ValueError as err:
            raise FormatError(f"bad product-curve row {ln!r}: {err}") from err
    if not rows:
        raise FormatError(f"{path} has no data rows")
    return ProductCurve(rows=rows)


def identification_dict(result: IdentificationResult,
                        run_config: dict = None) -> dict:
    doc = {
        "p_hat": result.p_hat,
        "ambiguous": result.ambiguous,
        "candidates": [
            {"p": c.p, "skewness": c.skewness, "skew_distance": c.distance}
            for c in result.candidates],
        "note": result.note,
    }
    if run_config is not None:
        doc["run_config"] = dict(run_config)
    return doc
