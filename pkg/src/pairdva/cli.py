"""Command-line front end: simulate | features | sweep | identify.

Settings resolve in three layers: built-in defaults, then a flat
``key = value`` config file (--config), then explicit flags. Unknown config
keys are rejected. Any library error is reported as one machine-readable
JSON object on stderr with a nonzero exit code.
"""

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import fileio
from .errors import ConfigError, FormatError, PairDvaError
from .features import extract_features
from .pairsim import SimConfig, make_pair, simulate_cc_discharge
from .signal import SmoothingConfig
from .sweep import identify_product, product_curve, run_sweep

OUTDIR_ENV = "PAIRDVA_OUTDIR"

# key -> (caster, default)
_FLOAT = float


def _float_or_none(text):
    if isinstance(text, str) and text.strip().lower() in ("none", ""):
        return None
    return float(text)


_SCHEMA = {
    "alpha": (_FLOAT, 1.0),
    "beta": (_FLOAT, 1.0),
    "c_total_ah": (_FLOAT, 120.0),
    "r_parallel_ohm": (_FLOAT, 0.001),
    "c_rate": (_FLOAT, 1.0 / 3.0),
    "dt_s": (_FLOAT, 1.0),
    "z0": (_FLOAT, 1.0),
    "v_cutoff_v": (_FLOAT, 3.0),
    "soc_floor": (_FLOAT, 0.02),
    "t_max_s": (_float_or_none, None),
    "dq_ah": (_FLOAT, 0.05),
    "sg_window": (int, 25),
    "sg_order": (int, 3),
    "v_lo": (_FLOAT, 3.7),
    "v_hi": (_FLOAT, 3.9),
    "density_floor": (_FLOAT, 0.005),
    "fit_tol": (_FLOAT, 0.005),
    "alpha_min": (_FLOAT, 0.5),
    "alpha_max": (_FLOAT, 1.0),
    "alpha_steps": (int, 11),
    "beta_min": (_FLOAT, 1.0),
    "beta_max": (_FLOAT, 2.0),
    "beta_steps": (int, 11),
    "bin_width": (_FLOAT, 0.02),
    "workers": (int, 1),
    "skew_resolution": (_float_or_none, None),
    "outdir": (str, None),
    "out": (str, None),
}


def load_config_file(path) -> dict:
    """Parse a flat key = value file; '#' starts a comment."""
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise FormatError(f"cannot read config file {path}: {err}") from err
    values = {}
    for ln_no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(
                f"config line {ln_no}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"unknown config key {key!r}")
        caster = _SCHEMA[key][0]
        try:
            values[key] = caster(val)
        except ValueError as err:
            raise ConfigError(
                f"config key {key!r}: bad value {val!r} ({err})") from err
    return values


def resolve_config(args) -> dict:
    """defaults, then config file, then explicit flags."""
    cfg = {key: default for key, (_, default) in _SCHEMA.items()}
    if getattr(args, "config", None):
        cfg.update(load_config_file(args.config))
    for key in _SCHEMA:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _outdir(cfg) -> Path:
    outdir = cfg["outdir"] or os.environ.get(OUTDIR_ENV) or "."
    path = Path(outdir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _sim_config(cfg) -> SimConfig:
    return SimConfig(c_rate=cfg["c_rate"], dt=cfg["dt_s"], z0=cfg["z0"],
                     v_cutoff=cfg["v_cutoff_v"], soc_floor=cfg["soc_floor"],
                     t_max=cfg["t_max_s"])


def _smoothing(cfg) -> SmoothingConfig:
    return SmoothingConfig(dq_ah=cfg["dq_ah"], sg_window=cfg["sg_window"],
                           sg_order=cfg["sg_order"])


def _echo(cfg) -> dict:
    return {key: cfg[key] for key in _SCHEMA}


def _emit(text: str, cfg, sidecar: dict = None):
    """Write text to stdout or to <outdir>/<out>, with optional sidecar."""
    out = cfg["out"]
    if out in (None, "-"):
        sys.stdout.write(text)
        return
    path = _outdir(cfg) / out
    path.write_text(text)
    print(path)
    if sidecar is not None:
        side_path = path.with_name(path.stem + ".config.json")
        fileio.write_json(sidecar, side_path)
        print(side_path)


def cmd_simulate(args) -> int:
    cfg = resolve_config(args)
    pair = make_pair(cfg["alpha"], cfg["beta"], cfg["c_total_ah"],
                     cfg["r_parallel_ohm"])
    trace = simulate_cc_discharge(pair, _sim_config(cfg))
    outdir = _outdir(cfg)
    base = cfg["out"] or "trace"
    csv_path = outdir / f"{base}.csv"
    side_path = outdir / f"{base}.json"
    fileio.write_trace_csv(trace, csv_path)
    fileio.write_json(fileio.trace_sidecar(trace, run_config=_echo(cfg)),
                      side_path)
    print(csv_path)
    print(side_path)
    return 0


def cmd_features(args) -> int:
    cfg = resolve_config(args)
    trace = fileio.read_trace_csv(args.trace)
    feats = extract_features(trace, _smoothing(cfg), cfg["v_lo"], cfg["v_hi"],
                             cfg["density_floor"], cfg["fit_tol"])
    sidecar = {"kind": "features_config", "input": str(args.trace),
               "run_config": _echo(cfg)}
    _emit(fileio.dumps_json(fileio.features_dict(feats)), cfg, sidecar)
    return 0


def cmd_sweep(args) -> int:
    cfg = resolve_config(args)
    alpha_grid = np.round(np.linspace(cfg["alpha_min"], cfg["alpha_max"],
                                      cfg["alpha_steps"]), 12)
    beta_grid = np.round(np.linspace(cfg["beta_min"], cfg["beta_max"],
                                     cfg["beta_steps"]), 12)
    fmap = run_sweep(alpha_grid, beta_grid, c_total=cfg["c_total_ah"],
                     r_parallel=cfg["r_parallel_ohm"],
                     sim_config=_sim_config(cfg), smoothing=_smoothing(cfg),
                     v_lo=cfg["v_lo"], v_hi=cfg["v_hi"],
                     density_floor=cfg["density_floor"],
                     fit_tol=cfg["fit_tol"], workers=cfg["workers"])
    curve = product_curve(fmap, cfg["bin_width"])
    outdir = _outdir(cfg)
    map_path = outdir / "featuremap.csv"
    curve_path = outdir / "product_curve.csv"
    side_path = outdir / "sweep.json"
    fileio.write_featuremap_csv(fmap, map_path)
    fileio.write_product_curve_csv(curve, curve_path)
    fileio.write_json(fileio.sweep_sidecar(fmap, run_config=_echo(cfg)),
                      side_path)
    print(map_path)
    print(curve_path)
    print(side_path)
    return 0


def cmd_identify(args) -> int:
    cfg = resolve_config(args)
    feats = fileio.read_features_json(args.features)
    curve = fileio.read_product_curve_csv(args.curve)
    result = identify_product(feats, curve,
                              skew_resolution=cfg["skew_resolution"])
    doc = fileio.identification_dict(result, run_config=_echo(cfg))
    doc["inputs"] = {"features": str(args.features), "curve": str(args.curve)}
    _emit(fileio.dumps_json(doc), cfg)
    return 0


def _add_keys(parser, keys):
    for key in keys:
        caster, _ = _SCHEMA[key]
        flag = "--" + key.replace("_", "-")
        parser.add_argument(flag, dest=key, type=caster, default=None,
                            metavar=key.upper())


_SCENARIO = ("alpha", "beta", "c_total_ah", "r_parallel_ohm")
_SIM = ("c_rate", "dt_s", "z0", "v_cutoff_v", "soc_floor", "t_max_s")
_SMOOTH = ("dq_ah", "sg_window", "sg_order")
_WINDOW = ("v_lo", "v_hi", "density_floor", "fit_tol")
_GRID = ("alpha_min", "alpha_max", "alpha_steps", "beta_min", "beta_max",
         "beta_steps", "bin_width", "workers")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pairdva",
        description="Simulate parallel cell-pair discharges and diagnose "
                    "capacity/resistance imbalance from dV/dQ peak shape.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None,
                       help="flat key = value settings file")
        p.add_argument("--outdir", dest="outdir", default=None,
                       help=f"output directory (default: ${OUTDIR_ENV} or .)")

    p_sim = sub.add_parser("simulate",
                           help="CC-discharge one pair; write trace CSV")
    common(p_sim)
    _add_keys(p_sim, _SCENARIO + _SIM)
    p_sim.add_argument("--out", dest="out", default=None,
                       help="output base name (default: trace)")
    p_sim.set_defaults(func=cmd_simulate)

    p_feat = sub.add_parser("features",
                            help="extract peak features from a trace CSV")
    common(p_feat)
    p_feat.add_argument("trace", help="trace CSV (t_s,i_total_A,vt_V needed)")
    _add_keys(p_feat, _SMOOTH + _WINDOW)
    p_feat.add_argument("--out", dest="out", default=None,
                        help="output file name, or - for stdout (default)")
    p_feat.set_defaults(func=cmd_features)

    p_sweep = sub.add_parser("sweep",
                             help="sweep the (alpha, beta) grid and bin by "
                                  "product")
    common(p_sweep)
    _add_keys(p_sweep, ("c_total_ah", "r_parallel_ohm") + _SIM + _SMOOTH
              + _WINDOW + _GRID)
    p_sweep.set_defaults(func=cmd_sweep)

    p_id = sub.add_parser("identify",
                          help="estimate the imbalance product from features")
    common(p_id)
    p_id.add_argument("features", help="features JSON file")
    p_id.add_argument("curve", help="product-curve CSV from a sweep")
    p_id.add_argument("--skew-resolution", dest="skew_resolution",
                      type=_float_or_none, default=None,
                      metavar="SKEW_RESOLUTION")
    p_id.add_argument("--out", dest="out", default=None,
                      help="output file name, or - for stdout (default)")
    p_id.set_defaults(func=cmd_identify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PairDvaError as err:
        doc = {"error": type(err).__name__, "stage": err.stage,
               "message": str(err)}
        print(json.dumps(doc), file=sys.stderr)
        return 2 if isinstance(err, (ConfigError, FormatError)) else 1


if __name__ == "__main__":
    sys.exit(main())
