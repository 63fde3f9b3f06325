"""JSON scenario configs: schema checks and IFS construction.

A config is a JSON object::

    {
      "schema_version": 1,
      "scenario": "torus_r4",
      "ifs": {"builtin": "torus_r4"},
      "params": {...},
      "estimator": {"method": "box", "cloud_size": 100000, ...},
      "output": {"report": "out/torus.json", "csv": "out/torus.csv"}
    }

Unknown keys anywhere in the known sections are rejected.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .ifs import WeightedIFS, validate
from .linalg import block_rotation, expm_skew, is_orthogonal, is_skew, plane_rotation

SCHEMA_VERSION = 1
SCENARIOS = (
    "marstrand_sweep",
    "line_hyperplane",
    "one_param",
    "torus_r4",
    "sharpness",
    "orbit_constancy",
    "restricted_sweep",
)
TOP_KEYS = {"schema_version", "scenario", "ifs", "params", "estimator", "output"}
ESTIMATOR_KEYS = {"method", "cloud_size", "depth_tolerance", "offsets", "seed", "tolerance"}
OUTPUT_KEYS = {"report", "csv", "samples", "plot"}
IFS_KEYS = {"builtin", "maps", "weights"}
MAP_KEYS = {"ratio", "rotation", "translation"}
ROTATION_KEYS = {"matrix", "identity", "plane_rotation", "block_rotation", "generator", "t"}

ESTIMATOR_DEFAULTS = {
    "method": "box",
    "cloud_size": 100000,
    "depth_tolerance": 1e-6,
    "offsets": 8,
    "seed": 0,
    "tolerance": None,
}

# Allowed params per scenario, with defaults.
PARAM_DEFAULTS = {
    "marstrand_sweep": {"k": 1, "planes": 5},
    "line_hyperplane": {"direction": [1.0, 0.0, 1.0]},
    "one_param": {"rates": [1.0, 2.0], "generator": None, "v": [1.0, 0.0, 1.0, 0.0], "ks": [1, 2, 3]},
    "torus_r4": {"planes": 5, "lambda_range": [0.5, 2.0]},
    "sharpness": {"axis": 0},
    "orbit_constancy": {"x": [1.0, 0.0, 1.0, 0.0], "lambda": 1.0, "basis": None, "g_samples": 50},
    "restricted_sweep": {"curve": "model_curve_s2", "k": 1, "grid": [-1.0, 1.0, 21], "threshold": 0.15, "max_fraction": 0.05},
}


def _check_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    extra = sorted(set(obj) - set(allowed))
    if extra:
        raise ConfigError(f"{where}: unknown keys {extra}")


def rotation_from_spec(spec, d):
    """Orthogonal d x d matrix from a rotation spec."""
    if spec is None or spec == "identity":
        return np.eye(d)
    _check_keys(spec, ROTATION_KEYS, "rotation")
    if spec.get("identity"):
        return np.eye(d)
    if "matrix" in spec:
        m = np.array(spec["matrix"], dtype=float)
        if m.shape != (d, d) or not is_orthogonal(m, 1e-10):
            raise ConfigError(f"rotation matrix must be orthogonal {d}x{d}")
        return m
    if "plane_rotation" in spec:
        pr = spec["plane_rotation"]
        _check_keys(pr, {"i", "j", "angle"}, "plane_rotation")
        return plane_rotation(d, int(pr["i"]), int(pr["j"]), float(pr["angle"]))
    if "block_rotation" in spec:
        return block_rotation([float(a) for a in spec["block_rotation"]], d)
    if "generator" in spec:
        a = np.array(spec["generator"], dtype=float) * float(spec.get("t", 1.0))
        if a.shape != (d, d) or not is_skew(a, 1e-12):
            raise ConfigError("generator must be a skew-symmetric d x d matrix")
        return expm_skew(a)
    raise ConfigError("rotation spec names no construction")


def ifs_from_spec(spec):
    from . import experiments

    _check_keys(spec, IFS_KEYS, "ifs")
    if "builtin" in spec:
        name = spec["builtin"]
        if name not in experiments.BUILTIN_IFS:
            raise ConfigError(f"unknown builtin IFS {name!r}")
        return experiments.BUILTIN_IFS[name]()
    maps = spec.get("maps")
    if not maps:
        raise ConfigError("ifs needs 'builtin' or a nonempty 'maps' list")
    ratios, rots, trans = [], [], []
    for i, m in enumerate(maps):
        _check_keys(m, MAP_KEYS, f"ifs.maps[{i}]")
        t = np.array(m["translation"], dtype=float).reshape(-1)
        ratios.append(float(m["ratio"]))
        rots.append(rotation_from_spec(m.get("rotation"), len(t)))
        trans.append(t)
    ifs = WeightedIFS.from_parts(ratios, rots, trans, spec.get("weights"))
    problems = validate(ifs)
    if problems:
        raise ConfigError("invalid IFS: " + "; ".join(problems))
    return ifs


def normalize(cfg):
    """Check a raw config dict and fill in defaults; returns a new dict."""
    _check_keys(cfg, TOP_KEYS, "config")
    if cfg.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"schema_version must be {SCHEMA_VERSION}")
    scenario = cfg.get("scenario")
    if scenario not in SCENARIOS:
        raise ConfigError(f"scenario must be one of {list(SCENARIOS)}")
    params = dict(PARAM_DEFAULTS[scenario])
    raw = cfg.get("params", {})
    _check_keys(raw, params, f"params ({scenario})")
    params.update(raw)
    est = dict(ESTIMATOR_DEFAULTS)
    raw = cfg.get("estimator", {})
    _check_keys(raw, ESTIMATOR_KEYS, "estimator")
    est.update(raw)
    if est["method"] not in ("box", "entropy"):
        raise ConfigError("estimator.method must be 'box' or 'entropy'")
    if int(est["cloud_size"]) < 100:
        raise ConfigError("estimator.cloud_size must be >= 100")
    if not 0 < float(est["depth_tolerance"]) < 1:
        raise ConfigError("estimator.depth_tolerance must be in (0, 1)")
    out = cfg.get("output", {})
    _check_keys(out, OUTPUT_KEYS, "output")
    ifs_spec = cfg.get("ifs")
    if ifs_spec is not None:
        ifs_from_spec(ifs_spec)
    return {
        "schema_version": SCHEMA_VERSION,
        "scenario": scenario,
        "ifs": ifs_spec,
        "params": params,
        "estimator": est,
        "output": dict(out),
    }


def load(path):
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file {path} not found") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return normalize(raw)
