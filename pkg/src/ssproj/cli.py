"""Command line entry point.

Exit codes: 0 when all verdicts pass, 2 when a verdict fails, 1 on error.
The thread count is read from SSPROJ_THREADS.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .dimension import estimate
from .errors import SSProjError
from .experiments import DEFAULT_IFS, report_csv, run_scenario
from .ifs import sample_measure, similarity_dimension, strong_separation_margin, validate
from .plotting import PLOTS, emit_plot
from .skewprod import orbit_csv

SEPARATION_GAP = 0.1


def _ifs_of(cfg):
    return cfgmod.ifs_from_spec(cfg["ifs"] or {"builtin": DEFAULT_IFS[cfg["scenario"]]})


def _write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def cmd_validate(args):
    cfg = cfgmod.load(args.config)
    ifs = _ifs_of(cfg)
    problems = validate(ifs)
    for p in problems:
        print(f"invalid: {p}")
    if problems:
        return 1
    print(f"ok: scenario {cfg['scenario']}, {ifs.n} maps in R^{ifs.dim}")
    print(f"similarity dimension {similarity_dimension(ifs):.6f}, separation margin {strong_separation_margin(ifs):.4g}")
    return 0


def _sample(cfg, count=None):
    est = cfg["estimator"]
    return sample_measure(_ifs_of(cfg), count or int(est["cloud_size"]), float(est["depth_tolerance"]), int(est["seed"]))


def cmd_sample(args):
    cfg = cfgmod.load(args.config)
    cloud = _sample(cfg, args.count)
    out = args.out or cfg["output"].get("samples") or "samples.npy"
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    if str(out).endswith(".csv"):
        np.savetxt(out, cloud.points, delimiter=",", fmt="%.17g")
    else:
        np.save(out, cloud.points)
    _write(str(out) + ".meta.json", json.dumps(cloud.meta, indent=2) + "\n")
    print(f"wrote {len(cloud)} points to {out}")
    return 0


def cmd_dimest(args):
    cfg = cfgmod.load(args.config)
    cloud = _sample(cfg)
    est = cfg["estimator"]
    res = estimate(cloud, args.method or est["method"], None, int(est["offsets"]), int(est["seed"]))
    rec = res.to_json()
    rec["similarity_dimension"] = similarity_dimension(_ifs_of(cfg))
    # The similarity dimension is the true value only when the pieces are separated.
    rec["separation_suspect"] = abs(rec["value"] - rec["similarity_dimension"]) > SEPARATION_GAP
    keys = ("method", "value", "stderr", "r2", "window", "seed", "similarity_dimension", "separation_suspect")
    print(json.dumps(rec if args.full else {k: rec[k] for k in keys}))
    return 0


def cmd_run(args):
    cfg = cfgmod.load(args.config)
    report = run_scenario(cfg)
    out = cfg["output"]
    report_path = args.out or out.get("report")
    if report_path:
        _write(report_path, json.dumps(report, indent=1) + "\n")
    if out.get("csv"):
        _write(out["csv"], report_csv(report))
        if "orbit" in report:
            _write(str(Path(out["csv"]).with_suffix("")) + "_orbit.csv", orbit_csv(report["orbit"]))
    if out.get("plot"):
        _write(out["plot"], emit_plot(report, default_plot(report)))
    for c in report["cases"]:
        mark = "PASS" if c["passed"] else "FAIL"
        print(f"{mark} {report['scenario']} {c['label']}: value {c['value']:.4f} prediction {c['prediction']:.4f}")
    print(f"runtime {report['runtime_s']:.1f} s")
    return 0 if report["passed"] else 2


def default_plot(report):
    if "orbit" in report:
        return "orbit_hist"
    return "theta_sweep" if "sweep" in report else "loglog"


def cmd_plot(args):
    try:
        report = json.loads(Path(args.report).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SSProjError(f"cannot read report {args.report}: {exc}") from exc
    svg = emit_plot(report, args.kind)
    if args.out:
        _write(args.out, svg)
    else:
        sys.stdout.write(svg)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="ssproj", description="Projections of self-similar measures: sampling, dimension estimates, scenario runs.")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("validate", help="check a config and its IFS")
    v.add_argument("config")
    v.set_defaults(func=cmd_validate)
    s = sub.add_parser("sample", help="sample the self-similar measure to .npy or .csv")
    s.add_argument("config")
    s.add_argument("--out")
    s.add_argument("--count", type=int)
    s.set_defaults(func=cmd_sample)
    d = sub.add_parser("dimest", help="estimate the dimension of the unprojected measure")
    d.add_argument("config")
    d.add_argument("--method", choices=["box", "entropy"])
    d.add_argument("--full", action="store_true", help="include the full scale profile")
    d.set_defaults(func=cmd_dimest)
    r = sub.add_parser("run", help="run the scenario and write its report")
    r.add_argument("config")
    r.add_argument("--out", help="report path (overrides output.report)")
    r.set_defaults(func=cmd_run)
    pl = sub.add_parser("plot", help="render a report as SVG")
    pl.add_argument("report")
    pl.add_argument("--kind", required=True, choices=sorted(PLOTS))
    pl.add_argument("--out")
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SSProjError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
