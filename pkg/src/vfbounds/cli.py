"""Command-line front end.

Exit codes: 0 ok, 2 parse/parameter error, 3 trace validation failure,
4 empty admissible interval (data inconsistent with the two-phase model),
5 phases without contrast.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import boundary, fem, laminate, pairs, splitting, translation
from .errors import ContrastError, DomainError, TraceParseError, TraceValidationError
from .intervals import intersect_all
from .mandel import PhasePair

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_EMPTY, EXIT_CONTRAST = 0, 2, 3, 4, 5


class ConfigError(ValueError):
    pass


def _dump(obj, path):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load_config(path):
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    cfg["_base"] = str(Path(path).resolve().parent)
    return cfg


def _phases(cfg):
    p = cfg.get("phases")
    if p is None:
        raise ConfigError("config needs 'phases'")
    try:
        if isinstance(p, dict):
            vals = [p["kappa1"], p["mu1"], p["kappa2"], p["mu2"]]
        else:
            vals = list(p)
        if len(vals) != 4:
            raise ConfigError("'phases' needs kappa1, mu1, kappa2, mu2")
        return PhasePair.from_moduli(*[float(v) for v in vals])
    except KeyError as exc:
        raise ConfigError(f"'phases' missing {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid phases: {exc}") from None


def _resolve(cfg, p):
    p = Path(p)
    return p if p.is_absolute() else Path(cfg["_base"]) / p


def _measurements(cfg):
    has_m, has_t = "measurements" in cfg, "trace" in cfg
    if has_m == has_t:
        raise ConfigError("give exactly one of 'measurements' and 'trace'")
    if has_t:
        return boundary.ingest(boundary.read_trace(_resolve(cfg, cfg["trace"])))
    m = cfg["measurements"]
    try:
        if isinstance(m, str):
            return boundary.load_measurements(_resolve(cfg, m))
        return boundary.Measurements.from_dict(m)
    except (OSError, json.JSONDecodeError, ValueError, TypeError) as exc:
        raise ConfigError(f"invalid measurements: {exc}") from None


def _vec(cfg, key, size):
    try:
        v = np.asarray(cfg[key], dtype=float).reshape(size)
    except KeyError:
        raise ConfigError(f"config needs {key!r}") from None
    except (TypeError, ValueError):
        raise ConfigError(f"{key!r} must be {size} numbers") from None
    return v


def cmd_ingest(args):
    trace = boundary.read_trace(args.trace)
    m, diag = boundary.ingest(trace, return_diagnostics=True)
    payload = m.to_dict()
    payload["c"] = m.c
    payload["diagnostics"] = diag.to_dict()
    _dump(payload, args.output)
    return EXIT_OK


def bounds_report(m, phases, rtol, resolution):
    lo, hi = translation.alpha_endpoints(phases)
    per = translation.invert_each(m, phases, rtol)
    k = splitting.split_knowns(m, phases)
    split_iv, scanned, closed = splitting.scan_report(k, phases, resolution, rtol)
    per["splitting"] = split_iv
    inter = intersect_all(per.values())
    report = {
        "phases": {"kappa1": phases.kappa1, "mu1": phases.mu1, "kappa2": phases.kappa2, "mu2": phases.mu2},
        "alpha": [lo, hi],
        "measurements": {**m.to_dict(), "c": m.c},
        "intervals": {name: iv.to_list() for name, iv in per.items()},
        "splitting_scan": scanned.to_list(),
        "splitting_closed_form": closed.to_list(),
        "intersection": inter.to_list(),
        "empty": inter.is_empty,
        "rtol": rtol,
        "resolution": resolution,
    }
    return report, inter, k


CURVE_HEADER = ("f1", "translation_alpha_lower", "translation_alpha_upper",
                "splitting_bulk", "splitting_shear", "splitting_margin", "splitting_feasible")


def slack_curves(m, k, phases, resolution, rtol):
    n = max(int(round(1.0 / resolution)), 2)
    rows = []
    for f in np.linspace(0.0, 1.0, n + 1)[1:-1]:
        f = float(f)
        lo, hi = translation.endpoint_slacks(f, m, phases)
        cf = splitting.closed_form_slacks(f, k, phases)
        res = splitting.feasible(f, k, phases, rtol)
        rows.append((f, lo, hi, cf["bulk"], cf["shear"], res.margin, res.feasible))
    return rows


def cmd_bounds(args):
    cfg = _load_config(args.config)
    phases = _phases(cfg)
    m = _measurements(cfg)
    rtol = float(cfg.get("rtol", translation.DEFAULT_RTOL))
    resolution = float(cfg.get("resolution", 1e-3))
    phases.require_contrast()
    report, inter, k = bounds_report(m, phases, rtol, resolution)
    _dump(report, args.output)
    if args.curves:
        pairs.write_table(args.curves, CURVE_HEADER, slack_curves(m, k, phases, resolution, rtol))
    return EXIT_EMPTY if inter.is_empty else EXIT_OK


def cmd_pairs(args):
    cfg = _load_config(args.config)
    phases = _phases(cfg)
    pair = pairs.CompositePair(_vec(cfg, "sigma0", 3), _vec(cfg, "eps0", 3))
    rtol = float(cfg.get("rtol", translation.DEFAULT_RTOL))
    phases.require_contrast()
    if "f1" in cfg:
        v = pairs.admissible(pair, float(cfg["f1"]), phases, rtol)
        _dump(v.to_dict(), args.output)
        return EXIT_OK
    if "f1_range" not in cfg:
        raise ConfigError("config needs 'f1' or 'f1_range'")
    try:
        start, stop, num = cfg["f1_range"]
        fs = np.linspace(float(start), float(stop), int(num))
    except (TypeError, ValueError):
        raise ConfigError("'f1_range' must be [start, stop, num]") from None
    rows = []
    for f in fs:
        v = pairs.admissible(pair, float(f), phases, rtol)
        rows.append((float(f), v.admissible, v.min_slack, ";".join(name for name, _ in v.violated)))
    out = sys.stdout if args.output in (None, "-") else args.output
    pairs.write_table(out, ("f1", "admissible", "min_slack", "violated"), rows)
    return EXIT_OK


def cmd_sweep(args):
    cfg = _load_config(args.config)
    phases = _phases(cfg)
    sigma0 = _vec(cfg, "sigma0", 3)
    rtol = float(cfg.get("rtol", translation.DEFAULT_RTOL))
    g = cfg.get("grid")
    if not isinstance(g, dict):
        raise ConfigError("config needs a 'grid' object")
    try:
        grid = pairs.GridSpec(tuple(int(a) for a in g["axes"]),
                              tuple((float(a), float(b), int(c)) for a, b, c in g["ranges"]),
                              float(g.get("fixed", 0.0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid grid: {exc}") from None
    if "f1" not in cfg:
        raise ConfigError("config needs 'f1'")
    phases.require_contrast()
    rows = pairs.region_scan(sigma0, grid, float(cfg["f1"]), phases, rtol)
    out = sys.stdout if args.output in (None, "-") else args.output
    pairs.write_table(out, pairs.REGION_HEADER, rows)
    return EXIT_OK


def _loading(text):
    if text == "hydrostatic":
        return laminate.hydrostatic()
    try:
        v = np.array([float(x) for x in text.split(",")])
    except ValueError:
        raise ConfigError(f"loading must be 'hydrostatic' or 4 comma-separated numbers, got {text!r}") from None
    if v.shape != (4,):
        raise ConfigError("loading needs 4 numbers: F0,e1,e2,e3")
    return v


def cmd_oracle(args):
    try:
        phases = PhasePair.from_moduli(*args.phases)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    load = _loading(args.loading)
    if args.kind == "laminate":
        lam = laminate.Laminate(args.theta, args.f1, phases)
        fields = laminate.solve(lam, load)
        m = laminate.measurements_of(fields)
        truth = {"kind": "laminate", "f1": lam.f1, "theta": lam.theta, "jump": fields.jump.tolist()}
        trace = laminate.square_trace(lam, fields, args.samples) if args.trace else None
    else:
        if args.geometry:
            geom = fem.read_geometry(args.geometry)
            desc = {"geometry": str(args.geometry)}
        elif args.stripes:
            geom = fem.geometry_stripes(args.n, args.stripes[0], int(args.stripes[1]))
            desc = {"stripes": [args.stripes[0], int(args.stripes[1])]}
        else:
            geom = fem.geometry_disk(args.n, args.radius)
            desc = {"radius": args.radius}
        sol = fem.solve(geom, phases, load)
        m = fem.measurements_of(sol)
        truth = {"kind": "fem", "f1": geom.f1, "n": geom.n, "residual": sol.residual, **desc}
        trace = fem.boundary_trace_of(sol, args.samples) if args.trace else None
    boundary.save_measurements(args.output, m)
    _dump(truth, args.truth)
    if trace is not None:
        boundary.write_trace(args.trace, trace)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="vfbounds", description="Volume-fraction bounds for 2-phase 2-D elastic bodies.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ingest", help="null-Lagrangians from a boundary trace CSV")
    s.add_argument("trace")
    s.add_argument("-o", "--output", default="-")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("bounds", help="volume-fraction intervals from a config file")
    s.add_argument("config")
    s.add_argument("-o", "--output", default="-")
    s.add_argument("--curves", help="write slack curves on the scan grid to this CSV")
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("pairs", help="admissibility of an (average stress, average strain) pair")
    s.add_argument("config")
    s.add_argument("-o", "--output", default="-")
    s.set_defaults(func=cmd_pairs)

    s = sub.add_parser("sweep", help="admissibility over a 2-D slice of average strains")
    s.add_argument("config")
    s.add_argument("-o", "--output", default="-")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("oracle", help="generate measurements with known volume fraction")
    s.add_argument("kind", choices=("laminate", "fem"))
    s.add_argument("--phases", nargs=4, type=float, metavar=("K1", "M1", "K2", "M2"), default=[2.0, 1.0, 1.0, 0.5])
    s.add_argument("--loading", default="hydrostatic", help="'hydrostatic' or F0,e1,e2,e3")
    s.add_argument("--theta", type=float, default=0.0, help="laminate layer-normal angle (radians)")
    s.add_argument("--f1", type=float, default=0.5, help="laminate volume fraction")
    s.add_argument("--n", type=int, default=64, help="FEM grid size")
    s.add_argument("--radius", type=float, default=0.25, help="FEM disk radius")
    s.add_argument("--stripes", nargs=2, type=float, metavar=("F1", "PERIOD"))
    s.add_argument("--geometry", help="FEM geometry file")
    s.add_argument("--trace", help="also write a boundary trace CSV")
    s.add_argument("--samples", type=int, default=100, help="trace samples per edge")
    s.add_argument("-o", "--output", default="measurements.json")
    s.add_argument("--truth", default="truth.json")
    s.set_defaults(func=cmd_oracle)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TraceParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except TraceValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ContrastError as exc:
        print(f"contrast error: {exc}", file=sys.stderr)
        return EXIT_CONTRAST
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
