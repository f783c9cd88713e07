"""Command line interface: ``kickedtop {sweep,ep,contour,cycle,resultant-check}``.

Exit status: 0 success, 2 invalid input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .cubic import discriminant_quartic, eval_descending, mu_of_omega, resultant_Dq
from .epfinder import ep_trajectory, find_eps
from .exceptions import NumericalError, PreconditionError, ResonanceError
from .floquet import char_poly_affine_split
from .holonomy import sweep_cycle
from .polyroots import discriminant
from .riemann import (
    CyclePath, _label, build_sheets, cycle_monodromy, ep_junctions, emulation_suite, templates,
)
from .validation import (
    check_finite_real, make_config, parse_omega_scan, parse_region, parse_resolution,
)

FORMAT_VERSION = 1
EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3
UNRESOLVED_WARN = 0.2

DEFAULTS = {
    "two_j": 2,
    "omega": None,
    "kick": "uniform",
    "steps": 256,
    "region": "-1.5,1.5,-1.5,1.5",
    "res": "101",
    "out": None,
    "omega_scan": None,
    "seed": 0,
    "template": "C",
    "waypoints": None,
}


def _fmt(x) -> str:
    x = float(x)
    return "nan" if np.isnan(x) else repr(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": _jsonable(x.real), "im": _jsonable(x.imag)}
    if isinstance(x, (float, np.floating)):
        return float(x) if np.isfinite(x) else None
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, Fraction):
        return str(x)
    return x


def _dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


# ------------------------------------------------------------------ config

def read_config_file(path) -> dict:
    """key=value lines; ``#`` starts a comment; dashes in keys become underscores."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise PreconditionError(f"cannot read config file {path}: {exc}") from None
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise PreconditionError(f"{path}:{n}: expected key=value")
        k, v = (s.strip() for s in line.split("=", 1))
        k = k.lstrip("-").replace("-", "_")
        if k not in DEFAULTS:
            raise PreconditionError(f"{path}:{n}: unknown key {k!r}")
        out[k] = v
    return out


def resolve(args) -> dict:
    """Defaults, then the config file, then explicit flags."""
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(read_config_file(args.config))
    for k in DEFAULTS:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    cfg["command"] = args.command
    for k in ("two_j", "steps", "seed"):
        try:
            cfg[k] = int(cfg[k])
        except (TypeError, ValueError):
            raise PreconditionError(f"{k.replace('_', '-')} must be an integer, got {cfg[k]!r}") from None
    return cfg


def _top(cfg, need_omega=True):
    if cfg["omega"] is None:
        if need_omega:
            raise PreconditionError("--omega is required")
        return make_config(cfg["two_j"], 1.0, cfg["kick"])
    return make_config(cfg["two_j"], cfg["omega"], cfg["kick"])


def _steps(cfg) -> int:
    try:
        n = int(cfg["steps"])
    except (TypeError, ValueError):
        raise PreconditionError(f"steps must be an integer, got {cfg['steps']!r}") from None
    if n < 1:
        raise PreconditionError("steps must be positive")
    return n


def provenance(cfg, top=None) -> dict:
    """The fully resolved run configuration embedded in every output."""
    out = {k: cfg.get(k) for k in sorted(DEFAULTS)}
    out["command"] = cfg["command"]
    out["version"] = __version__
    if top is not None:
        out["J"] = str(top.J)
        out["d"] = top.d
        out["omega_value"] = top.omega
        out["omega_turns"] = str(top.omega_turns) if top.omega_turns is not None else None
        out["kick_coeffs"] = [[c.real, c.imag] for c in top.kick.coeffs]
    return out


def _header(kind, prov, extra=()) -> list[str]:
    lines = [f"# kickedtop {kind} format v{FORMAT_VERSION}",
             "# config " + json.dumps(_jsonable(prov), sort_keys=True, allow_nan=False)]
    lines += [f"# {k} " + json.dumps(_jsonable(v), sort_keys=True, allow_nan=False) for k, v in extra]
    return lines


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# ---------------------------------------------------------------- commands

def cmd_sweep(cfg) -> int:
    top = _top(cfg)
    res = sweep_cycle(top, steps=_steps(cfg))
    summary = {
        "permutation": res.permutation.tolist(),
        "cycles": [list(c) for c in res.cycles],
        "itinerary": {_label(k): _label(v) for k, v in res.itinerary.items()},
        "start_labels": [_label(m) for m in res.start_labels],
        "min_overlap": res.min_overlap,
        "halvings": res.halvings,
    }
    lines = _header("sweep", provenance(cfg, top), [("summary", summary)])
    lines.append("\t".join(["lambda", "branch_id", "quasienergy_unwrapped", "re_z", "im_z"]))
    for k, lam in enumerate(res.lambda_grid):
        for n in range(top.d):
            z = res.eigenvalues[k, n]
            lines.append("\t".join([_fmt(lam), str(n), _fmt(res.energies[k, n]), _fmt(z.real), _fmt(z.imag)]))
    _write(cfg["out"], "\n".join(lines) + "\n")
    return EXIT_OK


def _record_dict(rec, track_id=None):
    d = rec.to_dict()
    m = rec.monodromy
    if m is not None:
        d["monodromy"] = {"radius": m.radius, "cycles": [list(c) for c in m.cycles],
                          "puiseux_exponent": m.puiseux_exponent}
    if track_id is not None:
        d["track_id"] = track_id
    return d


def cmd_ep(cfg) -> int:
    prov = None
    if cfg["omega_scan"]:
        grid = parse_omega_scan(cfg["omega_scan"])
        top = _top(cfg, need_omega=False)
        prov = provenance(cfg, top)
        traj = ep_trajectory(top, grid)
        scan = []
        for k, om in enumerate(grid):
            scan.append({
                "omega": om,
                "records": [_record_dict(r, traj.track_ids[k][i]) for i, r in enumerate(traj.records[k])],
                "failed": traj.failures.get(k),
            })
        report = {"scan": scan, "merge_events": traj.merge_events,
                  "links": [list(l) for l in traj.links], "broken_links": [list(b) for b in traj.broken]}
        partial = bool(traj.failures)
    else:
        top = _top(cfg)
        prov = provenance(cfg, top)
        recs = ep_junctions(top, find_eps(top))
        report = {"records": [_record_dict(r) for r in recs]}
        partial = False
    doc = {"format": f"kickedtop-ep-atlas v{FORMAT_VERSION}", "config": prov, "partial": partial, **report}
    _write(cfg["out"], _dump_json(doc))
    return EXIT_NUMERICAL if partial else EXIT_OK


def _sheet_path(out, label):
    if out is None or out == "-":
        return None
    p = Path(out)
    suffix = p.suffix or ".tsv"
    return str(p.with_name(f"{p.stem}_M{label.replace('/', 'o')}{suffix}"))


def cmd_contour(cfg) -> int:
    top = _top(cfg)
    region = parse_region(cfg["region"])
    res = parse_resolution(cfg["res"])
    eps = ep_junctions(top, find_eps(top, monodromy=False))
    grids = build_sheets(top, region, res, eps=eps)
    prov = provenance(cfg, top)
    ep_list = [r.to_dict() for r in eps]
    status = EXIT_OK
    chunks = []
    for g in grids:
        frac = g.unresolved_fraction
        warn = frac > UNRESOLVED_WARN
        if warn:
            print(f"warning: sheet M={g.label} has {frac:.1%} unresolved cells", file=sys.stderr)
        lines = _header("contour", prov, [("sheet", {"M": g.label, "unresolved_fraction": frac,
                                                    "warning": warn}),
                                          ("seam", g.seam), ("eps", ep_list)])
        lines.append("\t".join(["re_lambda", "im_lambda", "re_E", "resolved"]))
        for iy, y in enumerate(g.im_lambda):
            for ix, x in enumerate(g.re_lambda):
                lines.append("\t".join([_fmt(x), _fmt(y), _fmt(g.values[iy, ix]),
                                        "1" if g.resolved[iy, ix] else "0"]))
        text = "\n".join(lines) + "\n"
        path = _sheet_path(cfg["out"], g.label)
        if path is None:
            chunks.append(text)
        else:
            _write(path, text)
    if chunks:
        _write(None, "".join(chunks))
    return status


def _parse_waypoints(spec):
    pts = []
    for part in str(spec).split(";"):
        part = part.strip()
        if not part:
            continue
        xy = part.split(",")
        if len(xy) != 2:
            raise PreconditionError(f"waypoint {part!r} must be re,im")
        pts.append(complex(check_finite_real(xy[0], "waypoint"), check_finite_real(xy[1], "waypoint")))
    if len(pts) < 3:
        raise PreconditionError("a cycle needs at least three waypoints")
    if pts[0] != pts[-1]:
        pts.append(pts[0])
    return CyclePath(np.array(pts), "custom")


def cmd_cycle(cfg) -> int:
    top = _top(cfg)
    steps = _steps(cfg)
    if steps < 64:
        raise PreconditionError("cycle needs --steps >= 64")
    eps = find_eps(top, monodromy=False)
    prov = provenance(cfg, top)
    doc = {"format": f"kickedtop-cycle v{FORMAT_VERSION}", "config": prov,
           "eps": [r.to_dict() for r in ep_junctions(top, eps)]}
    name = str(cfg["template"])
    if cfg["waypoints"]:
        res = cycle_monodromy(top, _parse_waypoints(cfg["waypoints"]), steps=steps, eps=eps)
        doc["result"] = res.to_dict()
    elif name == "all":
        doc["emulation"] = emulation_suite(top, eps=eps, steps=steps).to_dict()
    else:
        paths = templates(top, eps)
        if name not in paths:
            raise PreconditionError(f"template {name!r} not available here; choose from {sorted(paths)}")
        doc["result"] = cycle_monodromy(top, paths[name], steps=steps, eps=eps).to_dict()
    _write(cfg["out"], _dump_json(doc))
    return EXIT_OK


def _mu_grid(n):
    # exact rationals on [-0.99, 0.33]
    return [Fraction(-99, 100) + Fraction(132, 100) * Fraction(k, n - 1) for k in range(n)]


def cmd_resultant_check(cfg) -> int:
    n = parse_resolution(cfg["res"])[0]
    rng = np.random.default_rng(int(cfg["seed"]))
    prov = provenance(cfg)
    lines = _header("resultant-check", prov)
    lines.append("\t".join(["mu", "sylvester", "closed_form", "relative_error",
                             "float_sylvester", "float_scaled_error", "normalized"]))
    worst = 0.0
    worst_float = 0.0
    for mu in _mu_grid(n):
        chk = resultant_Dq(mu)
        fchk = resultant_Dq(float(mu))
        if chk.closed_form == 0:
            rel = 0.0 if chk.sylvester == 0 else float("inf")
            normalized = float("nan")
        else:
            rel = float(abs(chk.sylvester - chk.closed_form) / abs(chk.closed_form))
            normalized = float(chk.sylvester / (mu ** 9 * (1 + mu) ** 9))
        worst = max(worst, rel)
        worst_float = max(worst_float, fchk.relative_error)
        lines.append("\t".join([_fmt(float(mu)), _fmt(float(chk.sylvester)), _fmt(float(chk.closed_form)),
                                _fmt(rel), _fmt(fchk.sylvester), _fmt(fchk.relative_error), _fmt(normalized)]))
    # random cross-check of the quartic against direct discriminants
    disc_err = 0.0
    for _ in range(20):
        om = rng.uniform(0.05, np.pi)
        L = complex(np.exp(rng.normal()) * np.exp(1j * rng.uniform(-np.pi, np.pi)))
        g, h = char_poly_affine_split(make_config(2, om))
        direct = discriminant(g + h / L)
        quartic = eval_descending(discriminant_quartic(mu_of_omega(om)), 1 / L)
        disc_err = max(disc_err, abs(quartic - direct) / max(abs(direct), 1e-300))
    lines.insert(2, "# summary " + json.dumps({"max_relative_error": worst,
                                               "max_float_scaled_error": worst_float,
                                               "quartic_random_max_relative_error": disc_err}))
    _write(cfg["out"], "\n".join(lines) + "\n")
    return EXIT_OK


COMMANDS = {
    "sweep": cmd_sweep,
    "ep": cmd_ep,
    "contour": cmd_contour,
    "cycle": cmd_cycle,
    "resultant-check": cmd_resultant_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--two-j", dest="two_j", help="twice the spin (default 2)")
    common.add_argument("--omega", help="precession angle: number or token like 2pi/3, pi/6")
    common.add_argument("--kick", help="'uniform' or comma-separated coefficients")
    common.add_argument("--steps", help="path discretisation (sweep default 256)")
    common.add_argument("--region", help="xmin,xmax,ymin,ymax of the Lambda-plane grid")
    common.add_argument("--res", help="grid resolution n or nx,ny")
    common.add_argument("--out", help="output file (stdout when omitted)")
    common.add_argument("--omega-scan", dest="omega_scan", help="start,stop,n for an omega scan")
    common.add_argument("--seed", help="seed for randomised cross-checks")
    common.add_argument("--config", help="key=value file; explicit flags win")
    p = argparse.ArgumentParser(prog="kickedtop", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("sweep", parents=[common], help="quasienergy branches around |Lambda|=1")
    sub.add_parser("ep", parents=[common], help="exceptional point atlas")
    sub.add_parser("contour", parents=[common], help="Re E_M on every Riemann sheet")
    c = sub.add_parser("cycle", parents=[common], help="monodromy of a closed path")
    c.add_argument("--template", help="C, C', C1, C2, C2-naive, enclose-all or all")
    c.add_argument("--waypoints", help="closed path as 're,im;re,im;...'")
    sub.add_parser("resultant-check", parents=[common], help="Sylvester resultant identity for J=1")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        return COMMANDS[args.command](cfg)
    except ResonanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("resonance " + json.dumps(_jsonable(vars(exc.report))), file=sys.stderr)
        return EXIT_INVALID
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
