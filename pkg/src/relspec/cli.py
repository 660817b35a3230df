"""Command-line interface.

Subcommands mirror the library surface:

    relspec billiard exact           exact box levels
    relspec billiard trace           smooth + torus-family density
    relspec billiard exact-resummed  boundary-corrected resummed density
    relspec billiard compare         broadened exact vs resummed density
    relspec coulomb spectrum         relativistic Coulomb levels
    relspec engine billiard-trace    torus family through the generic engine

Every command writes a CSV data file plus a JSON sidecar (same stem,
.json) holding the fully resolved configuration, the package version
and run diagnostics.  Passing a sidecar back through --config
reproduces the CSV byte for byte.  Floats are printed with shortest
round-trip precision.  RELSPEC_THREADS sets how many worker threads
evaluate closed-form density grids (the result does not depend on it).

Exit codes: 0 success, 1 invalid arguments or config, 2 numerical
failure.
"""

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .billiard import (
    BoxGeometry,
    billiard_model,
    exact_levels,
    exact_resummed_density,
    osc_density_closed,
    tf_density_closed,
)
from .coulomb import FINE_STRUCTURE, CoulombParams, coulomb_energy
from .errors import DomainError, NumericalError
from .kinematics import RelParams
from .spectra import DensityGrid, broadened_density, compare
from .trace import oscillating_density

__all__ = ["main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; route through exit 1 instead
    def error(self, message):
        raise _UsageError(message)


def _fmt(x):
    return repr(float(x))


def _parse_grid(spec):
    try:
        lo_s, hi_s, n_s = spec.split(":")
        lo, hi, n = float(lo_s), float(hi_s), int(n_s)
    except (ValueError, AttributeError):
        raise _UsageError("grid must be min:max:count")
    if not (lo < hi and n >= 2):
        raise _UsageError("grid must satisfy min < max and count >= 2")
    return lo, hi, n


def _load_config(path):
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("{"):
        payload = json.loads(text)
        return payload.get("config", payload)
    conf = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise _UsageError("config lines must look like key = value")
        key, val = (part.strip() for part in line.split("=", 1))
        conf[key] = val
    return conf


def _build_parser():
    parser = _Parser(prog="relspec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version="relspec " + __version__)
    top = parser.add_subparsers(dest="system", required=True)

    def add_common(p, grid=False, eps_max=False, kmax=False, sigma=False, box=True):
        p.add_argument("--config", help="key=value file or a JSON sidecar to replay")
        p.add_argument("--output", "-o", help="CSV output path (sidecar gets .json)")
        p.add_argument("--mass", type=float, help="particle mass (default 1)")
        p.add_argument("--light-speed", type=float, help="speed of light (default 10)")
        p.add_argument("--hbar", type=float, help="hbar (default 1)")
        if box:
            p.add_argument("--a1", type=float, help="box edge 1 (default pi)")
            p.add_argument("--a2", type=float, help="box edge 2 (default pi)")
            p.add_argument("--a3", type=float, help="box edge 3 (default pi)")
            p.add_argument("--length-scale", type=float, help="reference length L")
        if grid:
            p.add_argument("--grid", help="pseudoenergy grid min:max:count")
        if eps_max:
            p.add_argument("--eps-max", type=float, help="highest pseudoenergy")
        if kmax:
            p.add_argument("--kmax", type=int, help="lattice truncation (default 20)")
        if sigma:
            p.add_argument("--sigma", type=float, help="Gaussian width (default 0)")

    billiard = top.add_parser("billiard", help="rectangular box").add_subparsers(
        dest="command", required=True
    )
    add_common(billiard.add_parser("exact"), eps_max=True)
    add_common(billiard.add_parser("trace"), grid=True, kmax=True, sigma=True)
    add_common(billiard.add_parser("exact-resummed"), grid=True, kmax=True, sigma=True)
    add_common(billiard.add_parser("compare"), grid=True, kmax=True, sigma=True)

    coulomb = top.add_parser("coulomb", help="1/r potential").add_subparsers(
        dest="command", required=True
    )
    spectrum = coulomb.add_parser("spectrum")
    add_common(spectrum, box=False)
    spectrum.add_argument("--alpha", type=float, help="coupling (default fine structure)")
    spectrum.add_argument("--nmax", type=int, help="highest principal quantum number")

    engine = top.add_parser("engine", help="generic trace engine").add_subparsers(
        dest="command", required=True
    )
    add_common(engine.add_parser("billiard-trace"), grid=True, kmax=True, sigma=True)
    return parser


_DEFAULTS = {
    "mass": 1.0,
    "light_speed": 10.0,
    "hbar": 1.0,
    "a1": math.pi,
    "a2": math.pi,
    "a3": math.pi,
    "length_scale": None,
    "kmax": 20,
    "sigma": 0.0,
    "alpha": FINE_STRUCTURE,
    "grid": None,
    "eps_max": None,
    "nmax": None,
    "output": None,
}

_CASTS = {
    "mass": float, "light_speed": float, "hbar": float,
    "a1": float, "a2": float, "a3": float, "length_scale": lambda v: None if v in (None, "", "None") else float(v),
    "kmax": int, "sigma": float, "alpha": float,
    "eps_max": float, "nmax": int, "grid": str, "output": str,
}


def _resolve(args):
    """Merge defaults, config file and explicit flags into one dict."""
    conf = dict(_DEFAULTS)
    if getattr(args, "config", None):
        try:
            loaded = _load_config(args.config)
        except OSError as exc:
            raise _UsageError("cannot read config: %s" % exc)
        except json.JSONDecodeError as exc:
            raise _UsageError("malformed JSON config: %s" % exc)
        for key, val in loaded.items():
            if key in ("system", "command"):
                continue
            if key not in _CASTS:
                raise _UsageError("unknown config key: %s" % key)
            try:
                conf[key] = _CASTS[key](val)
            except (TypeError, ValueError):
                raise _UsageError("bad value for config key %s: %r" % (key, val))
    for key in _CASTS:
        flag = getattr(args, key, None)
        if flag is not None:
            conf[key] = flag
    return conf


def _rel_params(conf):
    return RelParams(m=conf["mass"], c=conf["light_speed"], hbar=conf["hbar"])


def _geometry(conf):
    return BoxGeometry(conf["a1"], conf["a2"], conf["a3"], conf["length_scale"])


def _require(conf, key, flag):
    if conf.get(key) is None:
        raise _UsageError("missing required option %s" % flag)
    return conf[key]


def _threads():
    raw = os.environ.get("RELSPEC_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise _UsageError("RELSPEC_THREADS must be an integer")
    return max(1, n)


def _grid_array(conf):
    lo, hi, n = _parse_grid(_require(conf, "grid", "--grid"))
    if lo <= 0:
        raise _UsageError("density grids require eps > 0")
    return np.linspace(lo, hi, n)


def _chunked_density(fun, eps_grid):
    """Evaluate a closed-form density over grid slices in worker threads.

    Values are slice-independent by construction, so the thread count
    never changes the output bytes.
    """
    n_threads = _threads()
    if n_threads == 1 or eps_grid.size < 2 * n_threads:
        return fun(eps_grid)
    chunks = np.array_split(eps_grid, n_threads)
    with ThreadPoolExecutor(max_workers=n_threads) as pool:
        parts = list(pool.map(fun, chunks))
    return np.concatenate(parts)


def _run_exact(conf):
    params = _rel_params(conf)
    geom = _geometry(conf)
    eps_max = _require(conf, "eps_max", "--eps-max")
    if eps_max <= 0:
        raise _UsageError("--eps-max must be positive")
    levels = exact_levels(geom, params, eps_max)
    rows = [
        (lv.n[0], lv.n[1], lv.n[2], lv.degeneracy, _fmt(lv.eps), _fmt(lv.E))
        for lv in levels
    ]
    header = "n1,n2,n3,degeneracy,eps,E"
    results = {"n_levels": len(levels), "total_degeneracy": sum(lv.degeneracy for lv in levels)}
    return header, rows, results, {}


def _run_trace(conf):
    params = _rel_params(conf)
    geom = _geometry(conf)
    grid = _grid_array(conf)

    def density(eps):
        osc = osc_density_closed(geom, params, eps, conf["kmax"], conf["sigma"])
        return osc.g + tf_density_closed(geom, params, eps)

    g = _chunked_density(density, grid)
    rows = [(_fmt(e), _fmt(v)) for e, v in zip(grid, g)]
    return "eps,g", rows, {"points": grid.size}, {}


def _run_resummed(conf):
    params = _rel_params(conf)
    geom = _geometry(conf)
    grid = _grid_array(conf)

    def density(eps):
        return exact_resummed_density(geom, params, eps, conf["kmax"], conf["sigma"]).g

    g = _chunked_density(density, grid)
    rows = [(_fmt(e), _fmt(v)) for e, v in zip(grid, g)]
    return "eps,g", rows, {"points": grid.size}, {}


def _run_compare(conf):
    params = _rel_params(conf)
    geom = _geometry(conf)
    grid = _grid_array(conf)
    sigma = conf["sigma"]
    if sigma <= 0:
        raise _UsageError("compare needs --sigma > 0 to broaden the exact spectrum")
    levels = exact_levels(geom, params, grid[-1] + 8.0 * sigma)
    exact = broadened_density(levels, grid, sigma)

    def density(eps):
        return exact_resummed_density(geom, params, eps, conf["kmax"], sigma).g

    semi = DensityGrid(grid, _chunked_density(density, grid), {"producer": "cli"})
    rel_l2, max_abs = compare(exact, semi)
    rows = [
        (_fmt(e), _fmt(ge), _fmt(gs)) for e, ge, gs in zip(grid, exact.g, semi.g)
    ]
    header = "eps,g_exact_broadened,g_semiclassical"
    results = {"rel_L2": rel_l2, "max_abs": max_abs, "n_levels": len(levels)}
    return header, rows, results, {}


def _run_coulomb(conf):
    cp = CoulombParams(alpha=conf["alpha"], params=_rel_params(conf))
    nmax = _require(conf, "nmax", "--nmax")
    if nmax < 1:
        raise _UsageError("--nmax must be >= 1")
    mc2 = cp.params.mc2
    rows = []
    for n in range(1, nmax + 1):
        for l in range(0, n):
            rows.append((n, l, _fmt(coulomb_energy(n, l, cp) / mc2)))
    return "n,l,E_over_mc2", rows, {"n_levels": len(rows)}, {}


def _run_engine(conf):
    params = _rel_params(conf)
    geom = _geometry(conf)
    grid = _grid_array(conf)
    model = billiard_model(geom, params)
    # sequential on purpose: the Newton warm start carries across the grid
    dens = oscillating_density(model, grid, conf["kmax"], params, conf["sigma"])
    rows = [(_fmt(e), _fmt(v)) for e, v in zip(grid, dens.g)]
    diagnostics = {"skipped": dens.meta["skipped"]}
    return "eps,g", rows, {"points": grid.size}, diagnostics


_RUNNERS = {
    ("billiard", "exact"): _run_exact,
    ("billiard", "trace"): _run_trace,
    ("billiard", "exact-resummed"): _run_resummed,
    ("billiard", "compare"): _run_compare,
    ("coulomb", "spectrum"): _run_coulomb,
    ("engine", "billiard-trace"): _run_engine,
}


def _write_outputs(out_path, header, rows, sidecar):
    out = Path(out_path)
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(str(c) for c in row) + "\n")
    with open(out.with_suffix(".json"), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        conf = _resolve(args)
        out_path = _require(conf, "output", "--output")
        runner = _RUNNERS[(args.system, args.command)]
        header, rows, results, diagnostics = runner(conf)
    except _UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except DomainError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except NumericalError as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        return 2
    sidecar = {
        "tool": "relspec",
        "version": __version__,
        "system": args.system,
        "command": args.command,
        "config": {k: conf[k] for k in sorted(_CASTS) if conf.get(k) is not None},
        "csv_header": header,
        "results": results,
        "diagnostics": diagnostics,
    }
    try:
        _write_outputs(out_path, header, rows, sidecar)
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
