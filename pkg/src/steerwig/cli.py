"""Command-line interface: ``steerwig {analyze,sweep,wigner,verify,graph-info}``.

Option values are resolved as command-line flags, then a JSON ``--config``
file, then built-in defaults.
"""

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InsufficientCutoffError, SteerwigError
from .factories import db_to_ratio, epr_state, graph_state, load_graph, parse_graph
from .state import extract_pair, validate_state
from .subtraction import (
    analyze,
    optimal_local_operation,
    steering_parameters,
    subtraction_weight,
    wigner_grid,
)
from .sweeps import (
    CONVENTION,
    SweepSpec,
    render_sweep,
    render_wigner,
    run_sweep,
)

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_IO = 3
EXIT_VERIFY = 4

DEFAULTS = {
    "n": 1.2,
    "sdb": 4.0,
    "sdb2": None,
    "asym_db": 0.0,
    "graph": None,
    "f": 1,
    "g": 2,
    "f_vector": None,
    "g_vector": None,
    "xi_f": [0.0, 0.0],
    "xi_g": [0.0, 0.0],
    "json": False,
    "format": "csv",
    "out": None,
    "R": "optimal",
    "window": [6.0],
    "resolution": [101],
    "cutoff": 30,
    "tol": 1e-3,
    "axis": None,
    "axes": None,
}


class UsageError(SteerwigError):
    pass


def _state_options(p, family=True):
    if family:
        p.add_argument("family", choices=("epr", "graph"), help="state family")
    p.add_argument("--n", type=float, help="thermal noise factor (>= 1)")
    p.add_argument("--sdb", type=float, help="squeezing in dB (first EPR input, or every graph mode)")
    p.add_argument("--sdb2", type=float, help="squeezing of the second EPR input in dB (default: --sdb)")
    p.add_argument("--graph", help="edge-list file for graph states")
    p.add_argument("--f", type=int, help="target mode, 1-based (default 1)")
    p.add_argument("--g", type=int, help="subtraction mode, 1-based (default 2)")
    p.add_argument("--xi-f", nargs=2, type=float, metavar=("X", "P"), help="displacement of mode f")
    p.add_argument("--xi-g", nargs=2, type=float, metavar=("X", "P"), help="displacement of mode g")
    p.add_argument("--config", help="JSON file with option values")


def build_parser():
    parser = argparse.ArgumentParser(prog="steerwig", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"steerwig {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="steering report for one state")
    _state_options(p)
    p.add_argument("--json", action="store_true", default=None, help="print JSON instead of text")

    p = sub.add_parser("sweep", help="sweep squeezing / noise and write one record per point")
    _state_options(p)
    p.add_argument("--asym-db", type=float, help="EPR asymmetry s1/s2 in dB when not swept")
    p.add_argument("--axis", action="append", nargs=4, metavar=("NAME", "MIN", "MAX", "STEPS"),
                   help="swept axis; EPR: n, s_gm_db, asym_db; graph: n, s_db (repeatable)")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"))

    p = sub.add_parser("wigner", help="sample the subtracted Wigner function of mode f")
    _state_options(p)
    p.add_argument("--R", choices=("identity", "optimal"), help="local operation before subtraction")
    p.add_argument("--window", nargs="+", type=float, help="half-width, or XMIN XMAX PMIN PMAX")
    p.add_argument("--resolution", nargs="+", type=int, help="N or NX NP")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"))

    p = sub.add_parser("verify", help="compare the closed form with the Fock-space oracle (EPR only)")
    _state_options(p, family=False)
    p.add_argument("--cutoff", type=int, help="Fock cutoff per mode (default 30)")
    p.add_argument("--R", choices=("identity", "optimal", "both"), help="local operation(s) to check")
    p.add_argument("--window", nargs="+", type=float, help="half-width, or XMIN XMAX PMIN PMAX")
    p.add_argument("--resolution", nargs="+", type=int, help="N or NX NP")
    p.add_argument("--tol", type=float, help="sup-norm tolerance (default 1e-3)")

    p = sub.add_parser("graph-info", help="describe a graph file and its mode pairs")
    p.add_argument("graph", help="edge-list file")
    p.add_argument("--n", type=float)
    p.add_argument("--sdb", type=float)
    p.add_argument("--config")
    return parser


def resolve(args):
    opts = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file {args.config}: {exc}") from None
        opts.update(cfg)
    for key, value in vars(args).items():
        if value is not None:
            opts[key] = value
    if opts["sdb2"] is None:
        opts["sdb2"] = opts["sdb"]
    return opts


def _graph(opts):
    if opts["graph"] is None:
        raise UsageError("graph states need --graph FILE")
    if isinstance(opts["graph"], dict):
        return parse_graph("\n".join(f"{a} {b}" for a, b in opts["graph"]["edges"]), "config")
    return load_graph(opts["graph"])


def _mode(opts, key, m):
    vec = opts.get(f"{key}_vector")
    if vec is not None:
        return np.asarray(vec, dtype=float)
    idx = int(opts[key])
    if not 1 <= idx <= m:
        raise UsageError(f"--{key} must lie in 1..{m}, got {idx}")
    return idx - 1


def build_pair(opts):
    """ModePair and a parameter echo for the state described by ``opts``."""
    family = opts.get("family", "epr")
    if family == "epr":
        state = epr_state(db_to_ratio(opts["sdb"]), db_to_ratio(opts["sdb2"]), opts["n"])
        f, g = _mode(opts, "f", 2), _mode(opts, "g", 2)
        echo = {"family": "epr", "n": opts["n"], "s1_db": opts["sdb"], "s2_db": opts["sdb2"]}
    else:
        graph = _graph(opts)
        state = graph_state(graph, db_to_ratio(opts["sdb"]), opts["n"])
        f, g = _mode(opts, "f", graph.m), _mode(opts, "g", graph.m)
        echo = {"family": "graph", "n": opts["n"], "s_db": opts["sdb"],
                "edges": [[a + 1, b + 1] for a, b in graph.edges], "vertices": graph.m}
    pair = extract_pair(state, f, g).displaced(opts["xi_f"], opts["xi_g"])
    echo.update({"f": _echo_mode(f), "g": _echo_mode(g),
                 "xi_f": list(opts["xi_f"]), "xi_g": list(opts["xi_g"])})
    return pair, echo


def _echo_mode(k):
    return k + 1 if isinstance(k, int) else [float(x) for x in k]


def _write(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _window(opts):
    w = list(opts["window"])
    if len(w) not in (1, 4):
        raise UsageError("--window takes one half-width or four bounds")
    return w[0] if len(w) == 1 else tuple(w)


def _resolution(opts):
    r = list(opts["resolution"])
    if len(r) not in (1, 2):
        raise UsageError("--resolution takes one or two integers")
    return r[0] if len(r) == 1 else tuple(r)


def _fmt(x):
    return "nan" if x is None or (isinstance(x, float) and math.isnan(x)) else f"{x:.10g}"


def cmd_analyze(opts):
    pair, echo = build_pair(opts)
    report = analyze(pair)
    if opts["json"]:
        out = {"parameters": echo, "convention": CONVENTION, "report": report.as_dict()}
        out["report"]["two_pi_w_min_bare"] = 2 * math.pi * report.w_min_bare
        out["report"]["two_pi_w_min_opt"] = 2 * math.pi * report.w_min_opt
        print(json.dumps(out, indent=1))
        return EXIT_OK
    yes = {True: "yes", False: "no"}
    lines = [
        "parameters: " + json.dumps(echo),
        "convention: " + CONVENTION,
        f"nu (steering parameter)           {_fmt(report.nu)}",
        f"tr V_g|f                          {_fmt(report.tr_conditional)}",
        f"tr R^T V_g|f R, R = S^-1          {_fmt(report.tr_conditional_opt)}",
        f"negative without local op         {yes[report.negativity_bare]}"
        + ("  (boundary)" if report.boundary_bare else ""),
        f"negative with R = S^-1 (nu < 1)   {yes[report.negativity_steered]}"
        + ("  (boundary)" if report.boundary_steered else ""),
        f"2 pi W_min, no local op           {_fmt(2 * math.pi * report.w_min_bare)}",
        f"2 pi W_min, R = S^-1              {_fmt(2 * math.pi * report.w_min_opt)}",
        f"purity of mode f                  {_fmt(report.purity_f)}",
        f"S (symmetric gauge)               {np.array2string(report.S, precision=6)}",
    ]
    print("\n".join(lines))
    return EXIT_OK


def _sweep_spec(opts):
    family = opts["family"]
    axes = {}
    if opts.get("axes"):
        axes.update({k: tuple(v) for k, v in opts["axes"].items()})
    for name, lo, hi, steps in opts.get("axis") or ():
        try:
            axes[name] = (float(lo), float(hi), int(steps))
        except ValueError:
            raise UsageError(f"axis {name}: MIN MAX must be numbers and STEPS an integer") from None
    if family == "epr":
        fixed = {"n": opts["n"], "s_gm_db": opts["sdb"], "asym_db": opts["asym_db"]}
        spec = SweepSpec("epr", axes, fixed, f=0, g=1, xi_g=tuple(opts["xi_g"]))
    else:
        graph = _graph(opts)
        spec = SweepSpec("graph", axes, {"n": opts["n"], "s_db": opts["sdb"]}, graph=graph,
                         f=_mode(opts, "f", graph.m), g=_mode(opts, "g", graph.m),
                         xi_g=tuple(opts["xi_g"]))
    return spec.validate()


def cmd_sweep(opts):
    spec = _sweep_spec(opts)
    records = run_sweep(spec)
    _write(render_sweep(spec, records, opts["format"]), opts["out"])
    return EXIT_OK


def _R(pair, choice):
    return optimal_local_operation(pair) if choice == "optimal" else None


def cmd_wigner(opts):
    pair, echo = build_pair(opts)
    grid = wigner_grid(pair, _R(pair, opts["R"]), _window(opts), _resolution(opts))
    echo["R"] = opts["R"]
    _write(render_wigner(grid, echo, opts["format"]), opts["out"])
    return EXIT_OK


def cmd_verify(opts):
    from .fock import OracleConfig, oracle_reduced_wigner, oracle_state

    opts = dict(opts, family="epr")
    pair, echo = build_pair(opts)
    if np.any(opts["xi_f"]):
        raise UsageError("verify supports displacement of mode g only")
    if (opts["f"], opts["g"]) != (1, 2) or opts["f_vector"] is not None or opts["g_vector"] is not None:
        raise UsageError("verify uses f = mode 1 and g = mode 2")
    config = OracleConfig(cutoff=int(opts["cutoff"]))
    s1, s2 = db_to_ratio(opts["sdb"]), db_to_ratio(opts["sdb2"])
    choices = ("identity", "optimal") if opts["R"] == "both" else (opts["R"],)
    print("parameters: " + json.dumps(echo))
    print(f"cutoff: {config.cutoff}, tolerance: {opts['tol']:g}")
    ok = True
    for choice in choices:
        R = _R(pair, choice)
        analytic = wigner_grid(pair, R, _window(opts), _resolution(opts))
        try:
            oracle = oracle_reduced_wigner(s1, s2, opts["n"], R, tuple(opts["xi_g"]), config,
                                           _window(opts), _resolution(opts))
            _, photons = oracle_state(s1, s2, opts["n"], R, tuple(opts["xi_g"]), config)
        except InsufficientCutoffError as exc:
            print(f"R = {choice}: FAIL, insufficient cutoff (top-level leakage {exc.leakage:.2e})")
            ok = False
            continue
        dev = float(np.max(np.abs(analytic.values - oracle.values)))
        passed = dev <= opts["tol"]
        ok &= passed
        print(
            f"R = {choice}: sup|W_analytic - W_oracle| = {dev:.3e}  "
            f"<n_g> analytic = {subtraction_weight(pair, R) / 4:.8f}  oracle = {photons:.8f}  "
            f"grid min analytic = {analytic.min():.6g}  oracle = {oracle.min():.6g}  "
            + ("PASS" if passed else "FAIL")
        )
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_graph_info(opts):
    graph = load_graph(opts["graph"])
    A = graph.adjacency
    print(f"vertices: {graph.m}")
    print(f"edges: {len(graph.edges)}  " + " ".join(f"{a + 1}-{b + 1}" for a, b in graph.edges))
    print("degrees: " + " ".join(str(int(d)) for d in A.sum(axis=1)))
    state = graph_state(graph, db_to_ratio(opts["sdb"]), opts["n"])
    diag = validate_state(state)
    print(f"state at s = {opts['sdb']:g} dB, n = {opts['n']:g}: "
          f"physical = {diag.physical}, min symplectic eigenvalue = {diag.min_symplectic_eigenvalue:.10g}")
    print("  f  g          nu     tr V_g|f  steer  bare")
    for f in range(graph.m):
        for g in range(graph.m):
            if f == g:
                continue
            nu, _, _, tr_c, _ = steering_parameters(extract_pair(state, f, g))
            print(f"{f + 1:3d}{g + 1:3d}  {nu:10.6f}  {tr_c:11.6f}  {'yes' if nu < 1 else 'no':>5}"
                  f"  {'yes' if tr_c < 2 else 'no':>4}")
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "sweep": cmd_sweep,
    "wigner": cmd_wigner,
    "verify": cmd_verify,
    "graph-info": cmd_graph_info,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = resolve(args)
        return COMMANDS[args.command](opts)
    except SteerwigError as exc:
        print(f"steerwig {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"steerwig {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
