"""Parameter sweeps over squeezing and thermal noise, with CSV/JSON writers."""

import csv
import io
import itertools
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import NoPhotonError, SteerwigError
from .factories import Graph, db_to_ratio, epr_state, graph_state
from .state import extract_pair
from .subtraction import analyze, steering_parameters, w_min

CONVENTION = (
    "[x,p]=2i; vacuum covariance = identity; squeezing dB = 10*log10(variance ratio); "
    "interleaved quadratures (x1,p1,x2,p2,...)"
)

AXES = {
    "epr": ("n", "s_gm_db", "asym_db"),
    "graph": ("n", "s_db"),
}

PARAM_FIELDS = {
    "epr": ("n", "s1_db", "s2_db", "s_gm_db", "asym_db"),
    "graph": ("n", "s_db"),
}

RESULT_FIELDS = (
    "nu",
    "tr_conditional",
    "tr_conditional_opt",
    "negativity_bare",
    "negativity_steered",
    "w_min_bare",
    "w_min_opt",
    "purity_f",
    "status",
)


@dataclass
class SweepSpec:
    """What to sweep. ``axes`` maps an axis name to ``(min, max, steps)``.

    EPR axes are ``n``, ``s_gm_db`` (geometric-mean squeezing) and
    ``asym_db`` (``s1/s2`` in dB); graph axes are ``n`` and ``s_db``.
    Anything not swept is taken from ``fixed``. Graph modes ``f``/``g`` are
    0-based here.
    """

    family: str
    axes: dict
    fixed: dict = field(default_factory=dict)
    graph: Graph = None
    f: int = 0
    g: int = 1
    xi_g: tuple = (0.0, 0.0)

    def validate(self):
        if self.family not in AXES:
            raise SteerwigError(f"unknown state family {self.family!r}")
        if not self.axes:
            raise SteerwigError("a sweep needs at least one axis")
        for name, (lo, hi, steps) in self.axes.items():
            if name not in AXES[self.family]:
                raise SteerwigError(
                    f"axis {name!r} not available for {self.family} sweeps "
                    f"(choose from {', '.join(AXES[self.family])})"
                )
            if int(steps) < 1 or lo > hi:
                raise SteerwigError(f"axis {name}: need steps >= 1 and min <= max")
        if self.family == "graph" and self.graph is None:
            raise SteerwigError("graph sweeps need a graph")
        return self

    def axis_values(self):
        out = {}
        for name, (lo, hi, steps) in self.axes.items():
            steps = int(steps)
            out[name] = np.array([float(lo)]) if steps == 1 else np.linspace(lo, hi, steps)
        return out

    def points(self):
        """Parameter dicts in row-major order over the axes as declared."""
        defaults = {"n": 1.2, "s_gm_db": 4.0, "asym_db": 0.0, "s_db": 4.0}
        base = {k: float(self.fixed.get(k, defaults[k])) for k in AXES[self.family]}
        grids = self.axis_values()
        names = list(grids)
        for combo in itertools.product(*(grids[k] for k in names)):
            params = dict(base)
            params.update(zip(names, (float(v) for v in combo)))
            yield params

    def describe(self):
        d = {
            "family": self.family,
            "axes": {k: list(v) for k, v in self.axes.items()},
            "fixed": dict(self.fixed),
            "xi_g": list(self.xi_g),
        }
        if self.family == "graph":
            d["f"] = self.f + 1
            d["g"] = self.g + 1
            d["edges"] = [[a + 1, b + 1] for a, b in self.graph.edges]
            d["vertices"] = self.graph.m
        return d


def epr_params(n, s_gm_db, asym_db=0.0):
    s1_db = s_gm_db + asym_db / 2
    s2_db = s_gm_db - asym_db / 2
    return {"n": n, "s1_db": s1_db, "s2_db": s2_db, "s_gm_db": s_gm_db, "asym_db": asym_db}


def point_pair(spec, params):
    """Mode pair (and full parameter record) for one grid point."""
    if spec.family == "epr":
        record = epr_params(params["n"], params["s_gm_db"], params["asym_db"])
        state = epr_state(db_to_ratio(record["s1_db"]), db_to_ratio(record["s2_db"]), record["n"])
        pair = extract_pair(state, 0, 1)
    else:
        record = {"n": params["n"], "s_db": params["s_db"]}
        state = graph_state(spec.graph, db_to_ratio(params["s_db"]), params["n"])
        pair = extract_pair(state, spec.f, spec.g)
    if np.any(spec.xi_g):
        pair = pair.displaced(delta_g=spec.xi_g)
    return pair, record


def evaluate_point(spec, params):
    pair, record = point_pair(spec, params)
    nu, S, R_opt, tr_c, tr_opt = steering_parameters(pair)
    status = []
    try:
        bare = w_min(pair)
    except NoPhotonError:
        bare = math.nan
        status.append("no-photon-bare")
    try:
        opt = w_min(pair, R_opt)
    except NoPhotonError:
        opt = math.nan
        status.append("no-photon-opt")
    report = analyze(pair, w_min_bare=bare, w_min_opt=opt)
    record.update({
        "nu": report.nu,
        "tr_conditional": report.tr_conditional,
        "tr_conditional_opt": report.tr_conditional_opt,
        "negativity_bare": report.negativity_bare,
        "negativity_steered": report.negativity_steered,
        "w_min_bare": report.w_min_bare,
        "w_min_opt": report.w_min_opt,
        "purity_f": report.purity_f,
        "status": ";".join(status) or "ok",
    })
    return record


def worker_count():
    env = os.environ.get("STEERWIG_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise SteerwigError(f"STEERWIG_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def run_sweep(spec, workers=None):
    spec.validate()
    points = list(spec.points())
    workers = workers or worker_count()
    if workers == 1:
        return [evaluate_point(spec, p) for p in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda p: evaluate_point(spec, p), points))


def fields_for(family):
    return PARAM_FIELDS[family] + RESULT_FIELDS


def format_value(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return None if math.isnan(v) else float(format(v, ".17g"))
    if isinstance(v, np.ndarray):
        return [_json_value(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    return v


def metadata(kind, parameters):
    return {"kind": kind, "convention": CONVENTION, "version": __version__, "parameters": parameters}


def render_csv(meta, fieldnames, rows):
    buf = io.StringIO()
    for key, value in meta.items():
        text = value if isinstance(value, str) else json.dumps(_json_value(value), sort_keys=True)
        buf.write(f"# {key}: {text}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fieldnames)
    for row in rows:
        writer.writerow([format_value(row[k]) for k in fieldnames])
    return buf.getvalue()


def render_json(meta, rows):
    return json.dumps({"metadata": _json_value(meta), "records": [_json_value(r) for r in rows]},
                      indent=1, sort_keys=False) + "\n"


def render_sweep(spec, records, fmt="csv"):
    meta = metadata("sweep", spec.describe())
    if fmt == "csv":
        return render_csv(meta, fields_for(spec.family), records)
    if fmt == "json":
        return render_json(meta, records)
    raise SteerwigError(f"unknown output format {fmt!r}")


def render_wigner(grid, parameters, fmt="csv"):
    meta = metadata("wigner", parameters)
    meta["w_min"] = grid.w_min if grid.w_min is not None else math.nan
    meta["minimum_location"] = None if grid.minimum_location is None else list(grid.minimum_location)
    meta["window"] = list(grid.window)
    meta["resolution"] = list(grid.resolution)
    rows = [
        {"x": x, "p": p, "value": grid.values[i, j]}
        for i, x in enumerate(grid.x)
        for j, p in enumerate(grid.p)
    ]
    if fmt == "csv":
        return render_csv(meta, ("x", "p", "value"), rows)
    if fmt == "json":
        return render_json(meta, rows)
    raise SteerwigError(f"unknown output format {fmt!r}")


def spec_from_dict(d, graph=None):
    """Build a :class:`SweepSpec` from a JSON-style dict (1-based graph modes)."""
    return SweepSpec(
        family=d["family"],
        axes={k: tuple(v) for k, v in d.get("axes", {}).items()},
        fixed=dict(d.get("fixed", {})),
        graph=graph,
        f=int(d.get("f", 1)) - 1,
        g=int(d.get("g", 2)) - 1,
        xi_g=tuple(d.get("xi_g", (0.0, 0.0))),
    )

