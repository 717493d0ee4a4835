"""
Command-line front end: configuration, suites and run manifests.

Configuration is an INI file with one section per module; every value can be
overridden with ``--set section.key=value``.  Each invocation writes into a
fresh run directory ``<out>/<timestamp>-<config hash>`` holding CSV data,
JSON summaries and a ``manifest.json`` that references every file once.

Exit codes: 0 success, 2 configuration or parameter validation error,
3 numerical error at run time, 4 certification failure.
"""

import argparse
from concurrent.futures import ThreadPoolExecutor
import configparser
import csv
import datetime
import hashlib
import io
import json
import math
import os
import re
import sys

import numpy as np

from . import __version__
from .params import PhysicalParams, ParamError, validate_params
from .symbols import DegenerateRoots, BranchCutError, InadmissiblePoint, SpectralPoint
from .lopatinski import (ScanGrid, FactorizationMismatch, NoAdmissibleLambda0,
                         scan_lower_bound, scan_kinetic_bound)
from .multipliers import (ClassGrid, QuadratureFailure, ZeroFrequency, certify_classes,
                          kernel_decay_probe, default_claims, product_order_check)
from .mode_solver import (SingularL, KineticSingular, BoundaryData, solve_mode, residual_mode,
                          synthesize_field, harmonic_data, gaussian_bump)
from .oracle import IllConditioned, TruncationTooShort, converge
from .sampling import random_draws, standard_test_set

__all__ = ["main", "ConfigError", "RunManifest", "resolve_config", "SUITES", "EXIT"]

EXIT = {"ok": 0, "config": 2, "numerical": 3, "certification": 4}
SUITES = ("residuals", "lopatinski", "kinetic", "multipliers", "kernel", "oracle")
NUMERICAL_ERRORS = (SingularL, KineticSingular, DegenerateRoots, BranchCutError, IllConditioned,
                    TruncationTooShort, QuadratureFailure, FactorizationMismatch, ZeroFrequency,
                    FloatingPointError, ArithmeticError)


class ConfigError(ValueError):
    """Malformed configuration or override."""


# ---------------------------------------------------------------- configuration

def _base():
    p = PhysicalParams()
    return {
        "params": dict(p.as_dict()),
        "solve": {"lambda": "1.0", "box": 2 * math.pi, "nx": 16, "data": "harmonic", "k": 1,
                  "amp": 1.0, "width": 0.5, "height": "d", "route": "table", "file": "",
                  "stations": "0.01,0.1,1.0", "epsilon": math.pi / 3},
        "lopatinski": {"lam_min": 1e-3, "lam_max": 1e3, "n_mod": 61, "n_arg": 31,
                       "A_min": 1e-3, "A_max": 1e3, "n_A": 61, "epsilon": math.pi / 3},
        "kinetic": {"lam_min": 1e-3, "lam_max": 1e3, "n_mod": 49, "n_arg": 17,
                    "A_min": 1e-3, "A_max": 1e3, "n_A": 49, "epsilon": math.pi / 3},
        "multipliers": {"lam_min": 1e-2, "lam_max": 1e2, "n_mod": 5, "n_arg": 17,
                        "ratio_min": 1e-3, "ratio_max": 1e3, "n_ratio": 145, "n_dir": 3,
                        "epsilon": math.pi / 3, "growth_tol": 0.05},
        "kernel": {"lambdas": "1+0.5j,2.0,-0.5+2j", "r_min": 10**-1.5, "r_max": 10**1.5,
                   "n_r": 13, "variant": "M0", "tol": 1e-6},
        "oracle": {"points": 20, "ns": "48,96,192", "tol": 1e-6},
        "residuals": {"draws": 200, "seed": 0, "tol": 1e-9, "cond_limit": 1e6},
    }


PRESETS = {
    "smoke": {
        "lopatinski": {"n_mod": 25, "n_arg": 13, "n_A": 25},
        "kinetic": {"n_mod": 13, "n_arg": 7, "n_A": 13},
        "multipliers": {"n_mod": 3},
        "kernel": {"lambdas": "1+0.5j", "n_r": 7},
        "oracle": {"points": 4, "ns": "48,96"},
        "residuals": {"draws": 30},
    },
    "default": {},
    "deep": {
        "lopatinski": {"n_mod": 97, "n_arg": 49, "n_A": 97},
        "kinetic": {"n_mod": 97, "n_arg": 33, "n_A": 97},
        "multipliers": {"n_mod": 7, "n_arg": 25, "n_ratio": 193},
        "kernel": {"n_r": 25},
        "oracle": {"ns": "64,128,256"},
        "residuals": {"draws": 1000},
    },
}


def _coerce(default, text, where):
    try:
        if isinstance(default, bool):
            low = text.strip().lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(text)
            return low in ("true", "1", "yes")
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
        return str(text).strip()
    except ValueError:
        raise ConfigError(f"{where}: cannot read {text!r} as {type(default).__name__}") from None


def resolve_config(path=None, overrides=(), preset="default"):
    """Defaults, then the grid preset, then the INI file, then ``--set`` overrides."""
    if preset not in PRESETS:
        raise ConfigError(f"unknown grid preset {preset!r}")
    cfg = _base()
    for sec, vals in PRESETS[preset].items():
        cfg[sec].update(vals)

    def put(sec, key, text, where):
        if sec not in cfg:
            raise ConfigError(f"{where}: unknown section [{sec}]")
        if key not in cfg[sec]:
            raise ConfigError(f"{where}: unknown key {key!r} in [{sec}]")
        cfg[sec][key] = _coerce(cfg[sec][key], text, where)

    if path is not None:
        cp = configparser.ConfigParser()
        cp.optionxform = str
        try:
            with open(path) as fh:
                cp.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"{path}: {exc}") from None
        for sec in cp.sections():
            for key, val in cp.items(sec):
                put(sec, key, val, f"{path} [{sec}] {key}")
    for item in overrides:
        m = re.fullmatch(r"([A-Za-z_]+)\.([A-Za-z_0-9]+)=(.*)", item)
        if not m:
            raise ConfigError(f"--set {item!r}: expected section.key=value")
        put(m.group(1), m.group(2), m.group(3), f"--set {item}")
    cfg["grid_preset"] = preset
    return cfg


def config_hash(cfg):
    blob = json.dumps(cfg, sort_keys=True, default=repr).encode()
    return hashlib.sha256(blob).hexdigest()[:10]


def _params_from(cfg):
    d = dict(cfg["params"])
    return validate_params(PhysicalParams(**d))


def _complex_list(text):
    try:
        return [complex(v.strip().replace(" ", "")) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"cannot read {text!r} as a list of complex numbers") from None


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"cannot read {text!r} as a list of numbers") from None


# ---------------------------------------------------------------- output

def fmt(x):
    """17 significant digits for floats; other values as text."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
        return f"{x:.17g}"
    return str(x)


_MARK = "\u0001F"


def _mark_floats(obj):
    if isinstance(obj, dict):
        return {str(k): _mark_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_mark_floats(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _mark_floats(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [_mark_floats(float(obj.real)), _mark_floats(float(obj.imag))]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return _MARK + fmt(x) if math.isfinite(x) else fmt(x)
    return obj


def dumps(obj):
    """JSON with every finite float written to 17 significant digits."""
    text = json.dumps(_mark_floats(obj), indent=2, sort_keys=True)
    return re.sub(r'"\\u0001F([^"]*)"', r"\1", text)


def csv_text(columns):
    """CSV of equal-length columns; complex columns split into _re/_im."""
    cols = {}
    for k, v in columns.items():
        a = np.asarray(v)
        if np.iscomplexobj(a):
            cols[f"{k}_re"], cols[f"{k}_im"] = a.real, a.imag
        else:
            cols[k] = a
    names = list(cols)
    n = len(cols[names[0]]) if names else 0
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for i in range(n):
        w.writerow([fmt(cols[k][i].item() if hasattr(cols[k][i], "item") else cols[k][i])
                    for k in names])
    return buf.getvalue()


class RunManifest:
    """Run directory plus the record of everything written into it."""

    def __init__(self, out, cfg, command):
        self.cfg = cfg
        self.command = command
        stamp = datetime.datetime.now(datetime.timezone.utc).strftime("%Y%m%dT%H%M%SZ")
        base = os.path.join(out, f"{stamp}-{config_hash(cfg)}")
        path, k = base, 1
        while os.path.exists(path):
            path, k = f"{base}-{k}", k + 1
        os.makedirs(path)
        self.path = path
        self.timestamp = stamp
        self.artifacts = []
        self.verdicts = {}

    def write(self, name, text):
        full = os.path.join(self.path, name)
        with open(full, "w", newline="") as fh:
            fh.write(text)
        self.artifacts.append({"file": name,
                               "sha256": hashlib.sha256(text.encode()).hexdigest()})
        return full

    def record(self, suite, passed, **extra):
        self.verdicts[suite] = dict(verdict="pass" if passed else "fail", **extra)

    def finish(self, params=None, status="ok", error=None):
        echo = None
        if params is not None:
            dc = params.derived
            echo = {"params": params.as_dict(), "eta_star": dc.eta_star, "s1": complex(dc.s1),
                    "s2": complex(dc.s2), "sigma_plus": dc.sigma_plus, "sigma_minus": dc.sigma_minus}
        doc = {"tool": "nskresolvent", "version": __version__, "command": self.command,
               "timestamp": self.timestamp, "config": self.cfg, "config_hash": config_hash(self.cfg),
               "parameters": echo, "verdicts": self.verdicts, "status": status,
               "error": error, "artifacts": self.artifacts}
        with open(os.path.join(self.path, "manifest.json"), "w") as fh:
            fh.write(dumps(doc) + "\n")
        return doc


# ---------------------------------------------------------------- suites

def _report_files(man, rep, stem):
    man.write(f"{stem}.csv", csv_text(rep.columns))
    man.write(f"{stem}.json", dumps({"name": rep.name, "passed": rep.passed, "summary": rep.summary}) + "\n")


def suite_lopatinski(p, cfg, man):
    c = cfg["lopatinski"]
    g = ScanGrid(lam_min=c["lam_min"], lam_max=c["lam_max"], n_mod=c["n_mod"], n_arg=c["n_arg"],
                 A_min=c["A_min"], A_max=c["A_max"], n_A=c["n_A"], epsilon=c["epsilon"], dim=p.dim)
    rep = scan_lower_bound(p, g)
    return [("lopatinski", rep)], rep.passed


def suite_kinetic(p, cfg, man):
    c = cfg["kinetic"]
    g = ScanGrid(lam_min=c["lam_min"], lam_max=c["lam_max"], n_mod=c["n_mod"], n_arg=c["n_arg"],
                 A_min=c["A_min"], A_max=c["A_max"], n_A=c["n_A"], epsilon=c["epsilon"], dim=p.dim)
    try:
        rep = scan_kinetic_bound(p, g)
    except NoAdmissibleLambda0 as exc:
        from .lopatinski import ScanReport
        rep = ScanReport(name="kinetic", columns={}, summary={"error": f"NoAdmissibleLambda0: {exc}"},
                         passed=False)
    return [("kinetic", rep)], rep.passed


def suite_multipliers(p, cfg, man):
    c = cfg["multipliers"]
    g = ClassGrid(lam_min=c["lam_min"], lam_max=c["lam_max"], n_mod=c["n_mod"], n_arg=c["n_arg"],
                  ratio_min=c["ratio_min"], ratio_max=c["ratio_max"], n_ratio=c["n_ratio"],
                  epsilon=c["epsilon"], n_dir=c["n_dir"])
    reps = certify_classes(p, default_claims(c["epsilon"]), g, growth_tol=c["growth_tol"])
    rows = {"symbol": [], "order": [], "type": [], "max_growth": [], "empirical_order": [],
            "verdict": []}
    for r in reps:
        cl = r.summary["claim"]
        rows["symbol"].append(cl["symbol"])
        rows["order"].append(cl["order"])
        rows["type"].append(cl["type"])
        rows["max_growth"].append(r.summary["max_growth"])
        rows["empirical_order"].append(r.summary["empirical_order"])
        rows["verdict"].append(r.summary["verdict"])
    prod = product_order_check(p, [("B+", "1/B+"), ("t1", "1/t1"), ("A", "1/l")])
    from .lopatinski import ScanReport
    agg = ScanReport(name="multipliers", columns=rows,
                     summary={"claims": len(reps), "failed": [r.name for r in reps if not r.passed],
                              "products": prod, "details": {r.name: r.summary for r in reps}},
                     passed=all(r.passed for r in reps))
    return [("multipliers", agg)], agg.passed


def suite_kernel(p, cfg, man):
    c = cfg["kernel"]
    p2 = p if p.dim == 2 else validate_params(PhysicalParams(**{**p.as_dict(), "dim": 2}))
    grid = np.logspace(math.log10(c["r_min"]), math.log10(c["r_max"]), c["n_r"])
    out, ok = [], True
    for k, lam in enumerate(_complex_list(c["lambdas"])):
        rep = kernel_decay_probe(p2, lam, grid_x=grid, variant=c["variant"], tol=c["tol"])
        out.append((f"kernel_{k}", rep))
        ok = ok and rep.passed
    return out, ok


def suite_oracle(p, cfg, man):
    c = cfg["oracle"]
    ns = tuple(int(v) for v in _float_list(c["ns"]))
    pts = standard_test_set()[:c["points"]]
    rows = {"index": [], "regime": [], "lambda": [], "max_error": [], "worst": [],
            "min_ratio": [], "converged": []}
    from .lopatinski import ScanReport
    tables = []
    ok = True
    for i, d in enumerate(pts):
        data = BoundaryData(d.h, H_hat=d.H, d_hat=d.d)
        rep = converge(d.params, d.point, data, ns=ns, tol=c["tol"])
        rows["index"].append(i)
        rows["regime"].append(d.regime)
        rows["lambda"].append(d.point.lam)
        rows["max_error"].append(rep.max_error)
        rows["worst"].append(rep.worst)
        rows["min_ratio"].append(min(rep.ratios) if rep.ratios else math.inf)
        rows["converged"].append(rep.converged)
        tables.append({"index": i, "table": rep.table, "errors": rep.errors})
        ok = ok and rep.converged
    agg = ScanReport(name="oracle", columns=rows,
                     summary={"points": len(pts), "ns": list(ns), "tol": c["tol"],
                              "max_error": max(rows["max_error"]), "tables": tables},
                     passed=ok)
    return [("oracle", agg)], ok


def suite_residuals(p, cfg, man):
    c = cfg["residuals"]
    draws = random_draws(c["draws"], seed=c["seed"])
    rows = {"index": [], "regime": [], "mode": [], "table_max": [], "elimination_max": [],
            "elimination_condition": []}
    ok = True
    over = 0
    for i, d in enumerate(draws):
        data = BoundaryData(d.h, H_hat=d.H, d_hat=d.d)
        rt = residual_mode(solve_mode(d.params, d.point, data, route="table")).max_relative
        se = solve_mode(d.params, d.point, data, route="elimination")
        re_ = residual_mode(se).max_relative
        rows["index"].append(i)
        rows["regime"].append(d.regime)
        rows["mode"].append(data.mode)
        rows["table_max"].append(rt)
        rows["elimination_max"].append(re_)
        rows["elimination_condition"].append(se.condition)
        ok = ok and rt <= c["tol"]
        if se.condition <= c["cond_limit"]:
            ok = ok and re_ <= c["tol"]
        else:
            over += 1
    from .lopatinski import ScanReport
    rep = ScanReport(name="residuals", columns=rows,
                     summary={"draws": c["draws"], "seed": c["seed"], "tol": c["tol"],
                              "table_max": max(rows["table_max"]),
                              "elimination_max_within_cond_limit": max(
                                  [r for r, k in zip(rows["elimination_max"], rows["elimination_condition"])
                                   if k <= c["cond_limit"]], default=0.0),
                              "elimination_over_cond_limit": over},
                     passed=ok)
    return [("residuals", rep)], ok


SUITE_FUNCS = {"residuals": suite_residuals, "lopatinski": suite_lopatinski,
               "kinetic": suite_kinetic, "multipliers": suite_multipliers,
               "kernel": suite_kernel, "oracle": suite_oracle}


def run_suites(p, cfg, man, names, threads=1):
    """Run suites (in parallel if ``threads`` > 1); files are written in suite order."""
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(lambda n: SUITE_FUNCS[n](p, cfg, man), names))
    else:
        results = [SUITE_FUNCS[n](p, cfg, man) for n in names]
    ok = True
    for name, (reps, passed) in zip(names, results):
        for stem, rep in reps:
            _report_files(man, rep, stem)
        man.record(name, passed)
        ok = ok and passed
    return ok


# ---------------------------------------------------------------- commands

def read_boundary_csv(path, dim):
    """Boundary data from a CSV grid file.

    Columns ``h1 .. h{N-1}`` and ``g`` (real parts), optional ``*_im`` companions;
    rows enumerate the periodic grid in C order, so the row count must be
    ``nx**(N-1)``.  Coordinate columns, if present, are ignored.
    """
    try:
        tab = np.genfromtxt(path, delimiter=",", names=True, dtype=float, ndmin=1)
    except OSError as exc:
        raise ConfigError(f"[solve] cannot read boundary file {path!r}: {exc}") from None
    names = tab.dtype.names or ()
    need = [f"h{j + 1}" for j in range(dim - 1)] + ["g"]
    miss = [c for c in need if c not in names]
    if miss:
        raise ConfigError(f"[solve] boundary file {path!r} lacks column(s) {miss}")
    n = tab.shape[0]
    nx = int(round(n ** (1 / (dim - 1))))
    if nx ** (dim - 1) != n:
        raise ConfigError(f"[solve] boundary file has {n} rows, not a square grid for dim={dim}")
    shape = (nx,) * (dim - 1)

    def col(c):
        a = tab[c] + (1j * tab[c + "_im"] if c + "_im" in names else 0)
        if not np.all(np.isfinite(a)):
            raise ConfigError(f"[solve] non-finite values in column {c!r}")
        return np.asarray(a).reshape(shape)

    return nx, np.stack([col(c) for c in need[:-1]]), col("g")


def field_rows(fs, dim):
    """Long-format field table: one row per (grid point, side, station, component)."""
    grids = [g.reshape(-1) for g in np.meshgrid(*fs.x_prime, indexing="ij")]
    coords = list(zip(*grids))
    rows = []

    def emit(side, xn, comp, arr):
        for c, v in zip(coords, np.asarray(arr).reshape(-1)):
            rows.append((*c, side, xn, comp, v.real, v.imag))

    emit("interface", 0.0, "H", fs.H)
    for side, xv, U, Sc, sname in (("plus", fs.x_plus, fs.u_plus, fs.rho_plus, "rho"),
                                   ("minus", fs.x_minus, fs.u_minus, fs.pi_minus, "pi")):
        for k, x in enumerate(xv):
            for J in range(dim):
                emit(side, float(x), f"u{J + 1}", U[k, J])
            emit(side, float(x), sname, Sc[k])
    header = [f"x{a + 1}" for a in range(dim - 1)] + ["side", "x_N", "component", "re", "im"]
    return header, rows


def cmd_solve(p, cfg, man, args):
    c = cfg["solve"]
    lam = _complex_list(c["lambda"])[0]
    SpectralPoint(lam, (1.0,) * (p.dim - 1), c["epsilon"]).check()
    nx = c["nx"]
    if c["data"] == "harmonic":
        h = harmonic_data(p.dim, nx, k=c["k"], amp=c["amp"], box=c["box"])
        g = harmonic_data(p.dim, nx, k=c["k"], amp=c["amp"], box=c["box"], which="scalar")
    elif c["data"] == "gaussian":
        g = gaussian_bump(p.dim, nx, width=c["width"], box=c["box"])
        h = np.stack([g] * (p.dim - 1))
    elif c["data"] == "csv":
        nx, h, g = read_boundary_csv(c["file"], p.dim)
    else:
        raise ConfigError(f"[solve] data must be 'harmonic', 'gaussian' or 'csv', got {c['data']!r}")
    if c["height"] not in ("d", "H"):
        raise ConfigError(f"[solve] height must be 'd' or 'H', got {c['height']!r}")
    xs = np.asarray(_float_list(c["stations"]))
    kw = {"d": g} if c["height"] == "d" else {"H": g}
    fs = synthesize_field(p, lam, h, box=c["box"], x_stations=(xs, -xs), route=c["route"], **kw)
    header, rows = field_rows(fs, p.dim)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    man.write("field.csv", buf.getvalue())
    man.write("field.json", dumps(fs.manifest) + "\n")
    man.record("solve", True, imag_leakage=fs.imag_leakage)
    return EXIT["ok"]


def cmd_certify(p, cfg, man, args):
    names = _suite_names(args.suite)
    ok = run_suites(p, cfg, man, names, args.threads)
    return EXIT["ok"] if ok else EXIT["certification"]


def _single(name):
    def cmd(p, cfg, man, args):
        ok = run_suites(p, cfg, man, [name], 1)
        return EXIT["ok"] if ok else EXIT["certification"]
    return cmd


def _suite_names(items_arg):
    if not items_arg:
        return list(SUITES)
    names = [s.strip() for item in items_arg for s in item.split(",") if s.strip()]
    bad = [s for s in names if s not in SUITES]
    if bad:
        raise ConfigError(f"unknown suite(s) {bad}; choose from {list(SUITES)}")
    return names


COMMANDS = {
    "solve": cmd_solve,
    "certify": cmd_certify,
    "scan-lopatinski": _single("lopatinski"),
    "scan-kh": _single("kinetic"),
    "check-multipliers": _single("multipliers"),
    "oracle-compare": _single("oracle"),
    "kernel-probe": _single("kernel"),
}


def build_parser():
    ap = argparse.ArgumentParser(prog="nskresolvent",
                                 description="Two-phase resolvent symbols: solve and certify.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", metavar="PATH")
        sp.add_argument("--suite", action="append", metavar="NAME",
                        help=f"suite(s) for certify: {', '.join(SUITES)}")
        sp.add_argument("--out", default="runs", metavar="DIR")
        sp.add_argument("--threads", type=int, default=1, metavar="K")
        sp.add_argument("--grid-preset", default="default", choices=sorted(PRESETS))
        sp.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        dest="overrides")
    return ap


def _describe(exc):
    name, msg = type(exc).__name__, str(exc)
    return msg if msg.startswith(name) else f"{name}: {msg}"


def _err(kind, exc):
    print(f"error: {_describe(exc)}", file=sys.stderr)
    return EXIT[kind]


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args.config, args.overrides, args.grid_preset)
        if args.suite and args.command != "certify":
            raise ConfigError("--suite applies to certify only")
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        p = _params_from(cfg)
        if args.command == "certify":
            _suite_names(args.suite)
    except (ConfigError, ParamError, TypeError) as exc:
        return _err("config", exc)
    man = RunManifest(args.out, cfg, args.command)
    status, error, code = "ok", None, EXIT["ok"]
    try:
        code = COMMANDS[args.command](p, cfg, man, args)
        status = "ok" if code == 0 else "certification failure"
    except (ConfigError, InadmissiblePoint) as exc:
        status, error, code = "config error", _describe(exc), _err("config", exc)
    except NUMERICAL_ERRORS as exc:
        status, error, code = "numerical error", _describe(exc), _err("numerical", exc)
    except Exception as exc:
        man.finish(p, "internal error", _describe(exc))
        raise
    man.finish(p, status, error)
    print(man.path)
    return code


if __name__ == "__main__":
    sys.exit(main())
