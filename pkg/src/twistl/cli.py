"""Command-line front end: ``twistl <subcommand> [options]``.

Options come from three layers, later ones winning: built-in defaults, a
key=value config file (``--config``), and the command line.  Every artifact
carries a provenance header holding the full resolved configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ResourceError, TwistlError, ValidationError

log = logging.getLogger("twistl")

DEFAULTS = {
    "form": "delta",
    "n_max": 20000,
    "cache_dir": "",
    "out": "twistl-out",
    "workers": 1,
    "accuracy": 1e-10,
    "log_level": "WARNING",
    "q": 101,
    "j": [1],
    "s": complex(2, 0),
    "t": 1.0,
    "x": None,
    "x_cubed": None,
    "n": [1],
    "t1": 0.0,
    "t2": 10.0,
    "step": 0.05,
    "sigmas": [0.52, 0.55, 0.6, 0.7, 0.8, 0.9],
    "strict": True,
    "sigma": 0.6,
    "c": 0.002,
    "mollifier_length": None,
    "bins": 40,
    "all_characters": False,
}

TIMESTAMP_KEY = "timestamp"


class UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# -- value parsing ------------------------------------------------------------------

def _int_list(text) -> list[int]:
    if isinstance(text, list):
        return [int(v) for v in text]
    return [int(v) for v in str(text).replace(" ", "").split(",") if v]


def _float_list(text) -> list[float]:
    if isinstance(text, list):
        return [float(v) for v in text]
    return [float(v) for v in str(text).replace(" ", "").split(",") if v]


def _complex(text) -> complex:
    return complex(str(text).replace(" ", "").replace("i", "j"))


def _bool(text) -> bool:
    v = str(text).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


CONVERT = {
    "form": str, "n_max": int, "cache_dir": str, "out": str, "workers": int, "accuracy": float,
    "log_level": str, "q": int, "j": _int_list, "s": _complex, "t": float, "x": float,
    "x_cubed": int, "n": _int_list, "t1": float, "t2": float, "step": float,
    "sigmas": _float_list, "strict": _bool, "sigma": float, "c": float,
    "mollifier_length": float, "bins": int, "all_characters": _bool,
}


def read_config_file(path) -> dict:
    """key = value lines; '#' starts a comment; keys may use '-' or '_'."""
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as e:
        raise UsageError(f"config: cannot read {path}: {e}") from e
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config {path}:{num}: expected key=value")
        key, value = (p.strip() for p in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONVERT:
            raise UsageError(f"config {path}:{num}: unknown field {key!r}")
        try:
            out[key] = CONVERT[key](value)
        except ValueError as e:
            raise UsageError(f"config field {key!r}: {e}") from e
    return out


# -- output ---------------------------------------------------------------------------

def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    if isinstance(x, (complex, np.complexfloating)):
        return f"{format(x.real, '.17g')}{'+' if x.imag >= 0 or math.isnan(x.imag) else '-'}{format(abs(x.imag), '.17g')}j"
    if x is None:
        return ""
    return str(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    return obj


def dump_json(obj, indent: int = 0) -> str:
    """JSON with every float at 17 significant digits (NaN/inf as null)."""
    obj = _jsonable(obj)
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dump_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(dump_json(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dump_json(v, indent + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return "null" if not math.isfinite(obj) else format(obj, ".17g")
    return json.dumps(obj)


class Output:
    def __init__(self, cfg: dict, command: str):
        self.dir = Path(cfg["out"])
        self.command = command
        self.provenance = {
            "tool": "twistl",
            "version": __version__,
            "command": command,
            "config": {k: cfg[k] for k in sorted(cfg) if k != "config"},
            TIMESTAMP_KEY: time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        }
        self.written: list[str] = []

    def _path(self, name: str) -> Path:
        return self.dir / name

    def json(self, name: str, payload) -> Path:
        from .cache import atomic_write_text

        path = self._path(name)
        atomic_write_text(path, dump_json({"provenance": self.provenance, "result": payload}) + "\n")
        self.written.append(str(path))
        return path

    def csv(self, name: str, header: list[str], rows) -> Path:
        from .cache import atomic_write_text

        buf = io.StringIO()
        buf.write("# " + json.dumps(_jsonable(self.provenance), sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])
        path = self._path(name)
        atomic_write_text(path, buf.getvalue())
        self.written.append(str(path))
        return path


# -- shared setup ----------------------------------------------------------------------

def _cache_dir(cfg):
    return cfg["cache_dir"] or None


def load(cfg):
    from .forms import load_form

    return load_form(cfg["form"], n_max=cfg["n_max"], cache_dir=_cache_dir(cfg))


def table_for(cfg, form):
    from .cache import cached_character_table
    from .characters import build_table

    q = cfg["q"]
    if q is None:
        raise UsageError("q: required")
    if math.gcd(q, form.level) != 1:
        raise UsageError(f"q: {q} is not coprime to the level {form.level}")
    if _cache_dir(cfg):
        from .arith import is_prime

        if q < 3 or not is_prime(q):
            raise UsageError(f"q: modulus must be an odd prime, got {q}")
        return cached_character_table(q, _cache_dir(cfg))
    try:
        return build_table(q)
    except ValidationError as e:
        raise UsageError(f"q: {e}") from e


def _require_positive_t(cfg):
    if not cfg["t"] > 0:
        raise UsageError(f"t: must be > 0, got {cfg['t']}")


def _sweep(cfg, form, table):
    from .lfunc import TwistSweep

    return TwistSweep(form, table, target_accuracy=cfg["accuracy"])


def _check_j(cfg, table):
    js = cfg["j"]
    if cfg["all_characters"]:
        return list(range(1, table.order))
    for j in js:
        if not 1 <= j <= table.order - 1:
            raise UsageError(f"j: {j} outside 1..{table.order - 1}")
    return js


def _x_cubed(cfg):
    if cfg["x_cubed"] is not None:
        return cfg["x_cubed"]
    if cfg["x"] is not None:
        from .argument import cube_limit

        return cube_limit(cfg["x"])
    return None


# -- subcommands ----------------------------------------------------------------------

def cmd_coeffs(cfg, out: Output):
    form = load(cfg)
    rows = ((n, form.raw_coeffs[n], form.lam[n]) for n in range(1, form.n_max + 1))
    out.csv(f"coeffs-{form.name}-{form.n_max}.csv", ["n", "a_n", "lambda_n"], rows)
    return 0


def cmd_chars(cfg, out: Output):
    from .characters import DirichletCharacter, gauss_sum, parity
    from .lfunc import root_number

    form = load(cfg)
    table = table_for(cfg, form)
    rows = []
    for j in range(1, table.order):
        chi = DirichletCharacter(table, j)
        g = gauss_sum(chi)
        eps = root_number(form, chi)
        rows.append((j, parity(chi), g.real, g.imag, abs(g), eps.real, eps.imag))
    out.csv(f"chars-q{table.modulus}.csv",
            ["j", "parity", "gauss_re", "gauss_im", "gauss_abs", "root_number_re", "root_number_im"], rows)
    return 0


def cmd_eval(cfg, out: Output):
    from .characters import DirichletCharacter
    from .lfunc import completed_lambda_eval, l_value_eval, twist

    form = load(cfg)
    table = table_for(cfg, form)
    res = []
    for j in _check_j(cfg, table):
        TL = twist(form, DirichletCharacter(table, j), target_accuracy=cfg["accuracy"])
        lv = l_value_eval(TL, cfg["s"])
        cl = completed_lambda_eval(TL, cfg["s"])
        res.append({"j": j, "s": cfg["s"], "L": lv.value, "L_error": lv.est_error, "Lambda": cl.value,
                    "Lambda_error": cl.est_error, "method": lv.method, "cutoff": lv.cutoff,
                    "root_number": TL.eps})
    out.json(f"eval-q{table.modulus}.json", res)
    return 0


def cmd_sarg(cfg, out: Output):
    from .argument import approx_s_decomposition, m_sum, s_arg
    from .characters import DirichletCharacter
    from .errors import PathError
    from .lfunc import twist
    from .zeros import find_zeros_on_line

    _require_positive_t(cfg)
    form = load(cfg)
    table = table_for(cfg, form)
    t = cfg["t"]
    x3 = _x_cubed(cfg)
    rows, nudges = [], []
    for j in _check_j(cfg, table):
        TL = twist(form, DirichletCharacter(table, j), target_accuracy=cfg["accuracy"])
        t_used = t
        for dt in (0.0, 1e-3, -1e-3):
            try:
                S = s_arg(TL, t + dt)
                t_used = t + dt
                break
            except PathError:
                continue
        else:
            raise PathError(f"S(t) path blocked for j={j} after nudges", where=t)
        if t_used != t:
            nudges.append((j, t_used))
        row = {"j": j, "t": t_used, "S": S, "M": None, "R": None, "sigma_x": None,
               "err1": None, "err2": None, "residual": None}
        if x3 is not None:
            row["M"] = m_sum(TL, t_used, x_cubed=x3)
            row["R"] = S - row["M"]
        if cfg["x"] is not None:
            from .argument import coverage_radius

            W = coverage_radius(cfg["x"])
            zl = find_zeros_on_line(TL, t_used - W - 0.5, t_used + W + 0.5)
            d = approx_s_decomposition(TL, t_used, cfg["x"], zl, S=S)
            row.update(M=d.M, R=d.R, sigma_x=d.sigma_x, err1=d.err1, err2=d.err2, residual=d.residual)
        rows.append(row)
    header = ["j", "t", "S", "M", "R", "sigma_x", "err1", "err2", "residual"]
    out.csv(f"sarg-q{table.modulus}.csv", header, ([r[h] for h in header] for r in rows))
    if nudges:
        out.json(f"sarg-q{table.modulus}-nudges.json", {"nudges": nudges})
    return 0


def _zeros_task(args):
    form, q, j, t1, t2, step, accuracy = args
    from .characters import DirichletCharacter, build_table
    from .lfunc import twist
    from .zeros import find_zeros_on_line

    TL = twist(form, DirichletCharacter(build_table(q), j), target_accuracy=accuracy)
    zl = find_zeros_on_line(TL, t1, t2, step)
    return j, list(zl.ordinates), zl.offline, zl.certification


def cmd_zeros(cfg, out: Output):
    form = load(cfg)
    table = table_for(cfg, form)
    if not cfg["t2"] > cfg["t1"]:
        raise UsageError("t2: must exceed t1")
    if not cfg["step"] > 0:
        raise UsageError("step: must be positive")
    tasks = [(form, table.modulus, j, cfg["t1"], cfg["t2"], cfg["step"], cfg["accuracy"])
             for j in _check_j(cfg, table)]
    if cfg["workers"] > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg["workers"]) as pool:
            results = list(pool.map(_zeros_task, tasks))  # ordered by j
    else:
        results = [_zeros_task(a) for a in tasks]
    rows, cert = [], {}
    for j, gammas, offline, c in results:
        rows += [(j, g, 0.5, cfg["step"]) for g in gammas]
        rows += [(j, z.imag, z.real, cfg["step"]) for z in offline]
        cert[j] = c
    out.csv(f"zeros-q{table.modulus}.csv", ["j", "gamma", "beta", "step"], rows)
    out.json(f"zeros-q{table.modulus}-certification.json", cert)
    return 0


def cmd_density(cfg, out: Output):
    from .zeros import density_table

    form = load(cfg)
    table = table_for(cfg, form)
    sweep = _sweep(cfg, form, table)
    try:
        dt = density_table(sweep, cfg["sigmas"], cfg["t1"], cfg["t2"], strict=cfg["strict"], step=cfg["step"])
    except TwistlError as e:
        if "below 1/2 + 1/log q" in str(e):
            raise UsageError(f"sigmas: {e}") from e
        raise
    rows = [(table.modulus, s, cfg["t1"], cfg["t2"], a) for s, a in zip(dt.sigmas, dt.n_avg)]
    out.csv(f"density-q{table.modulus}.csv", ["q", "sigma", "t1", "t2", "n_avg"], rows)
    out.json(f"density-q{table.modulus}-fit.json", {
        "slope": dt.slope, "intercept": dt.intercept, "fit_points": dt.fit_points,
        "non_increasing": bool(np.all(np.diff(dt.n_avg) <= 0)),
        "nudges": {str(k): {str(j): v for j, v in d.items()} for k, d in dt.nudges.items()},
    })
    return 0


def cmd_mollifier(cfg, out: Output):
    from .mollifier import C_MAX, lm_deviation_average, mollifier_spec

    form = load(cfg)
    table = table_for(cfg, form)
    if cfg["mollifier_length"] is None and not 0 < cfg["c"] < C_MAX:
        raise UsageError(f"c: {cfg['c']} outside (0, 1/360); set mollifier_length to override")
    spec = mollifier_spec(form, table.modulus, cfg["c"], cfg["mollifier_length"])
    sweep = _sweep(cfg, form, table)
    res = lm_deviation_average(spec, sweep, cfg["sigma"], cfg["t"])
    out.csv(f"mollifier-q{table.modulus}.csv", ["q", "sigma", "t", "L_effective", "average", "samples"],
            [(res.q, res.sigma, res.t, res.L_effective, res.average, res.samples)])
    return 0


def cmd_moments(cfg, out: Output):
    from .moments import sweep_moments

    _require_positive_t(cfg)
    form = load(cfg)
    table = table_for(cfg, form)
    x3 = _x_cubed(cfg)
    if x3 is None:
        raise UsageError("x_cubed: required (or x)")
    if x3 > form.n_max:
        raise UsageError(f"x_cubed: {x3} exceeds n_max={form.n_max}")
    rep = sweep_moments(form, table, cfg["t"], x3, cfg["n"], config=None, sweep=_sweep(cfg, form, table))
    d = rep.to_dict()
    d.pop("runtime")  # kept out of the artifact so reruns are byte-identical
    d.pop("config")
    d["accounting"] = {"characters": rep.count, "nudged": len(rep.nudges), "failed": len(rep.failures),
                       "expected": table.modulus - 2}
    out.json(f"moments-q{table.modulus}.json", d)
    log.info("moments sweep took %.2fs", rep.runtime)
    return 0


def cmd_clt(cfg, out: Output):
    from .moments import clt_distribution

    _require_positive_t(cfg)
    form = load(cfg)
    table = table_for(cfg, form)
    res = clt_distribution(form, table, cfg["t"], cfg["bins"], sweep=_sweep(cfg, form, table))
    out.csv(f"clt-q{table.modulus}.csv", ["bin_left", "bin_right", "mass", "gaussian_mass"], res.rows())
    out.json(f"clt-q{table.modulus}.json", {
        "q": res.q, "t": res.t, "count": res.count, "ks_distance": res.ks_distance,
        "mass_total": float(np.sum(res.masses)), "nudges": res.nudges,
        "accounting": {"characters": res.count, "nudged": len(res.nudges), "failed": 0,
                       "expected": table.modulus - 2},
    })
    return 0


def cmd_check(cfg, out: Output):
    from .checks import run_checks

    form = load(cfg)
    table = table_for(cfg, form)
    results = run_checks(form, table, accuracy=cfg["accuracy"])
    out.json(f"check-q{table.modulus}.json", results)
    failed = [r["name"] for r in results if not r["pass"]]
    for r in results:
        print(f"{'PASS' if r['pass'] else 'FAIL'}  {r['name']}: {r['value']:.3g} (tol {r['tolerance']:g})")
    return 2 if failed else 0


COMMANDS = {
    "coeffs": (cmd_coeffs, "coefficient table of the form"),
    "chars": (cmd_chars, "Gauss sums, parities and root numbers mod q"),
    "eval": (cmd_eval, "L(s) and Lambda(s) for chosen characters"),
    "sarg": (cmd_sarg, "S(t), M, R and the sigma_x decomposition"),
    "zeros": (cmd_zeros, "audited critical-line zeros"),
    "density": (cmd_density, "averaged zero counts on a sigma grid"),
    "mollifier": (cmd_mollifier, "average of |LM - 1|^2"),
    "moments": (cmd_moments, "character-averaged moments of S, M, R"),
    "clt": (cmd_clt, "distribution of S against the Gaussian limit"),
    "check": (cmd_check, "invariant and oracle suite"),
}


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    common = argparse.ArgumentParser(add_help=False, argument_default=S)
    common.add_argument("--config", help="key=value config file")
    common.add_argument("--form", help="'delta' or a JSON form file")
    common.add_argument("--n-max", type=int, help="coefficient table length")
    common.add_argument("--cache-dir", help="cache directory (empty: no cache)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--workers", type=int, help="worker processes for per-character jobs")
    common.add_argument("--accuracy", type=float, help="target absolute accuracy of Lambda")
    common.add_argument("--log-level", help="logging level")
    common.add_argument("--q", type=int, help="prime modulus")
    common.add_argument("--j", type=_int_list, help="character indices, comma separated")
    common.add_argument("--all-characters", type=_bool, nargs="?", const=True, help="use every primitive j")
    common.add_argument("--s", type=_complex, help="complex point, e.g. 2+3j")
    common.add_argument("--t", type=float, help="height")
    common.add_argument("--x", type=float, help="cutoff parameter (primes to x^3)")
    common.add_argument("--x-cubed", type=int, help="prime range x^3 directly")
    common.add_argument("--n", type=_int_list, help="moment orders, comma separated")
    common.add_argument("--t1", type=float)
    common.add_argument("--t2", type=float)
    common.add_argument("--step", type=float, help="scan / boundary step")
    common.add_argument("--sigmas", type=_float_list, help="sigma grid, comma separated")
    common.add_argument("--strict", type=_bool, nargs="?", const=True,
                        help="enforce sigma >= 1/2 + 1/log q (default true)")
    common.add_argument("--sigma", type=float)
    common.add_argument("--c", type=float, help="mollifier exponent, L = q^c")
    common.add_argument("--mollifier-length", type=float, help="override L")
    common.add_argument("--bins", type=int)

    parser = _Parser(prog="twistl", description="Twisted modular L-function experiments.")
    parser.add_argument("--version", action="version", version=f"twistl {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text, description=help_text,
                       argument_default=S)
    return parser


def resolve_config(ns: argparse.Namespace) -> dict:
    cli = {k: v for k, v in vars(ns).items() if k != "command"}
    cfg = dict(DEFAULTS)
    if "config" in cli:
        cfg.update(read_config_file(cli.pop("config")))
    cfg.update(cli)
    return cfg


def _diagnostics(out: Output, exc: Exception):
    info = {"error": type(exc).__name__, "message": str(exc)}
    for attr in ("where", "failed", "interval"):
        if hasattr(exc, attr):
            info[attr] = getattr(exc, attr)
    try:
        out.json(f"diagnostics-{out.command}.json", info)
    except Exception:  # noqa: BLE001 - diagnostics must never mask the original error
        log.exception("could not write diagnostics")


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = resolve_config(ns)
    except UsageError as e:
        print(f"twistl: usage error: {e}", file=sys.stderr)
        return 1
    logging.basicConfig(level=getattr(logging, str(cfg["log_level"]).upper(), logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    out = Output(cfg, ns.command)
    func = COMMANDS[ns.command][0]
    try:
        code = func(cfg, out)
    except ValidationError as e:
        print(f"twistl: usage error: {e}", file=sys.stderr)
        return 1
    except ResourceError as e:
        print(f"twistl: resource limit: {e}", file=sys.stderr)
        _diagnostics(out, e)
        return 3
    except TwistlError as e:
        print(f"twistl: numeric failure: {e}", file=sys.stderr)
        _diagnostics(out, e)
        return 2
    except MemoryError as e:
        print("twistl: out of memory", file=sys.stderr)
        _diagnostics(out, e)
        return 3
    for path in out.written:
        print(path)
    return code


if __name__ == "__main__":
    sys.exit(main())
