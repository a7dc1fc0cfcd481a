"""The ``packbound`` command-line front end.

Subcommands ``theta``, ``cayley``, ``delsarte``, ``sphere`` and ``verify``
print a JSON artifact (or CSV with ``--format csv``) on stdout or to
``--output``. Exit codes: 0 success, 2 bad input, 3 solver failure,
4 verification failure. Errors are reported as one JSON line on stderr.

Settings may also come from a ``--config`` file of ``key = value`` lines
(``#`` starts a comment); flags given on the command line win. Keys are
the long option names with ``_`` for ``-``, e.g. ``gap_tol = 1e-9``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .cayley import Boolean, CayleySpec, Cyclic, cayley_lp_model, cayley_theta, delsarte_bound
from .cohn_elkies import Basis, SphereSettings, build_sphere_sdp, sphere_bound
from .errors import (
    DegreeTooSmallError,
    NotCertifiedError,
    ParseError,
    PackboundError,
    SolverFailure,
    VerificationFailed,
)
from .sdp import SolverSettings, dumps, problem_to_json
from .theta import read_graph, theta_prime, theta_prime_sdp
from .verifier import GridSettings, MatrixRadialFunction, SphereSystem, verify_conditions

__all__ = ["RunConfig", "run", "emit_table", "main", "read_config", "EXIT_CODES"]

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_SOLVER = 3
EXIT_VERIFY = 4

EXIT_CODES = {"ok": EXIT_OK, "parse": EXIT_PARSE, "solver": EXIT_SOLVER, "verify": EXIT_VERIFY}

TABLE_HEADER = ("dim", "degree", "bound")

# built-in defaults; None on the parser marks "not given on the command line"
DEFAULTS = {
    "gap_tol": 1e-8,
    "feas_tol": 1e-8,
    "max_iter": 100,
    "format": "json",
    "output": None,
    "basis": "laguerre",
    "tol": 1e-6,
    "points": None,
    "dump_sdp": None,
    "emit_f": None,
}

CONVERT = {
    "gap_tol": float,
    "feas_tol": float,
    "max_iter": int,
    "tol": float,
    "points": int,
}


@dataclass
class RunConfig:
    """Fully resolved settings for one invocation."""

    command: str
    inputs: dict = field(default_factory=dict)
    solver: SolverSettings = SolverSettings()
    output: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.format not in ("json", "csv"):
            raise ParseError(f"unknown format {self.format!r}")


def read_config(path):
    """Parse a ``key = value`` config file into a dict of strings."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if not sep or not key:
                raise ParseError(f"{path}:{lineno}: expected 'key = value'")
            out[key] = value.strip()
    return out


def _format_cell(v):
    if isinstance(v, float):
        return "" if math.isnan(v) else f"{v:.17g}"
    return "" if v is None else str(v)


def emit_table(rows, header=TABLE_HEADER):
    """CSV text with a header row; reals at 17 significant digits.

    ``rows`` are sequences in ``header`` order or dicts keyed by it.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        if isinstance(row, dict):
            row = [row[k] for k in header]
        if len(row) != len(header):
            raise ValueError("row length differs from header")
        w.writerow([_format_cell(v) for v in row])
    return buf.getvalue()


def _int_list(text, what):
    out = []
    try:
        for part in str(text).split(","):
            part = part.strip()
            if not part:
                continue
            if "-" in part[1:]:
                lo, hi = part.split("-", 1)
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise ParseError(f"cannot parse {what} list {text!r}") from None
    if not out:
        raise ParseError(f"empty {what} list")
    return out


def _float_list(text, what):
    try:
        out = [float(p) for p in str(text).split(",") if p.strip()]
    except ValueError:
        raise ParseError(f"cannot parse {what} list {text!r}") from None
    if not out:
        raise ParseError(f"empty {what} list")
    return out


def _write(path, text):
    with open(path, "w", newline="") as fh:
        fh.write(text)


# -- commands ----------------------------------------------------------------


def _cmd_theta(cfg):
    g = read_graph(cfg.inputs["file"])
    if cfg.inputs.get("dump_sdp"):
        _write(cfg.inputs["dump_sdp"], dumps(problem_to_json(theta_prime_sdp(g))))
    value, cert = theta_prime(g, cfg.solver)
    out = cert.to_json()
    out["n_vertices"] = g.n_vertices
    return out, [("value", value)]


def _cayley_spec(inputs):
    if inputs.get("boolean") is not None:
        group = Boolean(int(inputs["boolean"]))
    elif inputs.get("n") is not None:
        group = Cyclic(int(inputs["n"]))
    else:
        raise ParseError("cayley needs --n or --boolean")
    sigma = _int_list(inputs["sigma"], "sigma") if inputs.get("sigma") else []
    try:
        return CayleySpec(group, sigma)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def _cmd_cayley(cfg):
    spec = _cayley_spec(cfg.inputs)
    if cfg.inputs.get("dump_sdp"):
        _write(cfg.inputs["dump_sdp"], dumps(problem_to_json(cayley_lp_model(spec).problem)))
    res = cayley_theta(spec, cfg.solver)
    out = res.to_json()
    out["group"] = str(spec.group)
    out["sigma"] = sorted(spec.sigma)
    return out, [("value", res.value)]


def _cmd_delsarte(cfg):
    m, d = int(cfg.inputs["length"]), int(cfg.inputs["distance"])
    try:
        value = delsarte_bound(m, d, cfg.solver)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    return {"value": value, "length": m, "distance": d}, [("value", value)]


def _sphere_cell(args):
    n, d, basis, solver = args
    try:
        bound = sphere_bound(n, d, SphereSettings(solver=solver), Basis(basis))[0]
        return n, d, bound, None
    except PackboundError as exc:
        # exceptions travel back from worker processes as (code, name, reason)
        return n, d, float("nan"), (_classify(exc), type(exc).__name__, str(exc))


def _sweep(cells):
    workers = int(os.environ.get("PACKBOUND_THREADS", "1") or 1)
    if workers <= 1 or len(cells) <= 1:
        return [_sphere_cell(c) for c in cells]
    with ProcessPoolExecutor(max_workers=min(workers, len(cells))) as pool:
        return list(pool.map(_sphere_cell, cells))


def _cmd_sphere(cfg):
    basis = Basis(cfg.inputs["basis"])
    if cfg.inputs.get("table"):
        dims = _int_list(cfg.inputs["dims"], "dimension")
        degrees = _int_list(cfg.inputs["degree"], "degree")
        cells = [(n, d, basis.value, cfg.solver) for n in sorted(set(dims))
                 for d in sorted(set(degrees))]
        results = _sweep(cells)
        errors = [e for *_, e in results if e is not None]
        rows = [(n, d, b) for n, d, b, _ in results]
        return None, rows, (errors[0] if errors else None)
    try:
        n, d = int(cfg.inputs["dim"]), int(cfg.inputs["degree"])
    except ValueError:
        raise ParseError(f"--degree must be an integer, got {cfg.inputs['degree']!r}") from None
    if cfg.inputs.get("dump_sdp"):
        _write(cfg.inputs["dump_sdp"], dumps(problem_to_json(build_sphere_sdp(n, d, basis).problem)))
    bound, f, report = sphere_bound(n, d, SphereSettings(solver=cfg.solver), basis)
    if cfg.inputs.get("emit_f"):
        _write(cfg.inputs["emit_f"], dumps(f.to_json()))
    out = {"bound": bound, "basis": basis.value, "f": f.to_json(), "report": report.to_json()}
    return out, [(n, d, bound)], None


def _cmd_verify(cfg):
    path = cfg.inputs["f"]
    try:
        with open(path) as fh:
            data = json.load(fh)
        f = MatrixRadialFunction.from_json(data)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from None
    radii = _float_list(cfg.inputs["radii"], "radii")
    try:
        sys_ = SphereSystem(f.n, radii)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    if sys_.N != f.N:
        raise ParseError(f"{len(radii)} radii given for an N={f.N} function")
    grid = GridSettings(points=int(cfg.inputs.get("points") or 4096), tol=float(cfg.inputs["tol"]))
    report = verify_conditions(f, sys_, grid)
    out = report.to_json()
    if report.certified:
        out["bound"] = max(f.entry(i, i).value_at_zero() for i in range(f.N))
    return out, report


# -- plumbing ----------------------------------------------------------------


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value settings file")
    common.add_argument("--gap-tol", type=float)
    common.add_argument("--feas-tol", type=float)
    common.add_argument("--max-iter", type=int)
    common.add_argument("--output", "-o", help="write the artifact here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"))

    p = argparse.ArgumentParser(prog="packbound", description="SDP and LP packing bounds")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("theta", parents=[common], help="theta-prime of a graph file")
    t.add_argument("file")
    t.add_argument("--dump-sdp")

    c = sub.add_parser("cayley", parents=[common], help="theta-prime of a Cayley graph via its Fourier LP")
    c.add_argument("--n", type=int, help="order of the cyclic group Z_n")
    c.add_argument("--boolean", type=int, metavar="M", help="use Z_2^M (elements as integers)")
    c.add_argument("--sigma", help="comma-separated connection set")
    c.add_argument("--dump-sdp")

    d = sub.add_parser("delsarte", parents=[common], help="LP bound for binary codes")
    d.add_argument("--length", type=int, required=True)
    d.add_argument("--distance", type=int, required=True)

    s = sub.add_parser("sphere", parents=[common], help="sphere-packing density bound")
    s.add_argument("--dim", type=int)
    s.add_argument("--degree", required=True, help="degree, or a list/range with --table")
    s.add_argument("--basis", choices=("laguerre", "monomial"))
    s.add_argument("--dump-sdp")
    s.add_argument("--emit-f")
    s.add_argument("--table", action="store_true", help="CSV sweep over --dims and --degree")
    s.add_argument("--dims", default="1-8", help="dimensions for --table, e.g. 1-8 or 1,2,3,8")

    v = sub.add_parser("verify", parents=[common], help="grid-verify a density certificate")
    v.add_argument("--f", required=True, dest="f")
    v.add_argument("--radii", required=True)
    v.add_argument("--tol", type=float)
    v.add_argument("--points", type=int)
    return p


def _resolve(args):
    file_cfg = read_config(args.config) if args.config else {}
    values = dict(DEFAULTS)
    for key, raw in file_cfg.items():
        try:
            values[key] = CONVERT.get(key, str)(raw)
        except ValueError:
            raise ParseError(f"config key {key!r}: bad value {raw!r}") from None
    for key, val in vars(args).items():
        if val is not None and key not in ("config", "command"):
            values[key] = val
    try:
        solver = SolverSettings(values["gap_tol"], values["feas_tol"], values["max_iter"])
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    if values["tol"] <= 0:
        raise ParseError("tol must be > 0")
    if args.command == "sphere" and not values.get("table") and values.get("dim") is None:
        raise ParseError("sphere needs --dim (or --table)")
    inputs = {k: v for k, v in values.items()
              if k not in ("gap_tol", "feas_tol", "max_iter", "output", "format")}
    return RunConfig(args.command, inputs, solver, values["output"], values["format"])


def _report_error(kind, exc):
    reason = " ".join(str(exc).split())
    sys.stderr.write(json.dumps({"error": kind, "reason": reason}, sort_keys=True) + "\n")


def run(cfg):
    """Execute ``cfg``, emit the artifact, and return the exit code."""
    code = EXIT_OK
    try:
        if cfg.command == "sphere":
            out, rows, err = _cmd_sphere(cfg)
            if out is None or cfg.format == "csv":
                text = emit_table(rows)
            else:
                text = dumps(out)
            if err is not None:
                code, name, reason = err
                _report_error(name, reason)
        elif cfg.command == "verify":
            out, report = _cmd_verify(cfg)
            text = dumps(out) if cfg.format == "json" else emit_table(
                [(out["separation_margin"], out["volume_margin"], out["positivity_margin"],
                  out["certified"])],
                ("separation_margin", "volume_margin", "positivity_margin", "certified"),
            )
            if not report.certified:
                code = EXIT_VERIFY
                _report_error("NotCertified", NotCertifiedError(
                    f"separation {report.separation_margin:.3e}, volume "
                    f"{report.volume_margin:.3e}, positivity {report.positivity_margin:.3e}"
                    f" at tol {report.tol:g}"))
        else:
            handler = {"theta": _cmd_theta, "cayley": _cmd_cayley, "delsarte": _cmd_delsarte}
            out, summary = handler[cfg.command](cfg)
            text = dumps(out) if cfg.format == "json" else emit_table(
                [[v for _, v in summary]], [k for k, _ in summary]
            )
    except PackboundError as exc:
        _report_error(type(exc).__name__, exc)
        return _classify(exc)
    except (OSError, ValueError) as exc:
        _report_error("ParseError", exc)
        return EXIT_PARSE
    if cfg.output:
        _write(cfg.output, text)
    else:
        sys.stdout.write(text)
    return code


def _classify(exc):
    if isinstance(exc, SolverFailure):
        return EXIT_SOLVER
    if isinstance(exc, (VerificationFailed, NotCertifiedError)):
        return EXIT_VERIFY
    if isinstance(exc, (ParseError, DegreeTooSmallError, ValueError)):
        return EXIT_PARSE
    return EXIT_SOLVER


def main(argv=None):
    parser = _parser()
    args = parser.parse_args(argv)  # argparse itself exits with 2 on bad usage
    try:
        cfg = _resolve(args)
    except (PackboundError, OSError) as exc:
        _report_error("ParseError", exc)
        return EXIT_PARSE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
