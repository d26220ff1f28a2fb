"""Command-line front end: ``ptmetric {spectrum,metric,verify,converge}``.

Exit codes: 0 success, 1 failed verification, 2 usage or configuration
error, 3 failed ``--assert-positive``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .metric import build_metric
from .model import (
    ModelParams,
    chi_neumann,
    exact_spectrum,
    is_degenerate,
)
from .operators import assemble_hamiltonian
from .quadrature import make_grid, trapezoid_rule
from .verify import (
    FAIL,
    convergence_study,
    positivity_report,
    run_suite,
    smooth_test_function,
    symmetry_residual,
)

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_ASSERT = 0, 1, 2, 3
TOL_ENV = "PTMETRIC_TOL_SCALE"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    alpha: float
    d: float = math.pi
    n: int = 257
    m: int = 200
    method: str = "closed"
    tol_scale: float = 1.0
    fmt: str = "json"
    output: Optional[str] = None

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.alpha, self.d)


# -- serialization ----------------------------------------------------------


def _plain(obj):
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"im": float(obj.imag), "re": float(obj.real)}
    return obj


def format_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    # keep floats recognisable as floats so that parsing preserves the type
    if not any(c in text for c in ".en"):
        text += ".0"
    return text


def dumps(obj, indent: int = 0) -> str:
    """JSON with sorted keys and 17-significant-digit floats."""
    obj = _plain(obj)
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps(obj[k], indent + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [inner + dumps(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, float):
        return format_float(obj)
    if obj is None or isinstance(obj, (bool, int, str)):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_float(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _emit(text: str, path: Optional[str]) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _warn_degenerate(params: ModelParams) -> None:
    if is_degenerate(params):
        r = params.alpha * params.d / math.pi
        print(f"warning: alpha*d/pi = {r:.15g} is a nonzero integer; "
              "eigenvalues are not simple", file=sys.stderr)


# -- commands ---------------------------------------------------------------


def cmd_spectrum(cfg: RunConfig, count: int) -> int:
    params = cfg.params
    _warn_degenerate(params)
    if count < 1 or count > cfg.n:
        raise ConfigError("--count must be between 1 and n")
    exact = exact_spectrum(params, count)
    ham = assemble_hamiltonian(params, make_grid(params.d, cfg.n))
    disc = np.linalg.eigvals(ham.matrix)
    disc = disc[np.lexsort((disc.imag, disc.real, np.abs(disc)))][:count]
    disc = np.sort_complex(disc)
    rows = []
    for (label, e), z in zip(exact, disc):
        err = abs(z - e) / abs(e) if e != 0 else abs(z - e)
        rows.append({"label": label, "exact": e, "discrete": complex(z), "relative_error": err})
    if cfg.fmt == "csv":
        text = _csv(
            ["label", "exact", "discrete_re", "discrete_im", "relative_error"],
            [(r["label"], r["exact"], r["discrete"].real, r["discrete"].imag,
              r["relative_error"]) for r in rows],
        )
    else:
        text = dumps({
            "params": {**params.describe(), "degenerate": is_degenerate(params)},
            "n": cfg.n,
            "eigenvalues": rows,
        })
    _emit(text, cfg.output)
    return EXIT_OK


def _dump_kernel(op, path: str) -> None:
    k = op.kernel()
    pairs = np.empty((k.shape[0], 2 * k.shape[1]))
    pairs[:, 0::2], pairs[:, 1::2] = k.real, k.imag
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in pairs:
            w.writerow([format_float(float(v)) for v in row])


def cmd_metric(cfg: RunConfig, assert_positive: bool = False, dump: Optional[str] = None) -> int:
    params = cfg.params
    _warn_degenerate(params)
    grid = make_grid(params.d, cfg.n)
    rule = trapezoid_rule(grid)
    methods = ["closed", "series"] if cfg.method == "both" else [cfg.method]
    builds, summary = {}, {}
    for method in methods:
        b = build_metric(params, grid, method, rule, cfg.m)
        builds[method] = b
        pos = positivity_report(b.operator)
        entry = {
            "symmetry_residual": symmetry_residual(b.operator),
            "min_eigenvalue": pos.min_eigenvalue,
            "max_eigenvalue": float(pos.eigenvalues[-1]),
        }
        if method == "series":
            entry["m"] = cfg.m
        summary[method] = entry
    report = {
        "params": {**params.describe(), "degenerate": is_degenerate(params)},
        "grid": rule.describe(),
        "builds": summary,
    }
    if cfg.method == "both":
        ((_, cross),) = convergence_study(params, grid, rule, smooth_test_function(params.d), [cfg.m])
        report["cross_residual"] = {"m": cfg.m, "test_function": "x2(d-x)2", "relative": cross}
    if cfg.fmt == "csv":
        text = _csv(
            ["method", "symmetry_residual", "min_eigenvalue", "max_eigenvalue"],
            [(k, v["symmetry_residual"], v["min_eigenvalue"], v["max_eigenvalue"])
             for k, v in summary.items()],
        )
    else:
        text = dumps(report)
    _emit(text, cfg.output)
    if dump:
        _dump_kernel(builds[methods[0]].operator, dump)
    if assert_positive and not is_degenerate(params):
        # a truncated series has rank m+1 < n, so the closed build decides when present
        target = summary.get("closed", summary.get("series"))
        if target["min_eigenvalue"] <= 0:
            print("assertion failed: metric is not positive", file=sys.stderr)
            return EXIT_ASSERT
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    reports = run_suite(cfg.params, cfg.n, cfg.m, cfg.tol_scale)
    if cfg.fmt == "csv":
        text = _csv(
            ["name", "status", "worst_residual", "tolerance"],
            [(r.name, r.status, max(r.residuals.values(), default=0.0), r.tolerance)
             for r in reports],
        )
    else:
        text = dumps([r.to_dict() for r in reports])
    _emit(text, cfg.output)
    return EXIT_VERIFY if any(r.status == FAIL for r in reports) else EXIT_OK


def cmd_converge(cfg: RunConfig, m_list: Sequence[int], test_function: str = "poly") -> int:
    params = cfg.params
    grid = make_grid(params.d, cfg.n)
    rows = convergence_study(params, grid, trapezoid_rule(grid), _test_function(test_function, params), m_list)
    if cfg.fmt == "json":
        text = dumps({"params": params.describe(), "n": cfg.n, "test_function": test_function,
                      "rows": [{"m": m, "residual": r} for m, r in rows]})
    else:
        text = _csv(["m", "residual"], rows)
    _emit(text, cfg.output)
    return EXIT_OK


def _test_function(name: str, params: ModelParams):
    if name == "poly":
        return smooth_test_function(params.d)
    if name.startswith("chiN:"):
        try:
            j = int(name[5:])
        except ValueError:
            raise ConfigError(f"bad test function {name!r}") from None
        if j < 0:
            raise ConfigError("mode index must be >= 0")
        return chi_neumann(j, params.d)
    raise ConfigError(f"unknown test function {name!r}; use 'poly' or 'chiN:<j>'")


# -- argument parsing ---------------------------------------------------------


def parse_length(text: str) -> float:
    """Decimal real, or the literal ``pi``."""
    if text.strip().lower() == "pi":
        return math.pi
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError("value must be finite")
    return value


def parse_m_list(text: str) -> list[int]:
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty m list")
    return values


def tol_scale_from_env(environ=os.environ) -> float:
    raw = environ.get(TOL_ENV)
    if raw is None or raw == "":
        return 1.0
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{TOL_ENV} must be a real number, got {raw!r}") from None
    if not (math.isfinite(value) and value >= 1):
        raise ConfigError(f"{TOL_ENV} must be >= 1, got {raw!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ptmetric",
        description="Metric operator of the Robin interval Hamiltonian.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=parse_length, required=True, help="Robin parameter")
    common.add_argument("--d", type=parse_length, default=math.pi,
                        help="interval width; accepts 'pi' (default: pi)")
    common.add_argument("--n", type=int, default=257, help="odd node count (default: 257)")
    common.add_argument("--format", dest="fmt", choices=("json", "csv"), default=None)
    common.add_argument("--output", "-o", default=None, help="write to this path instead of stdout")

    p = sub.add_parser("spectrum", parents=[common], help="exact vs finite-difference eigenvalues")
    p.add_argument("--count", type=int, default=5)

    p = sub.add_parser("metric", parents=[common], help="build the metric and summarize it")
    p.add_argument("--method", choices=("series", "closed", "both"), default="closed")
    p.add_argument("--m", type=int, default=200, help="series truncation order")
    p.add_argument("--assert-positive", action="store_true")
    p.add_argument("--dump", default=None, help="CSV path for the kernel matrix (re,im pairs)")

    p = sub.add_parser("verify", parents=[common], help="run all checks")
    p.add_argument("--m", type=int, default=200, help="series truncation order")

    p = sub.add_parser("converge", parents=[common], help="series-vs-closed residual table")
    p.add_argument("--m-list", type=parse_m_list, default=[10, 20, 50, 100, 200])
    p.add_argument("--test-function", default="poly", help="'poly' or 'chiN:<j>'")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    default_fmt = "csv" if args.command == "converge" else "json"
    try:
        m = getattr(args, "m", 200)
        if m < 0:
            raise ConfigError("--m must be >= 0")
        make_grid(args.d, args.n)
        cfg = RunConfig(
            alpha=args.alpha, d=args.d, n=args.n, m=m,
            method=getattr(args, "method", "closed"),
            tol_scale=tol_scale_from_env(),
            fmt=args.fmt or default_fmt, output=args.output,
        )
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            if args.command == "spectrum":
                return cmd_spectrum(cfg, args.count)
            if args.command == "metric":
                return cmd_metric(cfg, args.assert_positive, args.dump)
            if args.command == "verify":
                return cmd_verify(cfg)
            return cmd_converge(cfg, args.m_list, args.test_function)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
