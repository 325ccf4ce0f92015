"""Command-line interface: ``ramc {eval, coeffs, verify, sweep, bounds}``.

Exit codes: 0 success, 1 a check failed, 2 usage or domain error,
3 numeric failure (non-convergence or an undecidable check).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from . import coeffs, hyper, oracles, verify
from .errors import ConvergenceError, DomainError, SizeError

__all__ = ["RunConfig", "main", "run_cli"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

SUITES = ("all", "coeffs", "special", "bounds", "explore")
SPECIAL_CS = (0.5, 1.0, 1.5, 2.0)
CSV_COLUMNS = ("n", "w_n", "u_star_n", "u_n", "alpha_n", "d_n", "theta_n")


@dataclass
class RunConfig:
    command: str
    a: float | None = None
    b: float | None = None
    p: object = "R"
    x: float | None = None
    r: float | None = None
    c: float | None = None
    n_max: int = 2000
    suite: str = "all"
    grid: list = field(default_factory=list)
    constraint: str | None = None
    tolerances: dict = field(default_factory=dict)
    output_format: str = "json"
    output_path: str | None = None
    parallelism: int = 1

    def params(self) -> hyper.Params:
        if self.a is None or self.b is None:
            raise DomainError(f"command {self.command!r} needs both --a and --b")
        return hyper.Params(self.a, self.b)

    def resolve_p(self, params: hyper.Params) -> float:
        if self.p == "R":
            return hyper.ramanujan_r(params.a, params.b)
        return float(self.p)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _p_value(text: str):
    if text == "R":
        return "R"
    try:
        return float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"--p must be a number or R, got {text!r}") from exc


def _axis(text: str) -> verify.Axis:
    parts = text.split(":")
    if len(parts) != 5:
        raise argparse.ArgumentTypeError(
            f"--grid expects axis:lo:hi:count:linear|log, got {text!r}"
        )
    name, lo, hi, count, spacing = parts
    try:
        return verify.Axis(name, float(lo), float(hi), int(count), spacing)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ramc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = _Parser(add_help=False)
    common.add_argument("--a", type=float)
    common.add_argument("--b", type=float)
    common.add_argument("--p", type=_p_value, default="R")
    common.add_argument("--x", type=float)
    common.add_argument("--r", type=float)
    common.add_argument("--c", type=float)
    common.add_argument("--n", type=_positive_int, default=2000, dest="n_max")
    common.add_argument("--tol", type=float)
    common.add_argument("--grid", type=_axis, action="append", default=[])
    common.add_argument("--constraint", choices=["a+b<=1"])
    common.add_argument("--suite", choices=SUITES, default="all")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_const", const="json", dest="output_format")
    fmt.add_argument("--csv", action="store_const", const="csv", dest="output_format")
    common.add_argument("--out", dest="output_path")
    common.add_argument("--parallelism", type=_positive_int, default=1)
    helps = {
        "eval": "evaluate B, R, F, G, Q_p and related values at a point",
        "coeffs": "dump the coefficient table w, u*, u, alpha, d, theta",
        "verify": "run a verification suite",
        "sweep": "run the absolute-monotonicity check over a parameter grid",
        "bounds": "check the elliptic-integral bounds on an r grid",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def _config_from_args(ns: argparse.Namespace) -> RunConfig:
    tolerances = {} if ns.tol is None else {"tol": ns.tol}
    return RunConfig(
        command=ns.command,
        a=ns.a,
        b=ns.b,
        p=ns.p,
        x=ns.x,
        r=ns.r,
        c=ns.c,
        n_max=ns.n_max,
        suite=ns.suite,
        grid=list(ns.grid),
        constraint=ns.constraint,
        tolerances=tolerances,
        output_format=ns.output_format or "json",
        output_path=ns.output_path,
        parallelism=ns.parallelism,
    )


def _config_dict(cfg: RunConfig) -> dict:
    out = asdict(cfg)
    out["grid"] = [ax.to_dict() for ax in cfg.grid]
    return out


# -- commands ----------------------------------------------------------------


def _cmd_eval(cfg: RunConfig) -> tuple[list, int]:
    rows = []

    def put(name, value):
        rows.append({"quantity": name, "value": verify._json_float(value)})

    if cfg.a is not None or cfg.b is not None:
        prm = cfg.params()
        put("beta", hyper.beta(prm.a, prm.b))
        put("ramanujan_r", hyper.ramanujan_r(prm.a, prm.b))
        put("beta_minus_r", hyper.beta_minus_r(prm.a, prm.b))
        put("theorem_scope", prm.theorem_scope)
        if cfg.x is not None:
            p = cfg.resolve_p(prm)
            put("hyp_zero_balanced", hyper.hyp_zero_balanced(prm, cfg.x))
            put("g_ratio", hyper.g_ratio(prm, cfg.x))
            put("p", p)
            put("q_p", hyper.q_p(prm, p, cfg.x))
    if cfg.r is not None:
        put("agm_complete_k", oracles.agm_complete_k(cfg.r))
        if cfg.a is not None:
            put("elliptic_k_generalized", hyper.elliptic_k_generalized(cfg.a, cfg.r))
    if cfg.c is not None:
        if cfg.x is None:
            raise DomainError("--c needs --x as the split point")
        spec = hyper.CRestriction(cfg.c, cfg.x)
        put("beta_c", hyper.beta_c(spec))
        put("ramanujan_c", hyper.ramanujan_c(spec))
        put("delta_c", hyper.beta_minus_r(*spec.pair))
        quad = oracles.delta_c_integral(cfg.c, cfg.x, cfg.tolerances.get("tol", 1e-12))
        put("delta_c_integral", quad.value)
    if not rows:
        raise DomainError("eval needs --a/--b, --r or --c")
    return rows, EXIT_OK


def _cmd_coeffs(cfg: RunConfig) -> tuple[list, int]:
    prm = cfg.params()
    table = coeffs.build_table(prm, cfg.resolve_p(prm), cfg.n_max)
    rows = [dict(zip(CSV_COLUMNS, (int(r[0]),) + tuple(float(v) for v in r[1:])))
            for r in table.rows()]
    return rows, EXIT_OK


def _run_task(task):
    name, args = task
    return getattr(verify, name)(*args)


def _run_tasks(tasks: list, parallelism: int) -> list:
    if parallelism <= 1 or len(tasks) <= 1:
        return [_run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=parallelism) as pool:
        # map preserves submission order, so output is schedule independent
        return list(pool.map(_run_task, tasks))


def _suite_tasks(cfg: RunConfig) -> list:
    suite = cfg.suite
    tasks = []
    if suite in ("all", "coeffs"):
        prm = cfg.params()
        p = cfg.resolve_p(prm)
        tol = cfg.tolerances.get("tol", coeffs.NEG_TOL)
        tasks.append(("check_absolute_monotonicity", (prm, p, cfg.n_max, tol)))
        tasks.append(("check_limit_dn", (prm, p, cfg.n_max)))
        tasks.append(("check_s_lemmas", ()))
    if suite in ("all", "special"):
        cs = (cfg.c,) if cfg.c is not None else SPECIAL_CS
        for c in cs:
            tasks.append(("check_prop_qc", (c,)))
            tasks.append(("check_prop_delta", (c,)))
            tasks.append(("check_prop_rtilde", (c, 1)))
            tasks.append(("check_prop_rtilde", (c, 2)))
        tasks.append(("check_diag_props", ()))
    if suite in ("all", "bounds"):
        tasks.append(("check_k_bounds", ()))
    if suite == "explore":
        tasks.append(("explore_kanother", (None, min(cfg.n_max, 200))))
    return tasks


def _exit_for(reports) -> int:
    binding = [r for r in reports if not r.exploratory]
    if any(r.status == "fail" for r in binding):
        return EXIT_FAIL
    if any(r.status == "inconclusive" for r in binding):
        return EXIT_NUMERIC
    return EXIT_OK


def _cmd_verify(cfg: RunConfig) -> tuple[list, int]:
    reports = _run_tasks(_suite_tasks(cfg), cfg.parallelism)
    return [r.to_dict() for r in reports], _exit_for(reports)


def _sweep_cells(cfg: RunConfig) -> list[dict]:
    if not cfg.grid:
        raise DomainError("sweep needs at least one --grid axis")
    grid = verify.GridSpec(tuple(cfg.grid), cfg.constraint)
    cells = []
    for pt in grid.points():
        a = pt.get("a", cfg.a)
        b = pt.get("b", cfg.b)
        if a is None or b is None:
            raise DomainError("sweep needs a and b, either as --grid axes or flags")
        cells.append({"a": a, "b": b, "p": pt.get("p", cfg.p)})
    return cells


def _cmd_sweep(cfg: RunConfig) -> tuple[list, int]:
    tol = cfg.tolerances.get("tol", coeffs.NEG_TOL)
    tasks = []
    for cell in _sweep_cells(cfg):
        prm = hyper.Params(cell["a"], cell["b"])
        p = hyper.ramanujan_r(prm.a, prm.b) if cell["p"] == "R" else float(cell["p"])
        tasks.append(("check_absolute_monotonicity", (prm, p, cfg.n_max, tol)))
    reports = _run_tasks(tasks, cfg.parallelism)
    counts = {s: sum(r.status == s for r in reports) for s in ("pass", "fail", "inconclusive")}
    finite = [r for r in reports if not math.isnan(r.worst_margin)]
    worst = min(finite, key=lambda r: r.worst_margin) if finite else None
    summary = verify.CheckReport(
        check_name="sweep_summary",
        status="fail" if counts["fail"] else ("inconclusive" if counts["inconclusive"] else "pass"),
        grid=verify.GridSpec(tuple(cfg.grid), cfg.constraint),
        worst_margin=worst.worst_margin if worst else math.nan,
        witness=worst.witness if worst else {},
        details=f"{len(reports)} cell(s): {counts['pass']} pass, {counts['fail']} fail, "
        f"{counts['inconclusive']} inconclusive",
        values={k: float(v) for k, v in counts.items()},
    )
    return [r.to_dict() for r in reports] + [summary.to_dict()], _exit_for(reports + [summary])


def _cmd_bounds(cfg: RunConfig) -> tuple[list, int]:
    grid = None
    if cfg.grid:
        grid = verify.GridSpec(tuple(cfg.grid))
        if [ax.name for ax in cfg.grid] != ["r"]:
            raise DomainError("bounds accepts a single --grid axis named r")
    report = verify.check_k_bounds(grid)
    return [report.to_dict()], _exit_for([report])


_COMMANDS = {
    "eval": _cmd_eval,
    "coeffs": _cmd_coeffs,
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
    "bounds": _cmd_bounds,
}


# -- serialization ------------------------------------------------------------


def _render_json(cfg: RunConfig, results: list, elapsed_ms: float) -> str:
    doc = {
        "command": cfg.command,
        "config": _config_dict(cfg),
        "results": results,
        "elapsed_ms": round(elapsed_ms, 3),
    }
    return json.dumps(doc, indent=2, allow_nan=False)


def _fmt17(v) -> str:
    if isinstance(v, bool) or isinstance(v, str):
        return str(v)
    if isinstance(v, int):
        return str(v)
    return format(float(v), ".17g")


def _render_csv(cfg: RunConfig, results: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if cfg.command == "coeffs":
        writer.writerow(CSV_COLUMNS)
        for row in results:
            writer.writerow([_fmt17(row[col]) for col in CSV_COLUMNS])
    elif cfg.command == "eval":
        writer.writerow(("quantity", "value"))
        for row in results:
            writer.writerow((row["quantity"], _fmt17(row["value"])))
    else:
        writer.writerow(("check_name", "status", "worst_margin", "tolerance", "witness"))
        for row in results:
            wm = row["worst_margin"]
            writer.writerow((row["check_name"], row["status"],
                             wm if isinstance(wm, str) else _fmt17(wm),
                             _fmt17(row["tolerance"]), json.dumps(row["witness"])))
    return buf.getvalue().rstrip("\n")


def _emit(text: str, path: str | None, stdout) -> None:
    if path is None:
        stdout.write(text + "\n")
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text + "\n")


def run_cli(argv=None, stdout=None, stderr=None) -> int:
    """Run one command and return its exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    start = time.perf_counter()
    try:
        ns = build_parser().parse_args(argv)
    except _UsageError as exc:
        stderr.write(f"ramc: usage error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    cfg = _config_from_args(ns)
    try:
        if cfg.n_max > coeffs.max_n():
            raise SizeError(f"--n {cfg.n_max} exceeds the cap {coeffs.max_n()}")
        results, code = _COMMANDS[cfg.command](cfg)
    except (DomainError, SizeError) as exc:
        stderr.write(f"ramc: {exc}\n")
        return EXIT_USAGE
    except ConvergenceError as exc:
        stderr.write(f"ramc: numeric failure: {exc}\n")
        return EXIT_NUMERIC
    elapsed_ms = 1e3 * (time.perf_counter() - start)
    if cfg.output_format == "csv":
        text = _render_csv(cfg, results)
    else:
        text = _render_json(cfg, results, elapsed_ms)
    try:
        _emit(text, cfg.output_path, stdout)
    except OSError as exc:
        stderr.write(f"ramc: cannot write output: {exc}\n")
        return EXIT_USAGE
    return code


def main() -> None:
    sys.exit(run_cli())
