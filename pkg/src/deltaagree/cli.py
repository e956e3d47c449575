"""Command line interface: ``deltaagree fit | simulate | presets``.

Reports go to stdout, diagnostics to stderr.  Exit codes: 0 success,
2 bad input or usage, 3 solver failure, 4 singular or boundary outcome.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys

from .core import (
    BoundaryError,
    InvalidParamsError,
    InvalidTableError,
    PopulationParams,
    SingularError,
    SolverError,
    population_truths,
)
from .estimators import asymptotic_variances
from .report import _clean, build_report, fmt, parse_families
from .settings import SimulationSetting, builtin_settings, get_setting
from .simulation import COLUMNS, DEFAULT_REPLICATES, TARGETS, run_setting
from .tableio import read_table

EXIT_OK, EXIT_PARSE, EXIT_SOLVER, EXIT_SINGULAR = 0, 2, 3, 4
SEED_ENV = "DELTAAGREE_SEED"

log = logging.getLogger("deltaagree")


class UsageError(Exception):
    pass


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


# ------------------------------------------------------------------ fit

def cmd_fit(args) -> int:
    table = read_table(args.table)
    two = True if args.two_by_two else None
    report = build_report(table, parse_families(args.families), two_by_two=two, gold_standard=args.gold_standard)
    if args.format == "json":
        sys.stdout.write(report.to_json() + "\n")
    else:
        sys.stdout.write(report.to_text(args.decimals))
    return EXIT_OK


# ------------------------------------------------------------------ tables of rows

def _emit_rows(rows: list[dict], columns: list[str], fmt_name: str, decimals: int):
    if fmt_name == "json":
        sys.stdout.write(json.dumps(_clean(rows), indent=2) + "\n")
        return
    if fmt_name == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: ("n/a" if isinstance(v, float) and v != v else repr(v) if isinstance(v, float) else v)
                        for k, v in r.items()})
        sys.stdout.write(buf.getvalue())
        return
    cells = [[fmt(_clean(r[c]), decimals) for c in columns] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(columns)]
    sys.stdout.write("  ".join(c.rjust(w) for c, w in zip(columns, widths)) + "\n")
    for row in cells:
        sys.stdout.write("  ".join(c.rjust(w) for c, w in zip(row, widths)) + "\n")


# ------------------------------------------------------------------ simulate

def _settings_from_file(path: str) -> list[SimulationSetting]:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    items = doc if isinstance(doc, list) else [doc]
    out = []
    for i, item in enumerate(items):
        try:
            params = PopulationParams(item["alpha"], item["pi1"], item["pi2"])
            sid = int(item.get("id", i + 1))
            out.append(SimulationSetting(sid, str(item.get("label", sid)), int(item["n"]), params))
        except KeyError as exc:
            raise UsageError(f"{path}: setting {i + 1} is missing {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            raise UsageError(f"{path}: setting {i + 1}: {exc}") from None
    return out


def cmd_simulate(args) -> int:
    if args.replicates < 2:
        raise UsageError("--replicates must be at least 2")
    seed = default_seed() if args.seed is None else args.seed
    if args.all:
        settings = builtin_settings()
    elif args.setting_file:
        settings = _settings_from_file(args.setting_file)
    else:
        try:
            settings = [get_setting(s) for s in args.setting]
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
    targets = TARGETS if args.target == "all" else (args.target,)
    by_target = {t: [] for t in targets}
    for setting in settings:
        log.info("setting %d: N=%d seed=%d", setting.id, args.replicates, seed)
        for summary in run_setting(setting, args.replicates, seed, args.workers):
            if summary.target in by_target:
                by_target[summary.target].append(summary.row())
    extra = ["N", "used", "seed", "solver_failures", "boundary_fits", "undefined"]
    if args.format == "json":
        sys.stdout.write(json.dumps(_clean(by_target if len(targets) > 1 else by_target[targets[0]]), indent=2) + "\n")
        return EXIT_OK
    for j, t in enumerate(targets):
        if j and args.format == "text":
            sys.stdout.write("\n")
        if args.format == "text" and len(targets) > 1:
            sys.stdout.write(f"# {t}\n")
        _emit_rows(by_target[t], COLUMNS[t] + extra, args.format, args.decimals)
    return EXIT_OK


# ------------------------------------------------------------------ presets

PRESET_COLUMNS = ["id", "label", "K", "n", "Delta", "alpha3", "S3", "V_A_delta", "V_A_alpha3", "V_A_S3"]


def preset_rows() -> list[dict]:
    rows = []
    for s in builtin_settings():
        truth = population_truths(s.params)
        va = asymptotic_variances(s.params, s.n)
        rows.append({
            "id": s.id, "label": s.label, "K": s.K, "n": s.n,
            "Delta": truth.delta, "alpha3": float(s.params.alpha[2]), "S3": float(truth.consistency[2]),
            "V_A_delta": va.delta, "V_A_alpha3": float(va.alpha[2]), "V_A_S3": float(va.consistency[2]),
        })
    return rows


def cmd_presets(args) -> int:
    _emit_rows(preset_rows(), PRESET_COLUMNS, args.format, args.decimals)
    return EXIT_OK


# ------------------------------------------------------------------ entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="deltaagree", description="Delta-model agreement between two raters.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fit", help="fit a K x K count table (CSV or JSON)")
    f.add_argument("table")
    f.add_argument("--two-by-two", action="store_true", help="use the virtual-category pathway (default for 2x2)")
    f.add_argument("--gold-standard", choices=["rows", "cols"], help="report conformity and predictivity")
    f.add_argument("--families", default="classic,u", help="comma list of classic, u, ac (default classic,u)")
    f.add_argument("--format", choices=["text", "json"], default="text")
    f.add_argument("--decimals", type=int, default=3, help="decimals in text output (default 3)")
    f.set_defaults(func=cmd_fit)

    s = sub.add_parser("simulate", help="Monte Carlo study of the classic and U estimators")
    which = s.add_mutually_exclusive_group(required=True)
    which.add_argument("--setting", type=int, action="append", help="built-in setting id 1-48 (repeatable)")
    which.add_argument("--setting-file", help="JSON object or list with n, alpha, pi1, pi2")
    which.add_argument("--all", action="store_true", help="sweep all 48 built-in settings")
    s.add_argument("--replicates", type=int, default=DEFAULT_REPLICATES)
    s.add_argument("--seed", type=int, default=None, help=f"root seed (default ${SEED_ENV} or 0)")
    s.add_argument("--target", choices=list(TARGETS) + ["all"], default="all")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--format", choices=["text", "json", "csv"], default="text")
    s.add_argument("--decimals", type=int, default=4)
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("presets", help="list the 48 built-in settings with truths and V_A")
    r.add_argument("--format", choices=["text", "json", "csv"], default="text")
    r.add_argument("--decimals", type=int, default=4)
    r.set_defaults(func=cmd_presets)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (InvalidTableError, InvalidParamsError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        for line in exc.trace:
            print(f"  {line}", file=sys.stderr)
        return EXIT_SOLVER
    except (SingularError, BoundaryError) as exc:
        print(f"singular: {exc}", file=sys.stderr)
        return EXIT_SINGULAR


if __name__ == "__main__":
    sys.exit(main())
