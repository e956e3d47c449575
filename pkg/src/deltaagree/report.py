"""Analysis reports for a single table, rendered as text or JSON.

Undefined numbers (NaN) serialize as ``"n/a"`` and infinite ones as
``"singular"``; everything else is a plain float at full precision in JSON
and rounded to ``decimals`` places in text.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import ContingencyTable
from .estimators import EstimateFamily, estimate
from .kappa import KAPPA_CU_STATUS, KappaResult, cohen_kappa
from .mle import MleFit, fit_delta_mle
from .special import GoldStandardStats, TwoByTwoReport, fit_2x2, gold_standard_stats

NA = "n/a"
SINGULAR = "singular"
FAMILY_NAMES = {"classic": "classic", "u": "U", "ac": "AC"}


def _clean(x):
    """Replace non-finite floats for serialization, recursively."""
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_clean(v) for v in x.tolist()]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return NA
        if math.isinf(x):
            return SINGULAR
        return x
    return x


@dataclass(frozen=True)
class AnalysisReport:
    table: ContingencyTable
    mode: str  # standard | two-category | gold-standard
    fit: MleFit
    families: dict[str, EstimateFamily]
    kappa: KappaResult
    two_by_two: TwoByTwoReport | None = None
    gold_standard: dict[str, GoldStandardStats] | None = None
    gold_rater: str | None = None
    notes: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        fit = self.fit
        out = {
            "input": {"cells": self.table.cells, "n": self.table.n, "K": self.table.K},
            "mode": self.mode,
            "fit": {
                "fitted_table": fit.table.cells,
                "augmented": fit.augmented or self.two_by_two is not None,
                "B": fit.B,
                "pi1": fit.pi1,
                "pi2": fit.pi2,
                "loglik": fit.loglik,
                "candidates": fit.candidates,
            },
            "families": {k: _family_dict(f) for k, f in self.families.items()},
            "kappa": {"I_o": self.kappa.Io, "I_e": self.kappa.Ie, "kappa_C": self.kappa.kappa,
                      "kappa_CU": KAPPA_CU_STATUS},
            "diagnostics": {
                "residual": fit.residual,
                "boundary": fit.boundary,
                "degenerate_categories": [int(i) + 1 for i in np.flatnonzero(fit.degenerate)],
                "notes": list(self.notes),
            },
        }
        if self.two_by_two is not None:
            out["two_by_two"] = {
                "augmented_cells": self.two_by_two.augmented.cells,
                "starred": {
                    k: {
                        "delta": s.delta, "alpha": s.alpha, "var_delta": s.var_delta, "var_alpha": s.var_alpha,
                        "consistency": s.consistency, "var_consistency": s.var_consistency,
                    }
                    for k, s in self.two_by_two.starred.items()
                },
            }
        if self.gold_standard is not None:
            out["gold_standard"] = {
                "rater": self.gold_rater,
                "families": {
                    k: {"conformity": g.conformity, "predictivity": g.predictivity,
                        "var_conformity": g.var_conformity, "var_predictivity": g.var_predictivity}
                    for k, g in self.gold_standard.items()
                },
            }
        return _clean(out)

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def to_text(self, decimals: int = 3) -> str:
        return render_text(self.to_dict(), decimals)


def _family_dict(f: EstimateFamily) -> dict:
    d = {"delta": f.delta, "alpha": f.alpha, "consistency": f.consistency, "I_pi": f.Ipi}
    if f.variances is None:
        d["variances"] = SINGULAR
    else:
        d["variances"] = {"delta": f.variances.delta, "alpha": f.variances.alpha,
                          "consistency": f.variances.consistency}
    if f.bias is not None:
        d["bias"] = f.bias.Ei
    d["notes"] = list(f.notes)
    return d


def parse_families(spec: str | list[str]) -> list[str]:
    items = spec.split(",") if isinstance(spec, str) else list(spec)
    out = []
    for item in items:
        key = item.strip().lower()
        if key not in FAMILY_NAMES:
            raise ValueError(f"unknown estimator family {item!r}; choose from classic, u, ac")
        if FAMILY_NAMES[key] not in out:
            out.append(FAMILY_NAMES[key])
    if not out:
        raise ValueError("no estimator family requested")
    return out


def build_report(
    table: ContingencyTable,
    families=("classic", "U"),
    two_by_two: bool | None = None,
    gold_standard: str | None = None,
) -> AnalysisReport:
    """Fit ``table`` and collect everything the CLI prints.

    ``two_by_two`` defaults to ``table.K == 2``.  ``gold_standard`` is
    ``"rows"``, ``"cols"`` or None; a column gold standard transposes the
    table first.
    """
    kinds = parse_families(families)
    if two_by_two is None:
        two_by_two = table.K == 2
    if two_by_two and table.K != 2:
        raise ValueError(f"the two-category pathway needs a 2x2 table, got K={table.K}")
    if not two_by_two and table.K == 2:
        raise ValueError("a 2x2 table can only be fitted through the two-category pathway")
    if gold_standard not in (None, "rows", "cols"):
        raise ValueError(f"gold standard must be 'rows' or 'cols', got {gold_standard!r}")

    notes = []
    work = table.transposed() if gold_standard == "cols" else table
    if gold_standard == "cols":
        notes.append("column rater is the gold standard: table transposed before fitting")
    tbt = None
    if two_by_two:
        tbt = fit_2x2(work, kinds)
        fit = tbt.fit
        fams = tbt.families
        notes.append("2x2 table: virtual third category added and 0.5 added to every cell")
    else:
        fit = fit_delta_mle(work)
        fams = {k: estimate(fit, k) for k in kinds}
    notes.extend(fit.notes)
    for k, f in fams.items():
        notes.extend(f"{k}: {note}" for note in f.notes)

    gold = None
    if gold_standard is not None:
        if tbt is not None:
            gold = {k: tbt.gold_standard(k) for k in kinds}
        else:
            gold = {k: gold_standard_stats(fit, k) for k in kinds}
    if gold_standard:
        mode = "gold-standard"
    else:
        mode = "two-category" if tbt is not None else "standard"
    return AnalysisReport(
        table=table, mode=mode, fit=fit, families=fams, kappa=cohen_kappa(table),
        two_by_two=tbt, gold_standard=gold, gold_rater=gold_standard, notes=tuple(notes),
    )


# ---------------------------------------------------------------- text output

def fmt(x, decimals: int = 3) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, bool):
        return "yes" if x else "no"
    if isinstance(x, int):
        return str(x)
    return f"{x:.{decimals}f}"


def _grid(header: list[str], rows: list[list[str]]) -> list[str]:
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    line = lambda r: "  ".join(c.rjust(w) if i else c.ljust(w) for i, (c, w) in enumerate(zip(r, widths)))
    return [line(header)] + [line(r) for r in rows]


def _var(block, key):
    v = block["variances"]
    return v if isinstance(v, str) else v[key]


def _at(v, i):
    return v if isinstance(v, str) else v[i]


def render_text(d: dict, decimals: int = 3) -> str:
    f = lambda x: fmt(x, decimals)
    inp = d["input"]
    n = inp["n"]
    n_txt = str(int(n)) if n == int(n) else f(n)
    out = [f"delta model agreement   mode: {d['mode']}   K = {inp['K']}   n = {n_txt}", ""]

    out.append("input table")
    out += ["  " + "  ".join(fmt(c, 1 if c != int(c) else 0).rjust(7) for c in row) for row in inp["cells"]]
    if d["fit"]["augmented"]:
        out.append("fitted (augmented) table")
        out += ["  " + "  ".join(fmt(c, 1).rjust(7) for c in row) for row in d["fit"]["fitted_table"]]
    out.append("")

    fams = d["families"]
    kinds = list(fams)
    rows = [
        ["Delta"] + [f(fams[k]["delta"]) for k in kinds],
        ["Var(Delta)"] + [f(_var(fams[k], "delta")) for k in kinds],
        ["I_pi"] + [f(fams[k]["I_pi"]) for k in kinds],
    ]
    out += _grid(["global"] + kinds, rows)
    out.append("")

    K = len(fams[kinds[0]]["alpha"])
    header = ["category"]
    for k in kinds:
        header += [f"alpha[{k}]", f"Var", f"S[{k}]", "Var"]
    rows = []
    for i in range(K):
        r = [str(i + 1)]
        for k in kinds:
            b = fams[k]
            r += [f(b["alpha"][i]), f(_at(_var(b, "alpha"), i)), f(b["consistency"][i]), f(_at(_var(b, "consistency"), i))]
        rows.append(r)
    out += _grid(header, rows)
    out.append("")

    fit = d["fit"]
    out += _grid(["random responses", "pi_1", "pi_2"],
                 [[str(i + 1), f(_at(fit["pi1"], i)), f(_at(fit["pi2"], i))] for i in range(K)])
    out.append("")

    if "two_by_two" in d:
        st = d["two_by_two"]["starred"]
        skinds = list(st)
        rows = [["Delta*"] + [f(st[k]["delta"]) for k in skinds],
                ["Var(Delta*)"] + [f(st[k]["var_delta"]) for k in skinds]]
        for i in range(2):
            rows.append([f"alpha*_{i + 1}"] + [f(st[k]["alpha"][i]) for k in skinds])
            rows.append([f"Var(alpha*_{i + 1})"] + [f(st[k]["var_alpha"][i]) for k in skinds])
        out += _grid(["two categories"] + skinds, rows)
        out.append("")

    if "gold_standard" in d:
        gs = d["gold_standard"]
        gkinds = list(gs["families"])
        header = ["category"]
        for k in gkinds:
            header += [f"F[{k}]", "Var", f"P[{k}]", "Var"]
        n_cat = len(gs["families"][gkinds[0]]["conformity"])
        rows = []
        for i in range(n_cat):
            r = [str(i + 1)]
            for k in gkinds:
                g = gs["families"][k]
                r += [f(g["conformity"][i]), f(g["var_conformity"][i]), f(g["predictivity"][i]), f(g["var_predictivity"][i])]
            rows.append(r)
        out.append(f"gold standard: {gs['rater']} rater (F = conformity, P = predictivity)")
        out += _grid(header, rows)
        out.append("")

    kp = d["kappa"]
    out.append(f"kappa_C = {f(kp['kappa_C'])}   (I_o = {f(kp['I_o'])}, I_e = {f(kp['I_e'])})")
    out.append(f"kappa_CU: {kp['kappa_CU']}")
    out.append("")

    diag = d["diagnostics"]
    out.append(f"solver residual {diag['residual']:.2e}   candidates {fit['candidates']}   boundary {fmt(diag['boundary'])}")
    if diag["degenerate_categories"]:
        out.append("categories with a zero disagreement margin: " + ", ".join(map(str, diag["degenerate_categories"])))
    for note in diag["notes"]:
        out.append(f"note: {note}")
    return "\n".join(out) + "\n"
