"""Two-category tables and gold-standard (conformity / predictivity) measures."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ContingencyTable, _frozen
from .estimators import EstimateFamily, chance_quantities, estimate
from .mle import MleFit, fit_delta_mle


def augment_2x2(table: ContingencyTable) -> ContingencyTable:
    """Add an empty virtual third category, then 0.5 to all nine cells."""
    if table.K != 2:
        raise ValueError(f"augmentation applies to 2x2 tables only, got K={table.K}")
    cells = np.zeros((3, 3))
    cells[:2, :2] = table.cells
    return ContingencyTable(cells + 0.5)


@dataclass(frozen=True)
class StarredEstimates:
    """Agreement on the original two categories, rescaled by ``1 - p_3.``."""

    kind: str
    alpha: np.ndarray
    delta: float
    var_alpha: np.ndarray
    var_delta: float
    consistency: np.ndarray
    var_consistency: np.ndarray


@dataclass(frozen=True)
class TwoByTwoReport:
    original: ContingencyTable
    augmented: ContingencyTable
    fit: MleFit
    families: dict[str, EstimateFamily]
    starred: dict[str, StarredEstimates]

    def gold_standard(self, kind: str = "classic") -> GoldStandardStats:
        stats = gold_standard_stats(self.fit, kind)
        return stats.restrict(2)


def _starred(fit: MleFit, fam: EstimateFamily) -> StarredEstimates:
    aug = fit.table
    n = aug.n
    w = 1.0 - aug.p_row[2]
    cq = chance_quantities(fit.pi1, fit.pi2)
    B = 1.0 - fam.delta
    a_star = fam.alpha[:2] / w
    d_star = float(a_star.sum())
    h = cq.h()[:2]
    v_a = (B * h + w * a_star * (1.0 - a_star)) / (n * w**2)
    v_d = (B * cq.spread(2) + w * d_star * (1.0 - d_star)) / (n * w**2)
    if fam.variances is not None:
        v_s = fam.variances.consistency[:2]
    else:
        v_s = np.full(2, np.nan)
    return StarredEstimates(
        kind=fam.kind,
        alpha=_frozen(a_star),
        delta=d_star,
        var_alpha=_frozen(v_a),
        var_delta=float(v_d),
        consistency=_frozen(fam.consistency[:2]),
        var_consistency=_frozen(v_s),
    )


def fit_2x2(table: ContingencyTable, kinds=("classic", "U")) -> TwoByTwoReport:
    aug = augment_2x2(table)
    fit = fit_delta_mle(aug)
    families = {k: estimate(fit, k) for k in kinds}
    starred = {k: _starred(fit, fam) for k, fam in families.items()}
    return TwoByTwoReport(table, aug, fit, families, starred)


@dataclass(frozen=True)
class GoldStandardStats:
    """Conformity ``F_i = alpha_i / p_i.`` and predictivity ``P_i = alpha_i / p_.i``.

    Rows are the gold standard.  Undefined entries (empty marginal) are NaN.
    """

    kind: str
    conformity: np.ndarray
    predictivity: np.ndarray
    var_conformity: np.ndarray
    var_predictivity: np.ndarray

    def restrict(self, k: int) -> GoldStandardStats:
        return GoldStandardStats(
            self.kind,
            *(_frozen(a[:k]) for a in (self.conformity, self.predictivity, self.var_conformity, self.var_predictivity)),
        )


def _ratio_and_var(alpha, H, p, n):
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(p > 0, alpha / np.where(p > 0, p, 1.0), np.nan)
        v = np.where(p > 0, (H + p * r * (1.0 - r)) / (n * p**2), np.nan)
    return r, v


def gold_standard_stats(fit: MleFit, kind: str = "classic") -> GoldStandardStats:
    """Chance-corrected sensitivity-like and predictive-value-like measures.

    For a column gold standard, fit ``table.transposed()`` instead.
    """
    table = fit.table
    fam = estimate(fit, kind)
    if fit.boundary:
        H = np.zeros(fit.K)
    else:
        H = (1.0 - fam.delta) * chance_quantities(fit.pi1, fit.pi2).h()
    F, vF = _ratio_and_var(fam.alpha, H, table.p_row, table.n)
    P, vP = _ratio_and_var(fam.alpha, H, table.p_col, table.n)
    return GoldStandardStats(fam.kind, _frozen(F), _frozen(P), _frozen(vF), _frozen(vP))
