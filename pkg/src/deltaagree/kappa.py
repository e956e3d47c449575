"""Cohen's kappa, reported alongside the delta estimates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ContingencyTable, observed_agreement_index

KAPPA_CU_STATUS = "unavailable (bias-corrected kappa not implemented)"


@dataclass(frozen=True)
class KappaResult:
    Io: float
    Ie: float
    kappa: float  # NaN when Ie == 1


def cohen_kappa(table: ContingencyTable) -> KappaResult:
    Io = observed_agreement_index(table)
    Ie = float(np.dot(table.p_row, table.p_col))
    if abs(1.0 - Ie) < 1e-15:
        return KappaResult(Io, Ie, float("nan"))
    return KappaResult(Io, Ie, (Io - Ie) / (1.0 - Ie))
