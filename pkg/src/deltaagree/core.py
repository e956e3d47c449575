"""Domain types and the forward map of the delta agreement model.

The delta model writes the probability of cell ``(i, j)`` of a ``K x K``
agreement table as::

    p_ij = delta_ij * alpha_i + (1 - Delta) * pi_i1 * pi_j2

where ``Delta = sum(alpha)`` is the proportion of deliberate agreements and
``pi_.r`` is the distribution rater ``r`` uses when responding at random.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

USER_TOL = 1e-9
INTERNAL_TOL = 1e-12


class DeltaModelError(Exception):
    """Base class for errors raised by this package."""


class InvalidTableError(DeltaModelError, ValueError):
    pass


class InvalidParamsError(DeltaModelError, ValueError):
    pass


class SolverError(DeltaModelError, RuntimeError):
    """The likelihood equations could not be solved."""

    def __init__(self, message: str, trace: list[str] | None = None):
        super().__init__(message)
        self.trace = list(trace or [])


class SingularError(DeltaModelError, ArithmeticError):
    """A formula hits a pole (for example ``X = 1``) and has no finite value."""


class BoundaryError(DeltaModelError, ArithmeticError):
    """Raised when ``Delta = 1`` leaves no chance component to work with."""


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ContingencyTable:
    """Square table of non-negative counts; rows are rater 1, columns rater 2.

    Counts are real valued so that half-count augmentation goes through the
    same type.
    """

    cells: np.ndarray

    def __post_init__(self):
        cells = np.array(self.cells, dtype=float)
        if cells.ndim != 2 or cells.shape[0] != cells.shape[1]:
            raise InvalidTableError(f"table must be square, got shape {cells.shape}")
        if cells.shape[0] < 2:
            raise InvalidTableError("table needs at least 2 categories")
        if not np.all(np.isfinite(cells)):
            raise InvalidTableError("table contains non-finite counts")
        bad = np.argwhere(cells < 0)
        if bad.size:
            i, j = bad[0]
            raise InvalidTableError(f"negative count {cells[i, j]} at row {i + 1}, column {j + 1}")
        if cells.sum() <= 0:
            raise InvalidTableError("table total must be positive")
        object.__setattr__(self, "cells", _frozen(cells))

    @property
    def K(self) -> int:
        return self.cells.shape[0]

    @property
    def n(self) -> float:
        return float(self.cells.sum())

    @property
    def row_totals(self) -> np.ndarray:
        return self.cells.sum(axis=1)

    @property
    def col_totals(self) -> np.ndarray:
        return self.cells.sum(axis=0)

    @property
    def proportions(self) -> np.ndarray:
        return self.cells / self.n

    @property
    def p_row(self) -> np.ndarray:
        return self.row_totals / self.n

    @property
    def p_col(self) -> np.ndarray:
        return self.col_totals / self.n

    @property
    def p_diag(self) -> np.ndarray:
        return np.diag(self.cells) / self.n

    def margins(self) -> CategoryMargins:
        return CategoryMargins(t=self.p_row + self.p_col, p_ii=self.p_diag)

    def transposed(self) -> ContingencyTable:
        """Swap the raters (use when the gold standard sits in the columns)."""
        return ContingencyTable(self.cells.T)

    def scaled(self, factor: float) -> ContingencyTable:
        return ContingencyTable(self.cells * factor)


@dataclass(frozen=True)
class CategoryMargins:
    """Per-category ``t_i = p_i. + p_.i`` and diagonal probabilities."""

    t: np.ndarray
    p_ii: np.ndarray


@dataclass(frozen=True)
class PopulationParams:
    """True parameters ``alpha``, ``pi1``, ``pi2`` of the delta model."""

    alpha: np.ndarray
    pi1: np.ndarray
    pi2: np.ndarray

    def __post_init__(self):
        alpha, pi1, pi2 = (np.array(v, dtype=float) for v in (self.alpha, self.pi1, self.pi2))
        if not (alpha.ndim == pi1.ndim == pi2.ndim == 1) or not (len(alpha) == len(pi1) == len(pi2)):
            raise InvalidParamsError("alpha, pi1 and pi2 must be vectors of equal length")
        if len(alpha) < 2:
            raise InvalidParamsError("at least 2 categories are required")
        for name, pi in (("pi1", pi1), ("pi2", pi2)):
            if np.any(pi < -USER_TOL) or np.any(pi > 1 + USER_TOL):
                raise InvalidParamsError(f"{name} entries must lie in [0, 1]")
            if abs(pi.sum() - 1.0) > USER_TOL:
                raise InvalidParamsError(f"{name} must sum to 1 (sums to {pi.sum():.12g})")
        if np.any(alpha < -USER_TOL):
            raise InvalidParamsError("alpha entries must be non-negative")
        if alpha.sum() > 1 + USER_TOL:
            raise InvalidParamsError(f"Delta = sum(alpha) = {alpha.sum():.12g} exceeds 1")
        object.__setattr__(self, "alpha", _frozen(alpha))
        object.__setattr__(self, "pi1", _frozen(pi1))
        object.__setattr__(self, "pi2", _frozen(pi2))

    @property
    def K(self) -> int:
        return len(self.alpha)

    @property
    def delta(self) -> float:
        return float(self.alpha.sum())

    @property
    def B(self) -> float:
        return 1.0 - self.delta


def build_joint_probabilities(params: PopulationParams) -> np.ndarray:
    """Cell probabilities ``p_ij`` implied by ``params``."""
    p = params.B * np.outer(params.pi1, params.pi2)
    p[np.diag_indices(params.K)] += params.alpha
    bad = np.argwhere(p < -INTERNAL_TOL)
    if bad.size:
        i, j = bad[0]
        raise InvalidParamsError(f"implied probability p[{i + 1},{j + 1}] = {p[i, j]:.6g} is negative")
    return np.clip(p, 0.0, None)


def observed_agreement_index(table: ContingencyTable) -> float:
    return float(table.p_diag.sum())


def consistency(alpha_i, t_i):
    """``S_i = 2 alpha_i / t_i``; NaN where the category is unused (``t_i = 0``)."""
    alpha_i = np.asarray(alpha_i, dtype=float)
    t_i = np.asarray(t_i, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(t_i > 0, 2.0 * alpha_i / np.where(t_i > 0, t_i, 1.0), np.nan)
    return s if s.ndim else float(s)


@dataclass(frozen=True)
class PopulationTruths:
    delta: float
    consistency: np.ndarray
    t: np.ndarray
    p_ii: np.ndarray


def population_truths(params: PopulationParams) -> PopulationTruths:
    t = 2.0 * params.alpha + params.B * (params.pi1 + params.pi2)
    p_ii = params.alpha + params.B * params.pi1 * params.pi2
    return PopulationTruths(
        delta=params.delta,
        consistency=_frozen(consistency(params.alpha, t)),
        t=_frozen(t),
        p_ii=_frozen(p_ii),
    )
