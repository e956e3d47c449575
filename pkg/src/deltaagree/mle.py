"""Maximum-likelihood fit of the delta model.

With ``d_s1 = p_s. - p_ss`` and ``d_s2 = p_.s - p_ss`` the observed
disagreements of each rater in category ``s``, the likelihood equations are::

    B * lambda_s = (lambda_s + d_s1) * (lambda_s + d_s2)     s = 1..K
    sum(lambda_s) - B + sum(d_s1) = 0

with ``lambda_s = 0`` whenever ``d_s1 = 0`` or ``d_s2 = 0``.  Each per-category
equation is a quadratic in ``lambda_s`` for fixed ``B``.  The smaller root
gives ``pi_s1 + pi_s2 < 1`` and the larger one ``pi_s1 + pi_s2 > 1``; since
the ``pi`` sum to one per rater, at most one category can take the larger
root.  The solver therefore follows every branch of the equations, locates
each root of the outer equation, and keeps the candidate with the highest
log-likelihood.

When all observed disagreements involve a single category ``k``
(``d_k1 + d_k2`` equals the total disagreement) the likelihood increases
without bound as ``B`` grows and no finite estimate exists.  This is the
same lack of identification as in a 2x2 table, and it is handled the same
way: 0.5 is added to every cell and the augmented table is fitted instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
import logging

import numpy as np
from scipy.optimize import brentq

from .core import ContingencyTable, SolverError, _frozen

log = logging.getLogger(__name__)

SCAN_POINTS = 512
TAIL_POINTS = 128
MAX_ITER = 200


class InfeasibleBError(ValueError):
    """``B`` is too small for the per-category quadratic to have a root >= 0."""


@dataclass(frozen=True)
class Disagreements:
    d1: np.ndarray
    d2: np.ndarray

    @property
    def total(self) -> float:
        return float(self.d1.sum())

    @property
    def zero(self) -> np.ndarray:
        return (self.d1 <= 0) | (self.d2 <= 0)


def observed_disagreements(table: ContingencyTable) -> Disagreements:
    pd = table.p_diag
    d1 = np.clip(table.p_row - pd, 0.0, None)
    d2 = np.clip(table.p_col - pd, 0.0, None)
    return Disagreements(_frozen(d1), _frozen(d2))


def lambda_for_B(B: float, d1_s: float, d2_s: float, larger: bool = False) -> float:
    """Root of ``lambda^2 + lambda (d1 + d2 - B) + d1 d2 = 0``.

    Returns the smaller root unless ``larger`` is set, and 0 when either
    disagreement is 0.
    """
    if d1_s <= 0 or d2_s <= 0:
        return 0.0
    b = B - d1_s - d2_s
    disc = b * b - 4.0 * d1_s * d2_s
    if b < 0 or disc < -1e-15:
        raise InfeasibleBError(f"no non-negative root for B={B!r}, d=({d1_s!r}, {d2_s!r})")
    root = np.sqrt(max(disc, 0.0))
    if larger:
        return 0.5 * (b + root)
    return 2.0 * d1_s * d2_s / (b + root) if b + root > 0 else 0.0


def _lambdas(B, d1, d2, large: int | None):
    """Vectorised ``lambda_s(B)``: ``B`` of shape (m,), result (m, K)."""
    B = np.asarray(B, dtype=float)[..., None]
    b = B - d1 - d2
    disc = np.clip(b * b - 4.0 * d1 * d2, 0.0, None)
    root = np.sqrt(disc)
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = np.where(b + root > 0, 2.0 * d1 * d2 / (b + root), 0.0)
        if large is not None:
            lam[..., large] = 0.5 * (b[..., large] + root[..., large])
    lam = np.where((d1 > 0) & (d2 > 0), lam, 0.0)
    return lam


def feasible_lower_bound(d: Disagreements) -> float:
    """Smallest ``B`` at which every per-category quadratic has real roots."""
    return float(np.max((np.sqrt(d.d1) + np.sqrt(d.d2)) ** 2))


def outer_equation(B, d: Disagreements, large: int | None = None):
    """``g(B) = sum(lambda_s(B)) - B + sum(d_s1)``."""
    lam = _lambdas(B, d.d1, d.d2, large)
    return lam.sum(axis=-1) - np.asarray(B, dtype=float) + d.total


def scan_grid(d: Disagreements) -> np.ndarray:
    lo = feasible_lower_bound(d)
    top = max(2.0 * d.total, 1.0, 1.5 * lo)
    head = np.linspace(lo, top, SCAN_POINTS)
    tail = np.geomspace(top, top * 1e4, TAIL_POINTS)[1:]
    return np.concatenate([head, tail])


def fitted_cells(alpha, B, pi1, pi2) -> np.ndarray:
    p = B * np.outer(pi1, pi2)
    p[np.diag_indices(len(alpha))] += alpha
    return p


def log_likelihood(table: ContingencyTable, p: np.ndarray) -> float:
    """Multinomial log-likelihood kernel ``sum x_ij log p_ij`` (0 log 0 = 0)."""
    x = table.cells
    mask = x > 0
    with np.errstate(divide="ignore"):
        return float(np.sum(x[mask] * np.log(np.clip(p[mask], 0.0, None))))


@dataclass(frozen=True)
class MleFit:
    """Fitted delta model.

    ``pi1``/``pi2`` are NaN for a boundary fit (no disagreements, ``B = 0``),
    where the random-response distributions are not identified.
    """

    table: ContingencyTable
    B: float
    lam: np.ndarray
    delta: float
    alpha: np.ndarray
    pi1: np.ndarray
    pi2: np.ndarray
    residual: float
    degenerate: np.ndarray
    boundary: bool
    loglik: float
    large_root: int | None = None
    candidates: int = 1
    notes: tuple[str, ...] = field(default=())
    source: ContingencyTable | None = None  # original table when ``table`` is augmented

    @property
    def augmented(self) -> bool:
        return self.source is not None

    @property
    def K(self) -> int:
        return self.table.K

    @property
    def n(self) -> float:
        return self.table.n

    def cells(self) -> np.ndarray:
        if self.boundary:
            return np.diag(self.alpha)
        return fitted_cells(self.alpha, self.B, self.pi1, self.pi2)


def _residual(B, lam, d: Disagreements) -> float:
    per_cat = B * lam - (lam + d.d1) * (lam + d.d2)
    outer = lam.sum() - B + d.total
    return float(max(np.max(np.abs(per_cat)), abs(outer)))


def _build(table, d, B, lam, large, candidates=0, notes=()) -> MleFit:
    pi1 = (lam + d.d1) / B
    pi2 = (lam + d.d2) / B
    alpha = table.p_diag - lam
    p = fitted_cells(alpha, B, pi1, pi2)
    return MleFit(
        table=table,
        B=float(B),
        lam=_frozen(lam),
        delta=1.0 - float(B),
        alpha=_frozen(alpha),
        pi1=_frozen(pi1),
        pi2=_frozen(pi2),
        residual=_residual(B, lam, d),
        degenerate=_frozen(d.zero).astype(bool),
        boundary=False,
        loglik=log_likelihood(table, p),
        large_root=large,
        candidates=candidates,
        notes=tuple(notes),
    )


def _boundary_fit(table: ContingencyTable, d: Disagreements) -> MleFit:
    K = table.K
    nan = np.full(K, np.nan)
    return MleFit(
        table=table,
        B=0.0,
        lam=_frozen(np.zeros(K)),
        delta=1.0,
        alpha=_frozen(table.p_diag),
        pi1=_frozen(nan),
        pi2=_frozen(nan),
        residual=0.0,
        degenerate=np.ones(K, dtype=bool),
        boundary=True,
        loglik=log_likelihood(table, np.diag(table.p_diag)),
        notes=("no observed disagreements: perfect agreement, pi not identified",),
    )


class _Curve:
    """One smooth branch of the likelihood equations.

    With ``pivot`` set, the curve is parametrised by ``lambda`` of the pivot
    category, ``B = (lambda + d1)(lambda + d2) / lambda``, which passes
    through the branch point of that category's quadratic without a kink in
    the parameter.  Otherwise it is parametrised by ``B`` directly.
    """

    def __init__(self, d: Disagreements, large: int | None = None, pivot: int | None = None):
        self.d, self.large, self.pivot = d, large, pivot

    def grid(self) -> np.ndarray:
        if self.pivot is None:
            return scan_grid(self.d)
        c = np.sqrt(self.d.d1[self.pivot] * self.d.d2[self.pivot])
        return c * np.geomspace(1e-5, 1e5, SCAN_POINTS * 2)

    def state(self, t):
        """``(B, lambda)`` at parameter values ``t``."""
        t = np.asarray(t, dtype=float)
        if self.pivot is None:
            return t, _lambdas(t, self.d.d1, self.d.d2, self.large)
        k = self.pivot
        B = (t + self.d.d1[k]) * (t + self.d.d2[k]) / t
        lam = _lambdas(B, self.d.d1, self.d.d2, None)
        lam[..., k] = t
        return B, lam

    def g(self, t):
        B, lam = self.state(t)
        return lam.sum(axis=-1) - B + self.d.total

    def roots(self) -> list[float]:
        grid = self.grid()
        g = self.g(grid)
        roots = [float(t) for t in grid[g == 0.0]]
        for k in np.flatnonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0):
            f = lambda t: float(self.g(np.array([t]))[0])  # noqa: E731
            roots.append(brentq(f, grid[k], grid[k + 1], xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=MAX_ITER))
        return roots

    def label(self, t) -> int | None:
        """Category on the larger root at parameter ``t``, if any."""
        if self.pivot is None:
            return self.large
        k = self.pivot
        return k if t > np.sqrt(self.d.d1[k] * self.d.d2[k]) else None


def _curves(d: Disagreements) -> list[_Curve]:
    bounds = (np.sqrt(d.d1) + np.sqrt(d.d2)) ** 2
    crit = int(np.argmax(bounds))
    open_cats = [int(k) for k in np.flatnonzero(~d.zero)]
    if crit in open_cats:
        curves = [_Curve(d, pivot=crit)]
        others = [k for k in open_cats if k != crit]
    else:
        curves = [_Curve(d)]
        others = open_cats
    return curves + [_Curve(d, large=k) for k in others]


def unbounded_category(d: Disagreements) -> int | None:
    """Category involved in every observed disagreement, if there is one."""
    if d.total <= 0:
        return None
    involved = d.d1 + d.d2
    k = int(np.argmax(involved))
    return k if involved[k] >= d.total * (1.0 - 1e-12) else None


def fit_delta_mle(table: ContingencyTable, augment_unbounded: bool = True) -> MleFit:
    """Maximum-likelihood estimates of ``B``, ``alpha``, ``pi1``, ``pi2``.

    If the table has no finite estimate (see module docstring) the fit is
    made on ``table + 0.5`` and ``source`` holds the original table; with
    ``augment_unbounded=False`` a :class:`SolverError` is raised instead.
    For ``K = 2`` use :func:`deltaagree.special.fit_2x2`.
    """
    if table.K < 3:
        raise ValueError("the delta model is not identified for K = 2; use fit_2x2")
    d = observed_disagreements(table)
    if d.total <= 0:
        return _boundary_fit(table, d)
    k = unbounded_category(d)
    if k is not None:
        msg = f"every disagreement involves category {k + 1}: likelihood has no finite maximum"
        if not augment_unbounded:
            raise SolverError(msg)
        fit = fit_delta_mle(ContingencyTable(table.cells + 0.5), augment_unbounded=False)
        return replace(fit, source=table, notes=fit.notes + (msg + "; fitted table + 0.5",))

    trace = []
    best = None
    count = 0
    for curve in _curves(d):
        roots = curve.roots()
        trace.append(f"curve large={curve.large} pivot={curve.pivot}: roots={roots}")
        for t in roots:
            B, lam = curve.state(np.array([t]))
            fit = _build(table, d, float(B[0]), lam[0], curve.label(t))
            if np.any(fit.pi1 < -1e-12) or np.any(fit.pi2 < -1e-12) or not np.isfinite(fit.loglik):
                trace.append(f"  rejected B={B!r}")
                continue
            count += 1
            if best is None or fit.loglik > best.loglik:
                best = fit
    if best is None:
        raise SolverError("no feasible root of the delta-model likelihood equations", trace)

    notes = []
    both_zero = (d.d1 <= 0) & (d.d2 <= 0)
    if np.any(both_zero):
        cats = ", ".join(str(k + 1) for k in np.flatnonzero(both_zero))
        notes.append(f"categories {cats} have no disagreements: pi set to 0 there")
    if best.residual > 1e-10:
        log.warning("delta MLE residual %.3g exceeds 1e-10", best.residual)
    return replace(best, candidates=count, notes=tuple(notes))
