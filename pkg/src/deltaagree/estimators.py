"""Classic, bias-corrected (U) and alternative (AC) estimators with variances.

Most formulas go through the chance-structure quantities::

    X_i = pi_i1 pi_i2 / (pi_i1 + pi_i2 - 1),    X = sum(X_i)

``X_i`` is infinite when ``pi_i1 + pi_i2 = 1``, which several of the standard
simulation settings hit exactly.  With a single infinite ``X_k`` every
expression used here has a finite limit and :class:`ChanceQuantities`
evaluates that limit; two or more infinite entries raise
:class:`SingularError`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .core import (
    BoundaryError,
    ContingencyTable,
    INTERNAL_TOL,
    PopulationParams,
    SingularError,
    _frozen,
    build_joint_probabilities,
    consistency,
    observed_agreement_index,
    population_truths,
)
from .mle import MleFit

POLE_TOL = 1e-10

Kind = Literal["classic", "U", "AC"]


@dataclass(frozen=True)
class ChanceQuantities:
    q: np.ndarray  # pi_i1 * pi_i2
    T: np.ndarray  # pi_i1 + pi_i2 - 1
    X: np.ndarray  # +/-inf where T == 0 and q > 0, NaN where T == q == 0

    @property
    def Ipi(self) -> float:
        return float(self.q.sum())

    @property
    def infinite(self) -> np.ndarray:
        return np.isinf(self.X)

    @property
    def X_total(self) -> float:
        return float(self.X.sum())

    @property
    def finite_sum(self) -> float:
        return float(self.X[np.isfinite(self.X)].sum())

    def _pole(self) -> int | None:
        """Index of the single infinite ``X_k``, or None."""
        if np.any(np.isnan(self.X)):
            raise SingularError("X_i is 0/0 (pi_i1 + pi_i2 = 1 with pi_i1 pi_i2 = 0)")
        idx = np.flatnonzero(self.infinite)
        if len(idx) > 1:
            raise SingularError(f"{len(idx)} categories have pi_i1 + pi_i2 = 1; no limit form")
        if len(idx) == 1:
            return int(idx[0])
        if abs(self.X_total - 1.0) < POLE_TOL:
            raise SingularError(f"X = {self.X_total!r} is within {POLE_TOL} of 1")
        return None

    def ratio(self) -> float:
        """``X / (X - 1)``."""
        if self._pole() is not None:
            return 1.0
        X = self.X_total
        return X / (X - 1.0)

    def h(self) -> np.ndarray:
        """``X_i {X_i / (X - 1) - 1}``, the factor of ``H_i`` after ``1 - Delta``."""
        k = self._pole()
        if k is None:
            X = self.X_total
            return self.X * (self.X / (X - 1.0) - 1.0)
        out = -self.X.copy()
        out[k] = 1.0 - self.finite_sum
        return out

    def cross(self) -> np.ndarray:
        """``X_i (X - X_i) / (X - 1)``, the correction inside the bias term."""
        k = self._pole()
        if k is None:
            X = self.X_total
            return self.X * (X - self.X) / (X - 1.0)
        out = self.X.copy()
        out[k] = self.finite_sum
        return out

    def spread(self, m: int) -> float:
        """``(1 - X_m)(X - X_m) / (X - 1)``."""
        k = self._pole()
        if k is None:
            X = self.X_total
            return float((1.0 - self.X[m]) * (X - self.X[m]) / (X - 1.0))
        if k == m:
            return -self.finite_sum
        return float(1.0 - self.X[m])


def chance_quantities(pi1, pi2) -> ChanceQuantities:
    pi1 = np.asarray(pi1, dtype=float)
    pi2 = np.asarray(pi2, dtype=float)
    q = pi1 * pi2
    T = pi1 + pi2 - 1.0
    pole = np.abs(T) <= INTERNAL_TOL
    with np.errstate(divide="ignore", invalid="ignore"):
        X = np.where(pole, 0.0, q / np.where(pole, 1.0, T))
    X = np.where(pole & (q > 0), np.inf, X)
    X = np.where(pole & (q <= 0), np.nan, X)
    return ChanceQuantities(_frozen(q), _frozen(T), _frozen(X))


@dataclass(frozen=True)
class BiasTerms:
    Ei: np.ndarray

    @property
    def E(self) -> float:
        return float(self.Ei.sum())


def bias_terms(pi1, pi2, delta: float, n: float) -> BiasTerms:
    """``E_i = {pi_i1 pi_i2 - X_i (X - X_i)/(X - 1)} / (n (1 - Delta))``."""
    if delta >= 1.0:
        raise BoundaryError("bias term undefined at Delta = 1")
    cq = chance_quantities(pi1, pi2)
    return BiasTerms(_frozen((cq.q - cq.cross()) / (n * (1.0 - delta))))


def expected_bias(params: PopulationParams, n: float) -> BiasTerms:
    """Population bias of ``pi_i1_hat * pi_i2_hat`` at sample size ``n``."""
    return bias_terms(params.pi1, params.pi2, params.delta, n)


@dataclass(frozen=True)
class Variances:
    delta: float
    alpha: np.ndarray
    consistency: np.ndarray
    notes: tuple[str, ...] = ()


def variance_formulas(delta, alpha, S, t, p_ii, cq: ChanceQuantities, n) -> Variances:
    """Shared closed forms for the variances of Delta, alpha_i and S_i.

    Evaluated at true parameters this is the asymptotic variance; at fitted
    values it is the plug-in estimate.
    """
    alpha = np.asarray(alpha, dtype=float)
    S = np.asarray(S, dtype=float)
    t = np.asarray(t, dtype=float)
    H = (1.0 - delta) * cq.h()
    v_delta = (1.0 - delta) / n * (delta + cq.ratio())
    v_alpha = (H + alpha * (1.0 - alpha)) / n
    with np.errstate(divide="ignore", invalid="ignore"):
        v_s = (4.0 * H + S * (2.0 * t - 3.0 * t * S + 2.0 * p_ii * S)) / (n * t**2)
    v_s = np.where(t > 0, v_s, np.nan)
    notes = ()
    if v_delta < 0 or np.any(v_alpha < 0) or np.any(v_s < 0):
        notes = ("negative variance estimate",)
    return Variances(float(v_delta), _frozen(v_alpha), _frozen(v_s), notes)


def asymptotic_variances(params: PopulationParams, n: float) -> Variances:
    if params.delta >= 1.0:
        raise BoundaryError("asymptotic variances undefined at Delta = 1")
    truth = population_truths(params)
    cq = chance_quantities(params.pi1, params.pi2)
    return variance_formulas(params.delta, params.alpha, truth.consistency, truth.t, truth.p_ii, cq, n)


def pi_variance(source: MleFit | PopulationParams, s: int, r: int, n: float | None = None) -> float:
    """Variance of ``pi_hat_sr`` (``s`` is 0-based, ``r`` is 1 or 2).

    ``source`` is a fit (fitted values, ``n`` from its table) or true
    parameters (``n`` required).
    """
    if isinstance(source, MleFit):
        if source.boundary:
            raise BoundaryError("pi is not identified at Delta = 1")
        pi1, pi2, delta = source.pi1, source.pi2, source.delta
        n = source.n if n is None else n
    else:
        pi1, pi2, delta = source.pi1, source.pi2, source.delta
        if n is None:
            raise ValueError("n is required with population parameters")
    if delta >= 1.0:
        raise BoundaryError("pi variance undefined at Delta = 1")
    if r not in (1, 2):
        raise ValueError("rater must be 1 or 2")
    cq = chance_quantities(pi1, pi2)
    if not np.isfinite(cq.X[s]):
        raise SingularError(f"X_{s + 1} is infinite; variance of pi_{s + 1}{r} has no stated limit")
    if np.any(~np.isfinite(cq.X)) or abs(cq.X_total - 1.0) < POLE_TOL:
        raise SingularError("X is infinite or equal to 1")
    pi = (pi1 if r == 1 else pi2)[s]
    u = cq.X[s] - pi
    return float(u / (n * (1.0 - delta)) * (u / (cq.X_total - 1.0) - 1.0))


@dataclass(frozen=True)
class EstimateFamily:
    """One family of estimates of Delta, alpha_i and S_i plus their variances.

    ``variances`` is None when a pole in ``X`` makes them undefined; the
    reason is in ``notes``.
    """

    kind: Kind
    delta: float
    alpha: np.ndarray
    consistency: np.ndarray
    Ipi: float
    variances: Variances | None
    bias: BiasTerms | None = None
    notes: tuple[str, ...] = field(default=())


def estimated_variances(fit: MleFit, family: EstimateFamily) -> Variances:
    """Plug-in variances for ``family``.

    The chance structure always comes from the classic ``pi_hat``; the
    family contributes Delta, alpha_i and S_i.
    """
    table = fit.table
    m = table.margins()
    if fit.boundary:
        cq = ChanceQuantities(_frozen(np.zeros(fit.K)), _frozen(-np.ones(fit.K)), _frozen(np.zeros(fit.K)))
        return variance_formulas(1.0, family.alpha, family.consistency, m.t, m.p_ii, cq, table.n)
    cq = chance_quantities(fit.pi1, fit.pi2)
    return variance_formulas(family.delta, family.alpha, family.consistency, m.t, m.p_ii, cq, table.n)


def _with_variances(fit: MleFit, family: EstimateFamily) -> EstimateFamily:
    try:
        v = estimated_variances(fit, family)
    except SingularError as exc:
        return EstimateFamily(**{**family.__dict__, "notes": family.notes + (f"variances singular: {exc}",)})
    return EstimateFamily(**{**family.__dict__, "variances": v, "notes": family.notes + v.notes})


def classic_estimates(fit: MleFit) -> EstimateFamily:
    table = fit.table
    t = table.margins().t
    if fit.boundary:
        alpha = table.p_diag
        fam = EstimateFamily("classic", 1.0, _frozen(alpha), _frozen(consistency(alpha, t)), 0.0, None)
        return _with_variances(fit, fam)
    Io = observed_agreement_index(table)
    q = fit.pi1 * fit.pi2
    Ipi = float(q.sum())
    if abs(1.0 - Ipi) < INTERNAL_TOL:
        raise SingularError("I_pi = 1: chance index leaves no room for agreement")
    delta = (Io - Ipi) / (1.0 - Ipi)
    alpha = table.p_diag - (1.0 - delta) * q
    fam = EstimateFamily("classic", float(delta), _frozen(alpha), _frozen(consistency(alpha, t)), Ipi, None)
    return _with_variances(fit, fam)


def unbiased_estimates(fit: MleFit) -> EstimateFamily:
    """Estimates built on the approximately unbiased ``pi_i1 pi_i2``.

    On a boundary fit there is no chance mass to correct: the bias terms are
    zero and the values coincide with the classic family.
    """
    table = fit.table
    t = table.margins().t
    if fit.boundary:
        base = classic_estimates(fit)
        return EstimateFamily(
            **{**base.__dict__, "kind": "U", "bias": BiasTerms(_frozen(np.zeros(fit.K))),
               "notes": base.notes + ("boundary fit: bias terms set to 0",)}
        )
    Io = observed_agreement_index(table)
    bias = bias_terms(fit.pi1, fit.pi2, fit.delta, table.n)
    q = fit.pi1 * fit.pi2
    Ipi_u = float(q.sum()) - bias.E
    delta = (Io - Ipi_u) / (1.0 - Ipi_u)
    alpha = table.p_diag - (1.0 - delta) * (q - bias.Ei)
    fam = EstimateFamily("U", float(delta), _frozen(alpha), _frozen(consistency(alpha, t)), Ipi_u, None, bias)
    return _with_variances(fit, fam)


def ac_estimates(fit: MleFit) -> EstimateFamily:
    """Alternative correction dividing by ``C = 1 + 1/(n (1 - Delta))``."""
    table = fit.table
    if fit.boundary:
        base = classic_estimates(fit)
        return EstimateFamily(**{**base.__dict__, "kind": "AC", "notes": base.notes + ("boundary fit: no correction",)})
    t = table.margins().t
    Io = observed_agreement_index(table)
    nB = table.n * (1.0 - fit.delta)
    cq = chance_quantities(fit.pi1, fit.pi2)
    A = cq.cross() / nB
    C = 1.0 + 1.0 / nB
    corrected = (cq.q + A) / C
    Ipi_ac = float(corrected.sum())
    delta = (Io - Ipi_ac) / (1.0 - Ipi_ac)
    alpha = table.p_diag - (1.0 - delta) * corrected
    fam = EstimateFamily("AC", float(delta), _frozen(alpha), _frozen(consistency(alpha, t)), Ipi_ac, None)
    return _with_variances(fit, fam)


def estimate(fit: MleFit, kind: str) -> EstimateFamily:
    key = kind.lower()
    if key == "classic":
        return classic_estimates(fit)
    if key == "u":
        return unbiased_estimates(fit)
    if key == "ac":
        return ac_estimates(fit)
    raise ValueError(f"unknown estimator family {kind!r}")
