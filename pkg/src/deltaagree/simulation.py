"""Monte Carlo assessment of the classic and U estimators.

Each replicate draws a multinomial table from the delta model, fits it, and
records the classic and U estimates of Delta, alpha_3 and S_3 together with
their plug-in variances.  Replicate ``i`` always uses the random stream
spawned at index ``i`` of the root seed, so results do not depend on the
number of workers.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .core import ContingencyTable, DeltaModelError, PopulationParams, build_joint_probabilities, population_truths
from .estimators import asymptotic_variances, classic_estimates, unbiased_estimates
from .mle import fit_delta_mle
from .settings import SimulationSetting

DEFAULT_REPLICATES = 10_000
TARGETS = ("delta", "alpha3", "s3")

# classic, U, V_hat classic, V_hat U for each target, in that order
_COLS = {"delta": slice(0, 4), "alpha3": slice(4, 8), "s3": slice(8, 12)}

# Stable output columns per target
COLUMNS = {
    "delta": ["id", "K", "n", "Delta", "mean", "mean_U", "V_A", "V_E", "mean_Vhat", "V_E_U", "mean_Vhat_U"],
    "alpha3": ["id", "K", "n", "alpha3", "mean", "mean_U", "V_A", "V_E", "V_E_U", "mean_Vhat", "mean_Vhat_U"],
    "s3": ["id", "K", "n", "S3", "mean", "mean_U", "V_A", "V_E", "V_E_U", "mean_Vhat", "mean_Vhat_U"],
}


def replicate_rng(seed: int, index: int) -> np.random.Generator:
    """Counter-based stream for replicate ``index`` (identical to ``SeedSequence(seed).spawn(...)[index]``)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def sample_table(params: PopulationParams, n: int, rng: np.random.Generator) -> ContingencyTable:
    if n < 1:
        raise ValueError("n must be at least 1")
    p = build_joint_probabilities(params)
    counts = rng.multinomial(n, p.ravel() / p.sum())
    return ContingencyTable(counts.reshape(p.shape))


# status codes per replicate
OK, SOLVER_FAILED, BOUNDARY = 0, 1, 2


def _replicate(params: PopulationParams, n: int, seed: int, index: int):
    row = np.full(12, np.nan)
    table = sample_table(params, n, replicate_rng(seed, index))
    try:
        fit = fit_delta_mle(table)
    except DeltaModelError:
        return row, SOLVER_FAILED
    if fit.boundary:
        return row, BOUNDARY
    try:
        c = classic_estimates(fit)
        u = unbiased_estimates(fit)
    except DeltaModelError:
        return row, SOLVER_FAILED
    row[0], row[1] = c.delta, u.delta
    row[4], row[5] = c.alpha[2], u.alpha[2]
    row[8], row[9] = c.consistency[2], u.consistency[2]
    if c.variances is not None:
        row[2], row[6], row[10] = c.variances.delta, c.variances.alpha[2], c.variances.consistency[2]
    if u.variances is not None:
        row[3], row[7], row[11] = u.variances.delta, u.variances.alpha[2], u.variances.consistency[2]
    return row, OK


def _run_chunk(args):
    params, n, seed, start, stop = args
    rows = np.empty((stop - start, 12))
    status = np.empty(stop - start, dtype=int)
    for k, i in enumerate(range(start, stop)):
        rows[k], status[k] = _replicate(params, n, seed, i)
    return start, rows, status


def simulate_replicates(params: PopulationParams, n: int, N: int, seed: int, workers: int = 1):
    """Raw per-replicate matrix (N x 12) and status codes, in replicate order."""
    chunk = max(1, -(-N // max(1, workers * 4)))
    jobs = [(params, n, seed, s, min(N, s + chunk)) for s in range(0, N, chunk)]
    rows = np.empty((N, 12))
    status = np.empty(N, dtype=int)
    if workers <= 1:
        results = map(_run_chunk, jobs)
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        results = pool.map(_run_chunk, jobs)
    for start, r, s in results:
        rows[start:start + len(r)] = r
        status[start:start + len(s)] = s
    if workers > 1:
        pool.shutdown()
    return rows, status


@dataclass(frozen=True)
class SimulationSummary:
    setting_id: int
    K: int
    n: int
    target: str
    truth: float
    mean: float
    mean_U: float
    V_A: float
    V_E: float
    V_E_U: float
    mean_Vhat: float
    mean_Vhat_U: float
    N: int
    used: int
    seed: int
    solver_failures: int
    boundary_fits: int
    undefined: int

    def row(self) -> dict:
        """Output row with the column names of :data:`COLUMNS` plus bookkeeping."""
        d = asdict(self)
        values = {
            "id": self.setting_id, "K": self.K, "n": self.n,
            {"delta": "Delta", "alpha3": "alpha3", "s3": "S3"}[self.target]: self.truth,
            "mean": self.mean, "mean_U": self.mean_U, "V_A": self.V_A, "V_E": self.V_E,
            "V_E_U": self.V_E_U, "mean_Vhat": self.mean_Vhat, "mean_Vhat_U": self.mean_Vhat_U,
        }
        out = {c: values[c] for c in COLUMNS[self.target]}
        for key in ("N", "used", "seed", "solver_failures", "boundary_fits", "undefined"):
            out[key] = d[key]
        return out


def summarize(setting: SimulationSetting, rows, status, seed: int) -> list[SimulationSummary]:
    params = setting.params
    truth = population_truths(params)
    va = asymptotic_variances(params, setting.n)
    truths = {
        "delta": (truth.delta, va.delta),
        "alpha3": (float(params.alpha[2]), float(va.alpha[2])),
        "s3": (float(truth.consistency[2]), float(va.consistency[2])),
    }
    out = []
    ok = status == OK
    for target in TARGETS:
        block = rows[:, _COLS[target]]
        keep = ok & np.all(np.isfinite(block), axis=1)
        b = block[keep]
        used = int(keep.sum())
        if used >= 2:
            means = b.mean(axis=0)
            ve = b[:, :2].var(axis=0, ddof=1)
        else:
            means = np.full(4, np.nan)
            ve = np.full(2, np.nan)
        t, v_a = truths[target]
        out.append(SimulationSummary(
            setting_id=setting.id, K=setting.K, n=setting.n, target=target, truth=t,
            mean=float(means[0]), mean_U=float(means[1]), V_A=v_a,
            V_E=float(ve[0]), V_E_U=float(ve[1]),
            mean_Vhat=float(means[2]), mean_Vhat_U=float(means[3]),
            N=len(status), used=used, seed=seed,
            solver_failures=int(np.sum(status == SOLVER_FAILED)),
            boundary_fits=int(np.sum(status == BOUNDARY)),
            undefined=int(np.sum(ok & ~keep)),
        ))
    return out


def run_setting(setting: SimulationSetting, N: int = DEFAULT_REPLICATES, seed: int = 0, workers: int = 1):
    """One summary per target (Delta, alpha_3, S_3).

    Replicates whose fit fails, hits the boundary, or yields a non-finite
    value for a target are left out of that target's averages and counted.
    """
    if N < 2:
        raise ValueError("need at least 2 replicates")
    rows, status = simulate_replicates(setting.params, setting.n, N, seed, workers)
    return summarize(setting, rows, status, seed)
