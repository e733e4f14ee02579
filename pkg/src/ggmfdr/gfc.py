"""FDR-controlling edge selection on studentized pair statistics.

Rejection rule: reject pair (i, j) when |T-hat_ij| >= t-hat, where t-hat is
the smallest t in [0, 2 sqrt(log p)] with

    G(t) * q / max(R(t), 1) <= alpha,   q = (p^2 - p) / 2,

R(t) the number of pairs with |T-hat| >= t and G the two-sided normal tail.
If no such t exists the cap 2 sqrt(log p) is used.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import (ConvergenceError, DegenerateResidualError, GgmError, InfeasibleError,
                     ParameterError, SolverError)
from .mathcore import gaussian_quantile, survival_double_inverse
from .solvers import assemble, fit_all_nodes, make_path, node_problems
from .teststat import studentize

log = logging.getLogger(__name__)

TAU_LEVELS = tuple(range(3, 10))  # k/20 for k = 3..9 spans alpha in [0.15, 0.45]


@dataclass(frozen=True)
class GfcSelection:
    alpha: float
    t_hat: float
    edges: tuple            # sorted 0-based (i, j), i < j
    statistics: tuple       # T-hat value of each rejected pair
    fallback_used: bool
    p: int
    n: int

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "t_hat": self.t_hat,
            "fallback_used": self.fallback_used,
            "edges": [[i + 1, j + 1, s] for (i, j), s in zip(self.edges, self.statistics)],
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


@dataclass(frozen=True)
class EvaluationReport:
    fdp: float
    power: float
    true_positives: int
    false_positives: int
    q0: int
    q1: int

    @property
    def degenerate(self):
        """True when the truth has no edges, so power is reported as 0."""
        return self.q1 == 0


@dataclass(frozen=True, eq=False)
class TuningResult:
    delta_hat: float
    j_hat: int
    N: int
    losses: np.ndarray
    failures: dict = field(default_factory=dict)   # grid index -> reason
    stats: object = field(default=None, repr=False)  # TestStatistics at j_hat


def threshold_cap(p):
    return 2.0 * np.sqrt(np.log(p))


def gfc_threshold(stats, alpha):
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    p = stats.p
    if p < 2:
        raise ParameterError("need p >= 2")
    q = p * (p - 1) / 2.0
    cap = threshold_cap(p)
    iu, ju = np.triu_indices(p, k=1)
    values = stats.t_hat[iu, ju]
    mags = np.abs(values)

    # R(t) is constant on (v[k+1], v[k]] for distinct magnitudes v descending
    distinct, counts = np.unique(mags, return_counts=True)
    distinct, counts = distinct[::-1], counts[::-1]
    hi = np.concatenate([[np.inf], distinct])
    lo = np.concatenate([distinct, [0.0]])
    rej = np.concatenate([[0], np.cumsum(counts)])
    hi = np.minimum(hi, cap)
    need = survival_double_inverse(alpha * np.maximum(rej, 1) / q)
    cand = np.maximum(need, lo)
    ok = cand <= hi
    if np.any(ok):
        t_hat, fallback = float(cand[ok].min()), False
    else:
        t_hat, fallback = float(cap), True

    keep = mags >= t_hat
    edges = tuple(zip(iu[keep].tolist(), ju[keep].tolist()))
    return GfcSelection(float(alpha), t_hat, edges, tuple(values[keep].tolist()),
                        fallback, p, stats.n)


def evaluate(selection, truth):
    if truth.p != selection.p:
        raise ParameterError(f"dimension mismatch: selection p={selection.p}, truth p={truth.p}")
    true_edges = truth.edges
    tp = sum(1 for e in selection.edges if e in true_edges)
    fp = len(selection.edges) - tp
    q1 = len(true_edges)
    q0 = truth.p * (truth.p - 1) // 2 - q1
    fdp = fp / max(len(selection.edges), 1)
    power = tp / q1 if q1 else 0.0
    return EvaluationReport(fdp, power, tp, fp, q0, q1)


def tuning_loss(stats):
    """Squared mismatch between exceedance counts and their N(0,1) expectation."""
    p = stats.p
    mags = np.sort(np.abs(stats.upper()))
    loss = 0.0
    for k in TAU_LEVELS:
        cut = gaussian_quantile(1.0 - k / 20.0)
        # ordered pairs i != j: each unordered pair counted twice
        count = 2 * (mags.size - np.searchsorted(mags, cut, side="left"))
        loss += (count / (k * (p * p - p) / 10.0) - 1.0) ** 2
    return float(loss)


def tune_delta(x, solver="lasso", N=20):
    """Pick delta = j/N, 0 <= j <= 2N, minimising the exceedance-count loss.

    Grid points are visited from the largest delta down so each node's
    solver can warm start. A grid point at which some node fails to give a
    usable fit (non-convergence, infeasibility or zero residuals, typical
    for delta -> 0 when p >= n) is marked inadmissible with infinite loss.
    """
    if N < 1:
        raise ParameterError(f"N must be >= 1, got {N}")
    centered, problems = node_problems(x)
    paths = [make_path(pr, solver) for pr in problems]
    losses = np.full(2 * N + 1, np.inf)
    failures = {}
    best = None
    for j in range(2 * N, -1, -1):
        delta = j / N
        try:
            betas = []
            for i, path in enumerate(paths):
                try:
                    betas.append(path.solve(delta))
                except (ConvergenceError, InfeasibleError) as exc:
                    raise SolverError(exc, node=i, grid_index=j) from exc
            stats = studentize(assemble(centered, problems, betas, delta, solver))
        except (SolverError, DegenerateResidualError) as exc:
            failures[j] = str(exc)
            log.info("tuning grid point %d skipped: %s", j, exc)
            continue
        losses[j] = tuning_loss(stats)
        if best is None or losses[j] <= losses[best[0]]:
            best = (j, stats)
    if best is None:
        raise GgmError(f"every tuning grid point failed; first: {failures.get(0)}")
    j_hat = int(np.argmin(losses))  # first minimiser = smallest j
    stats = best[1] if best[0] == j_hat else None
    return TuningResult(j_hat / N, j_hat, N, losses, failures, stats)


@dataclass(frozen=True, eq=False)
class GfcResult:
    selection: GfcSelection
    stats: object
    tuning: TuningResult | None


def compute_statistics(x, solver="lasso", delta=None, N=20):
    """Test statistics at a fixed delta, or at the tuned one when delta is None."""
    if delta is None:
        tuning = tune_delta(x, solver, N)
        stats = tuning.stats
        if stats is None:
            stats = studentize(fit_all_nodes(x, solver, tuning.delta_hat))
        return stats, tuning
    return studentize(fit_all_nodes(x, solver, delta)), None


def run_gfc(x, solver="lasso", alpha=0.1, delta=None, N=20):
    stats, tuning = compute_statistics(x, solver, delta, N)
    return GfcResult(gfc_threshold(stats, alpha), stats, tuning)
