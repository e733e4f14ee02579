"""Dense tableau simplex methods for  min c'x  s.t.  A x <= b,  x >= 0.

Two engines:

* :func:`two_phase_simplex` -- textbook two-phase primal simplex with
  Bland's rule, used for cold solves.
* :class:`DualSimplexPath` -- keeps an optimal basis alive while the
  right-hand side changes and restores primal feasibility with dual simplex
  pivots (again Bland's rule). Requires c >= 0 so that the slack basis is
  dual feasible to begin with.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._cd import dual_simplex_loop
from .errors import ConvergenceError, InfeasibleError, NumericError

MAX_PIVOTS = 50_000
_PIVOT_TOL = 1e-9
_COST_TOL = 1e-10


@dataclass
class LPResult:
    x: np.ndarray
    objective: float
    basis: np.ndarray
    pivots: int


def _pivot(tab, row, col):
    tab[row] /= tab[row, col]
    colv = tab[:, col].copy()
    colv[row] = 0.0
    tab -= np.outer(colv, tab[row])


def _primal_iterate(tab, basis, ncols, allowed, pivots):
    """Bland's-rule primal simplex on ``tab`` whose last row is the cost row.

    Only columns flagged in ``allowed`` may enter.
    """
    m = tab.shape[0] - 1
    while True:
        cost = tab[-1, :ncols]
        candidates = np.flatnonzero((cost < -_COST_TOL) & allowed)
        if candidates.size == 0:
            return pivots
        col = candidates[0]
        colv = tab[:m, col]
        pos = colv > _PIVOT_TOL
        if not np.any(pos):
            raise NumericError("linear program is unbounded")
        ratios = np.full(m, np.inf)
        ratios[pos] = tab[:m, -1][pos] / colv[pos]
        best = ratios.min()
        tied = np.flatnonzero(ratios <= best + 1e-12 * max(1.0, abs(best)))
        row = tied[np.argmin(basis[tied])]
        _pivot(tab, row, col)
        basis[row] = col
        pivots += 1
        if pivots > MAX_PIVOTS:
            raise ConvergenceError(f"simplex exceeded {MAX_PIVOTS} pivots")


def two_phase_simplex(c, a_ub, b_ub):
    """Solve  min c'x  s.t.  a_ub x <= b_ub,  x >= 0."""
    c = np.asarray(c, dtype=float)
    a = np.asarray(a_ub, dtype=float)
    b = np.asarray(b_ub, dtype=float)
    m, n = a.shape
    flip = b < 0
    sign = np.where(flip, -1.0, 1.0)
    n_art = int(flip.sum())
    ncols = n + m + n_art
    tab = np.zeros((m + 1, ncols + 1))
    tab[:m, :n] = a * sign[:, None]
    tab[:m, n:n + m] = np.diag(sign)
    tab[:m, -1] = b * sign
    art_rows = np.flatnonzero(flip)
    basis = np.arange(n, n + m)
    for k, r in enumerate(art_rows):
        tab[r, n + m + k] = 1.0
        basis[r] = n + m + k

    pivots = 0
    if n_art:
        # phase 1: minimise the sum of artificials
        tab[-1, :] = 0.0
        tab[-1, n + m:ncols] = 1.0
        for r in art_rows:
            tab[-1] -= tab[r]
        pivots = _primal_iterate(tab, basis, ncols, np.ones(ncols, dtype=bool), pivots)
        if -tab[-1, -1] > 1e-9 * max(1.0, np.abs(b).max()):
            raise InfeasibleError("linear program is infeasible")
        # drive remaining (zero-level) artificials out of the basis
        for r in range(m):
            if basis[r] >= n + m:
                nz = np.flatnonzero(np.abs(tab[r, :n + m]) > _PIVOT_TOL)
                if nz.size:
                    _pivot(tab, r, nz[0])
                    basis[r] = nz[0]
                    pivots += 1

    allowed = np.zeros(ncols, dtype=bool)
    allowed[:n + m] = True
    tab[-1, :] = 0.0
    tab[-1, :n] = c
    for r in range(m):
        if basis[r] < n and c[basis[r]] != 0.0:
            tab[-1] -= c[basis[r]] * tab[r]
    pivots = _primal_iterate(tab, basis, ncols, allowed, pivots)

    x = np.zeros(ncols)
    x[basis] = tab[:m, -1]
    x = np.maximum(x[:n], 0.0)
    return LPResult(x, float(c @ x), basis.copy(), pivots)


class DualSimplexPath:
    """Re-solve  min c'x  s.t.  A x <= b, x >= 0  for a sequence of b.

    The tableau is B^{-1}[A I]; since the starting basis is the slack
    identity, the slack block of the tableau is B^{-1} itself, so a new b only
    costs one matrix-vector product before the dual pivots start.
    """

    refactor_every = 64

    def __init__(self, c, a_ub):
        self.c = np.asarray(c, dtype=float)
        if np.any(self.c < 0):
            raise ValueError("DualSimplexPath needs a nonnegative cost vector")
        self.a = np.asarray(a_ub, dtype=float)
        m, n = self.a.shape
        self.m, self.n = m, n
        self.full = np.hstack([self.a, np.eye(m)])
        self.cost = np.concatenate([self.c, np.zeros(m)])
        self.basis = np.arange(n, n + m)
        self.tab = self.full.copy()
        self.reduced = self.cost.copy()
        self.pivots = 0
        self._since_refactor = 0

    def _refactor(self):
        bmat = self.full[:, self.basis]
        self.tab = np.linalg.solve(bmat, self.full)
        self.reduced = self.cost - self.cost[self.basis] @ self.tab
        self.reduced[self.basis] = 0.0
        self.reduced[(self.reduced < 0.0) & (self.reduced > -1e-9)] = 0.0
        self._since_refactor = 0

    def solve(self, b, feas_tol=1e-10):
        b = np.asarray(b, dtype=float)
        scale = max(1.0, float(np.abs(b).max()))
        for attempt in range(2):
            if self._since_refactor >= self.refactor_every or attempt:
                self._refactor()
            x_b = self.tab[:, self.n:] @ b
            count, status = dual_simplex_loop(self.tab, self.reduced, self.basis, x_b,
                                              feas_tol * scale, _PIVOT_TOL, MAX_PIVOTS)
            self.pivots += count
            self._since_refactor += count
            if status == 1:
                raise InfeasibleError("linear program is infeasible")
            if status == 2:
                raise ConvergenceError(f"dual simplex exceeded {MAX_PIVOTS} pivots")
            x = np.zeros(self.n + self.m)
            x[self.basis] = x_b
            slack = b - self.a @ x[:self.n]
            if x.min() >= -1e-8 * scale and slack.min() >= -1e-8 * scale:
                xs = np.maximum(x[:self.n], 0.0)
                return LPResult(xs, float(self.c @ xs), self.basis.copy(), count)
        raise NumericError("dual simplex lost primal feasibility after refactorization")
