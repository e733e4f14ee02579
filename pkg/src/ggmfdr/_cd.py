"""Compiled coordinate-descent kernel for the Gram-form lasso."""
import numba
import numpy as np


@numba.njit(cache=True)
def kkt_violation(gram, cross, coef, lam):
    m = coef.size
    worst = 0.0
    for l in range(m):
        g = -cross[l]
        for k in range(m):
            g += gram[l, k] * coef[k]
        if coef[l] > 0.0:
            v = abs(g + lam)
        elif coef[l] < 0.0:
            v = abs(g - lam)
        else:
            v = abs(g) - lam
        if v > worst:
            worst = v
    return worst


@numba.njit(cache=True)
def cd_lasso(gram, cross, lam, coef, tol, kkt_tol, max_sweeps):
    """Cyclic coordinate descent on 0.5 a'Ga - c'a + lam |a|_1, in place.

    ``grad`` tracks G a - c incrementally. Stops when a full sweep moves no
    coordinate by tol or more and the KKT certificate holds to kkt_tol.
    Returns (sweeps, kkt violation).
    """
    m = coef.size
    grad = gram @ coef - cross
    for sweep in range(1, max_sweeps + 1):
        biggest = 0.0
        for l in range(m):
            old = coef[l]
            diag = gram[l, l]
            z = diag * old - grad[l]
            if z > lam:
                new = (z - lam) / diag
            elif z < -lam:
                new = (z + lam) / diag
            else:
                new = 0.0
            delta = new - old
            if delta != 0.0:
                coef[l] = new
                for k in range(m):
                    grad[k] += gram[k, l] * delta
                if abs(delta) > biggest:
                    biggest = abs(delta)
        if biggest < tol:
            viol = kkt_violation(gram, cross, coef, lam)
            if viol <= kkt_tol:
                return sweep, viol
            # refresh the running gradient against drift
            grad = gram @ coef - cross
    return max_sweeps, kkt_violation(gram, cross, coef, lam)


@numba.njit(cache=True)
def tableau_pivot(tab, reduced, row, col):
    """In-place Gauss-Jordan pivot of tab (and its reduced-cost row) on (row, col)."""
    ncol = tab.shape[1]
    inv = 1.0 / tab[row, col]
    for k in range(ncol):
        tab[row, k] *= inv
    prow = tab[row]
    for r in range(tab.shape[0]):
        if r == row:
            continue
        f = tab[r, col]
        if f != 0.0:
            for k in range(ncol):
                tab[r, k] -= f * prow[k]
    f = reduced[col]
    if f != 0.0:
        for k in range(ncol):
            reduced[k] -= f * prow[k]
    reduced[col] = 0.0


@numba.njit(cache=True)
def dual_simplex_loop(tab, reduced, basis, x_b, feas_tol, piv_tol, max_pivots):
    """Bland's-rule dual simplex pivots until x_b >= -feas_tol.

    Leaving row: infeasible basic variable with the smallest index.
    Entering column: minimum dual ratio, smallest index on ties.
    Returns (pivots, status) with status 0 optimal, 1 infeasible, 2 capped.
    """
    m, ncol = tab.shape
    count = 0
    while True:
        row = -1
        for r in range(m):
            if x_b[r] < -feas_tol and (row < 0 or basis[r] < basis[row]):
                row = r
        if row < 0:
            return count, 0
        col = -1
        best = np.inf
        for k in range(ncol):
            a = tab[row, k]
            if a < -piv_tol:
                ratio = reduced[k] / -a
                if col < 0 or ratio < best - 1e-12 * max(1.0, best):
                    best = ratio
                    col = k
        if col < 0:
            return count, 1
        step = x_b[row] / tab[row, col]
        for r in range(m):
            x_b[r] -= step * tab[r, col]
        x_b[row] = step
        tableau_pivot(tab, reduced, row, col)
        basis[row] = col
        count += 1
        if count >= max_pivots:
            return count, 2
