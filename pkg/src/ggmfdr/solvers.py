"""Node-wise sparse regression: coordinate-descent lasso and Dantzig selector.

Every node ``i`` regresses the centered column ``X_i`` on the remaining
columns. Both solvers work from the sample covariance (Gram form), so a
problem costs O(p^2) per sweep/pivot regardless of n and the same problem
is reused across the whole penalty grid during tuning.

Coefficient vectors are stored in *local* order (length p-1); the
``column_map`` of the problem translates local position to the global
variable index and is the only place that translation happens.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from ._cd import cd_lasso, kkt_violation
from .errors import ConvergenceError, IngestionError, InfeasibleError, ParameterError, SolverError
from .mathcore import center_and_covariance
from .simplex import DualSimplexPath, two_phase_simplex

log = logging.getLogger(__name__)

SOLVERS = ("lasso", "dantzig")
CD_TOL = 1e-7
CD_KKT_TOL = 1e-9
CD_MAX_SWEEPS = 10_000


@dataclass(frozen=True, eq=False)
class RegressionProblem:
    target: int
    gram: np.ndarray
    cross: np.ndarray
    diag_scale: np.ndarray
    target_variance: float
    n: int
    p: int
    column_map: np.ndarray

    @classmethod
    def from_covariance(cls, cov, target, n):
        p = cov.shape[0]
        keep = np.delete(np.arange(p), target)
        gram = cov[np.ix_(keep, keep)]
        diag = gram.diagonal().copy()
        if np.any(diag <= 0.0):
            bad = keep[np.flatnonzero(diag <= 0.0)[0]]
            raise IngestionError(f"column {bad} is constant", column=bad)
        return cls(target, gram, cov[keep, target].copy(), diag,
                   float(cov[target, target]), n, p, keep)

    @property
    def scaled_gram(self):
        s = 1.0 / np.sqrt(self.diag_scale)
        return self.gram * s[:, None] * s[None, :]

    @property
    def scaled_cross(self):
        return self.cross / np.sqrt(self.diag_scale)

    def local_index(self, variable):
        """Local coefficient position of a global variable index."""
        pos = int(np.searchsorted(self.column_map, variable))
        if pos >= self.column_map.size or self.column_map[pos] != variable:
            raise AssertionError(f"variable {variable} is not a regressor of node {self.target}")
        return pos


def lambda_for(problem, delta):
    if delta < 0:
        raise ParameterError(f"delta must be nonnegative, got {delta}")
    return delta * np.sqrt(problem.target_variance * np.log(problem.p) / problem.n)


# -- lasso -------------------------------------------------------------------

def _lasso_scaled(problem, lam, start=None):
    """Standardized coefficients alpha of the D^{-1/2}-scaled lasso.

    The descent runs on the problem divided by the target's standard
    deviation, which makes tolerances independent of the data's units.
    """
    unit = np.sqrt(problem.target_variance) if problem.target_variance > 0 else 1.0
    gram = np.ascontiguousarray(problem.scaled_gram)
    cross = problem.scaled_cross / unit
    coef = np.zeros(problem.p - 1) if start is None else np.array(start, dtype=float) / unit
    sweeps, viol = cd_lasso(gram, cross, lam / unit, coef, CD_TOL, CD_KKT_TOL, CD_MAX_SWEEPS)
    if viol > CD_KKT_TOL:
        raise ConvergenceError(
            f"lasso did not converge in {CD_MAX_SWEEPS} sweeps (KKT violation {viol * unit:.3g})",
            violation=viol * unit)
    return coef * unit


def lasso_kkt_violation(problem, beta, lam):
    """KKT violation of beta for the scaled lasso problem, in scaled units."""
    alpha = np.asarray(beta) * np.sqrt(problem.diag_scale)
    return kkt_violation(np.ascontiguousarray(problem.scaled_gram), problem.scaled_cross, alpha, lam)


COND_LIMIT = 1e12


def _exact_solve(problem):
    """Least-squares point gram w = cross, or None when gram is numerically singular."""
    if np.linalg.cond(problem.scaled_gram) > COND_LIMIT:
        return None
    return np.linalg.solve(problem.gram, problem.cross)


def solve_lasso(problem, delta, warm_start=None):
    """Lasso coefficients beta = D^{-1/2} alpha in local order."""
    lam = lambda_for(problem, delta)
    if lam == 0.0:
        # zero penalty is ordinary least squares; skip the descent when it is well posed
        exact = _exact_solve(problem)
        if exact is not None and lasso_kkt_violation(problem, exact, 0.0) <= 1e-9 * max(1.0, np.sqrt(problem.target_variance)):
            return exact
    start = None if warm_start is None else np.asarray(warm_start) * np.sqrt(problem.diag_scale)
    return _lasso_scaled(problem, lam, start) / np.sqrt(problem.diag_scale)


# -- Dantzig selector ----------------------------------------------------------

def _dantzig_lp(problem):
    """Constraint matrix of the LP in variables (u, v) with w = u - v."""
    s = 1.0 / np.sqrt(problem.diag_scale)
    g = problem.gram * s[:, None]
    c = problem.cross * s
    a_ub = np.block([[g, -g], [-g, g]])
    return a_ub, c


def _dantzig_rhs(c, lam):
    return np.concatenate([lam + c, lam - c])


def _dantzig_verify(problem, w, lam):
    s = 1.0 / np.sqrt(problem.diag_scale)
    resid = np.abs(s * (problem.gram @ w - problem.cross))
    excess = float(resid.max() - lam) if resid.size else 0.0
    if excess > 1e-8 * max(1.0, lam):
        raise InfeasibleError(f"Dantzig solution violates its constraint by {excess:.3g}")


def _dantzig_exact(problem):
    # with lambda = 0 and a nonsingular gram the feasible set is one point
    w = _exact_solve(problem)
    if w is not None:
        try:
            _dantzig_verify(problem, w, 0.0)
        except InfeasibleError:
            return None
    return w


def solve_dantzig(problem, delta, method="dual"):
    """min |w|_1 s.t. |D^{-1/2}(gram w - cross)|_inf <= lambda.

    ``method="dual"`` runs dual simplex pivots from the all-slack basis,
    which is dual feasible because every cost is 1; ``"two-phase"`` runs
    the textbook primal method. Both use Bland's rule and give the same
    optimum; the dual route needs far fewer pivots on these problems.
    """
    lam = lambda_for(problem, delta)
    if lam == 0.0:
        w = _dantzig_exact(problem)
        if w is not None:
            return w
    a_ub, c = _dantzig_lp(problem)
    m = problem.p - 1
    if method == "two-phase":
        res = two_phase_simplex(np.ones(2 * m), a_ub, _dantzig_rhs(c, lam))
    elif method == "dual":
        res = DualSimplexPath(np.ones(2 * m), a_ub).solve(_dantzig_rhs(c, lam))
    else:
        raise ParameterError(f"unknown simplex method {method!r}")
    w = res.x[:m] - res.x[m:]
    _dantzig_verify(problem, w, lam)
    return w


class DantzigPath:
    """Dantzig selector along a descending sequence of deltas (warm started)."""

    def __init__(self, problem):
        self.problem = problem
        a_ub, self._c = _dantzig_lp(problem)
        self._lp = DualSimplexPath(np.ones(a_ub.shape[1]), a_ub)

    def solve(self, delta):
        lam = lambda_for(self.problem, delta)
        if lam == 0.0:
            w = _dantzig_exact(self.problem)
            if w is not None:
                return w
        res = self._lp.solve(_dantzig_rhs(self._c, lam))
        m = self.problem.p - 1
        w = res.x[:m] - res.x[m:]
        _dantzig_verify(self.problem, w, lam)
        return w


class LassoPath:
    def __init__(self, problem):
        self.problem = problem
        self._beta = None

    def solve(self, delta):
        self._beta = solve_lasso(self.problem, delta, warm_start=self._beta)
        return self._beta


def make_path(problem, solver):
    if solver == "lasso":
        return LassoPath(problem)
    if solver == "dantzig":
        return DantzigPath(problem)
    raise ParameterError(f"unknown solver {solver!r}")


def solve(problem, solver, delta):
    if solver == "lasso":
        return solve_lasso(problem, delta)
    if solver == "dantzig":
        return solve_dantzig(problem, delta)
    raise ParameterError(f"unknown solver {solver!r}")


# -- all nodes -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class NodeRegressionSet:
    """Per-node fits: local-order coefficients, residuals and r_ii."""

    betas: tuple
    column_maps: tuple
    residuals: np.ndarray   # n x p, column i holds node i's residuals
    r_diag: np.ndarray
    delta: float
    solver: str

    @property
    def n(self):
        return self.residuals.shape[0]

    @property
    def p(self):
        return self.residuals.shape[1]

    def coefficient(self, node, variable):
        """Entry of node's coefficient vector that multiplies ``variable``."""
        cmap = self.column_maps[node]
        pos = int(np.searchsorted(cmap, variable))
        if pos >= cmap.size or cmap[pos] != variable:
            raise AssertionError(f"variable {variable} is not a regressor of node {node}")
        return float(self.betas[node][pos])

    def coefficient_matrix(self):
        """p x p matrix B with B[node, variable]; zero diagonal."""
        p = self.p
        out = np.zeros((p, p))
        for node in range(p):
            out[node, self.column_maps[node]] = self.betas[node]
        return out

    def to_dict(self):
        nodes = []
        for i in range(self.p):
            nz = np.flatnonzero(self.betas[i])
            nodes.append({
                "i": i + 1,
                "delta": self.delta,
                "solver": self.solver,
                "beta": [[int(self.column_maps[i][k]) + 1, float(self.betas[i][k])] for k in nz],
                "r_ii": float(self.r_diag[i]),
            })
        return {"nodes": nodes}


def validated_data(x):
    data = np.asarray(x, dtype=float)
    if data.ndim != 2:
        raise IngestionError("data must be a 2-d array (rows = observations)")
    if not np.all(np.isfinite(data)):
        raise IngestionError("data contains non-finite entries")
    return data


def node_problems(x):
    """Center the data and build one RegressionProblem per node."""
    data = validated_data(x)
    means, cov = center_and_covariance(data)
    n, p = data.shape
    if p < 2:
        raise IngestionError(f"need at least 2 variables, got {p}")
    const = np.flatnonzero(cov.diagonal() <= 0.0)
    if const.size:
        raise IngestionError(f"column {const[0]} is constant", column=int(const[0]))
    centered = data - means
    return centered, [RegressionProblem.from_covariance(cov, i, n) for i in range(p)]


def assemble(centered, problems, betas, delta, solver):
    n, p = centered.shape
    residuals = np.empty((n, p))
    for i, prob in enumerate(problems):
        residuals[:, i] = centered[:, i] - centered[:, prob.column_map] @ betas[i]
    # pairwise summation over k: contiguous rows of the transposed copy
    rt = np.ascontiguousarray(residuals.T)
    r_diag = (rt * rt).sum(axis=1) / n
    return NodeRegressionSet(tuple(np.asarray(b, dtype=float) for b in betas),
                             tuple(pr.column_map for pr in problems),
                             residuals, r_diag, float(delta), solver)


def fit_all_nodes(x, solver, delta):
    centered, problems = node_problems(x)
    if delta == 0:
        singular = [i for i, pr in enumerate(problems) if np.linalg.cond(pr.scaled_gram) > COND_LIMIT]
        if singular:
            warnings.warn(f"delta=0 with a singular design for node(s) {singular}; "
                          "the fit is not unique and residuals may vanish", RuntimeWarning,
                          stacklevel=2)
    betas = []
    for i, prob in enumerate(problems):
        try:
            betas.append(solve(prob, solver, delta))
        except (ConvergenceError, InfeasibleError) as exc:
            raise SolverError(exc, node=i) from exc
    return assemble(centered, problems, betas, delta, solver)


def regression_set_from_coefficients(x, coefficients, delta=float("nan"), solver="oracle"):
    """Build a NodeRegressionSet from a supplied p x p matrix B[node, variable]."""
    centered, problems = node_problems(x)
    betas = [np.asarray(coefficients)[i, pr.column_map] for i, pr in enumerate(problems)]
    return assemble(centered, problems, betas, delta, solver)
