"""Bias-corrected residual cross moments and their studentized versions."""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateResidualError

R_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class TestStatistics:
    """Upper-triangular (i < j) raw and studentized pair statistics.

    Entries on and below the diagonal are zero and carry no meaning.
    """

    __test__ = False  # not a pytest class

    t_raw: np.ndarray
    t_hat: np.ndarray
    r_diag: np.ndarray
    n: int
    delta: float
    solver: str

    @property
    def p(self):
        return self.t_hat.shape[0]

    def upper(self):
        """Flattened T-hat over i < j, row-major."""
        iu = np.triu_indices(self.p, k=1)
        return self.t_hat[iu]

    def write_csv(self, path_or_file):
        iu, ju = np.triu_indices(self.p, k=1)
        own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh)
            w.writerow(["i", "j", "t_hat"])
            for i, j in zip(iu, ju):
                w.writerow([i + 1, j + 1, format(self.t_hat[i, j], ".17g")])
        finally:
            if own:
                fh.close()


def _cross_moments(residuals):
    """(1/n) E'E with every sum over k done by numpy's pairwise reduction."""
    n, p = residuals.shape
    rt = np.ascontiguousarray(residuals.T)
    out = np.empty((p, p))
    for i in range(p):
        out[i] = (rt[i] * rt).sum(axis=1)
    return out / n


def residual_cross_moment(reg, i, j):
    if i == j:
        raise ValueError("use reg.r_diag for the diagonal")
    return float((reg.residuals[:, i] * reg.residuals[:, j]).sum() / reg.n)


def bias_corrected_t(reg, i, j):
    """T_ij for one pair, coefficients resolved through the column maps."""
    if not i < j:
        raise ValueError("bias_corrected_t needs i < j")
    e = reg.residuals
    s_ij = (e[:, i] * e[:, j]).sum()
    s_ii = (e[:, i] * e[:, i]).sum()
    s_jj = (e[:, j] * e[:, j]).sum()
    return float((s_ij + s_ii * reg.coefficient(j, i) + s_jj * reg.coefficient(i, j)) / reg.n)


def studentize(reg):
    r = reg.r_diag
    bad = np.flatnonzero(r <= R_FLOOR)
    if bad.size:
        raise DegenerateResidualError(int(bad[0]), float(r[bad[0]]))
    moments = _cross_moments(reg.residuals)
    coef = reg.coefficient_matrix()
    # T_ij = r_ij + r_ii * B[j, i] + r_jj * B[i, j]
    full = moments + r[:, None] * coef.T + coef * r[None, :]
    t_raw = np.triu(full, k=1)
    t_hat = np.sqrt(reg.n / np.outer(r, r)) * t_raw
    return TestStatistics(t_raw, t_hat, r.copy(), reg.n, reg.delta, reg.solver)
