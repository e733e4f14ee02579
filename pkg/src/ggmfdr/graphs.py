"""Ground-truth precision matrices and multivariate normal sampling."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .errors import ParameterError
from .mathcore import cholesky, gaussian_quantile

FAMILIES = ("band", "hub", "er")


def make_rng(seed, stream=0):
    """Counter-based generator keyed by (seed, stream).

    Streams let one replication seed drive independent model and data draws.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(stream)])))


def open_uniform(rng, size):
    """Uniform draws strictly inside (0, 1) on the 2**-53 lattice."""
    bits = rng.integers(0, 2**53, size=size, dtype=np.int64)
    return (bits.astype(float) + 0.5) * 2.0**-53


@dataclass(frozen=True, eq=False)
class PrecisionModel:
    family: str
    omega: np.ndarray
    sigma: np.ndarray
    edges: frozenset
    seed: int | None = None
    shift: float = 0.0
    sigma_factor: np.ndarray = field(repr=False, default=None)

    @property
    def p(self):
        return self.omega.shape[0]

    def null_mask(self):
        """Upper-triangular boolean mask of pairs with omega_ij == 0."""
        iu = np.triu(np.ones((self.p, self.p), dtype=bool), k=1)
        return iu & (self.omega == 0.0)

    def edge_mask(self):
        iu = np.triu(np.ones((self.p, self.p), dtype=bool), k=1)
        return iu & (self.omega != 0.0)

    def to_dict(self):
        pairs = sorted(self.edges)
        return {
            "family": self.family,
            "p": self.p,
            "seed": self.seed,
            "shift": self.shift,
            "diagonal": self.omega.diagonal().tolist(),
            "edges": [[i + 1, j + 1, float(self.omega[i, j])] for i, j in pairs],
        }

    def to_json(self):
        return json.dumps(self.to_dict())


def _finish(family, omega, seed=None, shift=0.0):
    omega = np.asarray(omega, dtype=float)
    lower = cholesky(omega)
    eye = np.eye(omega.shape[0])
    inv_lower = solve_triangular(lower, eye, lower=True)
    sigma = inv_lower.T @ inv_lower
    sigma = 0.5 * (sigma + sigma.T)
    rows, cols = np.nonzero(np.triu(omega, k=1))
    edges = frozenset(zip(rows.tolist(), cols.tolist()))
    omega.flags.writeable = False
    sigma.flags.writeable = False
    return PrecisionModel(family, omega, sigma, edges, seed, shift, cholesky(sigma))


def _shifted(omega1):
    shift = abs(float(np.linalg.eigvalsh(omega1).min())) + 0.05
    return omega1 + shift * np.eye(omega1.shape[0]), shift


def band_graph(p):
    if p < 3:
        raise ParameterError("band graph needs p >= 3")
    omega = np.eye(p)
    idx = np.arange(p)
    omega[idx[:-1], idx[:-1] + 1] = omega[idx[:-1] + 1, idx[:-1]] = 0.6
    omega[idx[:-2], idx[:-2] + 2] = omega[idx[:-2] + 2, idx[:-2]] = 0.3
    return _finish("band", omega)


def hub_graph(p):
    if p < 10 or p % 10:
        raise ParameterError(f"hub graph needs p divisible by 10, got {p}")
    omega1 = np.eye(p)
    for start in range(0, p, 10):
        omega1[start, start + 1:start + 10] = 0.5
        omega1[start + 1:start + 10, start] = 0.5
    omega, shift = _shifted(omega1)
    return _finish("hub", omega, shift=shift)


def er_graph(p, rng=None, seed=None, prob=None):
    """Erdos-Renyi precision model; zero-diagonal base matrix, then shifted."""
    if p < 2:
        raise ParameterError("ER graph needs p >= 2")
    if rng is None:
        if seed is None:
            raise ParameterError("er_graph needs rng or seed")
        rng = make_rng(seed, 0)
    if prob is None:
        prob = min(0.05, 5.0 / p)
    rows, cols = np.triu_indices(p, k=1)
    hit = rng.random(rows.size) < prob
    weight = rng.uniform(0.4, 0.8, size=rows.size)
    omega1 = np.zeros((p, p))
    omega1[rows[hit], cols[hit]] = weight[hit]
    omega1[cols[hit], rows[hit]] = weight[hit]
    omega, shift = _shifted(omega1)
    return _finish("er", omega, seed=seed, shift=shift)


def from_family(family, p, seed=None):
    if family == "band":
        return band_graph(p)
    if family == "hub":
        return hub_graph(p)
    if family == "er":
        return er_graph(p, seed=seed)
    raise ParameterError(f"unknown graph family {family!r}")


def sample_mvn(model, n, rng):
    """n i.i.d. rows from N(0, Sigma) using inverse-CDF normal variates."""
    if n < 1:
        raise ParameterError(f"sample size must be positive, got {n}")
    factor = model.sigma_factor if model.sigma_factor is not None else cholesky(model.sigma)
    z = gaussian_quantile(open_uniform(rng, (n, model.p)))
    return z @ factor.T
