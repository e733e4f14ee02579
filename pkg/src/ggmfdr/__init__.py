"""Gaussian graphical model edge discovery with false discovery rate control."""
from .gfc import GfcSelection, TuningResult, evaluate, gfc_threshold, run_gfc, tune_delta
from .graphs import PrecisionModel, band_graph, er_graph, hub_graph, make_rng, sample_mvn
from .solvers import NodeRegressionSet, RegressionProblem, fit_all_nodes, solve_dantzig, solve_lasso
from .teststat import TestStatistics, studentize

__all__ = [
    "GfcSelection", "NodeRegressionSet", "PrecisionModel", "RegressionProblem",
    "TestStatistics", "TuningResult", "band_graph", "er_graph", "evaluate",
    "fit_all_nodes", "gfc_threshold", "hub_graph", "make_rng", "run_gfc",
    "sample_mvn", "solve_dantzig", "solve_lasso", "studentize", "tune_delta",
]
