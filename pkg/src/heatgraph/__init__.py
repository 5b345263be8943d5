"""Learning graph topologies from multi-scale heat-diffusion signals."""

__version__ = "0.1.0"

from .dictionary import (HeatDictionary, build_dictionary,
                         generate_synthetic_signals)
from .graphs import (generate_ba_graph, generate_er_graph, generate_rbf_graph,
                     laplacian_from_weights, normalize_trace,
                     random_valid_laplacian, threshold_laplacian,
                     weights_from_laplacian)
from .localization import IstaConfig, ista_recover, localization_sweep, recover_sources
from .metrics import EdgeRecoveryReport, evaluate_recovery
from .qp import project_scaled_simplex, solve_laplacian_qp
from .solver import LearnResult, SolverConfig, learn
from .spectral import eig_sym, grad_trace_exp, heat_kernel

__all__ = [
    "__version__",
    "HeatDictionary", "build_dictionary", "generate_synthetic_signals",
    "generate_ba_graph", "generate_er_graph", "generate_rbf_graph",
    "laplacian_from_weights", "normalize_trace", "random_valid_laplacian",
    "threshold_laplacian", "weights_from_laplacian",
    "IstaConfig", "ista_recover", "localization_sweep", "recover_sources",
    "EdgeRecoveryReport", "evaluate_recovery",
    "project_scaled_simplex", "solve_laplacian_qp",
    "LearnResult", "SolverConfig", "learn",
    "eig_sym", "grad_trace_exp", "heat_kernel",
]
