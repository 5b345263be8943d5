"""Shared exception types.

The CLI maps these onto process exit codes, so anything that should be
reported as a numerical failure (as opposed to bad configuration or I/O)
must derive from NumericalError.
"""


class HeatgraphError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(HeatgraphError, ValueError):
    """Invalid configuration or invalid input values."""


class NumericalError(HeatgraphError, RuntimeError):
    """An iterative numerical routine failed to produce a usable result."""


class DegenerateGraphError(ConfigError):
    """A graph is degenerate for the requested operation (e.g. zero trace)."""


class ConnectivityError(NumericalError):
    """A random-graph generator could not produce a connected graph."""


class ConvergenceError(NumericalError):
    """An inner solver did not converge within its iteration budget."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
