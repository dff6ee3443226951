"""sgcov - analytic SINR coverage for cellular networks with Monte Carlo validation."""

__version__ = "0.1.0"
