"""Projective-output quantum channels: minimal output Renyi entropies,
finite-power additivity checks, weak-covariance capacities, and entanglement
of formation for the derived bipartite states."""

__version__ = "0.1.0"
