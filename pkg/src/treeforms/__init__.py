"""Exact combinatorics of path-graph towers over homogeneous tree balls:
cochain complexes, harmonic forms, the geodesic Radon transform, and the
p-adic lattice-class action."""

__version__ = "0.1.0"
