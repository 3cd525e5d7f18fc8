"""Wildly embedded 2-sphere construction kit: inversive geometry on S^4,
reflection-group block builders, limit-set sampling, bending deformations,
and knot-group Alexander invariants."""

__version__ = "0.1.0"
