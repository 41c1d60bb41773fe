"""Exact computations with Lie conformal algebras, their enveloping vertex
algebras, and OPEs viewed as gluing data over coverings of the plane and
of affine 3-space."""

__version__ = "0.1.0"
