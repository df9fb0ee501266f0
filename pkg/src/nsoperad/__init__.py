"""Finite truncations of non-symmetric dg operads over Q: axioms, homology,
Poisson operads, free operads and pushouts, Hochschild cohomology and the
column-filtration spectral sequence."""

__version__ = "0.1.0"
