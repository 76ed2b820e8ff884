"""Exact desk-scale computations for toric fans, torus skeleta, blow-up
regions, cellular sheaves, and the cross-checks tying the constructible
and coherent sides together."""

__version__ = "0.1.0"
