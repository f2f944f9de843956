"""Central limit behaviour of additive functionals of reversible chains
with slowly varying variance growth: exact computation and simulation."""

__version__ = "0.1.0"
