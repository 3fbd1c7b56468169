"""Exact computation of epsilon motives and DT invariants for torus quotient stacks."""

__version__ = "0.1.0"
