"""Geometric local-lemma certificates for quantum satisfiability."""

__version__ = "0.1.0"
