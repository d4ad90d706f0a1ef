"""Generalized multiplicative connectives: partition orthogonality, formula
behaviors, and decomposability decision procedures for MLL, MALL, IMLL and
bounded EMLL."""

__version__ = "0.1.0"
