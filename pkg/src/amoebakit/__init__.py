"""Amoebae of bivariate Newton polynomials: lopsidedness, genus, sampling and learned genus deciders."""
__version__ = "0.1.0"
