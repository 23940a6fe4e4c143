"""Generalized integrals built on the Rogers-Ramanujan continued fraction."""

__version__ = "0.1.0"
