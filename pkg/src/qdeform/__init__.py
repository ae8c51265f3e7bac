"""Exact and numeric workbench for q-deformed Heisenberg algebras and quantum planes."""

__version__ = "0.1.0"
