"""Dimer models on the two-torus, their perfect matching polygons, and mutations."""

from __future__ import annotations

__version__ = "0.1.0"
