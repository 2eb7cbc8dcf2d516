"""Numerical laboratory for skew products over expanding circle maps whose
fiber dynamics has a degenerate critical point."""

__version__ = "0.1.0"
