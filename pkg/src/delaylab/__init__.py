"""Numerical laboratory for delayed feedback stabilization of rapidly
oscillating periodic orbits in scalar delay equations."""

__version__ = "0.1.0"
