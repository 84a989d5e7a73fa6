"""Minimal invariant varieties of polynomial foliations, computed exactly."""

__version__ = "0.1.0"
