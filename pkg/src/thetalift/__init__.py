"""Canonical lifts of theta null points in characteristic 3 and CM invariant reconstruction."""

__version__ = "0.1.0"
