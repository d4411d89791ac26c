"""Small shared helpers for cyclic phase arithmetic."""

from __future__ import annotations

import numpy as np

__all__ = ["wrap_unit", "circular_difference"]


def wrap_unit(x):
    """Wrap values into [0, 1) cycles.

    np.mod can return exactly 1.0 for tiny negative inputs (1 - eps rounds
    up), so the result is folded back to 0 explicitly.
    """
    r = np.mod(x, 1.0)
    return np.where(r >= 1.0, 0.0, r)


def circular_difference(a, b):
    """Signed wrapped difference a - b, mapped into [-0.5, 0.5) cycles."""
    d = np.mod(np.asarray(a, dtype=np.float64) - b + 0.5, 1.0)
    d = np.where(d >= 1.0, 0.0, d)
    return d - 0.5
