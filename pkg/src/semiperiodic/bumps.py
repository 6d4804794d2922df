"""Smooth compactly supported cutoff profiles.

All cutoffs are built from the standard exponential transition

    s(t) = e(t) / (e(t) + e(1 - t)),   e(t) = exp(-1/t) for t > 0, else 0,

which rises smoothly from 0 at t <= 0 to 1 at t >= 1.  A mollified
indicator of [-a, a] at width w is then 1 on |u| <= a - w, 0 on
|u| >= a + w, with an s-transition in between.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

__all__ = ["smooth_step", "mollified_indicator", "radial_cutoff"]


def _e(t: NDArray[np.float64]) -> NDArray[np.float64]:
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_step(t) -> NDArray[np.float64]:
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    a = _e(t)
    b = _e(1.0 - t)
    out = a / (a + b)
    return float(out[0]) if scalar else out


def mollified_indicator(u, halfwidth: float, moll_width: float):
    """Mollified indicator of [-halfwidth, halfwidth] at width moll_width:
    1 on the plateau |u| <= halfwidth - moll_width, 0 outside
    |u| >= halfwidth + moll_width."""
    u = np.abs(np.asarray(u, dtype=float))
    return smooth_step((halfwidth + moll_width - u) / (2.0 * moll_width))


def radial_cutoff(r):
    """Theta(r): 1 on r <= 1, 0 on r >= 2, smooth monotone in between."""
    r = np.asarray(r, dtype=float)
    return smooth_step(2.0 - r)
