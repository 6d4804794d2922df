"""
Free Schrodinger evolution on T^m x R^n and the parabolic extension operator.

The propagator is the exact Fourier multiplier e^{-it(|k|^2 + |xi|^2)};
because the torus eigenvalues are integers, the torus part of the flow is
exactly 2 pi periodic in t, which the multiplier reproduces to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .domain import DomainSpec, Field, Spectrum, TimePlan, Trajectory, to_field

__all__ = ["propagate", "evolve_trajectory", "ExtensionData", "extension_apply"]


def _phase_multiply(coeffs: NDArray, domain: DomainSpec, t: float) -> NDArray:
    """Multiply by e^{-i t (|k|^2 + |xi|^2)} via per-axis broadcasts, avoiding
    a full-size frequency array."""
    ndim = domain.m + domain.n
    out = coeffs
    for axis in range(ndim):
        sq = domain.freq_sq_1d(axis)
        shape = [1] * ndim
        shape[axis] = sq.size
        out = out * np.exp(-1j * t * sq).reshape(shape)
    return out


def propagate(F: Spectrum, t: float) -> Spectrum:
    """Apply e^{it Laplacian}: an L^2 isometry for every real t.

    Negative and large t are allowed (backward and long-time evolution);
    only norm quadrature is restricted to [0, 1].
    """
    return Spectrum(F.domain, _phase_multiply(F.coeffs, F.domain, float(t)))


def evolve_trajectory(F: Spectrum, time_plan: TimePlan) -> Trajectory:
    """Materialize to_field(propagate(F, t)) at each node of the plan."""
    fields = [to_field(propagate(F, t)) for t in time_plan.times]
    return Trajectory(F.domain, time_plan.times, time_plan.weights, fields)


@dataclass
class ExtensionData:
    """Frequency data g(tau, xi) on the R^{-1}-separated paraboloid slices.

    ``taus``: array of shape (n_tau, m), each row in (R^{-1} Z^m) cap [-1,1]^m.
    ``xis``: array of shape (n_xi, n) with rows in [-1, 1]^n.
    ``coeffs``: complex array of shape (n_tau, n_xi).
    ``dxi``: quadrature weight per xi node (realizes the d xi integral).
    """

    R: float
    taus: NDArray[np.float64]
    xis: NDArray[np.float64]
    coeffs: NDArray[np.complex128]
    dxi: float

    def __post_init__(self) -> None:
        self.taus = np.atleast_2d(np.asarray(self.taus, dtype=float))
        self.xis = np.atleast_2d(np.asarray(self.xis, dtype=float))
        self.coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if self.R < 1.0:
            raise ValueError("R must be >= 1")
        step = 1.0 / self.R
        scaled = self.taus / step
        if not np.allclose(scaled, np.round(scaled), atol=1e-9):
            raise ValueError("tau grid is not R^{-1}-separated")
        if np.any(np.abs(self.taus) > 1.0 + 1e-12) or np.any(
            np.abs(self.xis) > 1.0 + 1e-12
        ):
            raise ValueError("tau and xi must lie in [-1, 1]")
        if self.coeffs.shape != (self.taus.shape[0], self.xis.shape[0]):
            raise ValueError("coeffs must have shape (n_tau, n_xi)")


def extension_apply(
    E: ExtensionData,
    xs: NDArray[np.float64],
    ys: NDArray[np.float64],
    ts: NDArray[np.float64],
) -> NDArray[np.complex128]:
    """Evaluate the extension sum

        sum_tau int g(tau, xi) e^{i(tau.x + xi.y + (|tau|^2+|xi|^2) t)} dxi

    on the product grid xs x ys x ts.  ``xs`` has shape (n_x, m), ``ys``
    shape (n_y, n), ``ts`` shape (n_t,).  Returns (n_x, n_y, n_t).
    """
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    ys = np.atleast_2d(np.asarray(ys, dtype=float))
    ts = np.asarray(ts, dtype=float)
    if xs.shape[1] != E.taus.shape[1] or ys.shape[1] != E.xis.shape[1]:
        raise ValueError("grid dimensions do not match extension data")

    xi_sq = np.sum(E.xis**2, axis=1)  # (n_xi,)
    # e^{i xi.y} once for all slices
    phase_y = np.exp(1j * (ys @ E.xis.T))  # (n_y, n_xi)
    out = np.zeros((xs.shape[0], ys.shape[0], ts.size), dtype=np.complex128)
    for idx in range(E.taus.shape[0]):
        tau = E.taus[idx]
        tau_sq = float(tau @ tau)
        # (n_xi, n_t): coefficient times the time phase of the slice
        a = E.coeffs[idx][:, None] * np.exp(
            1j * np.outer(xi_sq + tau_sq, ts)
        )
        slice_yt = (phase_y @ a) * E.dxi**E.xis.shape[1]  # (n_y, n_t)
        phase_x = np.exp(1j * (xs @ tau))  # (n_x,)
        out += phase_x[:, None, None] * slice_yt[None, :, :]
    return out
