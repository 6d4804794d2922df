"""
Function-space machinery: Lebesgue / mixed space-time norms, Bessel-Sobolev
norms, a unit-cube partition of unity with its box projections and modulation
norms, and Littlewood-Paley dyadic projections.

Conventions:
  * L^p on T^m x R^n uses the trapezoid rule on the torus and the rectangle
    rule on the box (both exact for band-limited integrands); for p not in
    {2, inf} the integrand |f|^p is wider in frequency than f, so norms take
    a ``pad`` factor that refines the sampling grid by zero-padding the
    spectrum.
  * p = inf (and r = inf in time) are maxima over quadrature nodes: lower
    bounds to the true sup, with error controlled by grid resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.typing import NDArray

from .bumps import mollified_indicator, radial_cutoff
from .domain import (
    DomainSpec,
    Field,
    Spectrum,
    TimePlan,
    Trajectory,
    padded_samples,
    to_field,
    to_spectrum,
)
from .propagator import propagate

__all__ = [
    "NormParams",
    "PartitionOfUnity",
    "DyadicFamily",
    "lp_space_norm",
    "mixed_norm",
    "mixed_norm_evolved",
    "bessel_multiplier",
    "sobolev_norm",
    "build_partition",
    "box_project",
    "modulation_norm",
    "build_dyadic",
    "lp_project",
]

INF = math.inf

# sigma_0 plateau/mollification: support (-11/16, 11/16) subset [-3/4, 3/4)
_SIGMA_HALFWIDTH = 5.0 / 8.0
_SIGMA_MOLL = 1.0 / 16.0


@dataclass(frozen=True)
class NormParams:
    """Exponent bundle (p, q, r, alpha) for the space-time norms."""

    p: float = 2.0
    q: float = 2.0
    r: float = 2.0
    alpha: float = 0.0

    def __post_init__(self) -> None:
        for name in ("p", "q", "r"):
            v = getattr(self, name)
            if not (v >= 1.0):
                raise ValueError(f"{name} must be >= 1 (or inf)")
        if not (0.0 <= self.alpha < INF):
            raise ValueError("alpha must be finite and >= 0")


def _check_exponent(p: float) -> None:
    if not p >= 1.0:
        raise ValueError(f"Lebesgue exponent must be >= 1 or inf, got {p}")


# -- plain and mixed Lebesgue norms ----------------------------------------


def lp_space_norm(f: Field, p: float, pad: int = 1) -> float:
    """L^p(T^m x R^n) norm by spatial quadrature; max over samples for
    p = inf."""
    _check_exponent(p)
    if pad > 1:
        samples, w = padded_samples(to_spectrum(f), pad)
    else:
        samples, w = f.samples, f.domain.cell_volume
    a = np.abs(samples)
    if p == INF:
        return float(a.max())
    return float((np.sum(a**p) * w) ** (1.0 / p))


def mixed_norm(traj: Trajectory, q: float, r: float) -> float:
    """L^q(T^m x R^n, L^r[0,1]) norm: inner L^r in time at each spatial
    point using the trajectory weights, then outer L^q in space.  q = r
    realizes L^p on T^m x R^n x [0,1]."""
    _check_exponent(q)
    _check_exponent(r)
    if not traj.fields:
        raise ValueError("empty trajectory")
    inner = None
    for w, fld in zip(traj.weights, traj.fields):
        a = np.abs(fld.samples)
        term = a if r == INF else w * a**r
        inner = term if inner is None else (
            np.maximum(inner, term) if r == INF else inner + term
        )
    if r != INF:
        inner = inner ** (1.0 / r)
    cell = traj.domain.cell_volume
    if q == INF:
        return float(inner.max())
    return float((np.sum(inner**q) * cell) ** (1.0 / q))


def mixed_norm_evolved(
    F: Spectrum, plan: TimePlan, q: float, r: float, pad: int = 1
) -> float:
    """Mixed norm of t -> e^{it Laplacian} F, streamed one time slice at a
    time to bound memory; supports padded spatial quadrature."""
    _check_exponent(q)
    _check_exponent(r)
    inner = None
    cell = None
    for t, w in zip(plan.times, plan.weights):
        samples, cell = padded_samples(propagate(F, t), pad)
        a = np.abs(samples)
        term = a if r == INF else w * a**r
        inner = term if inner is None else (
            np.maximum(inner, term) if r == INF else inner + term
        )
    if r != INF:
        inner = inner ** (1.0 / r)
    if q == INF:
        return float(inner.max())
    return float((np.sum(inner**q) * cell) ** (1.0 / q))


# -- Bessel multiplier and Sobolev norm ------------------------------------


def _freq_radius_sq(domain: DomainSpec) -> NDArray[np.float64]:
    ndim = domain.m + domain.n
    out = np.zeros(domain.grid_shape)
    for axis in range(ndim):
        sq = domain.freq_sq_1d(axis)
        shape = [1] * ndim
        shape[axis] = sq.size
        out = out + sq.reshape(shape)
    return out


def bessel_multiplier(F: Spectrum, alpha: float) -> Spectrum:
    """Multiply fhat(k, xi) by (1 + |k|^2 + |xi|^2)^{alpha/2}."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if alpha == 0:
        return F.copy()
    weight = (1.0 + _freq_radius_sq(F.domain)) ** (alpha / 2.0)
    return Spectrum(F.domain, F.coeffs * weight)


def sobolev_norm(f: Field, alpha: float, p: float, pad: int = 1) -> float:
    """W^{alpha,p} norm: L^p norm after the Bessel multiplier."""
    return lp_space_norm(
        to_field(bessel_multiplier(to_spectrum(f), alpha)), p, pad=pad
    )


# -- partition of unity and modulation norms --------------------------------


def _sigma0_1d(u: NDArray[np.float64]) -> NDArray[np.float64]:
    """1-d generator sigma_0 = b / sum_j b(. - j), b a mollified indicator of
    [-5/8, 5/8] at width 1/16.  The plateau of b has width > 1, so the
    denominator is >= 1 everywhere and the translates sum to 1 exactly."""
    u = np.asarray(u, dtype=float)
    base = np.floor(u)
    den = np.zeros_like(u)
    for off in (-1.0, 0.0, 1.0, 2.0):
        den += mollified_indicator(u - (base + off), _SIGMA_HALFWIDTH, _SIGMA_MOLL)
    return mollified_indicator(u, _SIGMA_HALFWIDTH, _SIGMA_MOLL) / den


@dataclass(frozen=True)
class PartitionOfUnity:
    """Tensor partition of unity adapted to translated unit cubes of the
    frequency lattice Z^{m+n}; per-axis translates of sigma_0 multiply."""

    domain: DomainSpec

    def __post_init__(self) -> None:
        if self.domain.dxi > 1.0 / 16.0 + 1e-12:
            raise ValueError(
                "frequency grid too coarse to resolve the mollifier scale 1/16 "
                f"(dxi = {self.domain.dxi:.4g})"
            )

    def sigma(self, u) -> NDArray[np.float64]:
        """1-d generator sampled at frequency offsets u."""
        return _sigma0_1d(np.asarray(u, dtype=float))

    def axis_mask(self, axis: int, K: int) -> NDArray[np.float64]:
        """sigma_0(freq - K) along one array axis of the domain grid."""
        d = self.domain
        if axis < d.m:
            return self.sigma(d.k_axis.astype(float) - K)
        return self.sigma(d.xi_axis - K)

    def torus_candidates(self) -> NDArray[np.int64]:
        return self.domain.k_axis

    def euclid_candidates(self) -> NDArray[np.int64]:
        xi = self.domain.xi_axis
        lo = int(np.floor(xi[0] - 0.75))
        hi = int(np.ceil(xi[-1] + 0.75))
        return np.arange(lo, hi + 1)


def build_partition(domain: DomainSpec) -> PartitionOfUnity:
    """Construct the partition; raises if the grid cannot resolve the
    mollifier."""
    return PartitionOfUnity(domain)


def box_project(f: Field, K, partition: PartitionOfUnity | None = None) -> Field:
    """Frequency restriction by sigma_K = sigma_0(. - K), K in Z^{m+n}."""
    part = partition or build_partition(f.domain)
    d = f.domain
    K = tuple(int(v) for v in np.atleast_1d(K))
    if len(K) != d.m + d.n:
        raise ValueError(f"K must have {d.m + d.n} components")
    for i in range(d.m):
        if abs(K[i]) > d.torus_modes:
            raise ValueError(f"torus component K[{i}]={K[i]} outside mode range")
    for j in range(d.n):
        if abs(K[d.m + j]) > abs(d.xi_axis[0]) + 2:
            raise ValueError(f"Euclidean component K[{d.m + j}] outside grid")
    work = to_spectrum(f).coeffs
    ndim = d.m + d.n
    for axis in range(ndim):
        mask = part.axis_mask(axis, K[axis])
        shape = [1] * ndim
        shape[axis] = mask.size
        work = work * mask.reshape(shape)
    return to_field(Spectrum(d, work))


def _euclid_eval_grid(domain: DomainSpec, p: float) -> NDArray[np.float64]:
    """Coarse per-axis evaluation grid for box-localized pieces: each piece
    has <= 3/2 units of frequency support per Euclidean axis, so |c|^p is
    band-limited to ~ 0.75 p and a step of about 2 pi / (3 p) integrates it
    exactly."""
    L = domain.box_halfwidth
    pp = 8.0 if p == INF else max(p, 2.0)
    step = 2.0 * np.pi / (3.0 * pp)
    count = max(128, 1 << int(np.ceil(np.log2(2.0 * L / step))))
    return (np.arange(count) - count // 2) * (2.0 * L / count)


def modulation_norm(
    f: Field,
    p: float,
    q: float,
    alpha: float = 0.0,
    partition: PartitionOfUnity | None = None,
) -> float:
    """Modulation norm: ell^q over K in Z^{m+n} of <K>^alpha ||box_K f||_p.

    The K sum is truncated at the spectral cutoff plus one shell; the tail
    vanishes for band-limited data.  Each piece keeps exactly one torus mode
    per torus axis (sigma_0 vanishes at nonzero integers), so its modulus is
    constant in x and the L^p norm reduces to a small Euclidean quadrature.
    """
    _check_exponent(p)
    _check_exponent(q)
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    part = partition or build_partition(f.domain)
    d = f.domain
    F = to_spectrum(f).coeffs

    # per-torus-axis support: keep only modes carrying mass
    ktorus: list[NDArray[np.int64]] = []
    work_abs = np.abs(F)
    for i in range(d.m):
        other = tuple(ax for ax in range(d.m + d.n) if ax != i)
        col = work_abs.max(axis=other)
        ktorus.append(d.k_axis[col > 0.0])
    keucl = [part.euclid_candidates() for _ in range(d.n)]

    # per-Euclidean-axis: window slices and evaluation matrices
    xi = d.xi_axis
    ygrid = _euclid_eval_grid(d, p)
    eval_mat = np.exp(1j * np.outer(ygrid, xi)) * d.dxi  # (n_eval, N_R)
    dy_eval = ygrid[1] - ygrid[0]

    windows: list[dict[int, tuple[slice, NDArray[np.float64]]]] = []
    for _ in range(d.n):
        table: dict[int, tuple[slice, NDArray[np.float64]]] = {}
        for K in keucl[0]:
            idx = np.nonzero(np.abs(xi - K) < 0.75)[0]
            if idx.size == 0:
                continue
            sl = slice(int(idx[0]), int(idx[-1]) + 1)
            table[int(K)] = (sl, part.sigma(xi[sl] - K))
        windows.append(table)

    torus_pow = (2.0 * np.pi) ** d.m  # |piece| is x-independent
    terms: list[tuple[float, float]] = []  # (<K>^alpha, piece norm)

    import itertools

    for kt in itertools.product(*[list(map(int, ks)) for ks in ktorus]):
        idx_t = tuple(int(k) + d.torus_modes for k in kt)
        sub = F[idx_t]  # shape (N_R,)*n
        for ke in itertools.product(*[sorted(w) for w in windows]):
            block = sub
            ok = True
            for j, Kj in enumerate(ke):
                got = windows[j].get(Kj)
                if got is None:
                    ok = False
                    break
                sl, sig = got
                block = np.take(block, range(sl.start, sl.stop), axis=j)
                shape = [1] * d.n
                shape[j] = sig.size
                block = block * sig.reshape(shape)
            if not ok or not np.any(block):
                continue
            # evaluate c(y) = sum_xi block e^{i xi y} dxi on the coarse grid
            vals = block
            for j, Kj in enumerate(ke):
                sl, _ = windows[j][Kj]
                vals = np.tensordot(eval_mat[:, sl], vals, axes=([1], [j]))
                vals = np.moveaxis(vals, 0, j)
            a = np.abs(vals)
            if p == INF:
                piece = float(a.max())
            else:
                piece = float(
                    (np.sum(a**p) * dy_eval**d.n) ** (1.0 / p)
                ) * torus_pow ** (1.0 / p)
            K_full = kt + ke
            wt = (1.0 + sum(v * v for v in K_full)) ** (alpha / 2.0)
            terms.append((wt, piece))

    if not terms:
        return 0.0
    vals = np.array([wt * piece for wt, piece in terms])
    if q == INF:
        return float(vals.max())
    return float((vals**q).sum() ** (1.0 / q))


# -- Littlewood-Paley projections ------------------------------------------


@dataclass(frozen=True)
class DyadicFamily:
    """Dyadic annulus multipliers psi_hat_j built by telescoping a radial
    cutoff Theta (1 on |.| <= 1, supported in |.| <= 2):

        psi_hat_0 = Theta(|.|),  psi_hat_j = Theta(2^{-j}|.|) - Theta(2^{-j+1}|.|)

    so that sum_{j<=J} psi_hat_j = Theta(2^{-J}|.|) = 1 on |.| <= 2^J.
    """

    domain: DomainSpec
    levels: int

    @cached_property
    def radius(self) -> NDArray[np.float64]:
        return np.sqrt(_freq_radius_sq(self.domain))

    def psi_hat(self, j: int) -> NDArray[np.float64]:
        if j < 0 or j > self.levels:
            raise ValueError(f"level {j} outside family range 0..{self.levels}")
        if j == 0:
            return radial_cutoff(self.radius)
        return radial_cutoff(self.radius / 2.0**j) - radial_cutoff(
            self.radius / 2.0 ** (j - 1)
        )


def build_dyadic(domain: DomainSpec, levels: int | None = None) -> DyadicFamily:
    """Family covering the whole resolved frequency range by default."""
    rmax = math.sqrt(
        domain.m * domain.torus_modes**2 + domain.n * float(domain.xi_axis[0]) ** 2
    )
    if levels is None:
        levels = max(1, int(np.ceil(np.log2(max(rmax, 2.0)))))
    return DyadicFamily(domain, levels)


def lp_project(f: Field, j: int, family: DyadicFamily | None = None) -> Field:
    """Littlewood-Paley piece P_j f."""
    fam = family or build_dyadic(f.domain)
    F = to_spectrum(f)
    return to_field(Spectrum(f.domain, F.coeffs * fam.psi_hat(j)))
