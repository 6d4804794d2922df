"""
Cap decompositions of the delta^2 neighborhood of the truncated paraboloid
{(xi, |xi|^2) : xi in [-1,1]^d} and the ell^2 decoupling ratio

    ||f||_{L^p} / (sum_theta ||f_theta||_{L^p}^2)^{1/2}

measured with mean-normalized L^p norms on the natural periodicity window.

Caps tile [-1,1)^d by disjoint half-open cubes anchored on delta Z^d, so
reconstruction and Plancherel additivity across caps are exact.  Data are
superpositions of point masses (xi_j, omega_j, amp_j) with |omega_j -
|xi_j|^2| <= delta^2 / 2.  When the xi_j lie on the (delta/2) grid the wave
sum is periodic with period 4 pi / delta per space axis and 8 pi / delta^2 in
time, and the L^p quadrature (FFT per time slice on a sufficiently refined
grid) is exact for even p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .bumps import mollified_indicator

__all__ = [
    "Cap",
    "CapCover",
    "NeighborhoodData",
    "cap_cover",
    "cap_restrict",
    "random_neighborhood",
    "extension_lp_norm",
    "decoupling_ratio",
    "build_taper",
]

INF = math.inf


@dataclass(frozen=True)
class Cap:
    """One cap: half-open cube anchor + [0, delta)^d in base frequency, with
    the delta^2 vertical slab around the paraboloid over it."""

    anchor: tuple[float, ...]
    delta: float

    @property
    def center(self) -> tuple[float, ...]:
        return tuple(a + self.delta / 2.0 for a in self.anchor)

    def contains(self, xis: NDArray[np.float64]) -> NDArray[np.bool_]:
        """Half-open membership of base frequencies, rows of shape (d,)."""
        xis = np.atleast_2d(xis)
        lo = np.asarray(self.anchor)
        return np.all((xis >= lo) & (xis < lo + self.delta), axis=1)


@dataclass(frozen=True)
class CapCover:
    """Disjoint tiling of [-1,1)^d by (2/delta)^d caps of side delta."""

    d: int
    delta: float
    caps: tuple[Cap, ...]


def cap_cover(d: int, delta: float) -> CapCover:
    """Cover with cube anchors on delta Z^d cap [-1,1)^d.  delta must be a
    dyadic 2^{-j}, j >= 0."""
    if d < 1:
        raise ValueError("dimension d must be >= 1")
    j = -math.log2(delta)
    if not (delta > 0 and abs(j - round(j)) < 1e-12 and round(j) >= 0):
        raise ValueError(f"delta must be 2^-j with integer j >= 0, got {delta}")
    per_axis = int(round(2.0 / delta))
    anchors_1d = -1.0 + delta * np.arange(per_axis)
    grids = np.meshgrid(*([anchors_1d] * d), indexing="ij")
    anchors = np.stack([g.ravel() for g in grids], axis=1)
    caps = tuple(Cap(tuple(a), delta) for a in anchors)
    return CapCover(d, delta, caps)


@dataclass
class NeighborhoodData:
    """Point-mass frequency data in the delta^2 neighborhood of the
    paraboloid: rows xis[j] in [-1,1]^d, heights omegas[j] with
    |omegas[j] - |xis[j]|^2| <= delta^2 / 2, complex amplitudes amps[j]."""

    delta: float
    xis: NDArray[np.float64]
    omegas: NDArray[np.float64]
    amps: NDArray[np.complex128] = field(repr=False)

    def __post_init__(self) -> None:
        self.xis = np.atleast_2d(np.asarray(self.xis, dtype=float))
        self.omegas = np.asarray(self.omegas, dtype=float).ravel()
        self.amps = np.asarray(self.amps, dtype=np.complex128).ravel()
        if not (self.xis.shape[0] == self.omegas.size == self.amps.size):
            raise ValueError("xis, omegas, amps must have matching length")
        if np.any(np.abs(self.xis) > 1.0 + 1e-12):
            raise ValueError("base frequencies must lie in [-1, 1]^d")
        slab = np.abs(self.omegas - np.sum(self.xis**2, axis=1))
        if np.any(slab > self.delta**2 / 2.0 + 1e-12):
            raise ValueError("heights violate the delta^2/2 slab condition")

    @property
    def d(self) -> int:
        return self.xis.shape[1]

    def l2(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amps) ** 2)))


def cap_restrict(F: NeighborhoodData, theta: Cap) -> NeighborhoodData:
    """Zero every amplitude outside the cap.  Summing the restrictions over a
    cover reproduces F exactly (disjoint tiling)."""
    if len(theta.anchor) != F.d:
        raise ValueError("cap dimension does not match data dimension")
    mask = theta.contains(F.xis)
    return NeighborhoodData(F.delta, F.xis, F.omegas, np.where(mask, F.amps, 0.0))


def random_neighborhood(cover: CapCover, seed: int) -> NeighborhoodData:
    """One unit-modulus random-phase point mass per cap, placed at the cap
    center on the paraboloid itself."""
    rng = np.random.default_rng(seed)
    centers = np.array([c.center for c in cover.caps])
    omegas = np.sum(centers**2, axis=1)
    amps = np.exp(2j * np.pi * rng.random(len(cover.caps)))
    return NeighborhoodData(cover.delta, centers, omegas, amps)


def build_taper(margin: float = 0.25):
    """Smooth weight w(u_1, ..., u_k) = prod mollified indicators of [-1/2,
    1/2] in normalized window coordinates; optional taper for the L^p
    window."""

    def taper(*coords: NDArray[np.float64]) -> NDArray[np.float64]:
        w = None
        for u in coords:
            cut = mollified_indicator(u, 0.5, margin / 2.0)
            w = cut if w is None else w * cut
        return w

    return taper


def _lattice_indices(F: NeighborhoodData) -> NDArray[np.int64]:
    step = F.delta / 2.0
    scaled = F.xis / step
    idx = np.round(scaled).astype(np.int64)
    if not np.allclose(scaled, idx, atol=1e-9):
        raise ValueError(
            "base frequencies must lie on the delta/2 grid for FFT evaluation"
        )
    return idx


def extension_lp_norm(
    F: NeighborhoodData, p: float, taper=None, batch: int = 64
) -> float:
    """Mean-normalized L^p norm over the periodicity window of

        f(x, t) = sum_j amps[j] e^{i (xis[j].x + omegas[j] t)}.

    Physical samples come from a d-dimensional inverse FFT per time slice.
    The spatial grid is refined until |f|^p is integrated exactly (even p);
    p = inf is a max over samples.  A ``taper`` weight (from build_taper)
    multiplies |f|^p before averaging.
    """
    if not p >= 1.0:
        raise ValueError(f"Lebesgue exponent must be >= 1 or inf, got {p}")
    live = np.abs(F.amps) > 0.0
    if not np.any(live):
        return 0.0
    if np.count_nonzero(live) == 1 and taper is None:
        # single plane wave: |f| is constant
        return float(np.abs(F.amps[live][0]))

    xis = F.xis[live]
    omegas = F.omegas[live]
    amps = F.amps[live]
    d = F.d
    idx = _lattice_indices(NeighborhoodData(F.delta, xis, omegas, amps))

    pw = 8.0 if p == INF else max(p, 2.0)
    a_max = int(np.max(np.abs(idx)))
    n_x = 1 << max(4, int(np.ceil(np.log2(pw * a_max + 1.0))))
    # time frequencies in units 2 pi / T_t, T_t = 8 pi / delta^2
    t_units = omegas * (4.0 / F.delta**2)
    span_t = float(np.max(t_units) - np.min(t_units))
    n_t = 1 << max(4, int(np.ceil(np.log2(pw / 2.0 * span_t + 1.0))))

    scatter = np.zeros((n_x,) * d, dtype=np.complex128)
    flat = np.ravel_multi_index(tuple((idx % n_x).T), (n_x,) * d)

    t_window = 8.0 * np.pi / F.delta**2
    x_window = 4.0 * np.pi / F.delta
    t_nodes = t_units / n_t  # phase e^{2 pi i * t_units * j / n_t}

    if taper is not None:
        axes = [
            ((np.arange(n_x) * (x_window / n_x)) - x_window / 2.0) / x_window
            for _ in range(d)
        ]
        grids = np.meshgrid(*axes, indexing="ij")
        # phases below place x in [0, x_window); recenter for the taper
        ts_all = (np.arange(n_t) * (t_window / n_t) - t_window / 2.0) / t_window

    acc = 0.0
    sup = 0.0
    wsum = 0.0
    for start in range(0, n_t, batch):
        js = np.arange(start, min(start + batch, n_t))
        phases = np.exp(2j * np.pi * np.outer(js, t_nodes))  # (B, n_pts)
        block = np.zeros((js.size,) + (n_x,) * d, dtype=np.complex128)
        bf = block.reshape(js.size, -1)
        for b in range(js.size):
            np.add.at(bf[b], flat, amps * phases[b])
        vals = np.fft.ifftn(block, axes=tuple(range(1, d + 1))) * n_x**d
        a = np.abs(vals)
        if p == INF:
            sup = max(sup, float(a.max()))
            continue
        if taper is None:
            acc += float(np.sum(a**p))
            wsum += a.size
        else:
            for b, j in enumerate(js):
                w = taper(*grids, np.full_like(grids[0], ts_all[j]))
                acc += float(np.sum(w * a[b] ** p))
                wsum += float(np.sum(w))
    if p == INF:
        return sup
    return float((acc / wsum) ** (1.0 / p))


def decoupling_ratio(
    F: NeighborhoodData, delta: float, p: float, taper=None
) -> float:
    """||f||_{L^p} / (sum_theta ||f_theta||_{L^p}^2)^{1/2} over the disjoint
    cap cover at scale delta."""
    if abs(delta - F.delta) > 1e-12:
        raise ValueError("cap scale must match the data scale")
    cover = cap_cover(F.d, delta)
    num = extension_lp_norm(F, p, taper=taper)
    sq = 0.0
    for theta in cover.caps:
        piece = cap_restrict(F, theta)
        if not np.any(np.abs(piece.amps) > 0.0):
            continue
        sq += extension_lp_norm(piece, p, taper=taper) ** 2
    if sq == 0.0:
        raise ValueError("data has no mass in any cap")
    return num / math.sqrt(sq)
