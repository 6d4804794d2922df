"""
Semiclassical wave packets and the sharpness families built from them.

The 1-d profile phi has an even, nonnegative, compactly supported transform
phi_hat with phi_hat >= 1 on (-1/2, 1/2).  From it:

    phi_h(y)       = h^{-1/2} phi(y/h)            (Euclidean packet, L^2-normalized)
    phitilde_h(x)  = sqrt(h) sum_k phi_hat(hk) e^{ikx}   (torus packet)

and the tensor families

    part (ii):  f = phitilde_h(x_1)...phitilde_h(x_m) phi_h(y_1)...phi_h(y_n)
    part (i):   each factor of the part-(ii) product evolved backward by
                2 pi - eps0 h (mod 2 pi on the torus, where the flow is
                2 pi periodic in t).

Everything tensors, so experiments work with 1-d factors (Packet1D) and
combine per-axis norms; full product Fields are materialized only on
affordable domains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .bumps import mollified_indicator
from .domain import DomainSpec, Field, Spectrum, TimePlan, to_field

__all__ = [
    "ProfileSpec",
    "PacketParams",
    "Packet1D",
    "build_profile",
    "wavepacket_euclid",
    "wavepacket_torus",
    "extremizer_part_i",
    "extremizer_part_ii",
    "single_cap_data",
    "calibrate_eps0",
    "tensor_evolution_lp",
    "default_euclid_box",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ProfileSpec:
    """Closed-form transform profile: phi_hat = amplitude x mollified
    indicator of [-halfwidth, halfwidth] at width moll_width.

    With the defaults: supp phi_hat = [-0.85, 0.85] subset (-1, 1),
    phi_hat = 1.05 on [-0.55, 0.55], so phi_hat >= 1 on (-1/2, 1/2).
    """

    amplitude: float = 1.05
    halfwidth: float = 0.7
    moll_width: float = 0.15

    @property
    def support_radius(self) -> float:
        return self.halfwidth + self.moll_width

    def phi_hat(self, xi) -> NDArray[np.float64]:
        return self.amplitude * mollified_indicator(
            xi, self.halfwidth, self.moll_width
        )

    def l2(self, dxi: float = 1.0 / 4096.0) -> float:
        """||phi||_{L^2(R)} via Parseval: (2 pi int |phi_hat|^2)^{1/2}."""
        xi = np.arange(-1.0, 1.0, dxi)
        return math.sqrt(TWO_PI * float(np.sum(self.phi_hat(xi) ** 2)) * dxi)


@dataclass(frozen=True)
class PacketParams:
    """Semiclassical scale h and calibration constant eps0."""

    h: float
    eps0: float = 0.25

    def __post_init__(self) -> None:
        if not 0.0 < self.h < 0.5:
            raise ValueError("h must lie in (0, 1/2)")
        if not 0.0 < self.eps0 <= 0.25:
            raise ValueError("eps0 must lie in (0, 1/4]")


def build_profile() -> ProfileSpec:
    return ProfileSpec()


@dataclass
class Packet1D:
    """1-d spectral object on T (kind 'torus', f = sum_k c_k e^{ikx}) or on
    the box [-L, L) (kind 'euclid', f = sum_xi F(xi) e^{i xi y} dxi)."""

    kind: str
    freqs: NDArray[np.float64]
    coeffs: NDArray[np.complex128]
    box_halfwidth: float = 0.0  # euclid only
    dxi: float = field(default=1.0)  # quadrature weight; 1 for torus sums

    def __post_init__(self) -> None:
        if self.kind not in ("torus", "euclid"):
            raise ValueError("kind must be 'torus' or 'euclid'")
        self.freqs = np.asarray(self.freqs, dtype=float)
        self.coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if self.freqs.shape != self.coeffs.shape:
            raise ValueError("freqs and coeffs must have matching shape")

    def l2(self) -> float:
        return math.sqrt(
            TWO_PI * self.dxi * float(np.sum(np.abs(self.coeffs) ** 2))
        )

    def evolve(self, t: float) -> "Packet1D":
        """e^{it d^2/du^2}: multiplier e^{-i t freq^2}."""
        return Packet1D(
            self.kind,
            self.freqs,
            self.coeffs * np.exp(-1j * t * self.freqs**2),
            self.box_halfwidth,
            self.dxi,
        )

    def samples(self, pad: int = 1) -> tuple[NDArray[np.complex128], float]:
        """Uniform physical samples and their spacing, on a pad-times
        refined grid."""
        N = self.coeffs.size
        K = pad * N
        buf = np.zeros(K, dtype=np.complex128)
        lo = K // 2 - N // 2
        buf[lo : lo + N] = self.coeffs
        if self.kind == "torus":
            vals = np.fft.ifft(np.fft.ifftshift(buf)) * K
            return vals, TWO_PI / K
        vals = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(buf))) * (self.dxi * K)
        return vals, 2.0 * self.box_halfwidth / K

    def eval(self, points: NDArray[np.float64]) -> NDArray[np.complex128]:
        """Direct evaluation at arbitrary points (chunked matrix sum)."""
        points = np.asarray(points, dtype=float)
        live = np.abs(self.coeffs) > 0.0
        fr, co = self.freqs[live], self.coeffs[live]
        out = np.empty(points.size, dtype=np.complex128)
        chunk = max(1, (1 << 22) // max(fr.size, 1))
        for s in range(0, points.size, chunk):
            ps = points[s : s + chunk]
            out[s : s + chunk] = np.exp(1j * np.outer(ps, fr)) @ co
        return out * self.dxi

    def lp(self, p: float, pad: int = 1) -> float:
        vals, spacing = self.samples(pad)
        a = np.abs(vals)
        if p == math.inf:
            return float(a.max())
        return float((np.sum(a**p) * spacing) ** (1.0 / p))

    def sup(self, pad: int = 4) -> float:
        return self.lp(math.inf, pad=pad)


def default_euclid_box(h: float) -> float:
    """Box half-width containing a packet dispersed for times up to 2 pi:
    group velocity is at most 2/h, so displacement stays below 8 (2 pi)/h."""
    return 8.0 * TWO_PI / h + 8.0


def wavepacket_euclid(
    h: float,
    profile: ProfileSpec | None = None,
    box_halfwidth: float | None = None,
    points: int | None = None,
) -> Packet1D:
    """phi_h on the box [-L, L): spectral data phi_hat_h(xi) =
    h^{1/2} phi_hat(h xi) on the grid xi = l pi / L."""
    PacketParams(h)
    prof = profile or build_profile()
    L = box_halfwidth if box_halfwidth is not None else default_euclid_box(h)
    if points is None:
        points = 1 << int(math.ceil(math.log2(4.0 * L / h)))
    if points & (points - 1):
        raise ValueError("points must be a power of two")
    dxi = math.pi / L
    xi = (np.arange(points) - points // 2) * dxi
    band = prof.support_radius / h
    if xi[-1] < band or dxi > 0.1 / h:
        raise ValueError(
            f"grid (L={L:g}, N={points}) cannot resolve frequency scale 1/h"
        )
    coeffs = math.sqrt(h) * prof.phi_hat(h * xi) + 0j
    return Packet1D("euclid", xi, coeffs, box_halfwidth=L, dxi=dxi)


def wavepacket_torus(
    h: float, profile: ProfileSpec | None = None, modes: int | None = None
) -> Packet1D:
    """phitilde_h on T: coefficients sqrt(h) phi_hat(hk), |k| <= M."""
    PacketParams(h)
    prof = profile or build_profile()
    M = modes if modes is not None else int(math.ceil(1.0 / h)) + 2
    if M * h < 1.0:
        raise ValueError(f"mode cutoff M={M} below 1/h={1.0 / h:g}")
    k = np.arange(-M, M + 1).astype(float)
    return Packet1D("torus", k, math.sqrt(h) * prof.phi_hat(h * k) + 0j)


# -- product fields on full domains ----------------------------------------


def _axis_fields(
    h: float,
    domain: DomainSpec,
    torus_t: float,
    euclid_t: float,
    profile: ProfileSpec | None,
) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    """1-d factor samples on the domain's own torus and Euclidean grids."""
    tp = wavepacket_torus(h, profile, modes=domain.torus_modes).evolve(torus_t)
    ep = wavepacket_euclid(
        h,
        profile,
        box_halfwidth=domain.box_halfwidth,
        points=domain.euclid_points,
    ).evolve(euclid_t)
    return tp.samples(pad=1)[0], ep.samples(pad=1)[0]


def _tensor_field(
    domain: DomainSpec,
    torus_vals: NDArray[np.complex128],
    euclid_vals: NDArray[np.complex128],
) -> Field:
    ndim = domain.m + domain.n
    out = np.ones((1,) * ndim, dtype=np.complex128)
    for axis in range(ndim):
        v = torus_vals if axis < domain.m else euclid_vals
        shape = [1] * ndim
        shape[axis] = v.size
        out = out * v.reshape(shape)
    return Field(domain, out)


def extremizer_part_ii(
    h: float, domain: DomainSpec, profile: ProfileSpec | None = None
) -> Field:
    """The tensor product phitilde_h(x_1)...phi_h(y_n) on the domain grid."""
    tv, ev = _axis_fields(h, domain, 0.0, 0.0, profile)
    return _tensor_field(domain, tv, ev)


def extremizer_part_i(
    h: float, eps0: float, domain: DomainSpec, profile: ProfileSpec | None = None
) -> Field:
    """Backward-evolved tensor data: each factor evolved by -(2 pi - eps0 h).

    On the torus the flow is 2 pi periodic in t, so the factor is evolved by
    the equivalent short time +eps0 h (exact on integer eigenvalues); the
    Euclidean factor is evolved by the full -(2 pi - eps0 h).
    """
    PacketParams(h, eps0)
    tv, ev = _axis_fields(h, domain, eps0 * h, -(TWO_PI - eps0 * h), profile)
    return _tensor_field(domain, tv, ev)


def single_cap_data(
    h: float, domain: DomainSpec, partition=None
) -> Field:
    """f with fhat = sigma_{K_0}, K_0 = (k_0, 0, ..., 0) along the first
    torus axis, k_0 chosen with 1/(2h) <= k_0 <= 1/h."""
    from .norms import build_partition

    part = partition or build_partition(domain)
    k0 = int(round(0.75 / h))
    lo, hi = int(math.ceil(0.5 / h)), int(math.floor(1.0 / h))
    k0 = min(max(k0, lo), hi)
    if k0 > domain.torus_modes:
        raise ValueError(
            f"no admissible K_0: need torus modes >= {k0}, have {domain.torus_modes}"
        )
    ndim = domain.m + domain.n
    coeffs = np.ones((1,) * ndim)
    for axis in range(ndim):
        center = k0 if axis == 0 else 0
        mask = part.axis_mask(axis, center)
        shape = [1] * ndim
        shape[axis] = mask.size
        coeffs = coeffs * mask.reshape(shape)
    return to_field(Spectrum(domain, coeffs.astype(np.complex128)))


# -- calibration ------------------------------------------------------------


def calibrate_eps0(
    domain: DomainSpec,
    h_list,
    profile: ProfileSpec | None = None,
    threshold: float = 0.1,
) -> float:
    """Largest eps0 in {2^-2, ..., 2^-6} such that for every h in h_list the
    1-d factors keep pointwise size: for all |tau| <= eps0 h^2 and
    |u| <= eps0 h,

        |e^{i tau Lap_T} phitilde_h(u)| >= threshold^{1/m} h^{-1/2}
        |e^{i tau Lap_R} phi_h(u)|      >= threshold^{1/n} h^{-1/2}

    which tensor to the product bounds threshold * h^{-(m+n)/2}."""
    h_list = sorted(set(float(h) for h in h_list))
    if not h_list:
        raise ValueError("h_list must be nonempty")
    prof = profile or build_profile()
    t_bound = threshold ** (1.0 / domain.m)
    e_bound = threshold ** (1.0 / domain.n)

    packets = {}
    for h in h_list:
        packets[h] = (
            wavepacket_torus(h, prof),
            wavepacket_euclid(h, prof, box_halfwidth=16.0,
                              points=1 << int(math.ceil(math.log2(64.0 / h)))),
        )

    for eps0 in (0.25, 0.125, 0.0625, 0.03125, 0.015625):
        ok = True
        for h in h_list:
            tp, ep = packets[h]
            taus = np.linspace(-eps0 * h * h, eps0 * h * h, 9)
            xs = np.linspace(-eps0 * h, eps0 * h, 9)
            floor_val = 1.0 / math.sqrt(h)
            for tau in taus:
                if np.min(np.abs(tp.evolve(tau).eval(xs))) < t_bound * floor_val:
                    ok = False
                    break
                if np.min(np.abs(ep.evolve(tau).eval(xs))) < e_bound * floor_val:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return eps0
    raise ValueError("no eps0 in the search set satisfies the pointwise bounds")


# -- tensor space-time norms ------------------------------------------------


def tensor_evolution_lp(
    h: float,
    m: int,
    n: int,
    p: float,
    plan: TimePlan,
    torus_t0: float = 0.0,
    euclid_t0: float = 0.0,
    profile: ProfileSpec | None = None,
    euclid_box: float | None = None,
) -> float:
    """||e^{iuLap}(packet tensor)||_{L^p(T^m x R^n x [0,1])} via the exact
    factorization of the product flow:

        ||f||_p^p = sum_u w_u ||a_u||_{L^p(T)}^{pm} ||b_u||_{L^p(R)}^{pn}

    with a_u, b_u the 1-d factors at time u (started from torus_t0 /
    euclid_t0).  Only 1-d grids are ever materialized.
    """
    prof = profile or build_profile()
    tp = wavepacket_torus(h, prof).evolve(torus_t0)
    L = euclid_box if euclid_box is not None else 2.0 / h + 8.0
    npts = 1 << int(math.ceil(math.log2(8.0 * L / h)))
    ep = wavepacket_euclid(h, prof, box_halfwidth=L, points=npts).evolve(euclid_t0)
    pad_t = max(2, int(math.ceil(p / 2.0)))
    acc = 0.0
    for u, w in zip(plan.times, plan.weights):
        a = tp.evolve(u).lp(p, pad=pad_t)
        b = ep.evolve(u).lp(p, pad=1)
        acc += w * a ** (p * m) * b ** (p * n)
    return acc ** (1.0 / p)
