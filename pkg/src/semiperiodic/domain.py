"""
Discretized product domain T^m x R^n and the mixed Fourier transform.

The torus factor carries a discrete Fourier series with integer modes
k in [-M, M]^m; the Euclidean factor is periodized on the box [-L, L)^n
and carries a discretized continuous transform on the frequency grid
xi = l * dxi, dxi = pi / L.  The transform convention is

    fhat(k, xi) = (2 pi)^{-(m+n)} \int_{T^m x R^n} f(x, y) e^{-i(kx + xi y)} dx dy
    f(x, y)     = sum_k \int fhat(k, xi) e^{i(kx + xi y)} dxi

with the dxi integral realized as a dxi-weighted sum.  Parseval then reads

    ||f||_{L^2}^2 = (2 pi)^{m+n} * sum_k dxi^n sum_xi |fhat(k, xi)|^2.

Array layout: the first m axes of every samples/coeffs array are torus axes
(length 2M+1, modes ordered -M..M; spatial grid x_j = 2 pi j / N_T), the
last n axes are Euclidean (length N_R, centered grids y_j = (j - N_R/2) dy
and xi_l = (l - N_R/2) dxi).
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "TimePlan",
    "DomainSpec",
    "Field",
    "Spectrum",
    "Trajectory",
    "make_domain",
    "to_spectrum",
    "to_field",
    "padded_samples",
    "save_field",
    "load_field",
    "FieldCache",
]


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class TimePlan:
    """Quadrature rule for the time interval [0, 1].

    ``times`` are strictly increasing nodes in [0, 1]; ``weights`` are
    positive and sum to 1 (normalized Lebesgue measure of [0, 1]).
    """

    times: NDArray[np.float64]
    weights: NDArray[np.float64]

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "weights", w)
        if t.size == 0:
            raise ValueError("empty time plan")
        if t.shape != w.shape:
            raise ValueError("times and weights must have matching shapes")
        if np.any(t < 0.0) or np.any(t > 1.0):
            raise ValueError("time nodes must lie in [0, 1]")
        if t.size > 1 and np.any(np.diff(t) <= 0.0):
            raise ValueError("time nodes must be strictly increasing")
        if np.any(w <= 0.0):
            raise ValueError("weights must be positive")
        if abs(float(w.sum()) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1 within 1e-12")

    @staticmethod
    def single(t: float = 0.0) -> "TimePlan":
        return TimePlan(np.array([float(t)]), np.array([1.0]))

    @staticmethod
    def uniform(count: int) -> "TimePlan":
        """Midpoint rule with ``count`` nodes on [0, 1]."""
        if count < 1:
            raise ValueError("count must be >= 1")
        t = (np.arange(count) + 0.5) / count
        w = np.full(count, 1.0 / count)
        return TimePlan(t, w)

    @staticmethod
    def stratified(window: float, fine: int, coarse: int) -> "TimePlan":
        """Dense midpoint sub-grid on [0, window], coarse one on [window, 1]."""
        if not 0.0 < window < 1.0:
            raise ValueError("window must lie in (0, 1)")
        if fine < 1 or coarse < 1:
            raise ValueError("fine and coarse counts must be >= 1")
        tf = window * (np.arange(fine) + 0.5) / fine
        tc = window + (1.0 - window) * (np.arange(coarse) + 0.5) / coarse
        wf = np.full(fine, window / fine)
        wc = np.full(coarse, (1.0 - window) / coarse)
        # renormalize away float drift so the sum-to-1 invariant is exact
        w = np.concatenate([wf, wc])
        w /= w.sum()
        return TimePlan(np.concatenate([tf, tc]), w)

    @staticmethod
    def log_stratified(window: float, fine: int, per_octave: int) -> "TimePlan":
        """Dense midpoint sub-grid on [0, window], then midpoint nodes on
        dyadic octaves [window 2^j, window 2^{j+1}] up to 1.  Resolves
        integrands that decay like a power of t away from a short active
        window."""
        if not 0.0 < window < 1.0:
            raise ValueError("window must lie in (0, 1)")
        if fine < 1 or per_octave < 1:
            raise ValueError("fine and per_octave counts must be >= 1")
        times = [window * (np.arange(fine) + 0.5) / fine]
        weights = [np.full(fine, window / fine)]
        lo = window
        while lo < 1.0:
            hi = min(2.0 * lo, 1.0)
            times.append(lo + (hi - lo) * (np.arange(per_octave) + 0.5) / per_octave)
            weights.append(np.full(per_octave, (hi - lo) / per_octave))
            lo = hi
        w = np.concatenate(weights)
        w /= w.sum()
        return TimePlan(np.concatenate(times), w)

    @staticmethod
    def gauss(count: int) -> "TimePlan":
        """Gauss-Legendre nodes mapped to [0, 1]; spectrally accurate for
        smooth integrands."""
        x, w = np.polynomial.legendre.leggauss(count)
        return TimePlan((x + 1.0) / 2.0, w / w.sum())


@dataclass(frozen=True)
class DomainSpec:
    """Discretization of T^m x R^n.

    Attributes:
        m: number of torus dimensions (>= 1).
        n: number of Euclidean dimensions (>= 1).
        torus_modes: per-axis mode cutoff M; modes k in [-M, M].
        box_halfwidth: L > 0, Euclidean box [-L, L) per axis.
        euclid_points: per-axis sample count N_R (power of two).
        time_plan: optional default time quadrature.
    """

    m: int
    n: int
    torus_modes: int
    box_halfwidth: float
    euclid_points: int
    time_plan: TimePlan | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be >= 1")
        if self.torus_modes < 1:
            raise ValueError("torus_modes must be >= 1")
        if not self.box_halfwidth > 0:
            raise ValueError("box_halfwidth must be positive")
        if not _is_power_of_two(self.euclid_points):
            raise ValueError("euclid_points must be a power of two")

    # -- derived spacings ---------------------------------------------------

    @property
    def torus_points(self) -> int:
        """Spatial points per torus axis, N_T = 2M + 1."""
        return 2 * self.torus_modes + 1

    @property
    def dx(self) -> float:
        return 2.0 * np.pi / self.torus_points

    @property
    def dy(self) -> float:
        return 2.0 * self.box_halfwidth / self.euclid_points

    @property
    def dxi(self) -> float:
        return np.pi / self.box_halfwidth

    @cached_property
    def k_axis(self) -> NDArray[np.int64]:
        M = self.torus_modes
        return np.arange(-M, M + 1)

    @cached_property
    def x_axis(self) -> NDArray[np.float64]:
        return np.arange(self.torus_points) * self.dx

    @cached_property
    def y_axis(self) -> NDArray[np.float64]:
        N = self.euclid_points
        return (np.arange(N) - N // 2) * self.dy

    @cached_property
    def xi_axis(self) -> NDArray[np.float64]:
        N = self.euclid_points
        return (np.arange(N) - N // 2) * self.dxi

    @property
    def grid_shape(self) -> tuple[int, ...]:
        return (self.torus_points,) * self.m + (self.euclid_points,) * self.n

    @property
    def cell_volume(self) -> float:
        """Spatial quadrature weight per grid cell (trapezoid on the torus,
        rectangle on the box; both exact for band-limited integrands)."""
        return self.dx**self.m * self.dy**self.n

    @property
    def spectral_cell(self) -> float:
        """Parseval weight per coefficient: (2 pi)^{m+n} dxi^n."""
        return (2.0 * np.pi) ** (self.m + self.n) * self.dxi**self.n

    def freq_sq_1d(self, axis: int) -> NDArray[np.float64]:
        """Squared frequency values along one array axis."""
        if axis < self.m:
            return self.k_axis.astype(float) ** 2
        return self.xi_axis**2

    def memory_estimate(self) -> int:
        """Bytes of one complex128 array on the full product grid."""
        return 16 * int(np.prod(self.grid_shape))


def make_domain(
    m: int,
    n: int,
    torus_modes: int,
    box_halfwidth: float,
    euclid_points: int,
    time_plan: TimePlan | None = None,
) -> DomainSpec:
    """Validate and build a DomainSpec."""
    return DomainSpec(m, n, torus_modes, float(box_halfwidth), euclid_points, time_plan)


@dataclass
class Field:
    """Complex samples on the (torus grid) x (Euclidean grid) product."""

    domain: DomainSpec
    samples: NDArray[np.complex128]

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=np.complex128)
        if self.samples.shape != self.domain.grid_shape:
            raise ValueError(
                f"samples shape {self.samples.shape} does not match domain "
                f"grid {self.domain.grid_shape}"
            )

    def l2(self) -> float:
        """L^2(T^m x R^n) norm by spatial quadrature."""
        return float(
            np.sqrt(np.sum(np.abs(self.samples) ** 2) * self.domain.cell_volume)
        )

    def leak_fraction(self) -> float:
        """Fraction of L^2 mass outside the central half of the Euclidean box."""
        d = self.domain
        mass = np.abs(self.samples) ** 2
        total = float(mass.sum())
        if total == 0.0:
            return 0.0
        inner = mass
        for j in range(d.n):
            axis = d.m + j
            keep = np.abs(d.y_axis) <= d.box_halfwidth / 2.0
            inner = np.compress(keep, inner, axis=axis)
        return 1.0 - float(inner.sum()) / total


@dataclass
class Spectrum:
    """Fourier coefficients fhat(k, xi) on Z^m (truncated) x (xi grid)."""

    domain: DomainSpec
    coeffs: NDArray[np.complex128]

    def __post_init__(self) -> None:
        self.coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if self.coeffs.shape != self.domain.grid_shape:
            raise ValueError(
                f"coeffs shape {self.coeffs.shape} does not match domain "
                f"grid {self.domain.grid_shape}"
            )

    def l2(self) -> float:
        """L^2 norm via Parseval."""
        return float(
            np.sqrt(np.sum(np.abs(self.coeffs) ** 2) * self.domain.spectral_cell)
        )

    def copy(self) -> "Spectrum":
        return Spectrum(self.domain, self.coeffs.copy())


@dataclass
class Trajectory:
    """Time-sampled family of Fields over [0, 1] with quadrature weights."""

    domain: DomainSpec
    times: NDArray[np.float64]
    weights: NDArray[np.float64]
    fields: list[Field]

    def __post_init__(self) -> None:
        plan = TimePlan(self.times, self.weights)  # re-validates invariants
        self.times = plan.times
        self.weights = plan.weights
        if len(self.fields) != self.times.size:
            raise ValueError("one field per time node required")


# -- transforms -------------------------------------------------------------


def to_spectrum(f: Field) -> Spectrum:
    """Forward mixed transform (exact for grid-representable data)."""
    d = f.domain
    work = f.samples
    for axis in range(d.m):
        work = np.fft.fftshift(np.fft.fft(work, axis=axis), axes=axis)
        work = work / d.torus_points
    for j in range(d.n):
        axis = d.m + j
        work = np.fft.ifftshift(work, axes=axis)
        work = np.fft.fft(work, axis=axis)
        work = np.fft.fftshift(work, axes=axis)
        work = work * (d.dy / (2.0 * np.pi))
    return Spectrum(d, work)


def to_field(F: Spectrum) -> Field:
    """Inverse mixed transform; inverse of :func:`to_spectrum` on
    band-limited data."""
    d = F.domain
    work = F.coeffs
    for axis in range(d.m):
        work = np.fft.ifft(np.fft.ifftshift(work, axes=axis), axis=axis)
        work = work * d.torus_points
    for j in range(d.n):
        axis = d.m + j
        work = np.fft.ifftshift(work, axes=axis)
        work = np.fft.ifft(work, axis=axis)
        work = np.fft.fftshift(work, axes=axis)
        work = work * (d.dxi * d.euclid_points)
    return Field(d, work)


def padded_samples(F: Spectrum, pad: int = 1) -> tuple[NDArray[np.complex128], float]:
    """Evaluate a spectrum on a pad-times-finer spatial grid.

    Zero-padding the centered coefficient array refines the sample grid
    without changing the represented function; needed so that quadrature of
    |f|^p remains exact for p > 2.  Returns (samples, cell weight).
    """
    d = F.domain
    if pad < 1:
        raise ValueError("pad must be >= 1")
    if pad == 1:
        return to_field(F).samples, d.cell_volume
    work = F.coeffs
    weight = 1.0
    for axis in range(d.m):
        N = d.torus_points
        K = pad * N
        work = _embed_centered(work, axis, K)
        work = np.fft.ifft(np.fft.ifftshift(work, axes=axis), axis=axis) * K
        weight *= 2.0 * np.pi / K
    for j in range(d.n):
        axis = d.m + j
        N = d.euclid_points
        K = pad * N
        work = _embed_centered(work, axis, K)
        work = np.fft.ifftshift(work, axes=axis)
        work = np.fft.ifft(work, axis=axis)
        work = np.fft.fftshift(work, axes=axis)
        work = work * (d.dxi * K)
        weight *= d.dy / pad
    return work, weight


def _embed_centered(arr: NDArray, axis: int, K: int) -> NDArray:
    """Embed a centered coefficient axis into a longer centered axis of
    length K, padding with zeros."""
    N = arr.shape[axis]
    if K < N:
        raise ValueError("cannot shrink axis")
    shape = list(arr.shape)
    shape[axis] = K
    out = np.zeros(shape, dtype=arr.dtype)
    lo = K // 2 - N // 2
    sl = [slice(None)] * arr.ndim
    sl[axis] = slice(lo, lo + N)
    out[tuple(sl)] = arr
    return out


# -- serialization ----------------------------------------------------------

_MAGIC = "SEMIPERIODIC-FIELD v1"


def save_field(f: Field, path: str | Path) -> None:
    """Write a Field as a text header plus little-endian float64 pairs
    (re, im), row-major."""
    d = f.domain
    header = (
        f"{_MAGIC} m={d.m} n={d.n} M={d.torus_modes} "
        f"L={d.box_halfwidth!r} NR={d.euclid_points}\n"
    )
    flat = np.ascontiguousarray(f.samples).ravel()
    pairs = np.empty(2 * flat.size, dtype="<f8")
    pairs[0::2] = flat.real
    pairs[1::2] = flat.imag
    with open(path, "wb") as fh:
        fh.write(header.encode("utf-8"))
        fh.write(pairs.tobytes())


def load_field(path: str | Path) -> Field:
    with open(path, "rb") as fh:
        header = fh.readline().decode("utf-8").strip()
        raw = fh.read()
    if not header.startswith(_MAGIC):
        raise ValueError(f"not a field container: {path}")
    kv = dict(tok.split("=") for tok in header[len(_MAGIC):].split())
    domain = make_domain(
        int(kv["m"]), int(kv["n"]), int(kv["M"]), float(kv["L"]), int(kv["NR"])
    )
    pairs = np.frombuffer(raw, dtype="<f8")
    flat = pairs[0::2] + 1j * pairs[1::2]
    return Field(domain, flat.reshape(domain.grid_shape))


class FieldCache:
    """Keyed on-disk cache of expensive fields using the binary container."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.spf"

    def get(self, key: str) -> Field | None:
        p = self._path(key)
        return load_field(p) if p.exists() else None

    def put(self, key: str, f: Field) -> None:
        save_field(f, self._path(key))

    @staticmethod
    def key(domain: DomainSpec, **params) -> str:
        tokens = [f"m{domain.m}", f"n{domain.n}", f"M{domain.torus_modes}",
                  f"L{domain.box_halfwidth:g}", f"N{domain.euclid_points}"]
        tokens += [f"{k}{v:g}" if isinstance(v, float) else f"{k}{v}"
                   for k, v in sorted(params.items())]
        return "-".join(tokens).replace("/", "_")
