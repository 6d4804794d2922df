"""End-to-end acceptance checks.

Each test prints one `[pass]` / `[FAIL]` line (directly to the terminal, so
the lines survive output capture) and then asserts, so the suite both reports
and enforces every criterion.
"""

import math
import sys
from fractions import Fraction

import numpy as np
import pytest

from semiperiodic.decoupling import (
    NeighborhoodData,
    cap_cover,
    decoupling_ratio,
    random_neighborhood,
)
from semiperiodic.domain import make_domain, to_field, to_spectrum
from semiperiodic.norms import (
    box_project,
    build_dyadic,
    build_partition,
    lp_project,
    modulation_norm,
)
from semiperiodic.propagator import propagate
from semiperiodic.scaling import (
    ExperimentConfig,
    alpha_modulation,
    alpha_modulation_necessity,
    alpha_sobolev,
    rescaling_pair,
    run_experiment,
)

H_SCALES = (2**-3, 2**-4, 2**-5, 2**-6, 2**-7)


@pytest.fixture
def report(capsys):
    def _report(number: int, text: str, ok: bool) -> None:
        verdict = "pass" if ok else "FAIL"
        with capsys.disabled():
            sys.stdout.write(f"\n[{verdict}] criterion {number}: {text}\n")
            sys.stdout.flush()
        assert ok, f"criterion {number}: {text}"

    return _report


def test_criterion_1_propagator_exactness(report):
    from semiperiodic.scaling import random_band_limited

    worst = 0.0
    cases = [(1, 1, make_domain(1, 1, 8, 12.0, 128), 25),
             (2, 1, make_domain(2, 1, 6, 10.0, 64), 25)]
    for m, n, d, count in cases:
        for seed in range(count):
            F = random_band_limited(d, 5.0, seed)
            ref = np.max(np.abs(F.coeffs))

            # L^2 isometry
            worst = max(worst, abs(propagate(F, 0.37).l2() - F.l2()) / F.l2())

            # group law
            g = propagate(propagate(F, 0.21), 0.34).coeffs
            worst = max(
                worst, float(np.max(np.abs(g - propagate(F, 0.55).coeffs))) / ref
            )

            # 2 pi periodicity of the torus flow (purely periodic content)
            only = np.zeros(d.grid_shape, dtype=complex)
            mid = tuple([slice(None)] * m + [d.euclid_points // 2] * n)
            only[mid] = F.coeffs[mid]
            from semiperiodic.domain import Spectrum

            F0 = Spectrum(d, only)
            a = propagate(F0, 0.4 + 2 * math.pi).coeffs
            b = propagate(F0, 0.4).coeffs
            worst = max(worst, float(np.max(np.abs(a - b))) / ref)

            # tensor factorization of the product flow
            rng = np.random.default_rng(seed)
            axes = []
            for axis in range(m + n):
                size = d.grid_shape[axis]
                v = rng.standard_normal(size) + 1j * rng.standard_normal(size)
                if axis >= m:
                    v = v * np.exp(-d.xi_axis**2)
                axes.append(v)
            prod = np.ones((1,) * (m + n), dtype=complex)
            for axis, v in enumerate(axes):
                shape = [1] * (m + n)
                shape[axis] = v.size
                prod = prod * v.reshape(shape)
            t = 0.61
            joint = propagate(Spectrum(d, prod), t).coeffs
            split = np.ones((1,) * (m + n), dtype=complex)
            for axis, v in enumerate(axes):
                w = v * np.exp(-1j * t * d.freq_sq_1d(axis))
                shape = [1] * (m + n)
                shape[axis] = w.size
                split = split * w.reshape(shape)
            worst = max(
                worst, float(np.max(np.abs(joint - split)) / np.max(np.abs(joint)))
            )
    report(
        1,
        f"propagator exactness on 50 seeded fields, worst error {worst:.2e}",
        worst <= 1e-10,
    )


def test_criterion_2_rescaling_identity(report):
    worst = 0.0
    for p in (2.0, 4.0):
        for R in (2, 4):
            lhs, rhs = rescaling_pair(p, R, seed=0)
            worst = max(worst, abs(lhs - rhs) / rhs)
    report(
        2,
        f"parabolic rescaling identity, worst relative gap {worst:.2e}",
        worst <= 1e-6,
    )


def test_criterion_3_machinery(report):
    from semiperiodic.scaling import random_band_limited

    d = make_domain(1, 1, 8, 64.0, 512)
    part = build_partition(d)
    ok = True

    # partition of unity sums to 1 on both frequency grids
    for grid in (d.k_axis.astype(float), d.xi_axis):
        total = np.zeros_like(grid)
        for K in range(int(grid.min()) - 2, int(grid.max()) + 3):
            total += part.sigma(grid - K)
        ok = ok and float(np.max(np.abs(total - 1.0))) <= 1e-12

    f = to_field(random_band_limited(d, 5.0, 0))
    peak = float(np.max(np.abs(f.samples)))

    # frequency-cube pieces reassemble the field
    acc = np.zeros(d.grid_shape, dtype=complex)
    for K1 in range(-7, 8):
        for K2 in range(-7, 8):
            acc += box_project(f, (K1, K2), part).samples
    ok = ok and float(np.max(np.abs(acc - f.samples))) <= 1e-10 * peak

    # dyadic annulus pieces reassemble the field
    fam = build_dyadic(d)
    acc = np.zeros(d.grid_shape, dtype=complex)
    for j in range(fam.levels + 1):
        acc += lp_project(f, j, fam).samples
    ok = ok and float(np.max(np.abs(acc - f.samples))) <= 1e-10 * peak

    # ell^q monotonicity of the modulation norms
    mvals = [modulation_norm(f, 4.0, q, 0.0) for q in (1.0, 2.0, 4.0, math.inf)]
    ok = ok and all(b <= a * (1 + 1e-12) for a, b in zip(mvals, mvals[1:]))

    # M_{2,2} and L^2 are equivalent with constants [2^{-(m+n)/2}, 1]
    v = modulation_norm(f, 2.0, 2.0, 0.0)
    l2 = f.l2()
    ok = ok and (2.0 ** (-1.0) * l2 - 1e-9 <= v <= l2 + 1e-9)

    report(3, "partition, projections, modulation-norm structure", ok)


def test_criterion_4_dispersion_rates(report):
    slopes = {}
    for kind, pred, tol in (
        ("dispersion-euclid", 0.5, 0.1),
        ("dispersion-torus", 0.0, 0.15),
    ):
        cfg = ExperimentConfig(kind=kind, scales=H_SCALES)
        rep = run_experiment(cfg)
        s = rep.series[0]
        slopes[kind] = (s.fitted_slope, s.passed, pred, tol)
    ok = all(v[1] for v in slopes.values())
    detail = ", ".join(
        f"{k} slope {v[0]:+.3f} (target {v[2]:+g} +- {v[3]:g})"
        for k, v in slopes.items()
    )
    report(4, f"dispersion rates: {detail}", ok)


def test_criterion_5_backward_packet_rates(report):
    cfg = ExperimentConfig(
        kind="part-i-necessity", p=4.0, q=8.0, r=8.0, alpha=0.0, scales=H_SCALES
    )
    rep = run_experiment(cfg)
    data, evo = rep.series
    ok = data.passed and evo.passed
    report(
        5,
        f"backward-packet data slope {data.fitted_slope:+.3f} "
        f"(target +0.25 +- 0.1), evolution slope {evo.fitted_slope:+.3f} "
        f"(must be <= -0.4)",
        ok,
    )


def test_criterion_6_packet_and_cap_rates(report):
    cfg = ExperimentConfig(
        kind="part-ii-modulation", p=4.0, q=1.0, r=8.0, alpha=0.0, scales=H_SCALES
    )
    rep = run_experiment(cfg)
    mod, evo = rep.series

    cap_cfg = ExperimentConfig(
        kind="single-cap", p=4.0, q=1.0, alpha=1.0, scales=H_SCALES[1:]
    )
    cap_rep = run_experiment(cap_cfg)
    cmod, cevo = cap_rep.series

    ok = mod.passed and evo.passed and cmod.passed and cevo.passed
    report(
        6,
        f"packet modulation slope {mod.fitted_slope:+.3f} (target -1 +- 0.1), "
        f"evolution slope {evo.fitted_slope:+.3f} (<= -0.4); single-cap "
        f"modulation {cmod.fitted_slope:+.3f} (target -1 +- 0.05), evolution "
        f"{cevo.fitted_slope:+.3f} (target 0 +- 0.1)",
        ok,
    )


def test_criterion_7_strichartz_endpoint(report):
    cfg = ExperimentConfig(
        kind="strichartz-endpoint", p=4.0, scales=(4, 8, 16, 32), seed=0
    )
    rep = run_experiment(cfg)
    s = rep.series[0]
    report(
        7,
        f"endpoint space-time ratio slope {s.fitted_slope:+.3f} (must be <= 0.1)",
        s.passed,
    )


def test_criterion_8_decoupling(report):
    cfg = ExperimentConfig(
        kind="decoupling-ratio",
        m=1,
        n=1,
        p=4.0,
        scales=(0.25, 0.125, 0.0625),
        seed=0,
    )
    rep = run_experiment(cfg)
    s = rep.series[0]
    ok = s.passed

    # single live cap: ratio exactly 1
    cover = cap_cover(2, 0.25)
    F = random_neighborhood(cover, 1)
    amps = np.zeros_like(F.amps)
    amps[5] = F.amps[5]
    single = NeighborhoodData(F.delta, F.xis, F.omegas, amps)
    ok = ok and decoupling_ratio(single, 0.25, 4.0) == 1.0

    # orthogonality: p = 2 ratio at most 1
    ok = ok and decoupling_ratio(F, 0.25, 2.0) <= 1.0 + 1e-10

    report(
        8,
        f"decoupling-ratio slope {s.fitted_slope:+.3f} (<= 0.2), single-cap "
        f"ratio 1, orthogonal p=2 ratio <= 1",
        ok,
    )


def test_criterion_9_threshold_table(report):
    ok = (
        alpha_sobolev(1, 1, 4) == Fraction(1, 4)
        and alpha_modulation(1, 1, 3, 2) == Fraction(0)
        and alpha_modulation_necessity(1, 1, 4, 1) == Fraction(0)
    )
    report(9, "threshold table reference values exact", ok)
