import numpy as np
import pytest

from semiperiodic.decoupling import (
    Cap,
    NeighborhoodData,
    build_taper,
    cap_cover,
    cap_restrict,
    decoupling_ratio,
    extension_lp_norm,
    random_neighborhood,
)


class TestCapCover:
    def test_cap_counts(self):
        assert len(cap_cover(1, 0.5).caps) == 4
        assert len(cap_cover(2, 0.25).caps) == 64
        for d in (1, 2, 3):
            assert len(cap_cover(d, 1.0).caps) == 2**d

    def test_non_dyadic_rejected(self):
        with pytest.raises(ValueError):
            cap_cover(1, 0.3)
        with pytest.raises(ValueError):
            cap_cover(1, 2.0)
        with pytest.raises(ValueError):
            cap_cover(0, 0.5)

    def test_disjoint_half_open_tiling(self):
        cover = cap_cover(2, 0.5)
        pts = np.random.default_rng(0).uniform(-1.0, 1.0 - 1e-9, size=(200, 2))
        hits = np.zeros(200, dtype=int)
        for cap in cover.caps:
            hits += cap.contains(pts).astype(int)
        assert np.all(hits == 1)

    def test_center(self):
        cap = Cap((-1.0, 0.5), 0.5)
        assert cap.center == (-0.75, 0.75)


class TestNeighborhoodData:
    def test_slab_violation_rejected(self):
        with pytest.raises(ValueError):
            NeighborhoodData(
                0.25,
                xis=np.array([[0.5]]),
                omegas=np.array([0.5]),  # |0.5 - 0.25| > delta^2/2
                amps=np.array([1.0 + 0j]),
            )

    def test_out_of_range_base_rejected(self):
        with pytest.raises(ValueError):
            NeighborhoodData(
                0.25,
                xis=np.array([[1.5]]),
                omegas=np.array([2.25]),
                amps=np.array([1.0 + 0j]),
            )

    def test_reconstruction_over_caps(self):
        cover = cap_cover(2, 0.25)
        F = random_neighborhood(cover, 7)
        acc = np.zeros_like(F.amps)
        for theta in cover.caps:
            acc = acc + cap_restrict(F, theta).amps
        assert np.allclose(acc, F.amps)

    def test_plancherel_additivity(self):
        cover = cap_cover(1, 0.25)
        F = random_neighborhood(cover, 8)
        total = sum(cap_restrict(F, th).l2() ** 2 for th in cover.caps)
        assert total == pytest.approx(F.l2() ** 2, rel=1e-12)

    def test_refinement_children_sum_to_parent(self):
        coarse = cap_cover(1, 0.5)
        fine = cap_cover(1, 0.25)
        F = random_neighborhood(fine, 9)
        for parent in coarse.caps:
            direct = cap_restrict(F, parent).amps
            acc = np.zeros_like(F.amps)
            for child in fine.caps:
                if parent.contains(np.array([child.center]))[0]:
                    acc = acc + cap_restrict(F, child).amps
            assert np.allclose(acc, direct)


class TestExtensionNorm:
    def test_p2_equals_l2_of_amplitudes(self):
        cover = cap_cover(1, 0.25)
        F = random_neighborhood(cover, 10)
        assert extension_lp_norm(F, 2.0) == pytest.approx(F.l2(), rel=1e-10)

    def test_single_wave_constant_modulus(self):
        F = NeighborhoodData(
            0.5,
            xis=np.array([[0.25]]),
            omegas=np.array([0.0625]),
            amps=np.array([1.3 - 0.4j]),
        )
        for p in (2.0, 4.0, np.inf):
            assert extension_lp_norm(F, p) == pytest.approx(abs(1.3 - 0.4j))

    def test_two_wave_p4_oracle(self):
        # |e^{i a} + e^{i b}|^4 averages to 6 when the phase gap
        # equidistributes, so ||f||_4 = 6^{1/4}
        F = NeighborhoodData(
            0.5,
            xis=np.array([[0.25], [-0.25]]),
            omegas=np.array([0.0625, 0.0625]),
            amps=np.array([1.0 + 0j, 1.0 + 0j]),
        )
        assert extension_lp_norm(F, 4.0) == pytest.approx(6.0**0.25, rel=1e-10)

    def test_off_lattice_base_rejected(self):
        F = NeighborhoodData(
            0.5,
            xis=np.array([[0.3], [-0.25]]),
            omegas=np.array([0.09, 0.0625]),
            amps=np.array([1.0 + 0j, 1.0 + 0j]),
        )
        with pytest.raises(ValueError):
            extension_lp_norm(F, 4.0)

    def test_bad_exponent_rejected(self):
        cover = cap_cover(1, 0.5)
        with pytest.raises(ValueError):
            extension_lp_norm(random_neighborhood(cover, 0), 0.5)

    def test_taper_path_runs(self):
        cover = cap_cover(1, 0.5)
        F = random_neighborhood(cover, 11)
        plain = extension_lp_norm(F, 4.0)
        tapered = extension_lp_norm(F, 4.0, taper=build_taper())
        assert tapered > 0
        assert tapered == pytest.approx(plain, rel=0.5)


class TestDecouplingRatio:
    def test_single_cap_ratio_is_one(self):
        cover = cap_cover(2, 0.5)
        F = random_neighborhood(cover, 12)
        amps = np.zeros_like(F.amps)
        amps[3] = F.amps[3]
        single = NeighborhoodData(F.delta, F.xis, F.omegas, amps)
        assert decoupling_ratio(single, 0.5, 4.0) == 1.0

    def test_p2_ratio_at_most_one(self):
        for d, delta in ((1, 0.25), (2, 0.5)):
            F = random_neighborhood(cap_cover(d, delta), 13)
            assert decoupling_ratio(F, delta, 2.0) <= 1.0 + 1e-10

    def test_scale_mismatch_rejected(self):
        F = random_neighborhood(cap_cover(1, 0.25), 14)
        with pytest.raises(ValueError):
            decoupling_ratio(F, 0.5, 4.0)

    def test_empty_data_rejected(self):
        F = NeighborhoodData(
            0.5,
            xis=np.array([[0.25]]),
            omegas=np.array([0.0625]),
            amps=np.array([0.0 + 0j]),
        )
        with pytest.raises(ValueError):
            decoupling_ratio(F, 0.5, 4.0)

    def test_ratio_bounded_across_scales(self):
        # random-phase data: the p = 4 ratio stays O(1) as delta shrinks
        for delta in (0.5, 0.25, 0.125):
            F = random_neighborhood(cap_cover(1, delta), 15)
            r = decoupling_ratio(F, delta, 4.0)
            assert 0.2 <= r <= 3.0
