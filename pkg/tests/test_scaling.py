import json
import math
from fractions import Fraction

import numpy as np
import pytest

from semiperiodic.cli import main
from semiperiodic.scaling import (
    ExperimentConfig,
    alpha_mixed_necessity,
    alpha_modulation,
    alpha_modulation_necessity,
    alpha_sobolev,
    fit_exponent,
    load_config,
    rate_data_norm,
    rate_evolution_lower,
    rate_modulation_norm,
    rescaling_pair,
    run_experiment,
    threshold_table,
    write_report,
)

INF = math.inf


class TestFitExponent:
    def test_pure_power_law_exact(self):
        pts = [(s, s**2) for s in (1.0, 2.0, 4.0, 8.0)]
        slope, r2 = fit_exponent(pts)
        assert slope == pytest.approx(2.0, abs=1e-12)
        assert r2 == pytest.approx(1.0, abs=1e-12)

    def test_constant_series(self):
        slope, r2 = fit_exponent([(1.0, 3.0), (2.0, 3.0), (4.0, 3.0)])
        assert slope == pytest.approx(0.0, abs=1e-12)
        assert r2 == 1.0

    def test_noisy_power_law(self):
        rng = np.random.default_rng(0)
        scales = 2.0 ** np.arange(8)
        vals = scales**-0.5 * np.exp(0.01 * rng.standard_normal(8))
        slope, r2 = fit_exponent(zip(scales, vals))
        assert slope == pytest.approx(-0.5, abs=0.05)
        assert r2 > 0.99

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            fit_exponent([(1.0, 2.0)])
        with pytest.raises(ValueError):
            fit_exponent([(1.0, -2.0), (2.0, 1.0)])


class TestThresholds:
    def test_sobolev_reference_value(self):
        assert alpha_sobolev(1, 1, 4) == Fraction(1, 4)
        assert alpha_sobolev(1, 1, 2) == Fraction(-1, 1)

    def test_modulation_first_case(self):
        # d = 2: 2 <= p <= 4 branch, value max{0, d(1/2 - 1/q)}
        assert alpha_modulation(1, 1, 3, 2) == Fraction(0)
        assert alpha_modulation(1, 1, 3, 4) == Fraction(1, 2)
        assert alpha_modulation(1, 1, 3, 1) == Fraction(0)

    def test_modulation_large_p_case(self):
        # p > 4, q >= 2: d(1 - 1/p - 1/q) - 2/p
        assert alpha_modulation(1, 1, 8, 2) == 2 * (
            1 - Fraction(1, 8) - Fraction(1, 2)
        ) - Fraction(1, 4)

    def test_modulation_small_q_case(self):
        # p > 4, q < 2: 2(1 - 1/q)(d(1/2 - 1/p) - 2/p)
        p, q = 8, Fraction(4, 3)
        expect = 2 * (1 - Fraction(3, 4)) * (
            2 * (Fraction(1, 2) - Fraction(1, 8)) - Fraction(1, 4)
        )
        assert alpha_modulation(1, 1, p, q) == expect

    def test_necessity_values(self):
        assert alpha_modulation_necessity(1, 1, 4, 1) == Fraction(0)
        assert alpha_modulation_necessity(1, 1, 8, 8) == Fraction(5, 4)
        assert alpha_mixed_necessity(1, 1, 4, 8, 8) == (
            2 * Fraction(3, 8) + Fraction(1, 4) - Fraction(1, 4)
        )

    def test_mixed_consistency_with_sobolev(self):
        for p in (4, 6, 8):
            assert alpha_mixed_necessity(1, 1, p, p, p) == alpha_sobolev(1, 1, p)
        assert alpha_mixed_necessity(2, 1, 6, 6, 6) == alpha_sobolev(2, 1, 6)

    def test_infinite_exponents(self):
        assert alpha_sobolev(1, 1, INF) == Fraction(3, 2)
        assert alpha_modulation(1, 1, 3, INF) == Fraction(1)

    def test_rates(self):
        assert rate_data_norm(1, 1, 4, 0) == Fraction(1, 4)
        assert rate_evolution_lower(1, 1, 8, 8) == -Fraction(1, 2)
        assert rate_modulation_norm(1, 1, 1, 0) == -Fraction(1)
        assert rate_modulation_norm(1, 1, 1, 1) == -Fraction(2)

    def test_table(self):
        table = threshold_table(1, 1, 4, 1, 8)
        assert table["sobolev-smoothing"] == Fraction(1, 4)
        assert table["modulation-necessity"] == Fraction(0)
        assert set(table) == {
            "sobolev-smoothing",
            "modulation-smoothing",
            "modulation-necessity",
            "mixed-necessity",
        }
        with pytest.raises(ValueError):
            threshold_table(0, 1, 4)


class TestConfig:
    def good(self, **kw):
        base = dict(
            kind="dispersion-torus",
            scales=(1 / 8, 1 / 16, 1 / 32, 1 / 64),
        )
        base.update(kw)
        return base

    def test_valid(self):
        ExperimentConfig(**self.good())

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            ExperimentConfig(**self.good(kind="nonsense"))

    def test_short_scale_list_rejected(self):
        with pytest.raises(ValueError):
            ExperimentConfig(**self.good(scales=(1 / 8, 1 / 16)))

    def test_narrow_span_rejected(self):
        with pytest.raises(ValueError):
            ExperimentConfig(
                **self.good(scales=(1 / 8, 1 / 10, 1 / 12, 1 / 14))
            )

    def test_short_list_exemptions(self):
        ExperimentConfig(kind="rescaling-identity", scales=(2.0, 4.0))
        ExperimentConfig(kind="decoupling-ratio", scales=(0.25, 0.125))

    def test_load_config_rejects_unknown_keys(self, tmp_path):
        p = tmp_path / "bad.yaml"
        p.write_text("kind: dispersion-torus\nbogus: 1\n", encoding="utf-8")
        with pytest.raises(ValueError):
            load_config(p)

    def test_load_config_round_trip(self, tmp_path):
        p = tmp_path / "ok.yaml"
        p.write_text(
            "kind: dispersion-torus\n"
            "scales: [0.125, 0.0625, 0.03125, 0.015625]\n"
            "seed: 3\n",
            encoding="utf-8",
        )
        cfg = load_config(p)
        assert cfg.kind == "dispersion-torus"
        assert cfg.seed == 3
        assert len(cfg.scales) == 4


class TestExperiments:
    def test_rescaling_pair_close(self):
        lhs, rhs = rescaling_pair(4.0, 2, 0)
        assert lhs / rhs == pytest.approx(1.0, abs=1e-8)

    def test_determinism(self):
        cfg = ExperimentConfig(
            kind="strichartz-endpoint",
            p=4.0,
            scales=(2, 4, 8, 16),
            seed=5,
            box_halfwidth=16.0,
            euclid_points=256,
        )
        a = run_experiment(cfg).to_json()
        b = run_experiment(cfg).to_json()
        assert a == b

    def test_bernstein_report_shape(self, tmp_path):
        cfg = ExperimentConfig(
            kind="bernstein",
            p=4.0,
            alpha=1.0,
            scales=(2, 4, 8, 16),
            box_halfwidth=8.0,
            euclid_points=128,
            torus_modes=17,
        )
        report = run_experiment(cfg)
        assert report.kind == "bernstein"
        assert len(report.series) == 1
        s = report.series[0]
        assert len(s.scales) == len(s.values) == 4
        assert s.comparison == "upper"

        jpath = write_report(report, tmp_path, "bern")
        payload = json.loads(jpath.read_text(encoding="utf-8"))
        assert payload["kind"] == "bernstein"
        assert (tmp_path / "bern.csv").exists()

    def test_decoupling_small(self):
        cfg = ExperimentConfig(
            kind="decoupling-ratio", p=4.0, scales=(0.5, 0.25), seed=1
        )
        report = run_experiment(cfg)
        assert report.series[0].passed

    def test_part_i_requires_alpha_zero(self):
        cfg = ExperimentConfig(
            kind="part-i-necessity",
            p=4.0,
            q=8.0,
            r=8.0,
            alpha=0.5,
            scales=(1 / 8, 1 / 16, 1 / 32, 1 / 64),
        )
        with pytest.raises(ValueError):
            run_experiment(cfg)


class TestCli:
    def test_table_exit_zero(self, capsys):
        rc = main(["table", "--m", "1", "--n", "1", "--p", "4", "--q", "1"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "sobolev-smoothing: 1/4" in out

    def test_bad_config_exit_two(self, tmp_path, capsys):
        p = tmp_path / "bad.yaml"
        p.write_text("kind: nonsense\nscales: [1, 2, 4, 8]\n", encoding="utf-8")
        rc = main(["run", str(p)])
        assert rc == 2

    def test_run_and_plot(self, tmp_path, capsys):
        p = tmp_path / "resc.yaml"
        p.write_text(
            "kind: rescaling-identity\np: 2.0\nscales: [2]\n", encoding="utf-8"
        )
        rc = main(["run", str(p), "--output", str(tmp_path / "reports")])
        assert rc == 0
        out = capsys.readouterr().out
        assert "[pass]" in out
        report = tmp_path / "reports" / "resc.json"
        assert report.exists()
        rc = main(["plot", str(report)])
        assert rc == 0
        assert report.with_suffix(".svg").exists()

    def test_empty_suite_exit_two(self, tmp_path):
        d = tmp_path / "empty"
        d.mkdir()
        assert main(["suite", str(d)]) == 2
