import csv
import io
import json

import numpy as np
import pytest

from ssproj.config import load, normalize
from ssproj.errors import ConfigError, MissingSeries
from ssproj.experiments import case_passed, marginal_ifs, recompute_verdicts, report_csv, run_scenario
from ssproj.ifs import similarity_dimension
from ssproj.plotting import emit_plot

CSV_COLUMNS = ["scenario", "label", "kind", "k", "value", "stderr", "prediction", "tolerance", "passed"]


def cfg(scenario, cloud_size=20_000, **params):
    return {"schema_version": 1, "scenario": scenario, "params": params, "estimator": {"cloud_size": cloud_size, "seed": 1}}


@pytest.fixture(scope="module")
def sharp_report():
    return run_scenario(cfg("sharpness"))


@pytest.fixture(scope="module")
def sweep_report():
    return run_scenario(cfg("restricted_sweep", grid=[-1.0, 1.0, 5]))


@pytest.fixture(scope="module")
def orbit_report():
    return run_scenario(cfg("orbit_constancy", g_samples=4))


class TestConfig:
    def test_defaults_filled(self):
        c = normalize(cfg("torus_r4"))
        assert c["estimator"]["method"] == "box" and c["params"]["planes"] == 5

    @pytest.mark.parametrize(
        "patch",
        [
            {"colour": "red"},
            {"schema_version": 2},
            {"scenario": "nope"},
            {"params": {"planes": 3, "bogus": 1}},
            {"estimator": {"method": "mass"}},
            {"estimator": {"cloud_size": 5}},
            {"estimator": {"depth_tolerance": 2.0}},
            {"output": {"pdf": "x"}},
            {"ifs": {"builtin": "dragon"}},
            {"ifs": {"maps": [{"ratio": 0.5, "translation": [0.0], "rotation": {"matrix": [[2.0]]}}]}},
            {"ifs": {"maps": [{"ratio": 0.5, "translation": [0.0], "shear": 1}]}},
        ],
    )
    def test_rejections(self, patch):
        c = cfg("torus_r4")
        c.update(patch)
        with pytest.raises(ConfigError):
            normalize(c)

    def test_explicit_maps(self):
        spec = {
            "maps": [
                {"ratio": 1 / 3, "translation": [0.0, 0.0]},
                {"ratio": 1 / 3, "translation": [2 / 3, 0.0], "rotation": {"plane_rotation": {"i": 0, "j": 1, "angle": 0.5}}},
                {"ratio": 1 / 3, "translation": [0.0, 2 / 3], "rotation": {"block_rotation": [1.0]}},
                {"ratio": 1 / 3, "translation": [2 / 3, 2 / 3], "rotation": {"generator": [[0, -1], [1, 0]], "t": 2.0}},
            ]
        }
        c = cfg("marstrand_sweep", planes=1)
        c["ifs"] = spec
        assert normalize(c)["ifs"] == spec

    def test_invalid_weights(self):
        c = cfg("marstrand_sweep")
        c["ifs"] = {"maps": [{"ratio": 0.5, "translation": [0.0]}, {"ratio": 0.5, "translation": [0.5]}], "weights": [0.6, 0.6]}
        with pytest.raises(ConfigError, match="weight sum"):
            normalize(c)

    def test_load_errors(self, tmp_path):
        with pytest.raises(ConfigError):
            load(tmp_path / "missing.json")
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(ConfigError):
            load(bad)


class TestScenarios:
    def test_sharpness(self, sharp_report):
        case = sharp_report["cases"][0]
        assert case["value"] == pytest.approx(0.5, abs=0.05)
        assert case["verdict"] == "sharpness confirmed" and sharp_report["passed"]
        assert sharp_report["dim_ref"] - case["value"] > 0.3

    def test_marginal_ifs(self, product_cantor):
        assert similarity_dimension(marginal_ifs(product_cantor, 1)) == pytest.approx(0.5)

    def test_verdicts_recomputable(self, sharp_report, sweep_report, orbit_report):
        for rep in (sharp_report, sweep_report, orbit_report):
            assert recompute_verdicts(rep) == [c["passed"] for c in rep["cases"]]
            assert rep["passed"] == all(recompute_verdicts(rep))

    def test_verdict_flips_with_numbers(self):
        case = {"kind": "match", "value": 1.4, "prediction": 1.5, "tolerance": 0.12}
        assert case_passed(case)
        assert not case_passed(dict(case, value=1.3))
        with pytest.raises(ValueError):
            case_passed({"kind": "other"})

    def test_report_self_contained(self, sharp_report):
        again = run_scenario(sharp_report["config"])
        strip = lambda r: json.dumps({k: v for k, v in r.items() if k != "runtime_s"}, sort_keys=True)
        assert strip(again) == strip(sharp_report)

    def test_json_round_trip(self, sweep_report):
        assert json.loads(json.dumps(sweep_report))["scenario"] == "restricted_sweep"

    def test_csv_columns(self, sweep_report):
        rows = list(csv.reader(io.StringIO(report_csv(sweep_report))))
        assert rows[0] == CSV_COLUMNS
        assert len(rows) == 1 + 1 + 5

    def test_line_hyperplane_small(self):
        rep = run_scenario(cfg("line_hyperplane"))
        assert rep["orbit_spans_space"] and [c["k"] for c in rep["cases"]] == [1, 2]

    def test_one_param_small(self):
        rep = run_scenario(cfg("one_param", ks=[1, 2]))
        assert rep["cyclic"] and len(rep["cases"]) == 2

    def test_marstrand_small(self):
        rep = run_scenario(cfg("marstrand_sweep", planes=2))
        assert all(c["prediction"] == pytest.approx(min(1, rep["dim_ref"])) for c in rep["cases"])

    def test_scenario_errors_carry_context(self):
        c = cfg("line_hyperplane", direction=[1.0, 0.0])
        with pytest.raises(ConfigError, match=r"\[line_hyperplane\]"):
            run_scenario(c)


class TestPlots:
    def test_loglog_deterministic(self, sharp_report):
        a = emit_plot(sharp_report, "loglog")
        assert a == emit_plot(json.loads(json.dumps(sharp_report)), "loglog")
        assert a.startswith("<svg") and a.rstrip().endswith("</svg>")
        assert "slope 0.5" in a or "slope 0.4" in a

    def test_theta_sweep(self, sweep_report):
        assert "theta" in emit_plot(sweep_report, "theta_sweep")

    def test_orbit_hist(self, orbit_report):
        assert "pooled stderr" in emit_plot(orbit_report, "orbit_hist")

    @pytest.mark.parametrize("kind", ["loglog", "theta_sweep", "orbit_hist"])
    def test_missing_series(self, kind):
        with pytest.raises(MissingSeries):
            emit_plot({"scenario": "x", "cases": []}, kind)

    def test_unknown_kind(self, sharp_report):
        with pytest.raises(ValueError):
            emit_plot(sharp_report, "pie")

    def test_cantor_loglog_slope(self):
        from ssproj.dimension import box_count_dimension
        from ssproj.experiments import cantor_ifs
        from ssproj.ifs import sample_measure

        est = box_count_dimension(sample_measure(cantor_ifs(), 50_000, seed=0))
        report = {"scenario": "cantor", "cases": [{"label": "cantor", "estimate": est.to_json()}]}
        assert f"slope {est.value:.3f}" in emit_plot(report, "loglog")
        assert est.value == pytest.approx(0.63, abs=0.05)
