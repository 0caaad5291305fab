"""Scenario plumbing: config resolution, sweeps, variants, aggregation."""

import numpy as np
import pytest

from mzm_braiding.config import ConfigError
from mzm_braiding.experiments import (
    DEFAULTS,
    SCENARIOS,
    ResultRow,
    _aggregate,
    _fmt,
    _sweep_grid,
    _variants,
    build_protocol,
    build_system,
    calibration_factor,
    resolve_config,
    run_scenario,
    target_gate,
)
from mzm_braiding.gates import SIGMA_Y, composite_gate

FAST = {
    "chain.n_sites": 30,
    "protocol.duration": 10.0,
    "protocol.step_time": 5.0,
    "integrator.dt": 0.02,
}


class TestResolveConfig:
    def test_unknown_scenario(self):
        with pytest.raises(ConfigError, match="unknown scenario"):
            resolve_config("fig9z")

    def test_defaults_and_precedence(self):
        cfg = resolve_config("fig2a")
        assert cfg == {**DEFAULTS}
        cfg = resolve_config(
            "fig3b", file_config={"errors.delta0": 0.01}, overrides={"errors.delta0": 0.02}
        )
        assert cfg["errors.delta0"] == 0.02  # --set beats config file
        assert cfg["ensemble.n_realizations"] == 100

    def test_seed_argument_wins(self):
        cfg = resolve_config("fig2a", overrides={"ensemble.seed": 1}, seed=9)
        assert cfg["ensemble.seed"] == 9

    def test_scenario_bindings(self):
        fig3a = resolve_config("fig3a")
        assert fig3a["protocol.composite"] is True
        assert fig3a["protocol.theta"] == pytest.approx(np.pi / 4)
        fig3c = resolve_config("fig3c")
        assert fig3c["errors.truncation_radius"] == 1
        assert fig3c["sweep.param"] == "chain.mu"
        assert not fig3c["protocol.composite"]
        fig3d = resolve_config("fig3d")
        assert fig3d["sweep.param"] == "errors.delta0"
        assert fig3d["sweep.scale"] == "log"
        pi8 = resolve_config("pi8")
        assert pi8["protocol.theta"] == pytest.approx(3 * np.pi / 8)

    def test_validation_errors(self):
        for overrides in (
            {"sweep.param": "nope.key", "sweep.min": 1.0, "sweep.max": 2.0},
            {"perturbation.exponent_sign": "sideways"},
            {"sweep.scale": "cubic"},
            {"protocol.duration": -1.0},
            {"integrator.dt": 0.5},          # does not resolve the carrier
            {"ensemble.n_realizations": 0},
        ):
            with pytest.raises(ConfigError):
                resolve_config("fig2a", overrides=overrides)

    def test_rwa_exempt_from_carrier_check(self):
        cfg = resolve_config("fig2a", overrides={"protocol.rwa": True,
                                                 "integrator.dt": 0.5})
        assert cfg["integrator.dt"] == 0.5


class TestBuilders:
    def test_build_system_fanout(self):
        cfg = resolve_config("fig2a", overrides={"chain.mu": 0.05})
        spec = build_system(cfg)
        assert spec.chain1.mu == 0.05 and spec.chain2.mu == 0.05
        assert spec.perturbation is None

    def test_build_system_perturbation(self):
        cfg = resolve_config("fig2b", overrides={"perturbation.amplitude": 0.1})
        assert build_system(cfg).perturbation is not None

    def test_build_protocol_segments(self):
        assert len(build_protocol(resolve_config("fig2a")).segments) == 1
        assert len(build_protocol(resolve_config("fig3a")).segments) == 4

    def test_target_gates(self):
        assert np.allclose(target_gate(resolve_config("fig2a")), SIGMA_Y)
        assert np.allclose(
            target_gate(resolve_config("pi8")),
            composite_gate(3 * np.pi / 8, 0.0, "fig3"),
        )

    def test_calibration_factor(self):
        assert calibration_factor(resolve_config("fig2a")) == pytest.approx(2.0, abs=1e-6)


class TestSweepsAndVariants:
    def test_linear_grid(self):
        cfg = {"sweep.points": 3, "sweep.min": 0.0, "sweep.max": 1.0,
               "sweep.scale": "linear"}
        assert _sweep_grid(cfg) == [0.0, 0.5, 1.0]

    def test_log_grid(self):
        cfg = {"sweep.points": 3, "sweep.min": 1e-2, "sweep.max": 1.0,
               "sweep.scale": "log"}
        assert _sweep_grid(cfg) == pytest.approx([1e-2, 1e-1, 1.0])
        cfg["sweep.min"] = 0.0
        with pytest.raises(ConfigError, match="log sweep"):
            _sweep_grid(cfg)

    def test_variants(self):
        cfg = resolve_config("fig3d")
        variants = _variants("fig3d", cfg)
        assert [label for label, _ in variants] == ["fig3d_composite", "fig3d_single"]
        single = variants[1][1]
        assert single["protocol.composite"] is False
        assert single["protocol.theta"] == pytest.approx(np.pi / 2)
        assert _variants("fig2a", cfg) == [("fig2a", cfg)]


class TestRunScenario:
    def test_row_counts_and_order(self):
        cfg = resolve_config("fig3d", overrides={
            **FAST, "sweep.points": 2, "ensemble.n_realizations": 2,
        })
        rows, series_map, manifest = run_scenario("fig3d", cfg, want_series=True)
        # 2 variants x 2 sweep points x 2 realizations
        assert len(rows) == 8
        labels = [r.scenario for r in rows]
        assert labels == ["fig3d_composite"] * 4 + ["fig3d_single"] * 4
        assert [r.realization for r in rows[:4]] == [0, 1, 0, 1]
        assert set(series_map) == {"fig3d_composite", "fig3d_single"}
        assert manifest["fidelity_convention"] == "overlap_squared"
        assert len(manifest["aggregates"]) == 4  # per (variant, sweep point)
        agg = manifest["aggregates"][0]
        assert agg["n"] == 2 and 0.0 <= agg["mean_loss"] <= 1.0

    def test_identical_draws_across_variants(self):
        # fig3d variants must see the same random site multipliers, so the
        # comparison isolates the protocol, not the noise
        from mzm_braiding.errors import RandomSiteError, sample_site_errors
        cfg = resolve_config("fig3d", overrides=FAST)
        a = sample_site_errors(
            RandomSiteError(0.06, cfg["ensemble.seed"], 0), (29, 31)
        )
        b = sample_site_errors(
            RandomSiteError(0.06, cfg["ensemble.seed"], 0), (29, 31)
        )
        assert a == b

    def test_fig2b_zero_amplitude_matches_fig2a(self):
        fast = dict(FAST)
        rows_a, _, _ = run_scenario("fig2a", resolve_config("fig2a", overrides=fast))
        rows_b, _, _ = run_scenario(
            "fig2b",
            resolve_config("fig2b", overrides={**fast, "sweep.points": 2}),
        )
        assert rows_b[0].sweep_value == 0.0
        assert rows_b[0].final_f_target == rows_a[0].final_f_target
        assert rows_b[0].gate_distance == rows_a[0].gate_distance


class TestFormattingAndAggregates:
    def test_fmt_round_trips(self):
        for x in (0.1, 1e-17, 1 / 3, 0.9999946586103509):
            assert float(_fmt(x)) == x

    def test_csv_row(self):
        row = ResultRow("fig2a", None, 0, 0.5, 0.25, 0.5, 0.1, 0.01)
        assert row.to_csv() == "fig2a,,0,0.5,0.25,0.5,0.1,0.01"
        row = ResultRow("fig3c", 0.02, 1, 1.0, 0.0, 0.0, 0.0, 0.0)
        assert row.to_csv().startswith("fig3c,0.02,1,")

    def test_aggregate_math(self):
        rows = [
            ResultRow("s", 1.0, i, 1 - loss, 0.0, loss, 0.0, 0.0)
            for i, loss in enumerate([0.1, 0.2, 0.3])
        ]
        (agg,) = _aggregate(rows)
        assert agg["mean_loss"] == pytest.approx(0.2)
        assert agg["stderr_loss"] == pytest.approx(0.1 / np.sqrt(3))
        assert agg["n"] == 3

    def test_scenarios_registry(self):
        assert set(SCENARIOS) == {
            "fig2a", "fig2b", "fig3a", "fig3b", "fig3c", "fig3d", "pi8", "custom"
        }
