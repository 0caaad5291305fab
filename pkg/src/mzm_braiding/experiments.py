"""Named scenarios, sweeps and Monte Carlo ensembles, and result files.

Scenario summary (defaults bind the headline parameter sets; everything is
config-overridable):

* ``fig2a``  ideal single-loop braid, theta = phi = pi/2, T = 20.
* ``fig2b``  fig2a + sweep of the Gaussian on-site perturbation amplitude.
* ``fig3a``  ideal 4-segment composite, theta = pi/4, phi = 0, T' = T/2.
* ``fig3b``  fig3a + random nearest-site coupling errors (delta0 = 0.06,
  100 realizations).
* ``fig3c``  single braid with one-site drive truncation, sweep of the
  chemical potential.
* ``fig3d``  sweep of delta0 with the composite protocol on and off
  (variants ``fig3d_composite`` / ``fig3d_single`` in the scenario column).
* ``pi8``    ideal composite at theta = 3 pi/8, phi = 0.
* ``custom`` whatever the config says.

Output files: ``summary.csv`` (one row per run), optional
``series_<tag>.csv`` fidelity time series (uniform 500-sample grid), and a
``run.json`` manifest from which the whole run is reproducible.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import ConfigError, apply_setting
from .drive import (
    DriveProtocol,
    PulseEnvelope,
    calibrate_pulse_area,
    make_braid_protocol,
    make_composite_protocol,
)
from .errors import (
    RandomSiteError,
    SystematicCoeffError,
    TruncationSpec,
    apply_site_errors,
    apply_systematic,
    apply_truncation,
    sample_site_errors,
)
from .evolution import (
    FIDELITY_CONVENTION,
    FidelitySeries,
    IntegratorConfig,
    evolve,
    fidelity,
    project_gate,
    static_basis,
)
from .gates import composite_gate, gate_distance, holonomic_gate
from .lattice import ChainParams, GaussianPerturbation, SystemSpec

__all__ = [
    "DEFAULTS",
    "SCENARIOS",
    "ResultRow",
    "resolve_config",
    "run_scenario",
    "write_results",
    "calibration_factor",
]

SUMMARY_HEADER = (
    "scenario,sweep_value,realization,final_f_target,final_f_self,"
    "final_loss,gate_distance,leakage"
)
SERIES_HEADER = "time,f_self,f_target,f_defect"

DEFAULTS: dict = {
    "chain1.n_sites": 100,
    "chain1.mu": 0.02,
    "chain1.hopping": 0.1,
    "chain1.pairing": 0.1,
    "chain2.n_sites": 100,
    "chain2.mu": 0.02,
    "chain2.hopping": 0.1,
    "chain2.pairing": 0.1,
    "defect.energy": 3.0,
    "perturbation.amplitude": 0.0,
    "perturbation.center": 50.0,
    "perturbation.width": 3.0,
    "perturbation.exponent_sign": "negative",
    "protocol.composite": False,
    "protocol.theta": float(np.pi / 2.0),
    "protocol.phi": float(np.pi / 2.0),
    "protocol.phi0": 0.0,
    "protocol.duration": 20.0,
    "protocol.step_time": 10.0,
    "protocol.rwa": False,
    "composite.order": "fig3",
    "integrator.dt": 0.008,
    "integrator.method": "midpoint_exponential",
    "integrator.tolerance": 1e-8,
    "errors.eps1": 0.0,
    "errors.eps2": 0.0,
    "errors.delta0": 0.0,
    "errors.truncation_radius": -1,
    "ensemble.n_realizations": 1,
    "ensemble.seed": 20240613,
    "sweep.param": "",
    "sweep.points": 20,
    "sweep.min": 0.0,
    "sweep.max": 0.0,
    "sweep.scale": "linear",
    "output.series_samples": 500,
    "run.n_workers": 0,
}

_FIG3A = {
    "protocol.composite": True,
    "protocol.theta": float(np.pi / 4.0),
    "protocol.phi": 0.0,
}

SCENARIO_OVERRIDES: dict[str, dict] = {
    "fig2a": {},
    "fig2b": {
        "sweep.param": "perturbation.amplitude",
        "sweep.min": 0.0,
        "sweep.max": 0.18,
    },
    "fig3a": dict(_FIG3A),
    "fig3b": {
        **_FIG3A,
        "errors.delta0": 0.06,
        "ensemble.n_realizations": 100,
    },
    "fig3c": {
        "errors.truncation_radius": 1,
        "sweep.param": "chain.mu",
        "sweep.min": 0.02,
        "sweep.max": 0.1,
    },
    "fig3d": {
        **_FIG3A,
        "sweep.param": "errors.delta0",
        "sweep.min": 1e-3,
        "sweep.max": 0.15,
        "sweep.scale": "log",
        "ensemble.n_realizations": 24,
    },
    "pi8": {
        "protocol.composite": True,
        "protocol.theta": float(3.0 * np.pi / 8.0),
        "protocol.phi": 0.0,
    },
    "custom": {},
}

SCENARIOS = tuple(SCENARIO_OVERRIDES)


@dataclass(frozen=True)
class ResultRow:
    scenario: str
    sweep_value: Optional[float]
    realization: int
    final_f_target: float
    final_f_self: float
    final_loss: float
    gate_distance: float
    leakage: float

    def to_csv(self) -> str:
        sv = "" if self.sweep_value is None else _fmt(self.sweep_value)
        return ",".join(
            [
                self.scenario,
                sv,
                str(self.realization),
                _fmt(self.final_f_target),
                _fmt(self.final_f_self),
                _fmt(self.final_loss),
                _fmt(self.gate_distance),
                _fmt(self.leakage),
            ]
        )


def _fmt(x: float) -> str:
    """Shortest decimal that round-trips the IEEE-754 double."""
    return repr(float(x))


def resolve_config(
    scenario: str,
    file_config: Optional[dict] = None,
    overrides: Optional[dict] = None,
    seed: Optional[int] = None,
) -> dict:
    if scenario not in SCENARIO_OVERRIDES:
        raise ConfigError(
            f"unknown scenario {scenario!r}; choose from {', '.join(SCENARIOS)}"
        )
    cfg = dict(DEFAULTS)
    cfg.update(SCENARIO_OVERRIDES[scenario])
    for source in (file_config or {}), (overrides or {}):
        for key, value in source.items():
            apply_setting(cfg, key, value)
    if seed is not None:
        cfg["ensemble.seed"] = int(seed)
    _validate_config(cfg)
    return cfg


def _validate_config(cfg: dict) -> None:
    if cfg["sweep.param"]:
        probe = dict(cfg)
        try:
            apply_setting(probe, cfg["sweep.param"], cfg["sweep.min"])
        except ConfigError as exc:
            raise ConfigError(f"sweep.param: {exc}") from exc
    if cfg["perturbation.exponent_sign"] not in ("negative", "positive"):
        raise ConfigError("perturbation.exponent_sign must be negative|positive")
    if cfg["sweep.scale"] not in ("linear", "log"):
        raise ConfigError("sweep.scale must be linear|log")
    for key in ("protocol.duration", "protocol.step_time", "integrator.dt"):
        if not float(cfg[key]) > 0:
            raise ConfigError(f"{key} must be > 0")
    omega = float(cfg["defect.energy"])
    max_dt = (2.0 * np.pi / omega) / 20.0
    if not bool(cfg["protocol.rwa"]) and float(cfg["integrator.dt"]) > max_dt:
        raise ConfigError(
            f"integrator.dt = {cfg['integrator.dt']} does not resolve the drive "
            f"carrier at omega = {omega} (need dt <= {max_dt:.4g})"
        )
    if int(cfg["ensemble.n_realizations"]) < 1:
        raise ConfigError("ensemble.n_realizations must be >= 1")


def build_system(cfg: dict) -> SystemSpec:
    perturbation = None
    if float(cfg["perturbation.amplitude"]) != 0.0:
        perturbation = GaussianPerturbation(
            amplitude=float(cfg["perturbation.amplitude"]),
            center=float(cfg["perturbation.center"]),
            width=float(cfg["perturbation.width"]),
            exponent_sign=-1 if cfg["perturbation.exponent_sign"] == "negative" else 1,
        )
    def chain(prefix: str) -> ChainParams:
        return ChainParams(
            n_sites=int(cfg[f"{prefix}.n_sites"]),
            mu=float(cfg[f"{prefix}.mu"]),
            hopping=float(cfg[f"{prefix}.hopping"]),
            pairing=float(cfg[f"{prefix}.pairing"]),
        )
    return SystemSpec(
        chain1=chain("chain1"),
        chain2=chain("chain2"),
        defect_energy=float(cfg["defect.energy"]),
        perturbation=perturbation,
    )


def build_protocol(cfg: dict) -> DriveProtocol:
    omega = float(cfg["defect.energy"])
    if bool(cfg["protocol.composite"]):
        return make_composite_protocol(
            float(cfg["protocol.duration"]),
            float(cfg["protocol.step_time"]),
            float(cfg["protocol.theta"]),
            float(cfg["protocol.phi"]),
            omega,
            order=str(cfg["composite.order"]),
            rwa=bool(cfg["protocol.rwa"]),
        )
    return make_braid_protocol(
        float(cfg["protocol.duration"]),
        float(cfg["protocol.theta"]),
        float(cfg["protocol.phi"]),
        omega,
        phi0=float(cfg["protocol.phi0"]),
        rwa=bool(cfg["protocol.rwa"]),
    )


def apply_error_channels(
    protocol: DriveProtocol, cfg: dict, realization: int
) -> DriveProtocol:
    radius = int(cfg["errors.truncation_radius"])
    if radius >= 0:
        protocol = apply_truncation(protocol, TruncationSpec(radius=radius))
    eps1 = float(cfg["errors.eps1"])
    eps2 = float(cfg["errors.eps2"])
    if eps1 != 0.0 or eps2 != 0.0:
        protocol = apply_systematic(protocol, SystematicCoeffError(eps1, eps2))
    delta0 = float(cfg["errors.delta0"])
    if delta0 > 0.0:
        defect_site = int(cfg["chain1.n_sites"])
        err = RandomSiteError(
            delta0=delta0,
            seed=int(cfg["ensemble.seed"]),
            realization_index=realization,
        )
        multipliers = sample_site_errors(err, (defect_site - 1, defect_site + 1))
        protocol = apply_site_errors(protocol, multipliers)
    return protocol


def target_gate(cfg: dict) -> np.ndarray:
    theta = float(cfg["protocol.theta"])
    phi = float(cfg["protocol.phi"])
    if bool(cfg["protocol.composite"]):
        return composite_gate(theta, phi, order=str(cfg["composite.order"]))
    return holonomic_gate(theta, phi)


def calibration_factor(cfg: dict) -> float:
    env = calibrate_pulse_area(
        PulseEnvelope(
            shape="sin2",
            duration=float(cfg["protocol.duration"]),
            area_target=float(np.pi),
        ),
        float(np.pi),
    )
    return float(env.amplitude_scale)


def _run_one(scenario_label: str, cfg: dict, sweep_value, realization: int):
    spec = build_system(cfg)
    protocol = apply_error_channels(build_protocol(cfg), cfg, realization)
    icfg = IntegratorConfig(
        dt=float(cfg["integrator.dt"]),
        method=str(cfg["integrator.method"]),
        tolerance=float(cfg["integrator.tolerance"]),
    )
    modes = static_basis(spec).modes
    n_samples = int(cfg["output.series_samples"])
    series, final_1r = evolve(spec, protocol, modes["gamma1R"].vector, icfg, n_samples)
    _, final_2l = evolve(spec, protocol, modes["gamma2L"].vector, icfg, n_samples)
    gate, leakage = project_gate(
        {"gamma1R": final_1r, "gamma2L": final_2l}, modes
    )
    f_target = fidelity(final_1r, modes["gamma2L"])
    f_self = fidelity(final_1r, modes["gamma1R"])
    row = ResultRow(
        scenario=scenario_label,
        sweep_value=sweep_value,
        realization=realization,
        final_f_target=f_target,
        final_f_self=f_self,
        final_loss=1.0 - f_target,
        gate_distance=gate_distance(gate, target_gate(cfg)),
        leakage=leakage,
    )
    return row, series


def _sweep_grid(cfg: dict) -> list:
    points = int(cfg["sweep.points"])
    lo, hi = float(cfg["sweep.min"]), float(cfg["sweep.max"])
    if cfg["sweep.scale"] == "log":
        if lo <= 0:
            raise ConfigError("log sweep requires sweep.min > 0")
        return [float(v) for v in np.logspace(np.log10(lo), np.log10(hi), points)]
    return [float(v) for v in np.linspace(lo, hi, points)]


def _variants(scenario: str, cfg: dict) -> list[tuple[str, dict]]:
    """fig3d compares the composite protocol against the plain braid under
    the identical error draws; other scenarios have a single variant."""
    if scenario != "fig3d":
        return [(scenario, cfg)]
    single = dict(cfg)
    single["protocol.composite"] = False
    single["protocol.theta"] = float(np.pi / 2.0)
    single["protocol.phi"] = float(np.pi / 2.0)
    return [("fig3d_composite", cfg), ("fig3d_single", single)]


def run_scenario(scenario: str, cfg: dict, want_series: bool = False):
    """Execute all (variant, sweep point, realization) jobs of a scenario.

    Returns (rows, series_map, manifest).  Jobs are independent and run on a
    thread pool; rows are emitted in deterministic (variant, sweep,
    realization) order regardless of scheduling.  When ``want_series`` is
    set, the gamma1R fidelity series of the first job of each variant is kept.
    """
    jobs = []
    for label, vcfg in _variants(scenario, cfg):
        sweep_param = vcfg["sweep.param"]
        sweep_values = _sweep_grid(vcfg) if sweep_param else [None]
        n_real = int(vcfg["ensemble.n_realizations"])
        for sv in sweep_values:
            jcfg = vcfg
            if sv is not None:
                jcfg = dict(vcfg)
                apply_setting(jcfg, sweep_param, sv)
            for realization in range(n_real):
                jobs.append((label, jcfg, sv, realization))

    n_workers = int(cfg["run.n_workers"]) or (os.cpu_count() or 1)
    results: list = [None] * len(jobs)

    def work(i: int) -> None:
        label, jcfg, sv, realization = jobs[i]
        results[i] = _run_one(label, jcfg, sv, realization)

    if n_workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(work, range(len(jobs))))
    else:
        for i in range(len(jobs)):
            work(i)

    rows = [r for r, _ in results]
    series_map: dict[str, FidelitySeries] = {}
    if want_series:
        seen = set()
        for (label, _, _, _), (_, series) in zip(jobs, results):
            if label not in seen:
                series_map[label] = series
                seen.add(label)

    manifest = {
        "scenario": scenario,
        "config": {k: cfg[k] for k in sorted(cfg)},
        "seed": int(cfg["ensemble.seed"]),
        "calibration_factor": calibration_factor(cfg),
        "fidelity_convention": FIDELITY_CONVENTION,
        "code_version": _code_version(),
        "aggregates": _aggregate(rows),
    }
    return rows, series_map, manifest


def _aggregate(rows: list) -> list[dict]:
    """Mean and standard error of the loss per (scenario, sweep_value)."""
    groups: dict = {}
    for row in rows:
        groups.setdefault((row.scenario, row.sweep_value), []).append(row.final_loss)
    out = []
    for (label, sv), losses in sorted(
        groups.items(), key=lambda kv: (kv[0][0], -np.inf if kv[0][1] is None else kv[0][1])
    ):
        arr = np.asarray(losses)
        stderr = float(arr.std(ddof=1) / np.sqrt(len(arr))) if len(arr) > 1 else 0.0
        out.append(
            {
                "scenario": label,
                "sweep_value": sv,
                "n": len(arr),
                "mean_loss": float(arr.mean()),
                "stderr_loss": stderr,
            }
        )
    return out


def _code_version() -> str:
    try:
        from importlib.metadata import version

        return version("mzm-braiding")
    except Exception:
        return "0.1.0"


def write_results(rows, series_map, manifest, out_dir: str) -> list[str]:
    """Write summary.csv, series_<tag>.csv and run.json; returns the paths."""
    try:
        os.makedirs(out_dir, exist_ok=True)
        paths = []
        summary_path = os.path.join(out_dir, "summary.csv")
        with open(summary_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(SUMMARY_HEADER + "\n")
            for row in rows:
                fh.write(row.to_csv() + "\n")
        paths.append(summary_path)
        for tag, series in series_map.items():
            spath = os.path.join(out_dir, f"series_{tag}.csv")
            with open(spath, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(SERIES_HEADER + "\n")
                for t, fs, ft, fd in zip(
                    series.times, series.f_self, series.f_target, series.f_defect
                ):
                    fh.write(f"{_fmt(t)},{_fmt(fs)},{_fmt(ft)},{_fmt(fd)}\n")
            paths.append(spath)
        manifest_path = os.path.join(out_dir, "run.json")
        with open(manifest_path, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        paths.append(manifest_path)
        return paths
    except OSError as exc:
        raise OSError(f"failed writing results under {out_dir}: {exc}") from exc
