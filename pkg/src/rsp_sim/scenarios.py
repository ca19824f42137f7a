"""Turn a validated ScenarioConfig into a ResultRecord.

Each experiment produces a list of per-point dicts (one per grid value,
correlation setting, or state component) plus a summary dict. Column order
is fixed per experiment so CSV output stays stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__, analysis, protocol
from .config import ScenarioConfig
from .fock import inner_product, occupation_label, operator_distance
from .protocol import RspSettings

_CHSH_PAIRS = (
    ("mu_s", "mu_t"),
    ("mu_s", "pi_t"),
    ("pi_s", "mu_t"),
    ("pi_s", "pi_t"),
)


@dataclass(frozen=True)
class ResultRecord:
    scenario: dict
    columns: tuple[str, ...]
    points: list[dict]
    summary: dict
    tool_version: str
    timestamp: str | None

    def as_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "points": self.points,
            "summary": self.summary,
            "tool_version": self.tool_version,
            "timestamp": self.timestamp,
        }


def _scenario_echo(config: ScenarioConfig) -> dict:
    return {
        "experiment": config.experiment,
        "n_pairs": config.n_pairs,
        "gamma": config.gamma,
        "theta": config.theta,
        "p_strength": config.p_strength,
        "distinguishability": config.distinguishability,
        "grid": None
        if config.grid is None
        else {
            "start": config.grid.start,
            "stop": config.grid.stop,
            "points": config.grid.points,
        },
        "shots": config.shots,
        "seed": config.seed,
        "trials": config.trials,
    }


def _settings(config: ScenarioConfig, p: float | None = None) -> RspSettings:
    return RspSettings(
        n_pairs=config.n_pairs,
        gamma=config.gamma,
        theta=config.theta,
        p_strength=config.p_strength if p is None else p,
        distinguishability=config.distinguishability,
    )


def run_scenario(config: ScenarioConfig) -> ResultRecord:
    config.validate()
    runner = _RUNNERS[config.experiment]
    columns, points, summary = runner(config)
    # a seeded scenario is a reproducibility contract: no volatile fields
    timestamp = (
        None
        if config.seed is not None
        else datetime.now(timezone.utc).isoformat()
    )
    return ResultRecord(
        scenario=_scenario_echo(config),
        columns=columns,
        points=points,
        summary=summary,
        tool_version=__version__,
        timestamp=timestamp,
    )


def _run_chsh(config: ScenarioConfig):
    state = analysis.white_noise_shared_state(config.n_pairs, config.p_strength)
    rng = np.random.default_rng(config.seed) if config.shots else None
    columns = ["s_obs", "t_obs", "correlation", "n_pp", "n_pm", "n_mp", "n_mm"]
    if config.shots:
        columns += ["sampled_correlation", "c_pp", "c_pm", "c_mp", "c_mm"]
    points = []
    sampled_terms = []
    for s_kind, t_kind in _CHSH_PAIRS:
        table = analysis.count_table(state, s_kind, t_kind, config.n_pairs)
        value = analysis.correlation(state, s_kind, t_kind, config.n_pairs)
        point = {
            "s_obs": s_kind,
            "t_obs": t_kind,
            "correlation": value,
            "n_pp": table.n_pp,
            "n_pm": table.n_pm,
            "n_mp": table.n_mp,
            "n_mm": table.n_mm,
        }
        if config.shots:
            sampled = analysis.sample_count_table(table, config.shots, rng)
            point.update(
                sampled_correlation=sampled.correlation(),
                c_pp=sampled.n_pp,
                c_pm=sampled.n_pm,
                c_mp=sampled.n_mp,
                c_mm=sampled.n_mm,
            )
            sampled_terms.append(sampled.correlation())
        points.append(point)
    values = [p["correlation"] for p in points]
    summary = {"chsh": abs(-values[0] + values[1] + values[2] + values[3])}
    if config.shots:
        summary["sampled_chsh"] = abs(
            -sampled_terms[0] + sampled_terms[1] + sampled_terms[2] + sampled_terms[3]
        )
    return tuple(columns), points, summary


def _run_fringe(config: ScenarioConfig, axis: str, knob: str):
    grid = config.grid.values()
    scan = analysis.fringe_scan(_settings(config), axis, grid)
    columns = [knob, "probability"]
    sampled = None
    if config.shots:
        sampled = analysis.sample_fringe_scan(
            scan, config.shots, np.random.default_rng(config.seed)
        )
        columns += ["counts", "estimated_probability"]
    points = []
    for i, x in enumerate(scan.grid):
        point = {knob: x, "probability": scan.probabilities[i]}
        if sampled:
            point["counts"] = sampled.counts[i]
            point["estimated_probability"] = sampled.estimated[i]
        points.append(point)
    period = 2 * math.pi / scan.frequency
    peak = None if scan.fitted_offset is None else (
        (scan.fitted_offset / scan.frequency) % period
    )
    summary = {
        "visibility": scan.fitted_visibility,
        "offset": scan.fitted_offset,
        "peak_location": peak,
        "degenerate_fit": scan.degenerate,
    }
    if sampled:
        summary["sampled_visibility"] = sampled.fitted_visibility
        summary["sampled_offset"] = sampled.fitted_offset
    return tuple(columns), points, summary


def _run_phase_fringe(config: ScenarioConfig):
    return _run_fringe(config, "phase_phi", "phi")


def _run_amplitude_fringe(config: ScenarioConfig):
    return _run_fringe(config, "angle_delta", "delta")


def _run_mixed_state(config: ScenarioConfig):
    n, gamma, theta = config.n_pairs, config.gamma, config.theta
    target = protocol.closed_form_bob_ket(n, gamma, theta)
    points = []
    worst_entry = worst_purity = worst_fidelity = 0.0
    for p in config.grid.values():
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"mixed_state grid value p={p} outside [0, 1]")
        outcome = protocol.rsp_mixed(_settings(config, p=p))
        purity, fidelity = analysis.purity_and_fidelity(outcome.bob_state, target)
        entry_error = operator_distance(
            outcome.bob_state, protocol.closed_form_bob_density(n, gamma, theta, p)
        )
        purity_error = abs(purity - (1.0 + p * p) / 2.0)
        fidelity_error = abs(fidelity - (1.0 + p) / 2.0)
        worst_entry = max(worst_entry, entry_error)
        worst_purity = max(worst_purity, purity_error)
        worst_fidelity = max(worst_fidelity, fidelity_error)
        points.append(
            {
                "p": p,
                "purity": purity,
                "fidelity": fidelity,
                "entry_error": entry_error,
            }
        )
    summary = {
        "max_entry_error": worst_entry,
        "max_purity_error": worst_purity,
        "max_fidelity_error": worst_fidelity,
    }
    return ("p", "purity", "fidelity", "entry_error"), points, summary


def _run_populations(config: ScenarioConfig):
    outcome = protocol.rsp_mixed(_settings(config))
    populations = analysis.component_populations(outcome.bob_state)
    total_photons = 2 * config.n_pairs - 1
    modes = outcome.bob_state.modes
    points = []
    for h in range(total_photons, -1, -1):
        occ = (h, total_photons - h)
        points.append(
            {
                "component": occupation_label(modes, occ),
                "population": populations.get(occ, 0.0),
            }
        )
    extremes = max(points[0]["population"], points[-1]["population"])
    summary = {
        "population_sum": sum(p["population"] for p in points),
        "extreme_population": extremes,
    }
    return ("component", "population"), points, summary


def _run_general_n(config: ScenarioConfig):
    rng = np.random.default_rng(config.seed)
    points = []
    worst_pure = worst_mixed = 0.0
    for value in config.grid.values():
        n = int(round(value))
        for trial in range(config.trials):
            gamma = float(rng.uniform(0.0, math.pi / 4))
            theta = float(rng.uniform(0.0, 2 * math.pi))
            p = float(rng.uniform(0.0, 1.0))
            pure = protocol.rsp_pure(RspSettings(n_pairs=n, gamma=gamma, theta=theta))
            target = protocol.closed_form_bob_ket(n, gamma, theta)
            pure_error = abs(1.0 - abs(inner_product(target, pure.bob_ket)))
            mixed = protocol.rsp_mixed(
                RspSettings(n_pairs=n, gamma=gamma, theta=theta, p_strength=p)
            )
            mixed_error = operator_distance(
                mixed.bob_state,
                protocol.closed_form_bob_density(n, gamma, theta, p),
            )
            worst_pure = max(worst_pure, pure_error)
            worst_mixed = max(worst_mixed, mixed_error)
            points.append(
                {
                    "n": n,
                    "trial": trial,
                    "gamma": gamma,
                    "theta": theta,
                    "p": p,
                    "pure_overlap_error": pure_error,
                    "mixed_entry_error": mixed_error,
                }
            )
    summary = {
        "max_pure_overlap_error": worst_pure,
        "max_mixed_entry_error": worst_mixed,
    }
    columns = (
        "n", "trial", "gamma", "theta", "p",
        "pure_overlap_error", "mixed_entry_error",
    )
    return columns, points, summary


def _run_distinguishability(config: ScenarioConfig):
    report = protocol.distinguishability_demo(_settings(config, p=1.0))
    points = []
    aux_pos = next(
        i for i, m in enumerate(report.modes) if m.tag > 0
    )
    for occ in sorted(report.populations):
        points.append(
            {
                "component": occupation_label(report.modes, occ),
                "population": report.populations[occ],
                "tagged": occ[aux_pos] > 0,
            }
        )
    summary = {
        "tagged_population": report.tagged_total,
        "distinguishability": report.distinguishability,
    }
    return ("component", "population", "tagged"), points, summary


_RUNNERS = {
    "chsh": _run_chsh,
    "phase_fringe": _run_phase_fringe,
    "amplitude_fringe": _run_amplitude_fringe,
    "mixed_state": _run_mixed_state,
    "populations": _run_populations,
    "general_n": _run_general_n,
    "distinguishability_demo": _run_distinguishability,
}
