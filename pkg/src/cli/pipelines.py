"""Experiment pipelines behind the CLI commands"""

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from src.camassa_holm.ch_solver import (
    ch_energy,
    ch_evolve,
    ch_evolve_tangent,
    ch_finsler_cost,
    ch_verify_growth,
)
from src.characteristic.semilinear_solver import (
    CharTrajectory,
    SingularEvent,
    detect_singularity,
    integrate_characteristics,
    nonlocal_sources,
    picard_solve,
)
from src.characteristic.transform import CharState, graph_to_x, to_characteristic, window_labels
from src.cli.artifacts import ArtifactWriter, git_blob_hash
from src.config.experiment import Command, ExperimentConfig, PeakonData, Solver
from src.core.grid_function import GridFunction
from src.energy.energy_analysis import (
    apriori_bounds,
    char_totals,
    concentration_report,
    energy_E,
    energy_F,
    energy_time_series,
    k_constant,
)
from src.errors import (
    BlowupError,
    NearBreakingError,
    NoCollisionError,
    NonFiniteInputError,
    PicardStalledError,
    XiPositivityError,
)
from src.metric.distances import comparison_ratios, comparison_table, gaussian, gaussian_pair_family
from src.metric.finsler import TangentFrame, finsler_cost
from src.metric.tangent_transport import evolve_tangent, verify_growth
from src.peakons.dynamics import detect_crossing, integrate_peakons, peakon_energy
from src.smooth.novikov_solver import evolve_smooth

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_NO_COLLISION = 4

COMPARISON_COLUMNS = ["pair_id", "upper_bound", "sobolev_rhs", "weighted_l1", "kr"]


@dataclass
class PipelineOutcome:
    summary: Dict[str, Any] = field(default_factory=dict)
    times: List[float] = field(default_factory=list)
    events: List[SingularEvent] = field(default_factory=list)
    t_star: Optional[float] = None


@dataclass
class RunResult:
    exit_code: int
    note: str
    input_hash: str
    outcome: PipelineOutcome
    wall_seconds: float


def _relative_drift(series: pd.Series) -> float:
    reference = abs(series.iloc[0])
    spread = float((series - series.iloc[0]).abs().max())
    return spread / reference if reference > 0 else spread


def _peakon_data(cfg: ExperimentConfig) -> Optional[PeakonData]:
    return cfg.initial_data if isinstance(cfg.initial_data, PeakonData) else None


def _initial_char_state(cfg: ExperimentConfig) -> CharState:
    return to_characteristic(cfg.initial_field(), cfg.initial_data.profile())


def _window(cfg: ExperimentConfig) -> Optional[tuple]:
    if cfg.window is not None:
        return cfg.window.Y1, cfg.window.Y2
    peakons = _peakon_data(cfg)
    if peakons is None or len(peakons.peakons) < 2:
        return None
    q = [pq[1] for pq in peakons.peakons[:2]]
    Y1, Y2 = window_labels(cfg.initial_field(), q, cfg.initial_data.profile())
    return float(Y1), float(Y2)


def _char_energy_summary(traj: CharTrajectory) -> Dict[str, Any]:
    rows = [char_totals(s) for s in traj.states]
    E = pd.Series([r.E_win for r in rows])
    F = pd.Series([r.F_win for r in rows])
    return {"E0": float(E.iloc[0]), "F0": float(F.iloc[0]), "E_drift": _relative_drift(E), "F_drift": _relative_drift(F)}


def _x_profiles(states: List[CharState], template: GridFunction) -> pd.DataFrame:
    """Long-format ``t,x,u`` graphs of the stored slices on the x-grid"""
    frames = [pd.DataFrame({"t": s.t, "x": template.x, "u": graph_to_x(s, template).values}) for s in states]
    return pd.concat(frames, ignore_index=True)


def run_peakons(cfg: ExperimentConfig, writer: ArtifactWriter) -> PipelineOutcome:
    peakons = _peakon_data(cfg)
    if peakons is None:
        raise ValueError("the peakons command needs peakon initial data")
    traj = integrate_peakons(peakons.state(), cfg.time.t_end, cfg.time.dt)
    writer.write_csv("trajectory.csv", traj.to_frame())
    energies = pd.Series([peakon_energy(s) for s in traj.states])
    crossing = detect_crossing(traj)
    summary = {
        "halted": traj.halted,
        "reason": traj.reason,
        "t_final": float(traj.times[-1]),
        "E0": float(energies.iloc[0]),
        "E_drift": _relative_drift(energies),
        "crossing": None if crossing is None else {"t_star": crossing[0], "q_star": crossing[1]},
    }
    writer.write_json("report.json", summary)
    return PipelineOutcome(
        summary=summary,
        times=[float(t) for t in traj.times],
        t_star=None if crossing is None else crossing[0],
    )


def _characteristic_run(cfg: ExperimentConfig) -> CharTrajectory:
    s0 = _initial_char_state(cfg)
    if cfg.solver == Solver.PICARD:
        result = picard_solve(s0, cfg.time.t_end, cfg.picard.max_iter, cfg.picard.tol, cfg.picard.n_slices)
        logger.info("picard converged in %d sweeps", result.iterations)
        return CharTrajectory(states=result.slices, events=detect_singularity(result.slices))
    return integrate_characteristics(s0, cfg.time.t_end, cfg.time.dt, cfg.time.store_every)


def run_semilinear(cfg: ExperimentConfig, writer: ArtifactWriter) -> PipelineOutcome:
    traj = _characteristic_run(cfg)
    writer.write_char_archive(traj.states, traj.events)
    writer.write_csv("profiles_x.csv", _x_profiles(traj.states, cfg.grid.template()))
    summary = _char_energy_summary(traj)
    summary["min_xi"] = float(min(np.min(s.xi) for s in traj.states))
    summary["n_events"] = len(traj.events)
    summary["t_star"] = traj.t_star
    last = traj.states[-1]
    totals = char_totals(last)
    K = k_constant(totals.E_win, totals.F_win)
    summary["source_bounds"] = {
        name: {"sup": sup, "bound": bound, "passed": ok}
        for name, (sup, bound, ok) in nonlocal_sources(last).check_bounds(totals.E_win, K).items()
    }
    window = _window(cfg)
    if window is not None:
        writer.write_csv("energy_series.csv", energy_time_series(traj.states, *window))
    writer.write_json("report.json", summary)
    return PipelineOutcome(summary=summary, times=list(traj.times), events=traj.events, t_star=traj.t_star)


def _field_series(traj, energy: Callable[[GridFunction], float], extra: Optional[Dict] = None) -> pd.DataFrame:
    columns = {"t": traj.times, "E": [energy(u) for u in traj.states]}
    columns.update(extra or {})
    return pd.DataFrame(columns)


def run_smooth(cfg: ExperimentConfig, writer: ArtifactWriter) -> PipelineOutcome:
    u0 = cfg.initial_field()
    traj = evolve_smooth(u0, cfg.time.t_end, cfg.time.dt, cfg.time.store_every)
    series = _field_series(traj, energy_E, {"F": [energy_F(u) for u in traj.states]})
    writer.write_csv("trajectory.csv", traj.to_frame())
    writer.write_csv("energy_series.csv", series)
    bounds = [apriori_bounds(u) for u in (traj.states[0], traj.states[-1])]
    summary = {
        "E0": float(series["E"].iloc[0]),
        "F0": float(series["F"].iloc[0]),
        "E_drift": _relative_drift(series["E"]),
        "F_drift": _relative_drift(series["F"]),
        "bounds_initial": bounds[0],
        "bounds_final": bounds[1],
    }
    writer.write_json("report.json", summary)
    return PipelineOutcome(summary=summary, times=list(traj.times))


def _generic_tangent(u0: GridFunction, seed: int) -> TangentFrame:
    rng = np.random.default_rng(seed)
    amp, width, center = rng.uniform([0.05, 0.5, -1.0], [0.2, 1.5, 1.0])
    return TangentFrame.from_fields(gaussian(u0, amp, width, center))


def _growth_artifacts(writer, name, report) -> Dict[str, Any]:
    writer.write_csv(f"{name}.csv", report.to_frame())
    return {"fitted_rate": report.fitted_rate, "envelope_rate": report.envelope_rate, "max_ratio": report.max_ratio}


def run_metric(cfg: ExperimentConfig, writer: ArtifactWriter) -> PipelineOutcome:
    template = cfg.grid.template()
    pairs = gaussian_pair_family(template, cfg.metric.n_pairs, cfg.seed)
    table = comparison_table(pairs, cfg.metric.n_theta)
    writer.write_csv("distances.csv", table[COMPARISON_COLUMNS])
    ratios = comparison_ratios(table)

    u0 = cfg.initial_field()
    h = 1.0
    zero = np.zeros(template.n)
    flat = finsler_cost(template, TangentFrame(zero, zero, np.full(template.n, h), zero))
    translation = finsler_cost(u0, TangentFrame.translation(u0, h))

    traj = evolve_smooth(u0, cfg.time.t_end, cfg.time.dt, store_every=1)
    frames = evolve_tangent(traj, _generic_tangent(u0, cfg.seed))
    growth = verify_growth(traj, frames)
    summary = {
        "comparison_constants": ratios,
        "max_unweighted_bound": float(table["unweighted_bound"].max()),
        "flat_shift_cost": flat,
        "translation_cost": translation,
        "growth": _growth_artifacts(writer, "growth", growth),
    }
    writer.write_json("report.json", summary)
    return PipelineOutcome(summary=summary, times=list(traj.times))


def run_ch(cfg: ExperimentConfig, writer: ArtifactWriter) -> PipelineOutcome:
    u0 = cfg.initial_field()
    traj = ch_evolve(u0, cfg.time.t_end, cfg.time.dt, store_every=1)
    series = _field_series(traj, ch_energy)
    writer.write_csv("energy_series.csv", series)
    frames = ch_evolve_tangent(traj, _generic_tangent(u0, cfg.seed))
    growth = ch_verify_growth(traj, frames)
    summary = {
        "E0": float(series["E"].iloc[0]),
        "E_drift": _relative_drift(series["E"]),
        "translation_cost": ch_finsler_cost(u0, TangentFrame.translation(u0, 1.0)),
        "growth": _growth_artifacts(writer, "growth", growth),
    }
    writer.write_json("report.json", summary)
    return PipelineOutcome(summary=summary, times=list(traj.times))


def run_concentration(cfg: ExperimentConfig, writer: ArtifactWriter) -> PipelineOutcome:
    window = _window(cfg)
    traj = _characteristic_run(cfg)
    if window is not None:
        writer.write_csv("energy_series.csv", energy_time_series(traj.states, *window))
    writer.write_csv("profiles_x.csv", _x_profiles(traj.states, cfg.grid.template()))
    writer.write_json("events.json", [e.to_dict() for e in traj.events])
    if not traj.events:
        raise NoCollisionError()
    if window is None:
        raise ValueError("concentration needs two peakons or an explicit window")
    report = concentration_report(traj.states, traj.events, *window)
    peakons = _peakon_data(cfg)
    ode_crossing = None
    if peakons is not None:
        crossing = detect_crossing(integrate_peakons(peakons.state(), cfg.time.t_end, cfg.time.dt))
        ode_crossing = None if crossing is None else {"t_star": crossing[0], "q_star": crossing[1]}
    summary = {
        "report": report,
        "t_star": traj.t_star,
        "ode_crossing": ode_crossing,
        "energies": _char_energy_summary(traj),
    }
    writer.write_json("report.json", summary)
    return PipelineOutcome(summary=summary, times=list(traj.times), events=traj.events, t_star=traj.t_star)


PIPELINES: Dict[Command, Callable[[ExperimentConfig, ArtifactWriter], PipelineOutcome]] = {
    Command.PEAKONS: run_peakons,
    Command.SEMILINEAR: run_semilinear,
    Command.SMOOTH: run_smooth,
    Command.METRIC: run_metric,
    Command.CH: run_ch,
    Command.CONCENTRATION: run_concentration,
}


def run_experiment(cfg: ExperimentConfig) -> RunResult:
    """Run the configured pipeline and write its artifacts and manifest

    Exit codes: 0 ok, 2 unusable config, 3 blowup (partial artifacts kept),
    4 no collision for ``concentration``.
    """
    config_json = cfg.canonical_json()
    input_hash = git_blob_hash(config_json)
    writer = ArtifactWriter(cfg.output_dir)
    writer.write_json("config.json", cfg.model_dump(mode="json"))
    started = time.perf_counter()
    exit_code, note = EXIT_OK, ""
    outcome = PipelineOutcome()
    try:
        outcome = PIPELINES[cfg.command](cfg, writer)
    except (BlowupError, NearBreakingError, XiPositivityError, NonFiniteInputError, PicardStalledError) as exc:
        exit_code, note = EXIT_BLOWUP, "blowup" if isinstance(exc, BlowupError) else str(exc)
        partial = getattr(exc, "partial", [])
        written = writer.write_partial(partial)
        writer.write_json(
            "report.json",
            {"note": note, "error": str(exc), "partial_frames": len(partial), "partial_file": written},
        )
        logger.error("%s", exc)
    except NoCollisionError as exc:
        exit_code, note = EXIT_NO_COLLISION, str(exc)
        logger.error("%s", exc)
    except ValueError as exc:
        exit_code, note = EXIT_CONFIG, str(exc)
        logger.error("invalid experiment: %s", exc)
    wall = time.perf_counter() - started
    writer.write_manifest(
        config=cfg.model_dump(mode="json"),
        input_hash=input_hash,
        times=outcome.times,
        events=outcome.events,
        stats={"wall_seconds": wall},
    )
    return RunResult(exit_code=exit_code, note=note, input_hash=input_hash, outcome=outcome, wall_seconds=wall)
