"""The five workflows behind the command line; each writes its tables into the output directory."""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import polars as pl

from continuation import (
    Branch,
    ContinuationSettings,
    branch_from_event,
    continue_branch,
    origin_for_ring,
    origin_for_satellite,
)
from equilibria import (
    EquilibriumPoint,
    RingConfiguration,
    SearchGrid,
    find_satellite_equilibria,
    maxwell_ring,
    morse_census,
    ring_residual,
)
from spectral import (
    BifurcationEvent,
    ScanSettings,
    empirical_thresholds,
    find_mu_k,
    mu_sweep,
    scan_equilibria,
    scan_ring,
)
from verification import closure_error, oracle_suite
from .config import ConfigError, RunConfig
from . import writers

logger = logging.getLogger(__name__)


@dataclass
class CommandResult:
    """Files a command wrote and whether its checks held."""

    outputs: List[Path] = field(default_factory=list)
    passed: bool = True
    summary: Dict = field(default_factory=dict)


def _grid(config: RunConfig) -> SearchGrid:
    return SearchGrid(
        angles=config.grid_angles,
        radii=config.grid_radii,
        radius_min=config.radius_min,
        radius_max=config.radius_max,
        dedup_tol=config.dedup_tol,
        grad_tol=config.grad_tol,
    )


def _scan_settings(config: RunConfig) -> ScanSettings:
    return ScanSettings(
        nu_min=config.nu_min,
        nu_max=config.nu_max,
        step=config.nu_step,
        tol=config.bisection_tol,
        zero_tol=config.zero_tol,
        harmonics=config.harmonics,
        resonance_tol=config.resonance_tol,
    )


def _continuation_settings(config: RunConfig) -> ContinuationSettings:
    return ContinuationSettings(
        L=config.truncation,
        epsilon=config.epsilon,
        tol=config.corrector_tol,
        max_iter=config.corrector_max_iter,
        h_init=config.h_init,
        h_min=config.h_min,
        h_max=config.h_max,
    )


def _out(config: RunConfig, out_dir: Optional[Path]) -> Path:
    return Path(out_dir) if out_dir is not None else Path(config.out_dir)


def _ring(config: RunConfig) -> RingConfiguration:
    return maxwell_ring(config.n, config.mu)


def _equilibria(config: RunConfig, cfg: RingConfiguration) -> List[EquilibriumPoint]:
    return find_satellite_equilibria(cfg, _grid(config), cfg.satellite_system(config.eps_coll))


def _events(config: RunConfig, cfg: RingConfiguration) -> Tuple[List[BifurcationEvent], List[EquilibriumPoint]]:
    """Events in table order: satellite events by equilibrium, ring events by block."""
    if config.problem == 'satellite':
        points = _equilibria(config, cfg)
        return scan_equilibria(points, _scan_settings(config)), points
    return scan_ring(cfg, _scan_settings(config)), []


def cmd_ring(config: RunConfig, out_dir: Optional[Path] = None) -> CommandResult:
    """Build the Maxwell ring, print its constants (shortest round-trip form) and write the body table."""
    cfg = _ring(config)
    residual = ring_residual(cfg)
    for line in (
        f"n = {cfg.n}",
        f"mu = {float(cfg.mu)!r}",
        f"s1 = {float(cfg.s1)!r}",
        f"omega = {float(cfg.omega)!r}",
        f"residual = {float(residual)!r}",
    ):
        print(line)
    path = _out(config, out_dir) / 'ring.csv'
    writers.write_table(writers.ring_rows(cfg), writers.RING_COLUMNS, path)
    return CommandResult(
        outputs=[path],
        passed=residual < 1e-10,
        summary={'n': cfg.n, 'mu': cfg.mu, 's1': cfg.s1, 'omega': cfg.omega, 'residual': residual},
    )


def cmd_equilibria(config: RunConfig, out_dir: Optional[Path] = None) -> CommandResult:
    """Satellite equilibrium census over the ring."""
    cfg = _ring(config)
    points = _equilibria(config, cfg)
    census = morse_census(points, len(cfg.satellite_system(config.eps_coll).masses))
    logger.info(
        f"Census: {census['minima']} minima, {census['saddles']} saddles, {census['maxima']} maxima, "
        f"{census['degenerate']} degenerate (Euler {census['euler']}, expected {census['expected_euler']})"
    )
    path = _out(config, out_dir) / 'equilibria.csv'
    writers.write_table(writers.equilibrium_rows(points), writers.EQUILIBRIUM_COLUMNS, path)
    return CommandResult(outputs=[path], summary={'equilibria': len(points), **census})


def cmd_scan(config: RunConfig, out_dir: Optional[Path] = None) -> CommandResult:
    """
    Bifurcation events of every block, plus a central-mass sweep when mu_values is set.

    For the ring the sweep also locates the planar thresholds mu_k.
    """
    out = _out(config, out_dir)
    cfg = _ring(config)
    events, _ = _events(config, cfg)
    pattern_n = cfg.n if config.problem == 'nbody' else None
    outputs = [out / 'events.csv']
    writers.write_table(writers.event_rows(events, pattern_n), writers.EVENT_COLUMNS, outputs[0])
    summary: Dict = {'events': len(events)}

    if config.mu_values:
        rows = mu_sweep(config.n, config.mu_values, _scan_settings(config))
        outputs.append(out / 'mu_sweep.csv')
        writers.write_table(rows, writers.SWEEP_COLUMNS, outputs[-1])
        records = [find_mu_k(config.n, k, (1e-6, config.mu_k_max)) for k in range(1, config.n)]
        records += empirical_thresholds(rows, config.mu_values)
        outputs.append(out / 'thresholds.csv')
        writers.write_table(writers.threshold_rows(records), writers.THRESHOLD_COLUMNS, outputs[-1])
        summary['sweep_rows'] = len(rows)
    return CommandResult(outputs=outputs, summary=summary)


def cmd_continue(
    config: RunConfig,
    out_dir: Optional[Path] = None,
    event_index: Optional[int] = None,
    steps: Optional[int] = None,
) -> CommandResult:
    """
    Continue the branch of one event and write its point table and JSON document.

    Raises:
        ConfigError: If the event index is out of range
    """
    out = _out(config, out_dir)
    index = config.event if event_index is None else event_index
    steps = config.steps if steps is None else steps
    cfg = _ring(config)
    events, points = _events(config, cfg)
    if not 0 <= index < len(events):
        raise ConfigError(f"--event {index} is out of range: {len(events)} events found")
    event = events[index]
    if config.problem == 'satellite':
        origin = origin_for_satellite(points[event.source], cfg.satellite_system(config.eps_coll), points)
    else:
        origin = origin_for_ring(cfg)

    branch = branch_from_event(event, origin, settings=_continuation_settings(config))
    continue_branch(branch, max_steps=steps)
    closures = _closures(branch, config)

    stem = f"branch_{index:03d}"
    csv_path, json_path = out / f"{stem}.csv", out / f"{stem}.json"
    writers.write_table(writers.branch_rows(branch, closures), writers.BRANCH_COLUMNS, csv_path)
    writers.write_json(writers.branch_document(branch, config.to_echo(), closures), json_path)
    return CommandResult(
        outputs=[csv_path, json_path],
        summary={
            'points': len(branch.points),
            'termination': branch.termination,
            'max_multiplier': branch.max_multiplier(),
            'max_closure': max(closures.values(), default=0.0),
        },
    )


def _closures(branch: Branch, config: RunConfig) -> Dict[int, float]:
    if config.closure_every == 0:
        return {}
    system = branch.origin.system
    picks = list(range(0, len(branch.points), config.closure_every))
    if picks[-1] != len(branch.points) - 1:
        picks.append(len(branch.points) - 1)
    closures = {i: closure_error(branch.points[i].loop, system, config.closure_dt) for i in picks}
    logger.info(f"Closure checked at {len(picks)} points, worst {max(closures.values()):.3e}")
    return closures


def cmd_verify(config: RunConfig, out_dir: Optional[Path] = None) -> CommandResult:
    """Oracle suite for the configured problem; the result fails when any check fails."""
    cfg = _ring(config)
    grid = _grid(config) if config.problem == 'satellite' else None
    report: pl.DataFrame = oracle_suite(cfg, config.problem, config.seed, config.oracle_frequencies, grid)
    rows = report.to_dicts()
    path = _out(config, out_dir) / 'oracles.csv'
    writers.write_table(rows, writers.ORACLE_COLUMNS, path)
    failed = [row['check'] for row in rows if not row['passed']]
    for name in failed:
        logger.error(f"❌ Oracle check failed: {name}")
    return CommandResult(outputs=[path], passed=not failed, summary={'checks': len(rows), 'failed': len(failed)})


COMMANDS = {
    'ring': cmd_ring,
    'equilibria': cmd_equilibria,
    'scan': cmd_scan,
    'continue': cmd_continue,
    'verify': cmd_verify,
}
