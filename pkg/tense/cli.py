"""
Command line interface.

    tense eval-grid --config run.json
    tense design    --config run.json --wave 1
    tense sample    --config run.json --count 5
    tense report    --config run.json

Exit codes: 0 on success, 2 for configuration and input errors, 3 for
numerical failures.
"""
import argparse
import logging
from pathlib import Path
from typing import Any, Callable

import numpy as np
import pandas as pd

from tense import DEFAULTS
from tense.config.run import RunConfig
from tense.design.points import ghost_points, straddle_pairs
from tense.design.sequential import DesignState, sequential_design
from tense.design.uci import UciSpec
from tense.emulator.adjust import AdjustedEmulator, PriorSpec, TrainingSet, build_emulator
from tense.emulator.likelihood import estimate_theta_mle
from tense.emulator.sampling import jump_statistics, probe_pairs, sample_realizations
from tense.errors import ConfigError, NumericalError, TenseError
from tense.io.runs import (
    DESIGN_FILE,
    design_files,
    design_frame,
    read_runs,
    training_from_designs,
)
from tense.models import geometry as geo
from tense.models.functions import evaluate
from tense.output import csv as csv_out
from tense.output.report import build_report, write_report
import tense.tooling as tooling


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


# region inputs
def _require_function(cfg: RunConfig) -> str:
    if cfg.function is None:
        raise ConfigError("Evaluating runs needs a 'function'; give runs.path for other models")
    return cfg.function


def _evaluated(cfg: RunConfig, points: Any) -> TrainingSet:
    pts = tooling.as_points(points)
    return TrainingSet(pts, evaluate(_require_function(cfg), pts))


def load_training(cfg: RunConfig) -> TrainingSet:
    """
    Training runs from, in order of precedence, a runs file, earlier design
    waves, explicit points or a cell-centred grid design. Without any of
    these the emulator is the prior.
    """
    runs = cfg['runs']
    if runs.get('path'):
        data = read_runs(runs['path'])
    elif runs.get('from_design'):
        data = training_from_designs(design_files(cfg.output_dir), cfg.function)
    elif runs.get('points') is not None:
        data = _evaluated(cfg, runs['points'])
    elif runs.get('design_grid'):
        data = _evaluated(cfg, geo.toy_grid_design(int(runs['design_grid']), cfg.box))
    else:
        data = TrainingSet.empty()
    logger.info("Loaded %d runs (%d ghost)", len(data), int(data.ghost_mask.sum()))
    return data


def fit_prior(cfg: RunConfig, data: TrainingSet) -> PriorSpec:
    """Prior from the config, with theta replaced by its MLE when ``mle.fit`` is set."""
    prior = cfg.prior(data)
    mle = cfg['mle']
    if not mle.get('fit'):
        return prior
    theta = estimate_theta_mle(
        prior, data, tuple(mle['bounds']), include_ghosts=mle['include_ghosts'],
    )
    return prior.with_theta(theta)


def build_run_emulator(cfg: RunConfig) -> tuple[AdjustedEmulator, TrainingSet]:
    data = load_training(cfg)
    return build_emulator(fit_prior(cfg, data), data), data


def resolve_ghosts(cfg: RunConfig) -> TrainingSet:
    spec = cfg['design'].get('ghosts')
    if not spec:
        return TrainingSet.empty()
    boundary = spec.get('boundary', "olympus")
    if boundary == "olympus":
        boundary = geo.olympus_ghost_boundary()
    elif isinstance(boundary, str):
        raise ConfigError(f"Unknown ghost boundary '{boundary}'")
    return ghost_points(boundary, int(spec['count']))


def resolve_straddles(cfg: RunConfig) -> np.ndarray:
    """Straddle points as rows upper, lower per pair."""
    specs = cfg['design'].get('straddles') or []
    if not specs:
        return np.empty((0, 2))
    tears = cfg.surface.tear_lines
    faults, offsets, xs = [], [], []
    for spec in specs:
        fault = spec['fault']
        if isinstance(fault, int):
            if not 0 <= fault < len(tears):
                raise ConfigError(f"Surface '{cfg.surface.name}' has no tear line {fault}")
            fault = tears[fault][[0, -1]]
        faults.append(fault)
        offsets.append(float(spec['offset']))
        xs.append(spec['x'])
    pairs = straddle_pairs(cfg.surface, faults, offsets, xs)
    return np.array([pt for pair in pairs for pt in pair])


# region commands
def cmd_eval_grid(cfg: RunConfig, args: argparse.Namespace) -> None:
    em, _ = build_run_emulator(cfg)
    out = cfg.output_dir
    grid = tooling.regular_grid(cfg.box, cfg['grid']['nx'], cfg['grid']['ny'])
    df = (
        pd.DataFrame(grid, columns=['x', 'y'])
        .tense.predict(em)
        .tense.regions(cfg.surface)
        .tense.flag_tears(cfg.surface)
    )
    path = df.tense.to_grid_csv(out / "grid.csv", precision=cfg['output'].get('precision'))
    logger.info("Wrote %s", path)

    tears = df[df['on_tear']]
    if len(tears):
        logger.warning(
            "%d grid cells lie on a tear of '%s'; they take the region above",
            len(tears), cfg.surface.name,
        )
    csv_out.write_json({
        'surface': cfg.surface.name,
        'tolerance': DEFAULTS['embedding']['tear_tolerance'],
        'count': len(tears),
        'cells': tears[['x', 'y', 'region']],
    }, out / "grid_tears.json")

    if cfg['output'].get('binary'):
        path = csv_out.write_npz(
            out / "grid.npz",
            x=df['x'].to_numpy(), y=df['y'].to_numpy(),
            mean=df['mean'].to_numpy(), sd=df['sd'].to_numpy(),
        )
        logger.info("Wrote %s", path)


def cmd_design(cfg: RunConfig, args: argparse.Namespace) -> None:
    wave = args.wave
    if wave < 1:
        raise ConfigError(f"--wave must be at least 1, got {wave}")
    dcfg = cfg['design']
    out = cfg.output_dir
    candidates = tooling.regular_grid(cfg.box, *dcfg['candidates'])
    eval_grid = tooling.regular_grid(cfg.box, *dcfg['eval_grid'])

    if wave == 1:
        ghosts = resolve_ghosts(cfg)
        straddles = resolve_straddles(cfg)
        state = DesignState(candidates, straddles, ghosts, dcfg.get('nn_k'))
        result = sequential_design(cfg.prior(), state, eval_grid, int(dcfg['budget']))
        table = design_frame(ghosts.points, straddles, result.points)
    else:
        previous = design_files(out, before=wave)
        if not previous:
            raise ConfigError(f"Wave {wave} needs the designs of earlier waves in {out}")
        if cfg['runs'].get('path'):
            data = read_runs(cfg['runs']['path'])
        else:
            data = training_from_designs(previous, cfg.function)
        prior = fit_prior(cfg, data)
        em = build_emulator(prior, data)

        ghost = data.ghost_mask
        ucfg = cfg['uci']
        f_plus = ucfg.get('f_plus')
        if f_plus is None:
            f_plus = float(data.values[~ghost].max())
        spec = UciSpec(float(f_plus), ucfg['c'], ucfg['delta'])

        grid_df = pd.DataFrame(eval_grid, columns=['x', 'y']).tense.uci(em, spec)
        cand_df = pd.DataFrame(candidates, columns=['x', 'y']).tense.uci(em, spec)
        csv_out.write_table(grid_df, out / f"uci_wave{wave}.csv", cfg['output'].get('precision'))
        in_grid = grid_df['in_region'].to_numpy()
        in_cand = cand_df['in_region'].to_numpy()
        logger.info(
            "UCI region (f+=%g, c=%g, delta=%g) keeps %d of %d candidates",
            spec.f_plus, spec.c, spec.delta, int(in_cand.sum()), len(in_cand),
        )
        if not in_grid.any() or not in_cand.any():
            raise ConfigError(f"UCI region is empty for wave {wave}")

        state = DesignState(
            candidates[in_cand], data.points[~ghost], data.subset(ghost), dcfg.get('nn_k'),
        )
        result = sequential_design(prior, state, eval_grid[in_grid], int(dcfg['budget']))
        table = design_frame(greedy=result.points)

    path = csv_out.write_design_csv(table, out / DESIGN_FILE.format(wave=wave))
    logger.info("Wrote %s with %d points", path, len(table))


def cmd_sample(cfg: RunConfig, args: argparse.Namespace) -> None:
    scfg = cfg['sample']
    out = cfg.output_dir
    em, data = build_run_emulator(cfg)
    if scfg['grid'] == "design":
        grid = data.points[~data.ghost_mask]
    else:
        grid = tooling.regular_grid(cfg.box, *scfg['grid'])
    probes = tooling.as_points(scfg.get('probes') or [])
    pairs = probe_pairs(probes, float(scfg['probe_eps'])) if len(probes) else np.empty((0, 2))

    samples = sample_realizations(em, np.vstack([grid, pairs]), args.count, cfg.seed)
    grid_samples = samples[:len(grid)]
    path = csv_out.write_samples_csv(grid, grid_samples, out / "samples.csv", cfg['output'].get('precision'))
    logger.info("Wrote %s", path)

    summary = {
        'count': args.count,
        'seed': cfg.seed,
        'probe_eps': float(scfg['probe_eps']),
        **jump_statistics(probes, samples[len(grid):]),
    }
    csv_out.write_json(summary, out / "samples_summary.json")
    if cfg['output'].get('binary'):
        csv_out.write_npz(out / "samples.npz", points=grid, samples=grid_samples)


def cmd_report(cfg: RunConfig, args: argparse.Namespace) -> None:
    data = load_training(cfg)
    prior = fit_prior(cfg, data)
    report = build_report(
        prior, data, cfg['report'], cfg['mle'],
        alpha3=float(cfg['prior']['alpha3']),
        seed=cfg.seed,
    )
    json_path, html_path = write_report(report, cfg.output_dir)
    logger.info("Wrote %s and %s", json_path, html_path)


COMMANDS: dict[str, Callable[[RunConfig, argparse.Namespace], None]] = {
    "eval-grid": cmd_eval_grid,
    "design": cmd_design,
    "sample": cmd_sample,
    "report": cmd_report,
}


# region entry point
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tense",
        description="Emulation of 2-D functions with partial discontinuities on torn embeddings.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="Run configuration JSON.")
    common.add_argument("--out", type=Path, help="Output directory; overrides output.dir.")
    common.add_argument("--seed", type=int, help="Random seed; overrides seed.")
    common.add_argument("--binary", action="store_true", help="Also write full-precision .npz files.")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug.")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("eval-grid", parents=[common], help="Emulator mean and sd on a grid.")
    design = sub.add_parser("design", parents=[common], help="Sequential design of a wave of runs.")
    design.add_argument("--wave", type=int, default=1)
    sample = sub.add_parser("sample", parents=[common], help="Realisations of the adjusted emulator.")
    sample.add_argument("--count", type=int, default=5)
    sub.add_parser("report", parents=[common], help="Diagnostics report as JSON and HTML.")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig.from_dict()
    overrides: dict[str, Any] = {}
    if args.out is not None:
        overrides['output'] = {'dir': str(args.out)}
    if args.seed is not None:
        overrides['seed'] = args.seed
    if args.binary:
        overrides.setdefault('output', {})['binary'] = True
    return cfg.updated(overrides) if overrides else cfg


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        cfg = load_config(args)
        COMMANDS[args.command](cfg, args)
    except (NumericalError, np.linalg.LinAlgError) as err:
        logger.error("Numerical failure: %s", err)
        return EXIT_NUMERICAL
    except (TenseError, ValueError, KeyError, FileNotFoundError) as err:
        logger.error("%s", err)
        return EXIT_CONFIG
    return EXIT_OK
