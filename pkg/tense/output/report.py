"""
Diagnostic report: leave-one-out errors, likelihood profile, a PSD sweep
of the torn covariance over the built-in surfaces and the geodesic
counterexample.
"""
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Sequence

import numpy as np
from jinja2 import Environment, PackageLoader

from tense.emulator.adjust import PriorSpec, TrainingSet
from tense.emulator.diagnostics import loo_diagnostics
from tense.emulator.likelihood import mle_search
from tense.errors import NumericalError
from tense.models.surfaces import builtin_embedding
from tense.nscov import (
    GEODESIC_LABELS,
    GEODESIC_POINTS,
    NsCovSpec,
    assemble_cov_matrix,
    geodesic_counterexample,
    geodesic_threshold,
    min_eigenvalue_check,
)
from tense.output.csv import write_json


logger = logging.getLogger(__name__)


# region sections
def loo_section(prior: PriorSpec, data: TrainingSet) -> dict[str, Any]:
    if (~data.ghost_mask).sum() < 3:
        return {'skipped': "fewer than 3 runs"}
    df = loo_diagnostics(prior, data)
    errors = df['std_error'].abs()
    return {
        'count': len(df),
        'beyond_3': int((errors > 3).sum()),
        'max_abs_error': float(errors.max()),
        'rows': df,
    }


def mle_section(
    prior: PriorSpec,
    data: TrainingSet,
    bounds: Sequence[float],
    include_ghosts: bool,
) -> dict[str, Any]:
    used = data if include_ghosts else data.subset(~data.ghost_mask)
    if len(used) < 5:
        return {'skipped': "fewer than 5 runs"}
    try:
        result = mle_search(prior, data, tuple(bounds), include_ghosts=include_ghosts)
    except NumericalError as err:
        logger.warning("Likelihood search failed: %s", err)
        return {'skipped': str(err)}
    return {
        'theta': result.theta,
        'loglik': result.loglik,
        'bounds': list(result.bounds),
        'on_edge': result.on_edge,
        'profile': result.profile,
    }


def psd_sweep(
    surfaces: Sequence[str],
    theta_fraction: float,
    alpha3: float,
    sets: int,
    points: int,
    seed: int,
) -> list[dict[str, Any]]:
    """
    Smallest eigenvalue of the torn covariance for each of ``sets`` random
    point sets, kept per set in ``set_min_eigenvalues`` with the overall
    minimum in ``min_eigenvalue``.

    Points are uniform in each surface's domain and theta is
    ``theta_fraction`` times the mean side of the domain.
    """
    rows = []
    for name in surfaces:
        surface = builtin_embedding(name)
        xmin, xmax, ymin, ymax = surface.domain
        theta = theta_fraction * float(np.mean(surface.width))
        spec = NsCovSpec(sigma=1.0, theta=theta, alpha3=alpha3, surface=surface)
        rng = np.random.default_rng(seed)
        eigs, violations = [], 0
        for _ in range(sets):
            pts = np.column_stack([
                rng.uniform(xmin, xmax, points),
                rng.uniform(ymin, ymax, points),
            ])
            min_eig, is_psd = min_eigenvalue_check(assemble_cov_matrix(spec, pts))
            eigs.append(min_eig)
            violations += not is_psd
        if violations:
            logger.warning("Surface '%s': %d of %d covariance matrices not PSD", name, violations, sets)
        rows.append({
            'surface': name,
            'theta': theta,
            'sets': sets,
            'points': points,
            'min_eigenvalue': float(min(eigs)) if eigs else None,
            'set_min_eigenvalues': [float(e) for e in eigs],
            'violations': violations,
        })
    return rows


def geodesic_section(theta: float) -> dict[str, Any]:
    matrix, min_eig = geodesic_counterexample(theta)
    return {
        'theta': theta,
        'points': GEODESIC_POINTS,
        'threshold': geodesic_threshold(),
        'labels': list(GEODESIC_LABELS),
        'matrix': matrix,
        'min_eigenvalue': min_eig,
        'is_psd': min_eig >= 0,
    }


def build_report(
    prior: PriorSpec,
    data: TrainingSet,
    settings: dict[str, Any],
    mle: dict[str, Any],
    *,
    alpha3: float,
    seed: int,
) -> dict[str, Any]:
    """
    Collect all report sections.

    Parameters
    ----------
    prior : PriorSpec
        Prior used for the leave-one-out fits and as likelihood template.
    data : TrainingSet
        Runs, ghost runs included.
    settings : dict
        The ``report`` block of a run config.
    mle : dict
        The ``mle`` block of a run config.
    """
    return {
        'created': datetime.now(timezone.utc).isoformat(timespec='seconds'),
        'mode': prior.kernel_mode,
        'prior': {'mean': prior.mean, 'sigma': prior.sigma, 'theta': prior.theta, 'nugget': prior.nugget},
        'runs': {'count': len(data), 'ghost': int(data.ghost_mask.sum())},
        'loo': loo_section(prior, data),
        'mle': mle_section(prior, data, mle['bounds'], mle['include_ghosts']),
        'psd_sweep': psd_sweep(
            settings['surfaces'],
            settings['psd_theta_fraction'],
            alpha3,
            settings['psd_sets'],
            settings['psd_points'],
            seed,
        ),
        'geodesic': geodesic_section(settings['geodesic_theta']),
    }


# region rendering
class TemplateManager:
    """Manages rendering templates"""

    def __init__(self):
        self._env = Environment(loader=PackageLoader("tense", "output"), autoescape=True)

    def render(self, report: dict[str, Any]) -> str:
        template = self._env.get_template("templates/report.jinja.html")
        return template.render(report=report)


def write_report(report: dict[str, Any], directory: str | Path) -> tuple[Path, Path]:
    """Write report.json and report.html into directory."""
    directory = Path(directory)
    json_path = write_json(report, directory / "report.json")
    html_path = directory / "report.html"
    html_path.write_text(TemplateManager().render(report))
    return json_path, html_path
