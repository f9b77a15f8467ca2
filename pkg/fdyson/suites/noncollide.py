"""Suite noncollide: no colisión, identidades de la descomposición y Hoffman–Wielandt por paso"""

import logging
import math

import numpy as np
import pandas as pd

from ..dynamics import extract_Y
from ..errors import GapBelowTolerance
from ..gaussian_paths import CovarianceModel
from ..harness import Suite
from ..models import TestReport
from ..spectral import hoffman_wielandt_path
from ..statistics import min_gap
from .common import initial_for, replicate_eigenpath

logger = logging.getLogger(__name__)

noncollide = Suite('noncollide', __name__, stream=2)


def _combinations(ctx):
    """Pares (d, modelo); la covarianza bifraccional ignora la lista de H"""
    cfg = ctx.config
    opts = ctx.options
    if cfg.covariance == 'bifractional':
        return [(d, cfg.model()) for d in opts['dimensions']]
    return [(d, CovarianceModel.fbm(H)) for d in opts['dimensions'] for H in opts['hursts']]


@noncollide.check
def collisions(ctx):
    cfg = ctx.config
    opts = ctx.options
    count = opts['replicates'] or cfg.replicates
    tolerance = opts['identity_tolerance']
    reports, rows = [], []

    for sub, (d, model) in enumerate(_combinations(ctx)):
        X0 = initial_for(ctx, d)
        fbm = model.kind == 'fbm'

        def replicate(seed, d=d, model=model, X0=X0, fbm=fbm):
            ep = replicate_eigenpath(cfg.ensemble, d, cfg.grid, model, seed, X0)
            out = {'min_gap': min_gap(ep), 'collision': None, 'identity': math.nan}
            out.update(hoffman_wielandt_path(ep))
            if fbm:
                try:
                    dec = extract_Y(ep, model.hurst)
                    scale = 1.0 + float(np.max(np.abs(dec.eigenvalues)))
                    out['identity'] = max(dec.identity_residuals().values()) / scale
                except GapBelowTolerance as e:
                    out['collision'] = str(e)
            return out

        label = f"d={d},{model.label}"
        results = ctx.map_replicates(replicate, count, sub=sub, desc=label)
        gaps = np.array([r['min_gap'] for r in results])
        collided = [r['collision'] for r in results if r['collision']]
        rows.extend({'d': d, 'model': model.label, 'replicate': k, 'min_gap': g} for k, g in enumerate(gaps))
        seeds = {'stream': ctx.stream, 'sub': sub}
        sizes = {'replicates': count, 'steps': cfg.steps}

        worst = float(gaps.min())
        reports.append(TestReport(name=f"min_gap[{label}]", statistic=worst, threshold=0.0,
                                  passed=worst > 0 and not collided, comparison='>',
                                  sample_sizes=sizes, seeds=seeds,
                                  details={'quantiles': np.quantile(gaps, [0.01, 0.1, 0.5]).tolist(),
                                           'collisions': collided}))
        if fbm:
            identity = float(np.nanmax([r['identity'] for r in results])) if not collided else math.nan
            reports.append(TestReport(name=f"decomposition[{label}]", statistic=identity, threshold=tolerance,
                                      passed=bool(identity <= tolerance), sample_sizes=sizes, seeds=seeds))
        classical = sum(r['classical_violations'] for r in results)
        steps = sum(r['steps'] for r in results)
        reports.append(TestReport(name=f"hoffman_wielandt[{label}]", statistic=float(classical), threshold=0.0,
                                  passed=classical == 0, sample_sizes=sizes, seeds=seeds,
                                  details={'scaled_violation_rate': sum(r['scaled_violations'] for r in results) / steps,
                                           'max_ratio': max(r['max_ratio'] for r in results)}))

    ctx.write_csv('min_gaps.csv', pd.DataFrame(rows))
    return reports
