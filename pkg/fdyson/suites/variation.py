"""Suite variation: 1/H-variación de fBm y de los residuos Y"""

import logging

import pandas as pd

from ..dynamics import extract_Y
from ..gaussian_paths import sample_path
from ..harness import Suite
from ..models import GridSpec, TestReport
from ..statistics import abs_moment_std_normal, expected_Y_variation, skorohod_variation_limit, variation_report
from .common import gradient_norm_sq, initial_for, replicate_eigenpath, require_fbm

logger = logging.getLogger(__name__)

variation = Suite('variation', __name__, stream=3)


def _variation_frame(report, **labels) -> pd.DataFrame:
    rows = []
    for r, row in enumerate(report.estimates):
        for n, value in zip(report.resolutions, row):
            rows.append({**labels, 'replicate': r, 'n': n, 'variation': value})
    return pd.DataFrame(rows)


def _report(name, rep, band, ctx, sub, **details) -> TestReport:
    passed = rep.within_band(band) and rep.monotone_within()
    return TestReport(name=name, statistic=rep.relative_error, threshold=band, passed=passed,
                      sample_sizes={'replicates': len(rep.estimates), 'finest': rep.resolutions[-1]},
                      seeds={'stream': ctx.stream, 'sub': sub}, details={**rep.to_dict(), **details})


@variation.check
def fbm_variation(ctx):
    opts = ctx.options
    cfg = ctx.config
    model = require_fbm(ctx)
    resolutions = sorted(opts['resolutions'])
    grid = GridSpec(cfg.horizon, resolutions[-1])
    p = 1.0 / cfg.hurst
    paths = ctx.map_replicates(lambda seed: sample_path(model, grid, seed).values,
                               opts['fbm_replicates'], sub=0, desc='fBm')
    rep = variation_report(paths, p, resolutions, cfg.horizon * abs_moment_std_normal(p))
    ctx.write_csv('variation_fbm.csv', _variation_frame(rep))
    return [_report('variation_fbm', rep, opts['band'], ctx, 0)]


@variation.check
def residual_variation(ctx):
    opts = ctx.options
    cfg = ctx.config
    model = require_fbm(ctx)
    resolutions = sorted(opts['resolutions'])
    grid = GridSpec(cfg.horizon, resolutions[-1])
    H = cfg.hurst
    X0 = initial_for(ctx, cfg.dimension)

    def replicate(seed):
        ep = replicate_eigenpath(cfg.ensemble, cfg.dimension, grid, model, seed, X0)
        return extract_Y(ep, H).residual

    residuals = ctx.map_replicates(replicate, opts['y_replicates'], sub=1, desc='Y')
    target = skorohod_variation_limit(H, cfg.horizon, gradient_norm_sq(cfg.ensemble))
    stated = expected_Y_variation(H, cfg.horizon)
    reports, frames = [], []
    for i in range(cfg.dimension):
        rep = variation_report([Y[i] for Y in residuals], 1.0 / H, resolutions, target)
        frames.append(_variation_frame(rep, i=i + 1))
        reports.append(_report(f"variation_Y_{i + 1}", rep, opts['band'], ctx, 1,
                               stated_limit=stated,
                               stated_limit_relative_error=abs(rep.means[-1] - stated) / stated))
    ctx.write_csv('variation_Y.csv', pd.concat(frames, ignore_index=True))
    return reports
