"""Suite simulate: exactitud de los muestreadores, exponentes de Hölder y volcado de muestras"""

import logging

import numpy as np
import pandas as pd

from ..gaussian_paths import sample_path
from ..harness import STREAM_BLOCK, Suite
from ..matrix_ensemble import simulate_matrix_path
from ..models import GridSpec, TestReport
from ..spectral import eigen_path
from ..statistics import holder_exponent, ks_critical_value, ks_two_sample
from .common import initial_for, replicate_eigenpath, require_fbm

logger = logging.getLogger(__name__)

simulate = Suite('simulate', __name__, stream=1)

COVARIANCE_SE_LIMIT = 5.0
FBM_HOLDER_BAND = 0.05
EIGEN_HOLDER_BAND = 0.10


def _covariance_report(ctx, method: str, sub: int) -> TestReport:
    opts = ctx.options
    model = require_fbm(ctx)
    grid = GridSpec(ctx.config.horizon, opts['covariance_steps'])
    count = opts['covariance_replicates']
    idx = np.linspace(0, grid.steps, opts['subgrid_points'] + 1).round().astype(int)[1:]

    def replicate(seed):
        return sample_path(model, grid, seed, method).values[idx]

    X = np.vstack(ctx.map_replicates(replicate, count, sub=sub, desc=f"covarianza {method}"))
    t = grid.nodes[idx]
    products = X[:, :, None] * X[:, None, :]
    empirical = products.mean(axis=0)
    se = products.std(axis=0, ddof=1) / np.sqrt(count)
    exact = model.covariance(t[:, None], t[None, :])
    z = float(np.max(np.abs(empirical - exact) / se))
    return TestReport(name=f"covariance_{method}", statistic=z, threshold=COVARIANCE_SE_LIMIT,
                      passed=z <= COVARIANCE_SE_LIMIT, sample_sizes={'replicates': count},
                      seeds={'stream': ctx.stream, 'sub': sub},
                      details={'subgrid': t.tolist(), 'units': 'errores estándar'})


@simulate.check
def covariance_exactness(ctx):
    return [_covariance_report(ctx, 'circulant', 0), _covariance_report(ctx, 'cholesky', 1)]


@simulate.check
def sampler_agreement(ctx):
    opts = ctx.options
    model = require_fbm(ctx)
    grid = GridSpec(ctx.config.horizon, opts['ks_steps'])
    count = opts['ks_replicates']
    samples = {}
    for sub, method in ((2, 'circulant'), (3, 'cholesky')):
        samples[method] = np.array(ctx.map_replicates(
            lambda seed, method=method: sample_path(model, grid, seed, method).values[-1],
            count, sub=sub, desc=f"B_T {method}"))
    stat = ks_two_sample(samples['circulant'], samples['cholesky'])
    threshold = ks_critical_value(count, count)
    ctx.write_csv('terminal_samples.csv', pd.DataFrame(samples))
    return [TestReport(name='sampler_ks', statistic=stat, threshold=threshold, passed=stat <= threshold,
                       sample_sizes={'circulant': count, 'cholesky': count},
                       seeds={'stream': ctx.stream, 'sub': [2, 3]})]


@simulate.check
def holder_regression(ctx):
    opts = ctx.options
    cfg = ctx.config
    model = require_fbm(ctx)
    grid = GridSpec(cfg.horizon, opts['holder_steps'])
    count = opts['holder_replicates']
    H = cfg.hurst

    paths = ctx.map_replicates(lambda seed: sample_path(model, grid, seed).values, count, sub=4, desc='Hölder fBm')
    fbm = holder_exponent(paths, dt=grid.dt)
    reports = [TestReport(name='holder_fbm', statistic=abs(fbm.exponent - H), threshold=FBM_HOLDER_BAND,
                          passed=abs(fbm.exponent - H) <= FBM_HOLDER_BAND, sample_sizes={'replicates': count},
                          seeds={'stream': ctx.stream, 'sub': 4}, details=fbm.to_dict())]

    X0 = initial_for(ctx, cfg.dimension)
    eps = ctx.map_replicates(
        lambda seed: replicate_eigenpath(cfg.ensemble, cfg.dimension, grid, model, seed, X0).values,
        count, sub=5, desc='Hölder autovalores')
    for i in range(cfg.dimension):
        est = holder_exponent([v[i] for v in eps], dt=grid.dt)
        err = abs(est.exponent - H)
        reports.append(TestReport(name=f"holder_eigenvalue_{i + 1}", statistic=err, threshold=EIGEN_HOLDER_BAND,
                                  passed=err <= EIGEN_HOLDER_BAND, sample_sizes={'replicates': count},
                                  seeds={'stream': ctx.stream, 'sub': 5}, details=est.to_dict()))
    return reports


@simulate.check
def sample_dump(ctx):
    """Vuelca las primeras réplicas del camino matricial y de sus autovalores"""
    cfg = ctx.config
    model = cfg.model()
    X0 = cfg.initial_matrix()
    for r in range(ctx.options['dump_replicates']):
        seed = ctx.seed(r, sub=6)
        P = simulate_matrix_path(cfg.ensemble, cfg.dimension, cfg.grid, model, seed, X0)
        P.to_csv(ctx.path(f"matrix_path_{r}.csv"))
        eigen_path(P, retain_frames=False).to_csv(ctx.path(f"eigen_path_{r}.csv"))
        P.entry_path(0).to_csv(ctx.path(f"entry_path_{r}.csv"))
    ctx.seed_log.append({'label': 'volcado', 'master_seed': cfg.master_seed,
                         'stream': ctx.stream * STREAM_BLOCK + 6, 'replicates': [0, ctx.options['dump_replicates']]})
    return []
