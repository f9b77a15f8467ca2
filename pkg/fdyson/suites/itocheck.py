"""Suite itocheck: media nula de Y, consistencia de Young, reducción a H = 1/2 e identidad log-brecha"""

import logging
import math

import numpy as np
import pandas as pd

from ..dynamics import dyson_euler_refined, extract_Y, log_gap_error, young_consistency
from ..gaussian_paths import CovarianceModel, sample_path
from ..harness import Suite
from ..matrix_ensemble import simulate_matrix_path
from ..models import GridSpec, TestReport
from ..spectral import eigen_path
from ..statistics import ks_critical_value, ks_two_sample, lag_correlations, mean_with_se, p_variation
from .common import gradient_norm_sq, initial_for, replicate_eigenpath, require_fbm

logger = logging.getLogger(__name__)

itocheck = Suite('itocheck', __name__, stream=6)

ZERO_MEAN_SE = 3.0
LAG_CORRELATION_SE = 3.0
EULER_REFINEMENTS = 3


@itocheck.check
def zero_mean(ctx):
    cfg = ctx.config
    opts = ctx.options
    model = require_fbm(ctx)
    grid = GridSpec(cfg.horizon, opts['zero_mean_steps'])
    X0 = initial_for(ctx, cfg.dimension)
    nodes = [grid.index_of(t * cfg.horizon) for t in opts['times']]

    def replicate(seed):
        ep = replicate_eigenpath(cfg.ensemble, cfg.dimension, grid, model, seed, X0)
        return extract_Y(ep, cfg.hurst).residual[:, nodes]

    samples = np.array(ctx.map_replicates(replicate, opts['zero_mean_replicates'], sub=0, desc='E[Y]'))
    rows, worst = [], 0.0
    for i in range(cfg.dimension):
        for k, t in enumerate(grid.nodes[nodes]):
            mean, se = mean_with_se(samples[:, i, k])
            z = abs(mean) / se
            worst = max(worst, z)
            rows.append({'i': i + 1, 't': t, 'mean': mean, 'se': se, 'z': z})
    ctx.write_csv('zero_mean.csv', pd.DataFrame(rows))
    return [TestReport(name='zero_mean_Y', statistic=worst, threshold=ZERO_MEAN_SE, passed=worst <= ZERO_MEAN_SE,
                       sample_sizes={'replicates': len(samples)}, seeds={'stream': ctx.stream, 'sub': 0},
                       details={'units': 'errores estándar'})]


@itocheck.check
def young_self_convergence(ctx):
    cfg = ctx.config
    opts = ctx.options
    model = require_fbm(ctx)
    resolutions = sorted(opts['young_resolutions'])
    grid = GridSpec(cfg.horizon, resolutions[-1])
    strides = [resolutions[-1] // n for n in resolutions]
    X0 = initial_for(ctx, cfg.dimension)

    def replicate(seed):
        P = simulate_matrix_path(cfg.ensemble, cfg.dimension, grid, model, seed, X0)
        ep = eigen_path(P, retain_frames=True)
        return young_consistency(P, ep, cfg.hurst, strides)

    results = ctx.map_replicates(replicate, opts['young_replicates'], sub=1, desc='Young')
    for r, rep in enumerate(results):
        rep.to_json(ctx.path(f"young_check_{r}.json"))
    failures = sum(not rep.monotone for rep in results)
    return [TestReport(name='young_consistency', statistic=float(failures), threshold=0.0, passed=failures == 0,
                       sample_sizes={'replicates': len(results)}, seeds={'stream': ctx.stream, 'sub': 1},
                       details={'max_discrepancies': [rep.max_discrepancies for rep in results],
                                'resolutions': resolutions})]


@itocheck.check
def brownian_reduction(ctx):
    """Con H = 1/2, Y_i tiene variación cuadrática 2t (t en el hermitiano) e incrementos no correlacionados"""
    cfg = ctx.config
    opts = ctx.options
    require_fbm(ctx)
    model = CovarianceModel.fbm(0.5)
    grid = GridSpec(cfg.horizon, opts['brownian_steps'])
    X0 = initial_for(ctx, cfg.dimension)

    def replicate(seed):
        ep = replicate_eigenpath(cfg.ensemble, cfg.dimension, grid, model, seed, X0)
        return extract_Y(ep, 0.5).residual

    residuals = np.array(ctx.map_replicates(replicate, opts['brownian_replicates'], sub=2, desc='H=1/2'))
    target = gradient_norm_sq(cfg.ensemble) * cfg.horizon
    qv = np.array([[p_variation(Y[i], 2.0) for i in range(cfg.dimension)] for Y in residuals])
    rel = float(np.max(np.abs(qv.mean(axis=0) - target) / target))

    correlations = {}
    worst_z = 0.0
    for i in range(cfg.dimension):
        corr = lag_correlations(np.diff(residuals[:, i, :], axis=1))
        correlations[f"Y_{i + 1}"] = corr
        worst_z = max(worst_z, max(abs(c) / se for c, se in corr.values()))
    seeds = {'stream': ctx.stream, 'sub': 2}
    sizes = {'replicates': len(residuals), 'steps': grid.steps}
    return [
        TestReport(name='brownian_quadratic_variation', statistic=rel, threshold=opts['qv_band'],
                   passed=rel <= opts['qv_band'], sample_sizes=sizes, seeds=seeds,
                   details={'target': target, 'means': qv.mean(axis=0).tolist()}),
        TestReport(name='brownian_lag_correlation', statistic=worst_z, threshold=LAG_CORRELATION_SE,
                   passed=worst_z <= LAG_CORRELATION_SE, sample_sizes=sizes, seeds=seeds,
                   details={'correlations': correlations}),
    ]


@itocheck.check
def dyson_reference(ctx):
    """Ley de λ_1(T): Euler de Dyson contra descomposición directa del BM matricial, mismo X(0)"""
    cfg = ctx.config
    opts = ctx.options
    require_fbm(ctx)
    d = cfg.dimension
    hermitian = cfg.ensemble == 'hermitian'
    delta = opts['euler_offset']
    lam0 = delta * (d - 1 - 2.0 * np.arange(d))
    X0 = np.diag(lam0).astype(complex if hermitian else float)
    brownian = CovarianceModel.fbm(0.5)
    count = opts['euler_replicates']
    stride = 2 ** EULER_REFINEMENTS
    fine = GridSpec(cfg.horizon, opts['euler_steps'] * stride)
    diffusion = math.sqrt(gradient_norm_sq(cfg.ensemble))

    def euler(seed):
        noises = [sample_path(brownian, fine, seed.for_entry(i, i)) for i in range(d)]
        return dyson_euler_refined(noises, lam0, stride, EULER_REFINEMENTS, diffusion).values[0, -1]

    def direct(seed):
        ep = replicate_eigenpath(cfg.ensemble, d, GridSpec(cfg.horizon, 1), brownian, seed, X0)
        return ep.values[0, -1]

    a = np.array(ctx.map_replicates(euler, count, sub=3, desc='Euler'))
    b = np.array(ctx.map_replicates(direct, count, sub=4, desc='directo'))
    stat = ks_two_sample(a, b)
    threshold = ks_critical_value(count, count)
    ctx.write_csv('dyson_reference.csv', pd.DataFrame({'euler': a, 'direct': b}))
    return [TestReport(name='dyson_euler_vs_direct', statistic=stat, threshold=threshold, passed=stat <= threshold,
                       sample_sizes={'euler': count, 'direct': count}, seeds={'stream': ctx.stream, 'sub': [3, 4]},
                       details={'lambda0': lam0.tolist(), 'steps': opts['euler_steps']})]


@itocheck.check
def log_gap_identity(ctx):
    cfg = ctx.config
    opts = ctx.options
    model = require_fbm(ctx)
    grid = GridSpec(cfg.horizon, opts['log_gap_steps'])
    t0_index = grid.index_of(opts['log_gap_t0'] * cfg.horizon)
    X0 = initial_for(ctx, cfg.dimension)

    def replicate(seed):
        ep = replicate_eigenpath(cfg.ensemble, cfg.dimension, grid, model, seed, X0)
        return max(log_gap_error(ep, i, i + 1, t0_index) for i in range(cfg.dimension - 1))

    errors = ctx.map_replicates(replicate, opts['log_gap_replicates'], sub=5, desc='log-brecha')
    worst = float(max(errors))
    return [TestReport(name='young_log_gap', statistic=worst, threshold=opts['log_gap_tolerance'],
                       passed=worst <= opts['log_gap_tolerance'], sample_sizes={'replicates': len(errors)},
                       seeds={'stream': ctx.stream, 'sub': 5}, details={'errors': errors})]
