"""Suite selfsim: autosimilaridad de Y, de los autovalores y de las entradas"""

import logging

import numpy as np
import pandas as pd

from ..dynamics import extract_Y
from ..errors import AssumptionViolated
from ..harness import Suite
from ..matrix_ensemble import simulate_matrix_path
from ..models import GridSpec
from ..spectral import eigen_path
from ..statistics import gaussianity_probe, self_similarity_check
from .common import require_fbm

logger = logging.getLogger(__name__)

selfsim = Suite('selfsim', __name__, stream=4)


@selfsim.check
def self_similarity(ctx):
    cfg = ctx.config
    opts = ctx.options
    model = require_fbm(ctx)
    if not cfg.x0_is_zero():
        raise AssumptionViolated("La autosimilaridad requiere X(0) = 0")
    a = opts['scale']
    t = opts['time']
    count = opts['replicates']
    H = cfg.hurst

    def block(horizon):
        grid = GridSpec(horizon, opts['steps'])

        def replicate(seed):
            P = simulate_matrix_path(cfg.ensemble, cfg.dimension, grid, model, seed)
            ep = eigen_path(P, retain_frames=False)
            dec = extract_Y(ep, H)
            return dec.residual[:, -1], ep.values[:, -1], P.entries[0, -1]
        return replicate

    # bloques independientes sobre (t, n_s) y (at, n_s)
    short = ctx.map_replicates(block(t), count, sub=0, desc=f"t={t}")
    long = ctx.map_replicates(block(a * t), count, sub=1, desc=f"t={a * t}")
    seeds = {'stream': ctx.stream, 'sub': [0, 1]}
    reports = []
    for idx, label in enumerate(('Y', 'eigenvalues', 'entry')):
        x = np.array([r[idx] for r in short])
        y = np.array([r[idx] for r in long])
        reports.append(self_similarity_check(x, y, a, H, name=f"self_similarity_{label}", seeds=seeds))

    Y_long = np.array([r[0] for r in long])
    diagnostics = {}
    for i in range(cfg.dimension):
        try:
            diagnostics[f"Y_{i + 1}"] = gaussianity_probe(Y_long[:, i]).to_dict()
        except Exception as e:
            logger.warning(f"Diagnóstico de normalidad omitido: {str(e)}")
    reports[0].details['gaussianity'] = diagnostics

    rows = []
    for name, results, horizon in (('t', short, t), ('at', long, a * t)):
        for r, (Y, lam, _) in enumerate(results):
            for i in range(cfg.dimension):
                rows.append({'block': name, 'time': horizon, 'replicate': r, 'i': i + 1, 'Y': Y[i], 'lambda': lam[i]})
    ctx.write_csv('selfsim_samples.csv', pd.DataFrame(rows))
    return reports
