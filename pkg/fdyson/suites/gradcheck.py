"""Suite gradcheck: derivativas analíticas de autovalores contra diferencias finitas"""

import logging

import numpy as np
import pandas as pd

from ..harness import Suite
from ..models import TestReport
from ..spectral import GRADIENT_BOUND, eigen_derivatives, eigh_jacobi, finite_difference_derivatives

logger = logging.getLogger(__name__)

gradcheck = Suite('gradcheck', __name__, stream=5)

MIN_SAMPLE_GAP = 0.1
MAX_DRAWS = 1000


def random_very_good(d: int, hermitian: bool, rng: np.random.Generator):
    """Matriz gaussiana redibujada hasta ser muy buena con brechas >= MIN_SAMPLE_GAP"""
    for _ in range(MAX_DRAWS):
        A = rng.standard_normal((d, d))
        if hermitian:
            A = A + 1j * rng.standard_normal((d, d))
        M = (A + A.conj().T) / 2.0
        dec = eigh_jacobi(M)
        if dec.very_good and dec.min_gap >= MIN_SAMPLE_GAP:
            return M, dec
    raise RuntimeError(f"No se obtuvo una matriz muy buena de dimensión {d}")


def _relative(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


@gradcheck.check
def derivative_formulas(ctx):
    opts = ctx.options
    hermitian = ctx.config.ensemble == 'hermitian'
    dims = opts['dimensions']

    def replicate(seed):
        d = dims[seed.replicate % len(dims)]
        M, dec = random_very_good(d, hermitian, seed.generator())
        der = eigen_derivatives(dec, strict=True)
        grad_fd, hess_fd = finite_difference_derivatives(M)
        expected_traces = der.expected_hessian_traces()
        return {
            'd': d,
            'grad_err': _relative(der.gradient, grad_fd),
            'hess_err': _relative(der.hessian, hess_fd),
            'norm_err': float(np.max(np.abs(der.gradient_norms() - der.expected_gradient_norm))),
            'trace_err': float(np.max(np.abs(der.hessian_traces() - expected_traces)
                                      / np.maximum(1.0, np.abs(expected_traces)))),
            'max_grad': float(np.max(np.abs(der.gradient))),
        }, der

    results = ctx.map_replicates(replicate, opts['samples'], sub=0, desc='matrices')
    frame = pd.DataFrame([r for r, _ in results])
    frame.insert(0, 'sample', range(len(frame)))
    ctx.write_csv('gradcheck.csv', frame)
    results[0][1].to_csv(ctx.path('derivatives_sample0.csv'))

    sizes = {'samples': len(frame)}
    seeds = {'stream': ctx.stream, 'sub': 0}
    identity = float(max(frame['norm_err'].max(), frame['trace_err'].max()))
    checks = [
        ('gradient_finite_difference', float(frame['grad_err'].max()), opts['gradient_rtol']),
        ('hessian_finite_difference', float(frame['hess_err'].max()), opts['hessian_rtol']),
        ('derivative_identities', identity, opts['identity_tol']),
        ('gradient_bound', float(frame['max_grad'].max()), GRADIENT_BOUND),
    ]
    return [TestReport(name=name, statistic=stat, threshold=thr, passed=stat <= thr,
                       sample_sizes=sizes, seeds=seeds) for name, stat, thr in checks]
