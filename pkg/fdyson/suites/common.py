"""Piezas compartidas por las suites"""

from typing import Optional

import numpy as np

from ..errors import ConfigInvalid
from ..gaussian_paths import CovarianceModel
from ..matrix_ensemble import simulate_matrix_path
from ..models import EigenPath, GridSpec, SeedSpec
from ..spectral import eigen_path


def replicate_eigenpath(ensemble: str, d: int, grid: GridSpec, model: CovarianceModel, seed: SeedSpec,
                        X0: Optional[np.ndarray] = None, retain_frames: bool = False) -> EigenPath:
    """Una réplica completa: entradas gaussianas, camino matricial y autovalores"""
    P = simulate_matrix_path(ensemble, d, grid, model, seed, X0)
    return eigen_path(P, retain_frames=retain_frames)


def gradient_norm_sq(ensemble: str) -> float:
    return 2.0 if ensemble == 'symmetric' else 1.0


def require_fbm(ctx) -> CovarianceModel:
    if ctx.config.covariance != 'fbm':
        raise ConfigInvalid([f"covariance: la suite {ctx.suite} requiere fbm"])
    return ctx.config.model()


def initial_for(ctx, d: int) -> np.ndarray:
    """X(0) de la configuración si la dimensión coincide; si no, cero"""
    if d == ctx.config.dimension:
        return ctx.config.initial_matrix()
    dtype = complex if ctx.config.ensemble == 'hermitian' else float
    return np.zeros((d, d), dtype=dtype)
