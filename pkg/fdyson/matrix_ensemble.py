"""Caminos matriciales simétricos y hermitianos, y densidades conjuntas de autovalores.

X(t) = X(0) + X̂(t): en el caso simétrico X̂_kh = b_kh (k < h) y X̂_kk = √2 b_kk;
en el hermitiano X̂_kh = (Re b_kh + i Im b_kh)/√2 y X̂_kk = b_kk.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import GridMismatch, NonSymmetricOffset, SimplexViolation
from .gaussian_paths import CovarianceModel, simulate_entry_paths
from .models import (
    GridSpec,
    HermMatrixPath,
    ScalarPath,
    SeedSpec,
    SymMatrixPath,
    hermitian_coordinates,
    symmetric_coordinates,
)

logger = logging.getLogger(__name__)

ORTHOGONAL = 'orthogonal'
UNITARY = 'unitary'


def _stack_entries(entries: Sequence[ScalarPath], expected: int) -> tuple:
    if len(entries) != expected:
        raise ValueError(f"Se esperaban {expected} trayectorias de entradas, se recibieron {len(entries)}")
    grid = entries[0].grid
    for idx, path in enumerate(entries):
        if path.grid != grid:
            raise GridMismatch(f"La entrada {idx} usa {path.grid}; se esperaba {grid}")
    return grid, np.vstack([p.values for p in entries])


def _dimension_from_count(count: int, hermitian: bool) -> int:
    if hermitian:
        d = math.isqrt(count)
        ok = d * d == count
    else:
        d = (math.isqrt(8 * count + 1) - 1) // 2
        ok = d * (d + 1) // 2 == count
    if not ok or d < 2:
        raise ValueError(f"{count} trayectorias no corresponden a una dimensión d >= 2")
    return d


def assemble_symmetric(entries: Sequence[ScalarPath], X0: Optional[np.ndarray] = None) -> SymMatrixPath:
    """Ensambla el camino simétrico a partir de las d(d+1)/2 trayectorias b_kh, k <= h"""
    d = _dimension_from_count(len(entries), hermitian=False)
    grid, stacked = _stack_entries(entries, d * (d + 1) // 2)
    if X0 is None:
        X0 = np.zeros((d, d))
    X0 = np.asarray(X0)
    if X0.shape != (d, d):
        raise NonSymmetricOffset(f"X(0) tiene forma {X0.shape}; se esperaba {(d, d)}")
    if np.iscomplexobj(X0):
        if np.any(X0.imag):
            raise NonSymmetricOffset("X(0) simétrico debe ser real")
        X0 = X0.real
    if not np.array_equal(X0, X0.T):
        raise NonSymmetricOffset("X(0) no es exactamente simétrico")
    return SymMatrixPath(grid, d, stacked, X0.astype(float))


def assemble_hermitian(entries: Sequence[ScalarPath], X0: Optional[np.ndarray] = None) -> HermMatrixPath:
    """Ensambla el camino hermitiano a partir de d² trayectorias reales.

    El orden es el de hermitian_coordinates: para cada k <= h, (k,h,0) y,
    si k < h, a continuación (k,h,1).
    """
    d = _dimension_from_count(len(entries), hermitian=True)
    grid, stacked = _stack_entries(entries, d * d)
    if X0 is None:
        X0 = np.zeros((d, d), dtype=complex)
    X0 = np.asarray(X0, dtype=complex)
    if X0.shape != (d, d):
        raise NonSymmetricOffset(f"X(0) tiene forma {X0.shape}; se esperaba {(d, d)}")
    if not np.array_equal(X0, X0.conj().T):
        raise NonSymmetricOffset("X(0) no es exactamente hermitiano")
    return HermMatrixPath(grid, d, stacked, X0)


def simulate_symmetric(d: int, grid: GridSpec, model: CovarianceModel, seed: SeedSpec,
                       X0: Optional[np.ndarray] = None, method: str = 'auto') -> SymMatrixPath:
    entries = simulate_entry_paths(model, grid, seed, symmetric_coordinates(d), method)
    return assemble_symmetric(entries, X0)


def simulate_hermitian(d: int, grid: GridSpec, model: CovarianceModel, seed: SeedSpec,
                       X0: Optional[np.ndarray] = None, method: str = 'auto') -> HermMatrixPath:
    entries = simulate_entry_paths(model, grid, seed, hermitian_coordinates(d), method)
    return assemble_hermitian(entries, X0)


def simulate_matrix_path(ensemble: str, d: int, grid: GridSpec, model: CovarianceModel,
                         seed: SeedSpec, X0: Optional[np.ndarray] = None):
    if ensemble == 'symmetric':
        return simulate_symmetric(d, grid, model, seed, X0)
    if ensemble == 'hermitian':
        return simulate_hermitian(d, grid, model, seed, X0)
    raise ValueError(f"Ensamble desconocido: {ensemble}")


@dataclass(frozen=True)
class DensityQuery:
    eigenvalues: tuple
    sigma: float
    ensemble: str = ORTHOGONAL
    mode: str = 'log'

    def __post_init__(self):
        object.__setattr__(self, 'eigenvalues', tuple(float(x) for x in np.ravel(self.eigenvalues)))
        if not self.sigma > 0:
            raise ValueError(f"La escala sigma debe ser positiva, se recibió {self.sigma}")
        if self.ensemble not in (ORTHOGONAL, UNITARY):
            raise ValueError(f"Ensamble desconocido: {self.ensemble}")
        if self.mode not in ('log', 'unnormalized'):
            raise ValueError(f"Modo de normalización desconocido: {self.mode}")


def eigen_density_log(q: DensityQuery) -> float:
    """Log de la densidad conjunta no normalizada de autovalores ordenados.

    Ortogonal: Σ_{k<h} log(λ_k−λ_h) − d(d+1)/2·log σ − Σλ²/(4σ²).
    Unitario:  2Σ_{k<h} log(λ_k−λ_h) − d²·log σ − Σλ²/(2σ²).
    """
    lam = np.asarray(q.eigenvalues, dtype=float)
    d = lam.size
    if d > 1 and np.any(np.diff(lam) >= 0):
        raise SimplexViolation(f"Los autovalores deben ser estrictamente decrecientes: {lam}")
    diffs = lam[:, None] - lam[None, :]
    log_vandermonde = float(np.sum(np.log(diffs[np.triu_indices(d, 1)])))
    log_sigma = math.log(q.sigma)
    sq = float(np.sum(lam ** 2))
    if q.ensemble == ORTHOGONAL:
        return log_vandermonde - 0.5 * d * (d + 1) * log_sigma - sq / (4.0 * q.sigma ** 2)
    return 2.0 * log_vandermonde - d * d * log_sigma - sq / (2.0 * q.sigma ** 2)


def evaluate_density(q: DensityQuery) -> float:
    value = eigen_density_log(q)
    return value if q.mode == 'log' else math.exp(value)


def gap_scale(t: float, H: float) -> float:
    """Escala Rayleigh 2t^H de la brecha λ_1 − λ_2 del fBm matricial 2×2 con X(0) = 0"""
    return 2.0 * t ** H
