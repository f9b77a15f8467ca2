"""Muestreo exacto de fBm y procesos gaussianos Hölder-continuos en grillas uniformes.

Dos muestreadores:
  - Cholesky pivotado de la matriz de Gram (cualquier covarianza, O(n^3)).
  - Embedding circulante del ruido gaussiano fraccionario (solo fBm, O(n log n)).
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, Optional, Union

import numpy as np
from scipy.linalg import lapack

from .errors import EmbeddingNotPSD, FactorizationFailure
from .models import GridSpec, HurstParam, ScalarPath, SeedSpec, hurst_value

logger = logging.getLogger(__name__)

CHOLESKY_RELATIVE_TOL = 1e-10
CIRCULANT_RELATIVE_TOL = 1e-8


def fbm_covariance(t, s, H: Union[float, HurstParam]):
    """R(t,s) = ½(t^{2H} + s^{2H} − |t−s|^{2H}); vectorizada sobre t y s"""
    h2 = 2.0 * hurst_value(H)
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(t < 0) or np.any(s < 0):
        raise ValueError("La covarianza de fBm está definida para tiempos no negativos")
    out = 0.5 * (t ** h2 + s ** h2 - np.abs(t - s) ** h2)
    return float(out) if out.ndim == 0 else out


def fgn_autocovariance(k, H: Union[float, HurstParam]):
    """Autocovarianza del ruido fraccionario con espaciado unitario"""
    h2 = 2.0 * hurst_value(H)
    k = np.abs(np.asarray(k, dtype=float))
    return 0.5 * (np.abs(k + 1) ** h2 - 2.0 * k ** h2 + np.abs(k - 1) ** h2)


def bifractional_covariance(t, s, hurst: float, k: float):
    """c(t,s) = 2^{−K}((t^{2h} + s^{2h})^K − |t−s|^{2hK})"""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    h2 = 2.0 * hurst
    return 2.0 ** (-k) * ((t ** h2 + s ** h2) ** k - np.abs(t - s) ** (h2 * k))


@dataclass(frozen=True)
class CovarianceModel:
    """Modelo de covarianza c(t,s) de un proceso gaussiano centrado con x(0) = 0.

    kind='fbm' usa R(t,s) con parámetro H; kind='custom' usa una función
    arbitraria con orden de Hölder gamma en (1/2, 1).
    """
    kind: str
    hurst: Optional[float] = None
    function: Optional[Callable] = None
    gamma: Optional[float] = None
    label: str = ''

    def __post_init__(self):
        if self.kind == 'fbm':
            hurst_value(self.hurst)
        elif self.kind == 'custom':
            if self.function is None:
                raise ValueError("Un modelo 'custom' necesita una función de covarianza")
            if self.gamma is None or not (0.5 < self.gamma < 1.0):
                raise ValueError(f"El orden de Hölder debe estar en (1/2, 1), se recibió {self.gamma}")
        else:
            raise ValueError(f"Tipo de covarianza desconocido: {self.kind}")

    @classmethod
    def fbm(cls, H: Union[float, HurstParam]) -> "CovarianceModel":
        return cls(kind='fbm', hurst=hurst_value(H), label=f"fbm(H={hurst_value(H)})")

    @classmethod
    def custom(cls, function: Callable, gamma: float, label: str = 'custom') -> "CovarianceModel":
        return cls(kind='custom', function=function, gamma=gamma, label=label)

    @classmethod
    def bifractional(cls, hurst: float, k: float) -> "CovarianceModel":
        return _bifractional_model(float(hurst), float(k))

    @property
    def holder_order(self) -> float:
        return self.hurst if self.kind == 'fbm' else self.gamma

    def covariance(self, t, s):
        if self.kind == 'fbm':
            return fbm_covariance(t, s, self.hurst)
        return self.function(np.asarray(t, dtype=float), np.asarray(s, dtype=float))

    def variance(self, t):
        return self.covariance(t, t)

    def gram(self, grid: GridSpec) -> np.ndarray:
        """Matriz [c(t_j, t_k)] para j, k = 1..n"""
        t = grid.nodes[1:]
        return np.asarray(self.covariance(t[:, None], t[None, :]), dtype=float)


@lru_cache(maxsize=None)
def _bifractional_model(hurst: float, k: float) -> CovarianceModel:
    # una sola instancia por (h, K) para que la factorización quede en caché
    if not (0 < hurst < 1 and 0 < k <= 1):
        raise ValueError(f"Parámetros bifraccionales inválidos: h={hurst}, K={k}")

    def function(t, s):
        return bifractional_covariance(t, s, hurst, k)

    return CovarianceModel.custom(function, gamma=hurst * k, label=f"bifractional(h={hurst}, K={k})")


@lru_cache(maxsize=32)
def _pivoted_factor(model: CovarianceModel, grid: GridSpec):
    gram = model.gram(grid)
    if not np.allclose(gram, gram.T, rtol=0, atol=1e-12 * np.max(np.abs(gram))):
        raise FactorizationFailure(float('nan'), float(np.max(np.diag(gram))))
    max_diag = float(np.max(np.diag(gram)))
    min_eig = float(np.linalg.eigvalsh(gram)[0])
    if min_eig < -CHOLESKY_RELATIVE_TOL * max_diag:
        raise FactorizationFailure(min_eig, max_diag)

    # P^T A P = U^T U con pivoteo simétrico; piv viene en base 1 (LAPACK)
    c, piv, rank, info = lapack.dpstrf(gram, tol=CHOLESKY_RELATIVE_TOL * max_diag, lower=0)
    if info < 0:
        raise FactorizationFailure(min_eig, max_diag)
    upper = np.triu(c)[:rank, :]
    return upper, np.asarray(piv) - 1, int(rank)


def sample_gaussian_cholesky(model: CovarianceModel, grid: GridSpec, seed: SeedSpec) -> ScalarPath:
    """Muestra exacta del proceso centrado en la grilla vía Cholesky pivotado"""
    upper, piv, rank = _pivoted_factor(model, grid)
    z = seed.generator().standard_normal(rank)
    values = np.zeros(grid.steps + 1)
    values[1:][piv] = upper.T @ z
    return ScalarPath(grid, values)


@lru_cache(maxsize=32)
def _circulant_spectrum(steps: int, H: float) -> np.ndarray:
    gamma = fgn_autocovariance(np.arange(steps + 1), H)
    # Primera fila [γ(0), ..., γ(n), γ(n−1), ..., γ(1)] de la circulante de tamaño 2n
    first_row = np.concatenate([gamma, gamma[-2:0:-1]])
    eigenvalues = np.fft.fft(first_row).real
    top = float(eigenvalues.max())
    low = float(eigenvalues.min())
    if low < -CIRCULANT_RELATIVE_TOL * top:
        raise EmbeddingNotPSD(low, top)
    return np.maximum(eigenvalues, 0.0)


def sample_fbm_circulant(grid: GridSpec, H: Union[float, HurstParam], seed: SeedSpec) -> ScalarPath:
    """Muestra exacta en ley de fBm vía embedding circulante del ruido fraccionario"""
    h = hurst_value(H)
    n = grid.steps
    eigenvalues = _circulant_spectrum(n, h)
    m = eigenvalues.size
    rng = seed.generator()
    z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    w = np.fft.fft(np.sqrt(eigenvalues / m) * z)
    noise = w.real[:n] * grid.dt ** h
    values = np.concatenate([[0.0], np.cumsum(noise)])
    return ScalarPath(grid, values)


def sample_path(model: CovarianceModel, grid: GridSpec, seed: SeedSpec, method: str = 'auto') -> ScalarPath:
    """Elige el muestreador: circulante para fBm (con respaldo Cholesky), Cholesky si no"""
    if model.kind == 'fbm' and method in ('auto', 'circulant'):
        try:
            return sample_fbm_circulant(grid, model.hurst, seed)
        except EmbeddingNotPSD as e:
            logger.warning(f"{e}. Usando Cholesky como respaldo...")
    return sample_gaussian_cholesky(model, grid, seed)


def simulate_entry_paths(model: CovarianceModel, grid: GridSpec, seed: SeedSpec,
                         coordinates, method: str = 'auto') -> List[ScalarPath]:
    """Trayectorias independientes, una por coordenada (k, h, parte), de una réplica"""
    return [sample_path(model, grid, seed.for_entry(k, h, part), method) for k, h, part in coordinates]
