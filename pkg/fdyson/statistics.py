"""Estimadores y pruebas: p-variación, momentos gaussianos, brechas, Hölder, KS y diagnósticos"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import special, stats

from .errors import AssumptionViolated, EmptySample, InsufficientData, QTooLarge, ResolutionMismatch
from .models import EigenPath, ScalarPath, TestReport, VariationReport, hurst_value

logger = logging.getLogger(__name__)

KS_ALPHA = 0.01
MIN_HOLDER_REPLICATES = 100
MIN_HOLDER_SPAN = 100
HOLDER_DROPPED_LAGS = 2
MIN_GAUSSIANITY_SAMPLES = 2000

PathLike = Union[ScalarPath, np.ndarray, Sequence[float]]


def _values(path: PathLike) -> np.ndarray:
    return path.values if isinstance(path, ScalarPath) else np.asarray(path, dtype=float)


def p_variation(path: PathLike, p: float, n: Optional[int] = None) -> float:
    """V_n^p = Σ|X_{t_{k+1}} − X_{t_k}|^p sobre la partición uniforme de n pasos"""
    if p < 1:
        raise ValueError(f"Se requiere p >= 1, se recibió {p}")
    values = _values(path)
    native = values.size - 1
    if n is None:
        n = native
    if n < 1 or native % n:
        raise ResolutionMismatch(f"La resolución {n} no divide la resolución nativa {native}")
    return float(np.sum(np.abs(np.diff(values[::native // n])) ** p))


def abs_moment_std_normal(p: float) -> float:
    """E|Z|^p = 2^{p/2} Γ((p+1)/2) / √π"""
    if p <= 0:
        raise ValueError(f"Se requiere p > 0, se recibió {p}")
    return float(2.0 ** (p / 2.0) * special.gamma((p + 1.0) / 2.0) / math.sqrt(math.pi))


def expected_Y_variation(H: float, t: float) -> float:
    """√2 · t · E|Z|^{1/H}"""
    h = hurst_value(H)
    if t < 0:
        raise ValueError(f"Se requiere t >= 0, se recibió {t}")
    return math.sqrt(2.0) * t * abs_moment_std_normal(1.0 / h)


def skorohod_variation_limit(H: float, t: float, gradient_norm_sq: float = 2.0) -> float:
    """Límite de la 1/H-variación de ∫⟨G, δb⟩ con |G|² constante.

    E_ξ|⟨G, ξ⟩|^{1/H} = |G|^{1/H} E|Z|^{1/H}; con |G|² = 2 (simétrico) da
    2^{1/(2H)} t E|Z|^{1/H}, y 2t en H = 1/2.
    """
    h = hurst_value(H)
    return t * gradient_norm_sq ** (1.0 / (2.0 * h)) * abs_moment_std_normal(1.0 / h)


def mean_with_se(samples) -> Tuple[float, float]:
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise EmptySample("No hay muestras para promediar")
    se = float(np.std(x, ddof=1) / math.sqrt(x.size)) if x.size > 1 else math.inf
    return float(np.mean(x)), se


def variation_report(paths: Sequence[PathLike], p: float, resolutions: Sequence[int],
                     target: float) -> VariationReport:
    """V_n^p por réplica para cada resolución diádica, con media y error estándar"""
    resolutions = sorted(int(n) for n in resolutions)
    for n in resolutions:
        if n & (n - 1):
            raise ResolutionMismatch(f"La resolución {n} no es diádica")
    if not paths:
        raise EmptySample("No hay trayectorias para estimar la variación")
    estimates = np.array([[p_variation(path, p, n) for n in resolutions] for path in paths])
    means, ses = [], []
    for j in range(len(resolutions)):
        mean, se = mean_with_se(estimates[:, j])
        means.append(mean)
        ses.append(se)
    return VariationReport(p, resolutions, estimates, means, ses, target)


def min_gap(ep: EigenPath) -> float:
    """Brecha adyacente mínima en los nodos m >= 1"""
    if ep.dimension < 2:
        return math.inf
    return float(np.min(ep.gaps()[:, 1:]))


@dataclass
class HolderEstimate:
    exponent: float
    ci_low: float
    ci_high: float
    slope: float
    stderr: float
    lags: List[int]
    mean_square_increments: List[float]

    def contains(self, value: float) -> bool:
        return self.ci_low <= value <= self.ci_high

    def to_dict(self) -> dict:
        return {
            'exponent': self.exponent, 'ci_low': self.ci_low, 'ci_high': self.ci_high,
            'slope': self.slope, 'stderr': self.stderr, 'lags': self.lags,
            'mean_square_increments': self.mean_square_increments,
        }


def holder_exponent(paths: Sequence[PathLike], dt: float = 1.0,
                    min_replicates: int = MIN_HOLDER_REPLICATES,
                    drop_smallest: int = HOLDER_DROPPED_LAGS) -> HolderEstimate:
    """Regresión log-log del incremento cuadrático medio contra el rezago; exponente = pendiente/2"""
    if len(paths) < min_replicates:
        raise InsufficientData(f"Se requieren al menos {min_replicates} réplicas, se recibieron {len(paths)}")
    X = np.vstack([_values(p) for p in paths])
    n = X.shape[1] - 1
    lags = [2 ** k for k in range(int(math.log2(n)) - 1)][drop_smallest:]
    if not lags or lags[-1] / lags[0] < MIN_HOLDER_SPAN:
        raise InsufficientData(f"Rezagos insuficientes para n={n}: {lags}")
    msd = [float(np.mean((X[:, lag:] - X[:, :-lag]) ** 2)) for lag in lags]
    fit = stats.linregress(np.log(np.asarray(lags) * dt), np.log(msd))
    half_width = 1.96 * fit.stderr / 2.0
    exponent = fit.slope / 2.0
    return HolderEstimate(float(exponent), float(exponent - half_width), float(exponent + half_width),
                          float(fit.slope), float(fit.stderr), lags, msd)


def ks_two_sample(a, b) -> float:
    """Distancia sup entre las CDF empíricas"""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size == 0 or b.size == 0:
        raise EmptySample("KS requiere dos muestras no vacías")
    return float(stats.ks_2samp(a, b).statistic)


def ks_critical_value(m: int, n: int, alpha: float = KS_ALPHA) -> float:
    """c(α)·√((m+n)/(mn)) con c(α) = √(−ln(α/2)/2); c(0.01) ≈ 1.628"""
    c = math.sqrt(-0.5 * math.log(alpha / 2.0))
    return c * math.sqrt((m + n) / (m * n))


def self_similarity_check(samples_t, samples_at, a: float, H: float, initial_is_zero: bool = True,
                          name: str = 'self_similarity', seeds: Optional[dict] = None) -> TestReport:
    """KS por coordenada entre Y_i(at) y a^H·Y_i(t); pasa si todas quedan bajo el valor crítico al 1%"""
    if not initial_is_zero:
        raise AssumptionViolated("La autosimilaridad requiere X(0) = 0")
    if a <= 0:
        raise ValueError(f"El factor de escala debe ser positivo, se recibió {a}")
    x = np.asarray(samples_t, dtype=float)
    y = np.asarray(samples_at, dtype=float)
    if x.ndim == 1:
        x, y = x[:, None], y[:, None]
    if x.shape != y.shape:
        raise ValueError(f"Conteos de réplicas distintos: {x.shape} y {y.shape}")
    scale = a ** hurst_value(H)
    statistics = [ks_two_sample(y[:, i], scale * x[:, i]) for i in range(x.shape[1])]
    threshold = ks_critical_value(x.shape[0], y.shape[0])
    worst = max(statistics)
    return TestReport(name=name, statistic=worst, threshold=threshold, passed=worst <= threshold,
                      sample_sizes={'replicates': int(x.shape[0])}, seeds=seeds or {},
                      details={'a': a, 'H': H, 'per_coordinate': statistics})


def negative_moment_probe(gaps, q: float) -> float:
    """Media empírica de gap^{−q}, 0 < q < 2"""
    if q >= 2:
        raise QTooLarge(q)
    if q <= 0:
        raise ValueError(f"Se requiere q > 0, se recibió {q}")
    g = np.asarray(gaps, dtype=float).ravel()
    if g.size == 0:
        raise EmptySample("No hay brechas para el momento negativo")
    if np.any(g <= 0):
        raise ValueError("Las brechas deben ser positivas")
    return float(np.mean(g ** (-q)))


def rayleigh_negative_moment(q: float, scale: float) -> float:
    """E[R^{−q}] = scale^{−q} 2^{−q/2} Γ(1 − q/2) para R ~ Rayleigh(scale)"""
    if q >= 2:
        raise QTooLarge(q)
    return float(scale ** (-q) * 2.0 ** (-q / 2.0) * special.gamma(1.0 - q / 2.0))


def rayleigh_mean(scale: float) -> float:
    return scale * math.sqrt(math.pi / 2.0)


@dataclass
class GaussianityDiagnostic:
    samples: int
    mean: float
    std: float
    skewness: float
    skewness_se: float
    excess_kurtosis: float
    kurtosis_se: float
    ks_statistic: float
    ks_pvalue: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def gaussianity_probe(samples, min_samples: int = MIN_GAUSSIANITY_SAMPLES) -> GaussianityDiagnostic:
    """Asimetría, curtosis en exceso y KS contra la normal ajustada; sin criterio de aceptación"""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < min_samples:
        raise InsufficientData(f"Se requieren al menos {min_samples} muestras, se recibieron {x.size}")
    mean = float(np.mean(x))
    std = float(np.std(x, ddof=1))
    ks = stats.kstest(x, 'norm', args=(mean, std))
    return GaussianityDiagnostic(
        samples=int(x.size), mean=mean, std=std,
        skewness=float(stats.skew(x)), skewness_se=math.sqrt(6.0 / x.size),
        excess_kurtosis=float(stats.kurtosis(x)), kurtosis_se=math.sqrt(24.0 / x.size),
        ks_statistic=float(ks.statistic), ks_pvalue=float(ks.pvalue),
    )


def lag_correlations(increments, lags: Iterable[int] = (1, 2, 3)) -> Dict[int, Tuple[float, float]]:
    """Correlación muestral de incrementos a cada rezago, con error estándar 1/√N.

    `increments` tiene forma (réplicas, pasos); se agrupan todas las réplicas.
    """
    X = np.atleast_2d(np.asarray(increments, dtype=float))
    X = X - X.mean()
    var = float(np.mean(X ** 2))
    out = {}
    for lag in lags:
        prod = X[:, lag:] * X[:, :-lag]
        out[int(lag)] = (float(np.mean(prod) / var), 1.0 / math.sqrt(prod.size))
    return out


def ks_one_sample_critical_value(n: int, alpha: float = KS_ALPHA) -> float:
    return math.sqrt(-0.5 * math.log(alpha / 2.0)) / math.sqrt(n)
