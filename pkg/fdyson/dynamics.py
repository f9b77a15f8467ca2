"""Dinámica de autovalores: deriva, residuo de Skorohod Y y chequeos de Young.

λ_i(t) = λ_i(0) + Y_i(t) + 2H Σ_{j≠i} ∫_0^t s^{2H−1}/(λ_i(s)−λ_j(s)) ds
"""

import logging
import math
from typing import Sequence, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import GapBelowTolerance, NotVeryGood, OrderingViolated
from .models import DysonDecomposition, EigenPath, GridSpec, MatrixPath, ScalarPath, YoungCheckReport
from .spectral import GAP_TOL, eigen_derivatives

logger = logging.getLogger(__name__)

COLLISION_TOL = 1e-14
FIRST_CELL_RULES = ('power_law', 'ignore')


def _check_gaps(values: np.ndarray, start: int = 1, tolerance: float = COLLISION_TOL) -> None:
    gaps = values[:-1, start:] - values[1:, start:]
    if gaps.size == 0:
        return
    pair, node = np.unravel_index(int(np.argmin(gaps)), gaps.shape)
    gap = float(gaps[pair, node])
    if gap < tolerance:
        raise GapBelowTolerance(int(node) + start, gap, tolerance, (int(pair) + 1, int(pair) + 2))


def _degenerate_start(values: np.ndarray, tolerance: float = GAP_TOL) -> bool:
    return values.shape[0] > 1 and float(np.min(values[:-1, 0] - values[1:, 0])) < tolerance


def interaction_field(ep: EigenPath, H: float) -> np.ndarray:
    """g_i(t_m) = 2H t_m^{2H−1} Σ_{j≠i} 1/(λ_i−λ_j); la columna 0 queda en 0 si λ(0) es degenerado"""
    lam = ep.values
    d, n1 = lam.shape
    t = ep.grid.nodes
    weight = 2.0 * H * t ** (2.0 * H - 1.0)
    start = 1 if _degenerate_start(lam) else 0
    g = np.zeros((d, n1))
    for i in range(d - 1):
        for j in range(i + 1, d):
            c = weight[start:] / (lam[i, start:] - lam[j, start:])
            g[i, start:] += c
            g[j, start:] -= c
    return g


def _integrate_from_zero(field: np.ndarray, grid: GridSpec, H: float, degenerate: bool,
                         first_cell: str) -> np.ndarray:
    """Trapecio acumulado sobre [t_1, t_m] más la primera celda [0, t_1]"""
    if first_cell not in FIRST_CELL_RULES:
        raise ValueError(f"Regla de primera celda desconocida: {first_cell}")
    dt = grid.dt
    out = np.zeros_like(field)
    out[:, 1:] = cumulative_trapezoid(field[:, 1:], dx=dt, axis=1, initial=0.0)
    if first_cell == 'power_law':
        if degenerate:
            # integrando ~ c s^{H−1} cerca de 0
            first = field[:, 1] * dt / H
        else:
            first = 0.5 * (field[:, 0] + field[:, 1]) * dt
        out[:, 1:] += first[:, None]
    return out


def drift_integral(ep: EigenPath, H: float, first_cell: str = 'power_law') -> np.ndarray:
    """Deriva D_i(t_m), forma (d, n+1), con D_i(0) = 0"""
    _check_gaps(ep.values)
    g = interaction_field(ep, H)
    return _integrate_from_zero(g, ep.grid, H, _degenerate_start(ep.values), first_cell)


def extract_Y(ep: EigenPath, H: float, first_cell: str = 'power_law') -> DysonDecomposition:
    drift = drift_integral(ep, H, first_cell)
    lam = ep.values
    residual = lam - lam[:, :1] - drift
    alternative = 'ignore' if first_cell == 'power_law' else 'power_law'
    return DysonDecomposition(ep.grid, lam.copy(), drift, residual, H, first_cell,
                              drift_integral(ep, H, alternative))


def _node_derivatives(ep: EigenPath, m: int):
    try:
        return eigen_derivatives(ep.frames[m])
    except NotVeryGood as e:
        raise NotVeryGood(e.reason, node=m) from e


def young_skorohod_Y(P: MatrixPath, ep: EigenPath, H: float,
                     first_cell: str = 'power_law') -> Tuple[np.ndarray, YoungCheckReport]:
    """Y como suma de Young hacia adelante menos la corrección de traza.

    Y_i(t) ≈ Σ_m Σ_c G_ic(t_m) Δb_c(t_m) − ∫_0^t H s^{2H−1} Σ_c H2_ic(s) ds.
    Si X(0) es degenerado, el primer paso usa el marco de t_1.
    """
    if ep.frames is None:
        raise ValueError("eigen_path debe conservar los marcos (retain_frames=True)")
    if P.grid != ep.grid:
        raise ValueError(f"Grillas distintas: {P.grid} y {ep.grid}")
    _check_gaps(ep.values)
    n = ep.grid.steps
    d = ep.dimension
    degenerate = _degenerate_start(ep.values)

    t = ep.grid.nodes
    grads = np.empty((n, d, len(P.coordinates)))
    trace_field = np.zeros((d, n + 1))
    for m in range(n + 1):
        if m == 0 and degenerate:
            continue
        der = _node_derivatives(ep, m)
        if m < n:
            grads[m] = der.gradient
        trace_field[:, m] = H * t[m] ** (2.0 * H - 1.0) * der.hessian_traces()
    if degenerate:
        grads[0] = _node_derivatives(ep, 1).gradient

    db = np.diff(P.entries, axis=1)                       # (N, n)
    steps = np.einsum('mic,cm->im', grads, db)           # (d, n)
    young = np.concatenate([np.zeros((d, 1)), np.cumsum(steps, axis=1)], axis=1)
    correction = _integrate_from_zero(trace_field, ep.grid, H, degenerate, first_cell)
    Y = young - correction

    reference = extract_Y(ep, H, first_cell).residual
    report = YoungCheckReport([n], [np.max(np.abs(Y - reference), axis=1).tolist()])
    return Y, report


def young_consistency(P: MatrixPath, ep: EigenPath, H: float, strides: Sequence[int] = (4, 2, 1),
                      first_cell: str = 'power_law') -> YoungCheckReport:
    """Compara ambas extracciones de Y sobre la misma realización submuestreada"""
    resolutions, discrepancies = [], []
    for stride in strides:
        sub_ep = ep.subsample(stride)
        _, rep = young_skorohod_Y(P.subsample(stride), sub_ep, H, first_cell)
        resolutions.extend(rep.resolutions)
        discrepancies.extend(rep.discrepancies)
        logger.debug(f"Consistencia de Young con n={rep.resolutions[0]}: {rep.max_discrepancies[0]:.3e}")
    return YoungCheckReport(resolutions, discrepancies)


def young_log_gap(ep: EigenPath, i: int, j: int, t0_index: int) -> np.ndarray:
    """log(λ_i−λ_j) en los nodos t0_index..n vía suma de Young hacia adelante.

    Índices de autovalores en base 0, con i < j para que la brecha sea positiva.
    """
    if i == j:
        raise ValueError("Se requieren dos autovalores distintos")
    if t0_index < 1 or t0_index > ep.grid.steps:
        raise ValueError(f"t0_index debe estar en [1, {ep.grid.steps}], se recibió {t0_index}")
    lam = ep.values[:, t0_index:]
    gap = lam[i] - lam[j]
    bad = int(np.argmin(gap))
    if gap[bad] < COLLISION_TOL:
        raise GapBelowTolerance(bad + t0_index, float(gap[bad]), COLLISION_TOL, (i + 1, j + 1))
    steps = np.diff(gap) / gap[:-1]
    return math.log(gap[0]) + np.concatenate([[0.0], np.cumsum(steps)])


def log_gap_error(ep: EigenPath, i: int, j: int, t0_index: int) -> float:
    """Error máximo entre la identidad de Young y el log de la brecha evaluado directamente"""
    young = young_log_gap(ep, i, j, t0_index)
    direct = np.log(ep.values[i, t0_index:] - ep.values[j, t0_index:])
    return float(np.max(np.abs(young - direct)))


def dyson_euler(noises: Sequence[ScalarPath], lam0, diffusion: float = math.sqrt(2.0)) -> EigenPath:
    """Euler–Maruyama de dλ_i = √2 dW_i + Σ_{j≠i} dt/(λ_i−λ_j), sin reflexión.

    diffusion=1 corresponde a la normalización hermitiana.
    """
    lam0 = np.asarray(lam0, dtype=float)
    d = lam0.size
    if len(noises) != d:
        raise ValueError(f"Se esperaban {d} ruidos brownianos, se recibieron {len(noises)}")
    if d > 1 and np.any(np.diff(lam0) >= 0):
        raise ValueError(f"λ(0) debe ser estrictamente decreciente: {lam0}")
    grid = noises[0].grid
    dW = np.vstack([w.increments for w in noises])
    dt = grid.dt

    values = np.empty((d, grid.steps + 1))
    values[:, 0] = lam0
    lam = lam0.copy()
    for m in range(grid.steps):
        drift = np.zeros(d)
        for i in range(d - 1):
            for j in range(i + 1, d):
                c = dt / (lam[i] - lam[j])
                drift[i] += c
                drift[j] -= c
        lam = lam + diffusion * dW[:, m] + drift
        if d > 1 and np.any(np.diff(lam) >= 0):
            raise OrderingViolated(m + 1, lam.copy())
        values[:, m + 1] = lam
    return EigenPath(grid, values)


def dyson_euler_refined(noises: Sequence[ScalarPath], lam0, stride: int, max_retries: int = 3,
                        diffusion: float = math.sqrt(2.0)) -> EigenPath:
    """Reintenta dyson_euler duplicando la resolución ante OrderingViolated.

    Los ruidos se entregan en la grilla más fina; el primer intento usa
    submuestreo con paso `stride` y cada reintento lo divide por 2. El
    resultado se devuelve en la grilla gruesa.
    """
    if stride < 1 or stride & (stride - 1):
        raise ValueError(f"El paso debe ser una potencia de 2, se recibió {stride}")
    current = stride
    attempt = 0
    while True:
        try:
            path = dyson_euler([w.subsample(current) for w in noises], lam0, diffusion)
            factor = stride // current
            if factor == 1:
                return path
            return EigenPath(path.grid.coarsen(factor), path.values[:, ::factor].copy())
        except OrderingViolated as e:
            if attempt == max_retries or current == 1:
                raise e
            attempt += 1
            logger.warning(f"Intento {attempt} falló: {str(e)}. Reintentando con grilla doble...")
            current //= 2
