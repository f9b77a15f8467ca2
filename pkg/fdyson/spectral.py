"""Descomposición espectral por Jacobi, trayectorias de autovalores y sus derivadas.

Convención: las columnas de U son autovectores, ordenados por autovalor
decreciente, y cada columna se normaliza para que U_ii > 0.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from .errors import DimensionMismatch, NoConvergence, NotVeryGood
from .models import CSV_FLOAT_FORMAT, EigenPath, MatrixPath, hermitian_coordinates, symmetric_coordinates

logger = logging.getLogger(__name__)

MAX_SWEEPS = 100
OFF_DIAGONAL_TOL = 1e-13
SIGN_TOL = 1e-12
ENTRY_TOL = 1e-10
GAP_TOL = 1e-12
MINOR_CHECK_MAX_DIM = 4
GRADIENT_BOUND = 2.0 + math.sqrt(2.0)


@dataclass
class EigenDecomposition:
    eigenvalues: np.ndarray
    frame: np.ndarray
    very_good: bool
    sweeps: int = 0

    @property
    def dimension(self) -> int:
        return self.eigenvalues.size

    @property
    def is_hermitian(self) -> bool:
        return np.iscomplexobj(self.frame)

    @property
    def min_gap(self) -> float:
        if self.dimension < 2:
            return math.inf
        return float(np.min(self.eigenvalues[:-1] - self.eigenvalues[1:]))

    def reconstruct(self) -> np.ndarray:
        U = self.frame
        return (U * self.eigenvalues) @ U.conj().T

    def check(self, M: np.ndarray, orth_tol: float = 1e-12, recon_tol: float = 1e-10) -> None:
        """Verifica ortogonalidad, reconstrucción, orden y convención de signo"""
        U = self.frame
        d = self.dimension
        orth = float(np.max(np.abs(U.conj().T @ U - np.eye(d))))
        if orth > orth_tol:
            raise AssertionError(f"Marco no ortogonal: {orth:.3e}")
        scale = max(np.linalg.norm(M), 1e-300)
        recon = float(np.linalg.norm(self.reconstruct() - M) / scale)
        if recon > recon_tol:
            raise AssertionError(f"Reconstrucción con error relativo {recon:.3e}")
        if np.any(np.diff(self.eigenvalues) > 0):
            raise AssertionError("Autovalores no ordenados de forma decreciente")


def _rotation(app: float, aqq: float, apq):
    """Rotación 2×2 que anula a_pq; primero se rota la fase para dejar a_pq real"""
    r = abs(apq)
    phase = np.conj(apq) / r
    theta = (aqq - app) / (2.0 * r)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    return np.array([[c, s], [-s * phase, c * phase]])


def _normalize_signs(U: np.ndarray) -> np.ndarray:
    d = U.shape[0]
    for i in range(d):
        col = U[:, i]
        ref = col[i] if abs(col[i]) >= SIGN_TOL else col[int(np.argmax(np.abs(col)))]
        U[:, i] = col * (np.conj(ref) / abs(ref))
    return U


def _all_minors_nonzero(U: np.ndarray) -> bool:
    d = U.shape[0]
    for size in range(2, d + 1):
        for rows in itertools.combinations(range(d), size):
            for cols in itertools.combinations(range(d), size):
                if abs(np.linalg.det(U[np.ix_(rows, cols)])) <= ENTRY_TOL:
                    return False
    return True


def is_very_good(eigenvalues: np.ndarray, U: np.ndarray) -> bool:
    if np.any(np.abs(U) <= ENTRY_TOL):
        return False
    if eigenvalues.size > 1 and np.min(eigenvalues[:-1] - eigenvalues[1:]) <= GAP_TOL:
        return False
    if np.any(np.real(np.diag(U)) <= 0):
        return False
    if U.shape[0] <= MINOR_CHECK_MAX_DIM:
        return _all_minors_nonzero(U)
    return True


def eigh_jacobi(M: np.ndarray, max_sweeps: int = MAX_SWEEPS, tol: float = OFF_DIAGONAL_TOL) -> EigenDecomposition:
    """Jacobi cíclico para matrices simétricas reales o hermitianas"""
    A = np.array(M, dtype=complex if np.iscomplexobj(M) else float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"Se esperaba una matriz cuadrada, se recibió {A.shape}")
    d = A.shape[0]
    V = np.eye(d, dtype=A.dtype)
    threshold = tol * np.linalg.norm(A)

    sweep = 0
    while True:
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if off <= threshold:
            break
        if sweep >= max_sweeps:
            raise NoConvergence(sweep, off)
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[p, q]
                if apq == 0:
                    continue
                G = _rotation(A[p, p].real, A[q, q].real, apq)
                idx = [p, q]
                A[:, idx] = A[:, idx] @ G
                A[idx, :] = G.conj().T @ A[idx, :]
                V[:, idx] = V[:, idx] @ G
                A[p, q] = A[q, p] = 0.0
        sweep += 1

    lam = np.real(np.diag(A)).copy()
    order = np.argsort(-lam, kind='stable')
    lam = lam[order]
    U = _normalize_signs(V[:, order].copy())
    return EigenDecomposition(lam, U, is_very_good(lam, U), sweep)


def eigen_path(P: MatrixPath, retain_frames: bool = True, executor=None) -> EigenPath:
    """Descompone cada nodo del camino; el etiquetado es por orden decreciente"""
    mats = P.matrices

    def decompose(m):
        try:
            return eigh_jacobi(mats[m])
        except NoConvergence as e:
            raise e.at_node(m) from e

    nodes = range(P.grid.steps + 1)
    decs = list(executor.map(decompose, nodes)) if executor is not None else [decompose(m) for m in nodes]
    values = np.column_stack([dec.eigenvalues for dec in decs])
    return EigenPath(P.grid, values, decs if retain_frames else None, P)


@dataclass
class EigenDerivatives:
    eigenvalues: np.ndarray
    coordinates: List[Tuple[int, int, int]]
    gradient: np.ndarray
    hessian: np.ndarray
    kind: str

    @property
    def expected_gradient_norm(self) -> float:
        return 2.0 if self.kind == 'symmetric' else 1.0

    def gradient_norms(self) -> np.ndarray:
        return np.sum(self.gradient ** 2, axis=1)

    def hessian_traces(self) -> np.ndarray:
        return np.sum(self.hessian, axis=1)

    def expected_hessian_traces(self) -> np.ndarray:
        lam = self.eigenvalues
        diff = lam[:, None] - lam[None, :]
        np.fill_diagonal(diff, np.inf)
        return 2.0 * np.sum(1.0 / diff, axis=1)

    def check(self, norm_tol: float = 1e-10, trace_rtol: float = 1e-8) -> None:
        norms = self.gradient_norms()
        if np.max(np.abs(norms - self.expected_gradient_norm)) > norm_tol:
            raise AssertionError(f"Norma del gradiente {norms} distinta de {self.expected_gradient_norm}")
        traces = self.hessian_traces()
        expected = self.expected_hessian_traces()
        if np.any(np.abs(traces - expected) > trace_rtol * np.maximum(1.0, np.abs(expected))):
            raise AssertionError(f"Traza del hessiano {traces} distinta de {expected}")
        if np.max(np.abs(self.gradient)) > GRADIENT_BOUND:
            raise AssertionError("Cota |∂Φ/∂b| <= 2 + √2 violada")

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for i in range(self.gradient.shape[0]):
            for c, (k, h, part) in enumerate(self.coordinates):
                row = {'i': i + 1, 'k': k + 1, 'h': h + 1,
                       'grad': self.gradient[i, c], 'hess': self.hessian[i, c]}
                if self.kind == 'hermitian':
                    row['part'] = 'im' if part else 're'
                rows.append(row)
        return pd.DataFrame(rows)

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)


def _coordinate_weights(coords, hermitian: bool):
    coef = np.empty(len(coords), dtype=complex if hermitian else float)
    sign = np.ones(len(coords))
    for c, (k, h, part) in enumerate(coords):
        if k == h:
            coef[c] = 0.5 if hermitian else 1.0 / math.sqrt(2.0)
        elif not hermitian:
            coef[c] = 1.0
        elif part == 0:
            coef[c] = 1.0 / math.sqrt(2.0)
        else:
            coef[c] = 1j / math.sqrt(2.0)
            sign[c] = -1.0
    return coef, sign


def coordinate_projections(dec: EigenDecomposition, coords=None) -> np.ndarray:
    """proj[c, j, i] = u_j^* E_c u_i, con E_c = ∂X/∂b_c"""
    U = dec.frame
    hermitian = dec.is_hermitian
    d = dec.dimension
    if coords is None:
        coords = hermitian_coordinates(d) if hermitian else symmetric_coordinates(d)
    ks = np.array([c[0] for c in coords])
    hs = np.array([c[1] for c in coords])
    A = U[ks, :]
    B = U[hs, :]
    coef, sign = _coordinate_weights(coords, hermitian)
    proj = (np.conj(A)[:, :, None] * B[:, None, :]
            + sign[:, None, None] * np.conj(B)[:, :, None] * A[:, None, :])
    return coef[:, None, None] * proj


def eigen_derivatives(dec: EigenDecomposition, strict: bool = False) -> EigenDerivatives:
    """Gradiente ∂Φ_i/∂b_kh y diagonal del hessiano ∂²Φ_i/∂b_kh².

    Simétrico: 2U_kiU_hi (k≠h), √2U_ki² (k=h); el hessiano es
    2Σ_{j≠i}|u_j^T E u_i|²/(λ_i−λ_j).

    Precondición por defecto: espectro simple (brecha mínima > GAP_TOL),
    que es lo único que usan estas fórmulas. La condición de matriz muy
    buena (entradas y menores de U no nulos) es más fuerte y
    excluiría, por ejemplo, las matrices diagonales; solo se exige con
    strict=True. En ambos casos la violación lanza NotVeryGood.
    """
    if dec.min_gap <= GAP_TOL:
        raise NotVeryGood(f"brecha espectral {dec.min_gap:.3e} <= {GAP_TOL:.0e}")
    if strict and not dec.very_good:
        raise NotVeryGood("el marco U tiene entradas o menores nulos")
    hermitian = dec.is_hermitian
    d = dec.dimension
    coords = hermitian_coordinates(d) if hermitian else symmetric_coordinates(d)
    proj = coordinate_projections(dec, coords)

    diag = np.arange(d)
    gradient = np.real(proj[:, diag, diag]).T

    lam = dec.eigenvalues
    inv = lam[None, :] - lam[:, None]   # inv[j, i] = λ_i − λ_j
    np.fill_diagonal(inv, np.inf)
    inv = 1.0 / inv
    hessian = 2.0 * np.einsum('cji,ji->ic', np.abs(proj) ** 2, inv)
    return EigenDerivatives(lam.copy(), coords, gradient, hessian,
                            'hermitian' if hermitian else 'symmetric')


def coordinate_direction(d: int, coord, hermitian: bool) -> np.ndarray:
    """Matriz E = ∂X/∂b_c para la coordenada c = (k, h, parte)"""
    k, h, part = coord
    if hermitian:
        E = np.zeros((d, d), dtype=complex)
        if k == h:
            E[k, k] = 1.0
        elif part == 0:
            E[k, h] = E[h, k] = 1.0 / math.sqrt(2.0)
        else:
            E[k, h] = 1j / math.sqrt(2.0)
            E[h, k] = -1j / math.sqrt(2.0)
        return E
    E = np.zeros((d, d))
    if k == h:
        E[k, k] = math.sqrt(2.0)
    else:
        E[k, h] = E[h, k] = 1.0
    return E


def finite_difference_derivatives(M: np.ndarray, eps_grad: float = 1e-6, eps_hess: float = 1e-4):
    """Gradiente y hessiano diagonal por diferencias centrales de autovalores ordenados"""
    hermitian = np.iscomplexobj(M)
    d = M.shape[0]
    coords = hermitian_coordinates(d) if hermitian else symmetric_coordinates(d)
    base = eigh_jacobi(M).eigenvalues
    grad = np.empty((d, len(coords)))
    hess = np.empty((d, len(coords)))
    for c, coord in enumerate(coords):
        E = coordinate_direction(d, coord, hermitian)
        plus = eigh_jacobi(M + eps_grad * E).eigenvalues
        minus = eigh_jacobi(M - eps_grad * E).eigenvalues
        grad[:, c] = (plus - minus) / (2.0 * eps_grad)
        plus = eigh_jacobi(M + eps_hess * E).eigenvalues
        minus = eigh_jacobi(M - eps_hess * E).eigenvalues
        hess[:, c] = (plus - 2.0 * base + minus) / eps_hess ** 2
    return grad, hess


def hoffman_wielandt_gap(A: np.ndarray, B: np.ndarray) -> Tuple[float, float]:
    """(Σ_i(λ_i(A)−λ_i(B))², Σ_ij|A_ij−B_ij|²); se cumple lhs <= rhs"""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        raise DimensionMismatch(f"Dimensiones distintas: {A.shape} y {B.shape}")
    lam_a = eigh_jacobi(A).eigenvalues
    lam_b = eigh_jacobi(B).eigenvalues
    lhs = float(np.sum((lam_a - lam_b) ** 2))
    rhs = float(np.sum(np.abs(A - B) ** 2))
    return lhs, rhs


def hoffman_wielandt_path(ep: EigenPath, slack: float = 1e-10) -> dict:
    """Hoffman–Wielandt entre nodos consecutivos del camino de origen.

    Además de la forma clásica, cuenta cuántos pasos violan la versión con
    prefactor 1/d.
    """
    if ep.source is None:
        raise ValueError("La trayectoria no guarda el camino matricial de origen")
    mats = ep.source.matrices
    lhs = np.sum(np.diff(ep.values, axis=1) ** 2, axis=0)
    rhs = np.sum(np.abs(np.diff(mats, axis=0)) ** 2, axis=(1, 2))
    d = ep.dimension
    return {
        'steps': int(lhs.size),
        'classical_violations': int(np.sum(lhs > rhs + slack)),
        'scaled_violations': int(np.sum(lhs > rhs / d + slack)),
        'max_ratio': float(np.max(lhs / np.where(rhs > 0, rhs, np.inf))),
    }
