"""Excepciones del toolkit.

Todas heredan de FDysonError y guardan el contexto numérico que permite
reproducir el fallo (nodo, tolerancia, campo de configuración).
"""

from typing import Iterable, List, Optional


class FDysonError(Exception):
    """Error base del paquete"""


# Muestreo gaussiano

class FactorizationFailure(FDysonError):
    def __init__(self, min_eigenvalue: float, max_diagonal: float):
        self.min_eigenvalue = min_eigenvalue
        self.max_diagonal = max_diagonal
        super().__init__(
            f"Matriz de Gram no semidefinida: autovalor mínimo {min_eigenvalue:.3e} "
            f"(diagonal máxima {max_diagonal:.3e})"
        )


class EmbeddingNotPSD(FDysonError):
    def __init__(self, min_eigenvalue: float, max_eigenvalue: float):
        self.min_eigenvalue = min_eigenvalue
        self.max_eigenvalue = max_eigenvalue
        super().__init__(
            f"Embedding circulante no PSD: autovalor mínimo {min_eigenvalue:.3e} "
            f"(máximo {max_eigenvalue:.3e})"
        )


# Ensambles matriciales

class GridMismatch(FDysonError):
    pass


class NonSymmetricOffset(FDysonError):
    pass


class SimplexViolation(FDysonError):
    pass


class DimensionMismatch(FDysonError):
    pass


# Espectral

class NoConvergence(FDysonError):
    def __init__(self, sweeps: int, off_norm: float, node: Optional[int] = None):
        self.sweeps = sweeps
        self.off_norm = off_norm
        self.node = node
        where = f" en el nodo {node}" if node is not None else ""
        super().__init__(
            f"Jacobi no convergió tras {sweeps} barridos{where} "
            f"(norma fuera de la diagonal {off_norm:.3e})"
        )

    def at_node(self, node: int) -> "NoConvergence":
        return NoConvergence(self.sweeps, self.off_norm, node)


class NotVeryGood(FDysonError):
    def __init__(self, reason: str, node: Optional[int] = None):
        self.reason = reason
        self.node = node
        where = f" (nodo {node})" if node is not None else ""
        super().__init__(f"Descomposición no admisible{where}: {reason}")


# Dinámica

class GapBelowTolerance(FDysonError):
    def __init__(self, node: int, gap: float, tolerance: float, pair=None):
        self.node = node
        self.gap = gap
        self.tolerance = tolerance
        self.pair = pair
        super().__init__(
            f"Colisión numérica en el nodo {node}: brecha {gap:.3e} < {tolerance:.0e}"
            + (f" entre autovalores {pair}" if pair is not None else "")
        )


class OrderingViolated(FDysonError):
    def __init__(self, step: int, values):
        self.step = step
        self.values = values
        super().__init__(f"Orden de autovalores perdido en el paso {step}; refine la grilla")


# Estadística

class ResolutionMismatch(FDysonError):
    pass


class InsufficientData(FDysonError):
    pass


class EmptySample(FDysonError):
    pass


class AssumptionViolated(FDysonError):
    pass


class QTooLarge(FDysonError):
    def __init__(self, q: float):
        self.q = q
        super().__init__(f"El momento negativo de orden q={q} diverge (se requiere q < 2)")


# Configuración

class ConfigInvalid(FDysonError):
    def __init__(self, errors: Iterable[str]):
        self.errors: List[str] = list(errors)
        super().__init__("Configuración inválida: " + "; ".join(self.errors))
