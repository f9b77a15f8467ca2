"""Tipos de datos de trayectorias: grillas, semillas, caminos escalares y matriciales.

Las trayectorias de entradas son la fuente de verdad; las matrices por nodo
son vistas derivadas (cached_property).
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd

CSV_FLOAT_FORMAT = '%.17g'

Coordinate = Tuple[int, int, int]


@dataclass(frozen=True)
class GridSpec:
    """Grilla uniforme t_k = kT/n, k = 0..n"""
    horizon: float
    steps: int

    def __post_init__(self):
        if not (self.horizon > 0 and math.isfinite(self.horizon)):
            raise ValueError(f"El horizonte debe ser positivo, se recibió {self.horizon}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"El número de pasos debe ser un entero >= 1, se recibió {self.steps}")
        object.__setattr__(self, 'steps', int(self.steps))

    @property
    def dt(self) -> float:
        return self.horizon / self.steps

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.steps + 1) * self.horizon / self.steps

    def coarsen(self, stride: int) -> "GridSpec":
        if stride < 1 or self.steps % stride:
            raise ValueError(f"El paso {stride} no divide {self.steps}")
        return GridSpec(self.horizon, self.steps // stride)

    def scaled(self, factor: float) -> "GridSpec":
        return GridSpec(self.horizon * factor, self.steps)

    def index_of(self, t: float) -> int:
        """Índice del nodo igual a t (error si t no es un nodo)"""
        m = int(round(t / self.dt))
        if m < 0 or m > self.steps or not math.isclose(m * self.dt, t, rel_tol=1e-12, abs_tol=1e-15):
            raise ValueError(f"t={t} no es un nodo de la grilla (T={self.horizon}, n={self.steps})")
        return m


@dataclass(frozen=True)
class HurstParam:
    value: float

    def __post_init__(self):
        if not (0.5 <= self.value < 1.0):
            raise ValueError(f"El parámetro de Hurst debe estar en [1/2, 1), se recibió {self.value}")

    @property
    def is_brownian(self) -> bool:
        return self.value == 0.5


def hurst_value(H: Union[float, HurstParam], fractional: bool = False) -> float:
    """Valida H y lo devuelve como float; fractional=True exige H en (1/2, 1)"""
    h = H.value if isinstance(H, HurstParam) else HurstParam(float(H)).value
    if fractional and h == 0.5:
        raise ValueError("Esta operación requiere H en (1/2, 1)")
    return h


@dataclass(frozen=True)
class SeedSpec:
    """Coordenadas de un flujo aleatorio independiente.

    El generador es Philox (basado en contador) con clave derivada de
    SeedSequence(master_seed, spawn_key=coordenadas); no hay estado
    compartido, así que el resultado no depende del orden de ejecución.
    """
    master_seed: int
    replicate: int = 0
    entry: Tuple[int, int] = (0, 0)
    part: int = 0
    stream: int = 0

    def __post_init__(self):
        if not (0 <= int(self.master_seed) < 2 ** 64):
            raise ValueError(f"La semilla maestra debe ser un entero de 64 bits, se recibió {self.master_seed}")
        coords = (self.replicate, *self.entry, self.part, self.stream)
        if any(int(c) < 0 for c in coords):
            raise ValueError(f"Coordenadas de flujo negativas: {coords}")

    @property
    def spawn_key(self) -> Tuple[int, ...]:
        return (self.stream, self.replicate, self.entry[0], self.entry[1], self.part)

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(int(self.master_seed), spawn_key=self.spawn_key)
        return np.random.Generator(np.random.Philox(seq))

    def for_replicate(self, replicate: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, replicate, self.entry, self.part, self.stream)

    def for_entry(self, k: int, h: int, part: int = 0) -> "SeedSpec":
        return SeedSpec(self.master_seed, self.replicate, (k, h), part, self.stream)

    def for_stream(self, stream: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, self.replicate, self.entry, self.part, stream)

    def coordinates(self) -> dict:
        return {
            'master_seed': int(self.master_seed),
            'stream': self.stream,
            'replicate': self.replicate,
            'entry': list(self.entry),
            'part': self.part,
        }


@dataclass
class ScalarPath:
    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.steps + 1,):
            raise ValueError(
                f"La trayectoria tiene {self.values.shape} valores; se esperaban {self.grid.steps + 1}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("La trayectoria contiene valores no finitos")

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.values)

    def subsample(self, stride: int) -> "ScalarPath":
        return ScalarPath(self.grid.coarsen(stride), self.values[::stride].copy())

    def scaled(self, factor: float) -> "ScalarPath":
        return ScalarPath(self.grid, factor * self.values)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({'t': self.grid.nodes, 'value': self.values})

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)

    @classmethod
    def from_csv(cls, path) -> "ScalarPath":
        df = pd.read_csv(path)
        t = df['t'].to_numpy()
        grid = GridSpec(float(t[-1]), len(t) - 1)
        return cls(grid, df['value'].to_numpy())


def symmetric_coordinates(d: int) -> List[Coordinate]:
    """Coordenadas (k, h, 0) con k <= h, en orden fila a fila"""
    return [(k, h, 0) for k in range(d) for h in range(k, d)]


def hermitian_coordinates(d: int) -> List[Coordinate]:
    """Coordenadas (k, h, parte): diagonal real, y parte real (0) e imaginaria (1) para k < h"""
    coords = []
    for k in range(d):
        for h in range(k, d):
            coords.append((k, h, 0))
            if k < h:
                coords.append((k, h, 1))
    return coords


@dataclass
class _MatrixPath:
    grid: GridSpec
    dimension: int
    entries: np.ndarray
    offset: np.ndarray

    kind = 'abstract'

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=float)
        expected = (len(self.coordinates), self.grid.steps + 1)
        if self.entries.shape != expected:
            raise ValueError(f"Entradas con forma {self.entries.shape}; se esperaba {expected}")

    @property
    def coordinates(self) -> List[Coordinate]:
        raise NotImplementedError

    @property
    def steps(self) -> int:
        return self.grid.steps

    def matrix_at(self, m: int) -> np.ndarray:
        return self.matrices[m]

    def entry_path(self, index: int) -> ScalarPath:
        return ScalarPath(self.grid, self.entries[index])

    def subsample(self, stride: int):
        return type(self)(self.grid.coarsen(stride), self.dimension,
                          self.entries[:, ::stride].copy(), self.offset.copy())

    def offset_is_zero(self) -> bool:
        return not np.any(self.offset)


@dataclass
class SymMatrixPath(_MatrixPath):
    kind = 'symmetric'

    @property
    def coordinates(self) -> List[Coordinate]:
        return symmetric_coordinates(self.dimension)

    @cached_property
    def matrices(self) -> np.ndarray:
        d = self.dimension
        out = np.empty((self.grid.steps + 1, d, d))
        out[:] = self.offset
        for idx, (k, h, _) in enumerate(self.coordinates):
            if k == h:
                out[:, k, k] += math.sqrt(2.0) * self.entries[idx]
            else:
                out[:, k, h] += self.entries[idx]
                out[:, h, k] += self.entries[idx]
        return out

    def to_frame(self) -> pd.DataFrame:
        mats = self.matrices
        t = self.grid.nodes
        frames = []
        for k in range(self.dimension):
            for h in range(k, self.dimension):
                frames.append(pd.DataFrame({'t': t, 'k': k + 1, 'h': h + 1, 'value': mats[:, k, h]}))
        return pd.concat(frames, ignore_index=True).sort_values(['t', 'k', 'h'], kind='stable')

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)


@dataclass
class HermMatrixPath(_MatrixPath):
    kind = 'hermitian'

    def __post_init__(self):
        super().__post_init__()
        self.offset = np.asarray(self.offset, dtype=complex)

    @property
    def coordinates(self) -> List[Coordinate]:
        return hermitian_coordinates(self.dimension)

    @cached_property
    def matrices(self) -> np.ndarray:
        d = self.dimension
        out = np.empty((self.grid.steps + 1, d, d), dtype=complex)
        out[:] = self.offset
        inv_sqrt2 = 1.0 / math.sqrt(2.0)
        for idx, (k, h, part) in enumerate(self.coordinates):
            if k == h:
                out[:, k, k] += self.entries[idx]
            elif part == 0:
                out[:, k, h] += inv_sqrt2 * self.entries[idx]
                out[:, h, k] += inv_sqrt2 * self.entries[idx]
            else:
                out[:, k, h] += 1j * inv_sqrt2 * self.entries[idx]
                out[:, h, k] -= 1j * inv_sqrt2 * self.entries[idx]
        return out

    def to_frame(self) -> pd.DataFrame:
        mats = self.matrices
        t = self.grid.nodes
        frames = []
        for k in range(self.dimension):
            for h in range(k, self.dimension):
                frames.append(pd.DataFrame({
                    't': t, 'k': k + 1, 'h': h + 1,
                    're': mats[:, k, h].real, 'im': mats[:, k, h].imag,
                }))
        return pd.concat(frames, ignore_index=True).sort_values(['t', 'k', 'h'], kind='stable')

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)


MatrixPath = Union[SymMatrixPath, HermMatrixPath]


@dataclass
class EigenPath:
    """Trayectorias λ_1(t_m) >= ... >= λ_d(t_m) con marcos opcionales por nodo"""
    grid: GridSpec
    values: np.ndarray
    frames: Optional[list] = None
    source: Optional[MatrixPath] = field(default=None, repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[1] != self.grid.steps + 1:
            raise ValueError(f"Autovalores con forma {self.values.shape} para n={self.grid.steps}")

    @property
    def dimension(self) -> int:
        return self.values.shape[0]

    @property
    def initial(self) -> np.ndarray:
        return self.values[:, 0].copy()

    def gaps(self) -> np.ndarray:
        """Brechas adyacentes λ_i − λ_{i+1}, forma (d−1, n+1)"""
        return self.values[:-1] - self.values[1:]

    def trace_residual(self) -> float:
        if self.source is None:
            raise ValueError("La trayectoria no guarda el camino matricial de origen")
        traces = np.real(np.trace(self.source.matrices, axis1=1, axis2=2))
        return float(np.max(np.abs(self.values.sum(axis=0) - traces) / (1.0 + np.abs(traces))))

    def subsample(self, stride: int) -> "EigenPath":
        frames = self.frames[::stride] if self.frames is not None else None
        source = self.source.subsample(stride) if self.source is not None else None
        return EigenPath(self.grid.coarsen(stride), self.values[:, ::stride].copy(), frames, source)

    def to_frame(self) -> pd.DataFrame:
        d, n1 = self.values.shape
        t = self.grid.nodes
        return pd.DataFrame({
            't': np.repeat(t, d),
            'i': np.tile(np.arange(1, d + 1), n1),
            'lambda': self.values.T.reshape(-1),
        })

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)


@dataclass
class DysonDecomposition:
    """λ_i(t) = λ_i(0) + Y_i(t) + D_i(t) nodo a nodo"""
    grid: GridSpec
    eigenvalues: np.ndarray
    drift: np.ndarray
    residual: np.ndarray
    hurst: float
    first_cell: str = 'power_law'
    drift_without_first_cell: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def initial(self) -> np.ndarray:
        return self.eigenvalues[:, 0].copy()

    @property
    def dimension(self) -> int:
        return self.eigenvalues.shape[0]

    def identity_residuals(self) -> dict:
        """Residuos máximos de las tres identidades de la descomposición"""
        lam0 = self.initial[:, None]
        recon = lam0 + self.residual + self.drift
        return {
            'decomposition': float(np.max(np.abs(recon - self.eigenvalues))),
            'drift_sum': float(np.max(np.abs(self.drift.sum(axis=0)))),
            'residual_sum': float(np.max(np.abs(
                self.residual.sum(axis=0) - (self.eigenvalues.sum(axis=0) - lam0.sum())
            ))),
        }

    def check(self, tolerance: float = 1e-10) -> dict:
        res = self.identity_residuals()
        scale = 1.0 + float(np.max(np.abs(self.eigenvalues)))
        bad = {k: v for k, v in res.items() if v > tolerance * scale}
        if bad:
            raise AssertionError(f"Identidades de la descomposición violadas: {bad}")
        return res

    def at(self, t: float) -> np.ndarray:
        return self.residual[:, self.grid.index_of(t)]

    def to_frame(self) -> pd.DataFrame:
        d, n1 = self.eigenvalues.shape
        t = self.grid.nodes
        return pd.DataFrame({
            't': np.repeat(t, d),
            'i': np.tile(np.arange(1, d + 1), n1),
            'lambda': self.eigenvalues.T.reshape(-1),
            'drift': self.drift.T.reshape(-1),
            'Y': self.residual.T.reshape(-1),
        })

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
