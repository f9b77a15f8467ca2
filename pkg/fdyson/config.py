"""Configuración de experimentos.

Precedencia: flag del CLI > archivo JSON > entorno (.env) > valor por defecto.
"""

import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd
from dotenv import find_dotenv, load_dotenv

from .errors import ConfigInvalid
from .gaussian_paths import CovarianceModel
from .models import GridSpec

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'
LOG_FILE = 'fdyson.log'

SUITE_ORDER = ['simulate', 'noncollide', 'variation', 'selfsim', 'gradcheck', 'itocheck', 'density']

# Suites que submuestrean por pasos diádicos
DYADIC_SUITES = {'variation', 'itocheck'}

# Tamaños por suite; se sobrescriben con la clave suite_options del JSON
SUITE_DEFAULTS = {
    'simulate': {
        'covariance_replicates': 10000,
        'covariance_steps': 100,
        'subgrid_points': 10,
        'ks_replicates': 2000,
        'ks_steps': 256,
        'holder_replicates': 100,
        'holder_steps': 2048,
        'dump_replicates': 1,
    },
    'noncollide': {
        'dimensions': [2, 3],
        'hursts': [0.6, 0.75],
        'replicates': 200,           # None: usa config.replicates
        'identity_tolerance': 1e-10,
    },
    'variation': {
        'resolutions': [4096, 8192, 16384],
        'fbm_replicates': 50,
        'y_replicates': 20,
        'band': 0.10,
    },
    'selfsim': {
        'replicates': 2000,
        'scale': 2.0,
        'time': 0.5,
        'steps': 64,
    },
    'gradcheck': {
        'samples': 100,
        'dimensions': [2, 3, 4, 5],
        'gradient_rtol': 1e-6,
        'hessian_rtol': 1e-4,
        'identity_tol': 1e-8,
    },
    'itocheck': {
        'zero_mean_replicates': 500,
        'zero_mean_steps': 256,
        'times': [0.25, 0.5, 0.75, 1.0],
        'young_replicates': 3,
        'young_resolutions': [1024, 2048, 4096],
        'brownian_replicates': 100,
        'brownian_steps': 1024,
        'qv_band': 0.05,
        'euler_replicates': 2000,
        'euler_steps': 256,
        'euler_offset': 0.5,
        'log_gap_replicates': 3,
        'log_gap_steps': 8192,
        'log_gap_t0': 0.25,
        'log_gap_tolerance': 0.01,
    },
    'density': {
        'replicates': 10000,
        'q_values': [0.5, 1.0, 1.5],
        'scaling_time': 0.5,
        'scaling_band': 0.20,
    },
}

ENSEMBLES = ('symmetric', 'hermitian')
COVARIANCES = ('fbm', 'bifractional')


@dataclass
class ExperimentConfig:
    ensemble: str = 'symmetric'
    dimension: int = 2
    hurst: float = 0.75
    covariance: str = 'fbm'
    bifractional_h: float = 0.8
    bifractional_k: float = 0.8
    horizon: float = 1.0
    steps: int = 4096
    replicates: int = 100
    master_seed: int = 0
    x0: Union[str, List[float]] = 'zero'
    suites: List[str] = field(default_factory=list)
    out: str = 'results'
    threads: int = 1
    progress: bool = False
    log_level: str = 'INFO'
    suite_options: Dict[str, Dict[str, Any]] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigInvalid([f"{k}: campo desconocido" for k in unknown])
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        return cls.from_dict(read_config_file(path))

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.horizon, self.steps)

    def model(self) -> CovarianceModel:
        if self.covariance == 'bifractional':
            return CovarianceModel.bifractional(self.bifractional_h, self.bifractional_k)
        return CovarianceModel.fbm(self.hurst)

    def initial_matrix(self) -> np.ndarray:
        """X(0) a partir de 'zero', una lista diagonal o un archivo CSV denso"""
        dtype = complex if self.ensemble == 'hermitian' else float
        if isinstance(self.x0, str) and self.x0 == 'zero':
            return np.zeros((self.dimension, self.dimension), dtype=dtype)
        if isinstance(self.x0, (list, tuple)):
            return np.diag(np.asarray(self.x0, dtype=float)).astype(dtype)
        matrix = read_dense_matrix(self.x0)
        if dtype is float:
            if np.any(matrix.imag != 0):
                raise ValueError("las entradas complejas solo se admiten con ensemble 'hermitian'")
            return matrix.real.copy()
        return matrix

    def x0_is_zero(self) -> bool:
        return not np.any(self.initial_matrix())

    def options(self, suite: str) -> Dict[str, Any]:
        merged = dict(SUITE_DEFAULTS.get(suite, {}))
        merged.update(self.suite_options.get(suite, {}))
        return merged

    def validate(self) -> "ExperimentConfig":
        """Reúne todos los errores por campo antes de lanzar ConfigInvalid"""
        errors = []
        if self.ensemble not in ENSEMBLES:
            errors.append(f"ensemble: debe ser uno de {ENSEMBLES}, se recibió {self.ensemble!r}")
        if not isinstance(self.dimension, int) or self.dimension < 2:
            errors.append(f"dimension: se requiere un entero >= 2, se recibió {self.dimension!r}")
        if not isinstance(self.hurst, (int, float)) or not (0.5 <= self.hurst < 1.0):
            errors.append(f"hurst: debe estar en [1/2, 1), se recibió {self.hurst!r}")
        if self.covariance not in COVARIANCES:
            errors.append(f"covariance: debe ser uno de {COVARIANCES}, se recibió {self.covariance!r}")
        elif self.covariance == 'bifractional':
            gamma = self.bifractional_h * self.bifractional_k
            if not (0.5 < gamma < 1.0 and 0 < self.bifractional_k <= 1):
                errors.append(f"bifractional_h/bifractional_k: el orden hK={gamma} debe estar en (1/2, 1)")
            others = sorted(set(self.suites) - {'noncollide'})
            if others:
                errors.append(f"covariance: 'bifractional' solo se admite en noncollide, no en {others}")
        if not isinstance(self.horizon, (int, float)) or not self.horizon > 0:
            errors.append(f"horizon: debe ser positivo, se recibió {self.horizon!r}")
        if not isinstance(self.steps, int) or self.steps < 1:
            errors.append(f"steps: se requiere un entero >= 1, se recibió {self.steps!r}")
        elif DYADIC_SUITES & set(self.suites) and self.steps & (self.steps - 1):
            errors.append(f"steps: debe ser potencia de 2 para {sorted(DYADIC_SUITES & set(self.suites))}")
        if not isinstance(self.replicates, int) or self.replicates < 1:
            errors.append(f"replicates: se requiere un entero >= 1, se recibió {self.replicates!r}")
        if not isinstance(self.master_seed, int) or not (0 <= self.master_seed < 2 ** 64):
            errors.append(f"master_seed: se requiere un entero de 64 bits, se recibió {self.master_seed!r}")
        if not isinstance(self.threads, int) or self.threads < 1:
            errors.append(f"threads: se requiere un entero >= 1, se recibió {self.threads!r}")
        unknown = [s for s in self.suites if s not in SUITE_ORDER]
        if unknown:
            errors.append(f"suites: desconocidas {unknown}; disponibles {SUITE_ORDER}")
        unknown_opts = [s for s in self.suite_options if s not in SUITE_DEFAULTS]
        if unknown_opts:
            errors.append(f"suite_options: suites desconocidas {unknown_opts}")
        if self.log_level.upper() not in ('DEBUG', 'INFO', 'WARNING', 'ERROR'):
            errors.append(f"log_level: nivel desconocido {self.log_level!r}")
        errors.extend(self._validate_x0())
        if errors:
            raise ConfigInvalid(errors)
        return self

    def _validate_x0(self) -> List[str]:
        if isinstance(self.x0, str) and self.x0 == 'zero':
            return []
        if isinstance(self.x0, (list, tuple)):
            if len(self.x0) != self.dimension:
                return [f"x0: la diagonal tiene {len(self.x0)} valores; se esperaban {self.dimension}"]
            return []
        if not isinstance(self.x0, str):
            return [f"x0: debe ser 'zero', una lista diagonal o una ruta, se recibió {self.x0!r}"]
        if not Path(self.x0).is_file():
            return [f"x0: no existe el archivo {self.x0}"]
        try:
            matrix = self.initial_matrix()
        except (ValueError, pd.errors.ParserError) as e:
            return [f"x0: no se pudo leer {self.x0}: {e}"]
        if matrix.shape != (self.dimension, self.dimension):
            return [f"x0: forma {matrix.shape}; se esperaba {(self.dimension, self.dimension)}"]
        if not np.array_equal(matrix, matrix.conj().T):
            kind = 'hermitiana' if self.ensemble == 'hermitian' else 'simétrica'
            return [f"x0: la matriz no es {kind}"]
        return []


def read_dense_matrix(path) -> np.ndarray:
    """CSV denso sin encabezado; acepta valores complejos como 1+0.5j"""
    raw = pd.read_csv(path, header=None, dtype=str, skipinitialspace=True)
    parsed = raw.apply(lambda col: col.str.replace(' ', '', regex=False).map(complex))
    return parsed.to_numpy(dtype=complex)


def read_config_file(path) -> Dict[str, Any]:
    path = Path(path)
    if not path.is_file():
        raise ConfigInvalid([f"config: no existe el archivo {path}"])
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigInvalid([f"config: JSON inválido en {path}: {e}"]) from e
    if not isinstance(data, dict):
        raise ConfigInvalid([f"config: se esperaba un objeto JSON en {path}"])
    return data


def environment_defaults() -> Dict[str, Any]:
    """Valores tomados de FDYSON_THREADS y FDYSON_LOG_LEVEL (incluye el .env del directorio de trabajo)"""
    load_dotenv(find_dotenv(usecwd=True))
    out: Dict[str, Any] = {}
    threads = os.getenv('FDYSON_THREADS')
    if threads:
        try:
            out['threads'] = int(threads)
        except ValueError:
            raise ConfigInvalid([f"FDYSON_THREADS: se esperaba un entero, se recibió {threads!r}"])
    level = os.getenv('FDYSON_LOG_LEVEL')
    if level:
        out['log_level'] = level
    return out


def load_config(path=None, overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    data = environment_defaults()
    if path is not None:
        data.update(read_config_file(path))
    if overrides:
        data.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.from_dict(data).validate()


def configure_logging(out_dir, level: str = 'INFO') -> None:
    """Bitácora en <out>/fdyson.log y en stdout"""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    logging.basicConfig(
        level=getattr(logging, level.upper()),
        format=LOG_FORMAT,
        handlers=[
            logging.FileHandler(out_dir / LOG_FILE),
            logging.StreamHandler(sys.stdout)
        ],
        force=True,
    )
