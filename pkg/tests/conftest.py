import numpy as np
import pytest

from fdyson.config import ExperimentConfig
from fdyson.models import EigenPath, GridSpec, ScalarPath, SeedSpec

# Tamaños mínimos para ejecutar cada suite completa en segundos
FAST_SUITE_OPTIONS = {
    'simulate': {
        'covariance_replicates': 50, 'covariance_steps': 20, 'subgrid_points': 10,
        'ks_replicates': 20, 'ks_steps': 16, 'holder_replicates': 100, 'holder_steps': 16,
        'dump_replicates': 1,
    },
    'noncollide': {'dimensions': [2], 'hursts': [0.75], 'replicates': 3},
    'variation': {'resolutions': [16, 32, 64], 'fbm_replicates': 5, 'y_replicates': 3},
    'selfsim': {'replicates': 10, 'steps': 8},
    'gradcheck': {'samples': 4, 'dimensions': [2, 3]},
    'itocheck': {
        'zero_mean_replicates': 5, 'zero_mean_steps': 16,
        'young_replicates': 1, 'young_resolutions': [16, 32, 64],
        'brownian_replicates': 3, 'brownian_steps': 32,
        'euler_replicates': 10, 'euler_steps': 8,
        'log_gap_replicates': 1, 'log_gap_steps': 64,
    },
    'density': {'replicates': 50},
}


def constant_eigenpath(values, grid: GridSpec) -> EigenPath:
    """Trayectoria de autovalores constante en el tiempo"""
    values = np.asarray(values, dtype=float)
    return EigenPath(grid, np.repeat(values[:, None], grid.steps + 1, axis=1))


def linear_path(grid: GridSpec, slope: float = 1.0) -> ScalarPath:
    return ScalarPath(grid, slope * grid.nodes)


@pytest.fixture
def seed():
    return SeedSpec(20240611)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture
def small_grid():
    return GridSpec(1.0, 64)


@pytest.fixture
def fast_config(tmp_path):
    """Configuración pequeña con salida en un directorio temporal"""
    def build(**kwargs):
        data = {
            'steps': 64,
            'replicates': 3,
            'master_seed': 11,
            'out': str(tmp_path / 'results'),
            'suite_options': FAST_SUITE_OPTIONS,
        }
        data.update(kwargs)
        return ExperimentConfig.from_dict(data)
    return build
