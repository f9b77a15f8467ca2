from .paths import (
    CSV_FLOAT_FORMAT,
    DysonDecomposition,
    EigenPath,
    GridSpec,
    HermMatrixPath,
    HurstParam,
    MatrixPath,
    ScalarPath,
    SeedSpec,
    SymMatrixPath,
    hermitian_coordinates,
    hurst_value,
    symmetric_coordinates,
)
from .reports import RunManifest, TestReport, VariationReport, YoungCheckReport, to_jsonable

__all__ = [
    'CSV_FLOAT_FORMAT', 'DysonDecomposition', 'EigenPath', 'GridSpec', 'HermMatrixPath',
    'HurstParam', 'MatrixPath', 'ScalarPath', 'SeedSpec', 'SymMatrixPath',
    'hermitian_coordinates', 'hurst_value', 'symmetric_coordinates',
    'RunManifest', 'TestReport', 'VariationReport', 'YoungCheckReport', 'to_jsonable',
]
