"""Reportes serializables a JSON"""

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np


def to_jsonable(obj: Any) -> Any:
    """Convierte recursivamente tipos numpy a tipos nativos de JSON"""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        if math.isnan(value) or math.isinf(value):
            return str(value)
        return value
    return obj


@dataclass
class TestReport:
    __test__ = False  # no es una clase de pytest

    name: str
    statistic: float
    threshold: float
    passed: bool
    sample_sizes: Dict[str, int] = field(default_factory=dict)
    seeds: Dict[str, Any] = field(default_factory=dict)
    comparison: str = '<='
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return to_jsonable(asdict(self))

    @classmethod
    def failure(cls, name: str, error: Exception, seeds: Optional[dict] = None) -> "TestReport":
        return cls(name=name, statistic=float('nan'), threshold=float('nan'), passed=False,
                   seeds=seeds or {}, comparison='error',
                   details={'error': type(error).__name__, 'message': str(error)})


@dataclass
class VariationReport:
    exponent: float
    resolutions: List[int]
    estimates: np.ndarray
    means: List[float]
    standard_errors: List[float]
    target: float

    @property
    def absolute_errors(self) -> List[float]:
        return [abs(m - self.target) for m in self.means]

    @property
    def relative_error(self) -> float:
        return abs(self.means[-1] - self.target) / abs(self.target)

    @property
    def monotone(self) -> bool:
        errs = self.absolute_errors
        return all(b < a for a, b in zip(errs, errs[1:]))

    def monotone_within(self, k: float = 2.0) -> bool:
        """Errores no crecientes salvo por k errores estándar"""
        errs = self.absolute_errors
        ses = self.standard_errors
        return all(errs[j + 1] <= errs[j] + k * ses[j + 1] for j in range(len(errs) - 1))

    def within_band(self, band: float) -> bool:
        """Error relativo en la resolución más fina dentro de band"""
        return self.relative_error <= band

    def to_dict(self) -> dict:
        return to_jsonable({
            'exponent': self.exponent,
            'resolutions': self.resolutions,
            'means': self.means,
            'standard_errors': self.standard_errors,
            'target': self.target,
            'absolute_errors': self.absolute_errors,
            'relative_error': self.relative_error,
            'monotone': self.monotone,
            'monotone_within_2se': self.monotone_within(),
        })


@dataclass
class YoungCheckReport:
    resolutions: List[int]
    discrepancies: List[List[float]]

    @property
    def max_discrepancies(self) -> List[float]:
        return [max(row) for row in self.discrepancies]

    @property
    def ratios(self) -> List[float]:
        mx = self.max_discrepancies
        return [a / b if b > 0 else float('inf') for a, b in zip(mx, mx[1:])]

    @property
    def monotone(self) -> bool:
        mx = self.max_discrepancies
        return all(b < a for a, b in zip(mx, mx[1:]))

    def to_dict(self) -> dict:
        return to_jsonable({
            'resolutions': self.resolutions,
            'discrepancies': self.discrepancies,
            'max_discrepancies': self.max_discrepancies,
            'ratios': self.ratios,
            'monotone': self.monotone,
        })

    def to_json(self, path) -> None:
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)


@dataclass
class RunManifest:
    config: Dict[str, Any]
    tool_version: str
    reports: Dict[str, List[TestReport]] = field(default_factory=dict)
    replicate_seeds: Dict[str, Any] = field(default_factory=dict)
    wall_clock_seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for reps in self.reports.values() for r in reps)

    def to_dict(self, include_wall_clock: bool = True) -> dict:
        out = {
            'config': self.config,
            'tool_version': self.tool_version,
            'passed': self.passed,
            'suites': {name: [r.to_dict() for r in reps] for name, reps in self.reports.items()},
            'replicate_seeds': self.replicate_seeds,
        }
        if include_wall_clock:
            out['wall_clock_seconds'] = self.wall_clock_seconds
        return to_jsonable(out)

    def to_json(self, include_wall_clock: bool = True) -> str:
        return json.dumps(self.to_dict(include_wall_clock), indent=2, sort_keys=True)

    def save(self, path) -> None:
        with open(path, 'w', encoding='utf-8') as f:
            f.write(self.to_json())
