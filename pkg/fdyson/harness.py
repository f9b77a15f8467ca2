"""Orquestación de experimentos: registro de suites, réplicas paralelas deterministas y manifiesto"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional

import pandas as pd
from tqdm import tqdm

from .config import SUITE_ORDER, ExperimentConfig
from .models import CSV_FLOAT_FORMAT, RunManifest, SeedSpec, TestReport

logger = logging.getLogger(__name__)

MANIFEST_FILE = 'manifest.json'

# Campos de ejecución que no alteran los resultados y no se copian al manifiesto
EXECUTION_FIELDS = ('threads', 'out', 'progress', 'log_level')

# Cada suite usa streams en [stream * STREAM_BLOCK, (stream + 1) * STREAM_BLOCK)
STREAM_BLOCK = 100


@dataclass
class SuiteContext:
    """Lo que recibe cada chequeo: configuración, directorio, ejecutor y semillas"""
    suite: str
    stream: int
    config: ExperimentConfig
    out_dir: Path
    executor: Optional[ThreadPoolExecutor] = None
    seed_log: List[dict] = field(default_factory=list)

    @property
    def options(self) -> dict:
        return self.config.options(self.suite)

    def seed(self, replicate: int = 0, sub: int = 0) -> SeedSpec:
        if not 0 <= sub < STREAM_BLOCK:
            raise ValueError(f"Sub-stream fuera de rango: {sub}")
        return SeedSpec(self.config.master_seed, replicate, stream=self.stream * STREAM_BLOCK + sub)

    def map_replicates(self, func: Callable[[SeedSpec], object], count: int, sub: int = 0,
                       desc: str = '') -> list:
        """Aplica func a las semillas 0..count−1; el orden del resultado es el de las réplicas"""
        seeds = [self.seed(r, sub) for r in range(count)]
        self.seed_log.append({
            'label': desc or f"sub{sub}",
            'master_seed': self.config.master_seed,
            'stream': self.stream * STREAM_BLOCK + sub,
            'replicates': [0, count],
        })
        mapped = self.executor.map(func, seeds) if self.executor is not None else map(func, seeds)
        return list(tqdm(mapped, total=count, desc=f"{self.suite}:{desc}", disable=not self.config.progress))

    def path(self, name: str) -> Path:
        folder = self.out_dir / self.suite
        folder.mkdir(parents=True, exist_ok=True)
        return folder / name

    def write_csv(self, name: str, frame: pd.DataFrame) -> Path:
        target = self.path(name)
        frame.to_csv(target, index=False, float_format=CSV_FLOAT_FORMAT)
        logger.info(f"Datos guardados en {target}")
        return target


class Suite:
    """Conjunto de chequeos registrados con un decorador, al estilo de un blueprint"""

    def __init__(self, name: str, import_name: str, stream: int):
        self.name = name
        self.import_name = import_name
        self.stream = stream
        self.checks: List[Callable[[SuiteContext], List[TestReport]]] = []

    def check(self, func):
        self.checks.append(func)
        return func

    def execute(self, ctx: SuiteContext) -> List[TestReport]:
        reports: List[TestReport] = []
        for func in self.checks:
            name = f"{self.name}.{func.__name__}"
            logger.info(f"Ejecutando chequeo {name}...")
            try:
                produced = func(ctx)
            except Exception as e:
                logger.error(f"Error en {name}: {str(e)}")
                produced = [TestReport.failure(name, e, {'stream_block': self.stream})]
            for report in produced:
                level = logging.INFO if report.passed else logging.ERROR
                logger.log(level, f"{report.name}: {report.statistic} {report.comparison} "
                                  f"{report.threshold} -> {'OK' if report.passed else 'FALLA'}")
            reports.extend(produced)
        return reports


class SuiteRegistry:
    def __init__(self):
        self.suites: Dict[str, Suite] = {}

    def register_suite(self, suite: Suite) -> None:
        taken = {s.stream for s in self.suites.values()}
        if suite.stream in taken:
            raise ValueError(f"El stream {suite.stream} ya está en uso")
        self.suites[suite.name] = suite

    def names(self) -> List[str]:
        return [name for name in SUITE_ORDER if name in self.suites]

    def run_suite(self, config: ExperimentConfig) -> RunManifest:
        """Ejecuta las suites seleccionadas y guarda el manifiesto tras cada una"""
        from . import __version__

        config.validate()
        out_dir = Path(config.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        echo = {k: v for k, v in config.to_dict().items() if k not in EXECUTION_FIELDS}
        manifest = RunManifest(config=echo, tool_version=__version__)
        selected = [name for name in SUITE_ORDER if name in config.suites]
        missing = [name for name in selected if name not in self.suites]
        if missing:
            raise ValueError(f"Suites sin registrar: {missing}")

        start = time.perf_counter()
        with _executor(config.threads) as executor:
            for name in selected:
                suite = self.suites[name]
                logger.info(f"Procesando suite {name}...")
                ctx = SuiteContext(name, suite.stream, config, out_dir, executor)
                manifest.reports[name] = suite.execute(ctx)
                manifest.replicate_seeds[name] = ctx.seed_log
                manifest.wall_clock_seconds = time.perf_counter() - start
                manifest.save(out_dir / MANIFEST_FILE)
        manifest.wall_clock_seconds = time.perf_counter() - start
        manifest.save(out_dir / MANIFEST_FILE)
        logger.info(f"Ejecución completada: {'OK' if manifest.passed else 'con fallas'}")
        return manifest


@contextmanager
def _executor(threads: int):
    if threads <= 1:
        yield None
        return
    with ThreadPoolExecutor(max_workers=threads) as executor:
        yield executor


def run_suite(config: ExperimentConfig, registry: Optional[SuiteRegistry] = None) -> RunManifest:
    if registry is None:
        from . import create_runner
        registry = create_runner()
    return registry.run_suite(config)
