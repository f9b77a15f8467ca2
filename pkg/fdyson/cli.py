"""Interfaz de línea de comandos.

Códigos de salida: 0 si todas las suites pasan, 1 si alguna falla,
2 ante un error de configuración o un subcomando desconocido.
"""

import argparse
import logging
import sys
from typing import List, Optional

from . import __version__
from .config import SUITE_ORDER, configure_logging, load_config
from .errors import ConfigInvalid
from .harness import run_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_SUITE_FAILURE = 1
EXIT_CONFIG_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='fdyson',
        description='Suites de verificación para autovalores de fBm matricial',
    )
    parser.add_argument('command', choices=SUITE_ORDER + ['all'], help='suite a ejecutar')
    parser.add_argument('--config', help='archivo JSON de configuración')
    parser.add_argument('--seed', type=int, help='semilla maestra (entero de 64 bits)')
    parser.add_argument('--out', help='directorio de salida')
    parser.add_argument('--threads', type=int, help='hilos para las réplicas (o FDYSON_THREADS)')
    parser.add_argument('--replicates', type=int, help='número de réplicas M')
    parser.add_argument('--progress', action='store_true', help='mostrar barras de progreso')
    parser.add_argument('--log-level', dest='log_level', help='DEBUG, INFO, WARNING o ERROR')
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    return parser


def cli_entry(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG_ERROR if e.code else EXIT_OK

    suites = list(SUITE_ORDER) if args.command == 'all' else [args.command]
    overrides = {
        'master_seed': args.seed,
        'out': args.out,
        'threads': args.threads,
        'replicates': args.replicates,
        'progress': True if args.progress else None,
        'log_level': args.log_level,
        'suites': suites,
    }
    try:
        config = load_config(args.config, overrides)
    except ConfigInvalid as e:
        print(f"Error de configuración: {e}", file=sys.stderr)
        for error in e.errors:
            print(f"  - {error}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    configure_logging(config.out, config.log_level)
    logger.info(f"Iniciando fdyson {__version__} con suites {suites}")
    manifest = run_suite(config)
    return EXIT_OK if manifest.passed else EXIT_SUITE_FAILURE


def main() -> None:
    sys.exit(cli_entry())
