import json

import pytest

from fdyson import __version__
from fdyson.cli import EXIT_CONFIG_ERROR, EXIT_OK, EXIT_SUITE_FAILURE, build_parser, cli_entry
from fdyson.harness import MANIFEST_FILE

from .conftest import FAST_SUITE_OPTIONS


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv('FDYSON_THREADS', raising=False)
    monkeypatch.delenv('FDYSON_LOG_LEVEL', raising=False)


@pytest.fixture
def config_file(tmp_path):
    def write(**kwargs):
        data = {'steps': 64, 'replicates': 3, 'suite_options': FAST_SUITE_OPTIONS}
        data.update(kwargs)
        target = tmp_path / 'config.json'
        target.write_text(json.dumps(data), encoding='utf-8')
        return str(target)
    return write


def read_manifest(folder):
    with open(folder / MANIFEST_FILE, 'r', encoding='utf-8') as f:
        data = json.load(f)
    data.pop('wall_clock_seconds')
    return data


class TestParser:
    def test_commands(self):
        args = build_parser().parse_args(['selfsim', '--seed', '7', '--threads', '2'])
        assert args.command == 'selfsim'
        assert args.seed == 7
        assert args.threads == 2

    def test_unknown_subcommand(self, capsys):
        assert cli_entry(['espectro']) == EXIT_CONFIG_ERROR
        assert 'invalid choice' in capsys.readouterr().err

    def test_version(self, capsys):
        assert cli_entry(['--version']) == EXIT_OK
        assert __version__ in capsys.readouterr().out


class TestConfigErrors:
    def test_missing_config(self, capsys):
        assert cli_entry(['noncollide', '--config', 'no_existe.json']) == EXIT_CONFIG_ERROR
        assert 'Error de configuración' in capsys.readouterr().err

    def test_invalid_value(self, config_file, capsys):
        assert cli_entry(['noncollide', '--config', config_file(hurst=1.5)]) == EXIT_CONFIG_ERROR
        assert 'hurst' in capsys.readouterr().err

    def test_negative_seed(self, config_file):
        assert cli_entry(['noncollide', '--config', config_file(), '--seed', '-1']) == EXIT_CONFIG_ERROR


class TestRuns:
    def test_noncollide(self, config_file, tmp_path):
        out = tmp_path / 'run'
        code = cli_entry(['noncollide', '--config', config_file(), '--seed', '21', '--out', str(out)])
        assert code == EXIT_OK
        manifest = read_manifest(out)
        assert manifest['config']['master_seed'] == 21
        assert manifest['config']['suites'] == ['noncollide']
        assert (out / 'noncollide' / 'min_gaps.csv').is_file()
        assert (out / 'fdyson.log').is_file()

    def test_suite_failure_exit_code(self, config_file, tmp_path):
        # con 16 pasos la regresión de Hölder no tiene rezagos suficientes
        out = tmp_path / 'simulate'
        assert cli_entry(['simulate', '--config', config_file(), '--out', str(out)]) == EXIT_SUITE_FAILURE
        reports = read_manifest(out)['suites']['simulate']
        holder = next(r for r in reports if r['name'] == 'simulate.holder_regression')
        assert holder['details']['error'] == 'InsufficientData'

    def test_all_twice_is_reproducible(self, config_file, tmp_path):
        path = config_file(master_seed=5)
        codes = [cli_entry(['all', '--config', path, '--out', str(tmp_path / f"run{k}")]) for k in (1, 2)]
        assert codes[0] == codes[1]
        assert codes[0] in (EXIT_OK, EXIT_SUITE_FAILURE)
        first, second = read_manifest(tmp_path / 'run1'), read_manifest(tmp_path / 'run2')
        assert set(first['suites']) == {
            'simulate', 'noncollide', 'variation', 'selfsim', 'gradcheck', 'itocheck', 'density',
        }
        assert first == second
        for name in ('variation/variation_Y.csv', 'density/gaps.csv', 'itocheck/young_check_0.json'):
            assert (tmp_path / 'run1' / name).read_text() == (tmp_path / 'run2' / name).read_text()
