import json

import numpy as np
import pytest

from fdyson.config import SUITE_DEFAULTS, ExperimentConfig, environment_defaults, load_config
from fdyson.errors import ConfigInvalid


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv('FDYSON_THREADS', raising=False)
    monkeypatch.delenv('FDYSON_LOG_LEVEL', raising=False)


def write_json(path, data):
    path.write_text(json.dumps(data), encoding='utf-8')
    return path


class TestExperimentConfig:
    def test_defaults_are_valid(self):
        cfg = ExperimentConfig().validate()
        assert cfg.grid.steps == 4096
        assert cfg.model().hurst == 0.75

    def test_unknown_field(self):
        with pytest.raises(ConfigInvalid) as info:
            ExperimentConfig.from_dict({'hurts': 0.7})
        assert info.value.errors == ['hurts: campo desconocido']

    def test_collects_every_error(self):
        cfg = ExperimentConfig(ensemble='real', dimension=1, hurst=1.2, threads=0)
        with pytest.raises(ConfigInvalid) as info:
            cfg.validate()
        fields = [e.split(':')[0] for e in info.value.errors]
        assert fields == ['ensemble', 'dimension', 'hurst', 'threads']

    def test_dyadic_steps(self):
        with pytest.raises(ConfigInvalid):
            ExperimentConfig(steps=1000, suites=['variation']).validate()
        ExperimentConfig(steps=1000, suites=['noncollide']).validate()

    def test_bifractional_only_for_noncollide(self):
        ExperimentConfig(covariance='bifractional', suites=['noncollide']).validate()
        with pytest.raises(ConfigInvalid) as info:
            ExperimentConfig(covariance='bifractional', suites=['noncollide', 'selfsim']).validate()
        assert 'selfsim' in str(info.value)

    def test_bifractional_order(self):
        with pytest.raises(ConfigInvalid):
            ExperimentConfig(covariance='bifractional', bifractional_h=0.6, bifractional_k=0.5).validate()

    def test_unknown_suite(self):
        with pytest.raises(ConfigInvalid):
            ExperimentConfig(suites=['spectral']).validate()

    def test_options_merge(self):
        cfg = ExperimentConfig(suite_options={'selfsim': {'replicates': 10}})
        opts = cfg.options('selfsim')
        assert opts['replicates'] == 10
        assert opts['scale'] == SUITE_DEFAULTS['selfsim']['scale']
        assert SUITE_DEFAULTS['selfsim']['replicates'] == 2000

    def test_noncollide_replicates(self):
        assert ExperimentConfig(replicates=50).options('noncollide')['replicates'] == 200


class TestInitialMatrix:
    def test_zero(self):
        cfg = ExperimentConfig(ensemble='hermitian', dimension=3)
        X0 = cfg.initial_matrix()
        assert X0.dtype == complex
        assert cfg.x0_is_zero()

    def test_diagonal_list(self):
        cfg = ExperimentConfig(x0=[1.0, -1.0]).validate()
        np.testing.assert_array_equal(cfg.initial_matrix(), np.diag([1.0, -1.0]))
        assert not cfg.x0_is_zero()

    def test_diagonal_length(self):
        with pytest.raises(ConfigInvalid):
            ExperimentConfig(x0=[1.0, 0.0, -1.0]).validate()

    def test_csv_file(self, tmp_path):
        target = tmp_path / 'x0.csv'
        target.write_text('1.0,0.5\n0.5,-1.0\n', encoding='utf-8')
        cfg = ExperimentConfig(x0=str(target)).validate()
        np.testing.assert_array_equal(cfg.initial_matrix(), [[1.0, 0.5], [0.5, -1.0]])

    def test_csv_not_symmetric(self, tmp_path):
        target = tmp_path / 'x0.csv'
        target.write_text('1.0,0.5\n0.0,-1.0\n', encoding='utf-8')
        with pytest.raises(ConfigInvalid) as info:
            ExperimentConfig(x0=str(target)).validate()
        assert 'simétrica' in str(info.value)

    def test_complex_csv_hermitian(self, tmp_path):
        target = tmp_path / 'x0.csv'
        target.write_text('1.0, 0.5+1j\n0.5-1j, -1.0\n', encoding='utf-8')
        cfg = ExperimentConfig(ensemble='hermitian', x0=str(target)).validate()
        X0 = cfg.initial_matrix()
        assert X0.dtype == complex
        np.testing.assert_array_equal(X0, [[1.0, 0.5 + 1j], [0.5 - 1j, -1.0]])

    def test_complex_csv_symmetric(self, tmp_path):
        target = tmp_path / 'x0.csv'
        target.write_text('1.0,0.5+1j\n0.5-1j,-1.0\n', encoding='utf-8')
        with pytest.raises(ConfigInvalid) as info:
            ExperimentConfig(x0=str(target)).validate()
        assert info.value.errors[0].startswith('x0:')
        assert 'hermitian' in info.value.errors[0]

    def test_complex_csv_not_hermitian(self, tmp_path):
        target = tmp_path / 'x0.csv'
        target.write_text('1.0,0.5+1j\n0.5+1j,-1.0\n', encoding='utf-8')
        with pytest.raises(ConfigInvalid) as info:
            ExperimentConfig(ensemble='hermitian', x0=str(target)).validate()
        assert 'hermitiana' in str(info.value)

    def test_missing_csv(self):
        with pytest.raises(ConfigInvalid):
            ExperimentConfig(x0='no_existe.csv').validate()


class TestLoadConfig:
    def test_missing_file(self):
        with pytest.raises(ConfigInvalid):
            load_config('no_existe.json')

    def test_invalid_json(self, tmp_path):
        target = tmp_path / 'bad.json'
        target.write_text('{"steps": ', encoding='utf-8')
        with pytest.raises(ConfigInvalid):
            load_config(target)

    def test_precedence(self, tmp_path, monkeypatch):
        monkeypatch.setenv('FDYSON_THREADS', '3')
        monkeypatch.setenv('FDYSON_LOG_LEVEL', 'DEBUG')
        target = write_json(tmp_path / 'cfg.json', {'threads': 2, 'master_seed': 5, 'steps': 128})
        cfg = load_config(target, {'master_seed': 9, 'threads': None})
        assert cfg.threads == 2
        assert cfg.master_seed == 9
        assert cfg.steps == 128
        assert cfg.log_level == 'DEBUG'

    def test_environment_only(self, monkeypatch):
        monkeypatch.setenv('FDYSON_THREADS', '4')
        assert load_config().threads == 4

    def test_dotenv_file(self, tmp_path):
        (tmp_path / '.env').write_text('FDYSON_THREADS=6\n', encoding='utf-8')
        assert environment_defaults()['threads'] == 6

    def test_bad_threads_variable(self, monkeypatch):
        monkeypatch.setenv('FDYSON_THREADS', 'muchos')
        with pytest.raises(ConfigInvalid):
            environment_defaults()
