import json

import numpy as np
import pytest

from fdyson.models import (
    DysonDecomposition,
    EigenPath,
    GridSpec,
    HurstParam,
    RunManifest,
    ScalarPath,
    SeedSpec,
    TestReport,
    VariationReport,
    YoungCheckReport,
    hermitian_coordinates,
    hurst_value,
    symmetric_coordinates,
)


class TestGridSpec:
    def test_nodes_and_dt(self):
        grid = GridSpec(2.0, 4)
        assert grid.dt == 0.5
        np.testing.assert_allclose(grid.nodes, [0.0, 0.5, 1.0, 1.5, 2.0])

    @pytest.mark.parametrize('horizon, steps', [(0.0, 4), (-1.0, 4), (1.0, 0), (1.0, 2.5)])
    def test_invalid(self, horizon, steps):
        with pytest.raises(ValueError):
            GridSpec(horizon, steps)

    def test_coarsen(self):
        assert GridSpec(1.0, 8).coarsen(4) == GridSpec(1.0, 2)
        with pytest.raises(ValueError):
            GridSpec(1.0, 8).coarsen(3)

    def test_index_of(self):
        grid = GridSpec(1.0, 8)
        assert grid.index_of(0.25) == 2
        assert grid.index_of(1.0) == 8
        with pytest.raises(ValueError):
            grid.index_of(0.3)


class TestHurst:
    @pytest.mark.parametrize('value', [0.5, 0.6, 0.999])
    def test_valid(self, value):
        assert hurst_value(value) == value

    @pytest.mark.parametrize('value', [0.49, 1.0, 1.2])
    def test_invalid(self, value):
        with pytest.raises(ValueError):
            HurstParam(value)

    def test_fractional_excludes_brownian(self):
        assert HurstParam(0.5).is_brownian
        with pytest.raises(ValueError):
            hurst_value(0.5, fractional=True)


class TestSeedSpec:
    def test_same_coordinates_same_stream(self):
        a = SeedSpec(42, 3, (0, 1), 1, 7).generator().standard_normal(5)
        b = SeedSpec(42, 3, (0, 1), 1, 7).generator().standard_normal(5)
        np.testing.assert_array_equal(a, b)

    @pytest.mark.parametrize('other', [
        SeedSpec(42, 4, (0, 1), 1, 7),
        SeedSpec(42, 3, (1, 1), 1, 7),
        SeedSpec(42, 3, (0, 1), 0, 7),
        SeedSpec(42, 3, (0, 1), 1, 8),
        SeedSpec(43, 3, (0, 1), 1, 7),
    ])
    def test_any_coordinate_changes_stream(self, other):
        base = SeedSpec(42, 3, (0, 1), 1, 7).generator().standard_normal(5)
        assert not np.array_equal(base, other.generator().standard_normal(5))

    def test_for_entry_keeps_replicate(self):
        seed = SeedSpec(1, replicate=5, stream=2).for_entry(0, 1, 1)
        assert seed.spawn_key == (2, 5, 0, 1, 1)

    @pytest.mark.parametrize('master', [-1, 2 ** 64])
    def test_master_seed_range(self, master):
        with pytest.raises(ValueError):
            SeedSpec(master)


class TestCoordinates:
    def test_symmetric_count(self):
        assert symmetric_coordinates(3) == [(0, 0, 0), (0, 1, 0), (0, 2, 0), (1, 1, 0), (1, 2, 0), (2, 2, 0)]

    def test_hermitian_count(self):
        coords = hermitian_coordinates(3)
        assert len(coords) == 9
        assert coords[:3] == [(0, 0, 0), (0, 1, 0), (0, 1, 1)]


class TestPaths:
    def test_scalar_path_shape(self):
        with pytest.raises(ValueError):
            ScalarPath(GridSpec(1.0, 4), np.zeros(4))

    def test_scalar_path_rejects_nan(self):
        with pytest.raises(ValueError):
            ScalarPath(GridSpec(1.0, 2), [0.0, np.nan, 1.0])

    def test_scalar_csv(self, tmp_path):
        path = ScalarPath(GridSpec(1.0, 4), [0.0, 0.1, -0.2, 1.0 / 3.0, 2.0])
        target = tmp_path / 'path.csv'
        path.to_csv(target)
        loaded = ScalarPath.from_csv(target)
        assert loaded.grid == path.grid
        np.testing.assert_array_equal(loaded.values, path.values)

    def test_subsample(self):
        path = ScalarPath(GridSpec(1.0, 4), np.arange(5.0))
        np.testing.assert_array_equal(path.subsample(2).values, [0.0, 2.0, 4.0])

    def test_eigen_path_gaps_and_frame(self):
        ep = EigenPath(GridSpec(1.0, 2), [[3.0, 3.0, 4.0], [1.0, 0.0, 1.0]])
        np.testing.assert_array_equal(ep.gaps(), [[2.0, 3.0, 3.0]])
        frame = ep.to_frame()
        assert list(frame.columns) == ['t', 'i', 'lambda']
        assert len(frame) == 6
        assert frame.iloc[1].to_dict() == {'t': 0.0, 'i': 2, 'lambda': 1.0}


class TestDysonDecomposition:
    def _decomposition(self, residual_shift=0.0):
        grid = GridSpec(1.0, 2)
        lam = np.array([[1.0, 2.0, 3.0], [-1.0, -2.0, -3.0]])
        drift = np.array([[0.0, 0.5, 1.0], [0.0, -0.5, -1.0]])
        residual = lam - lam[:, :1] - drift + residual_shift
        return DysonDecomposition(grid, lam, drift, residual, 0.75)

    def test_identities_hold(self):
        res = self._decomposition().check()
        assert res['decomposition'] == 0.0
        assert res['drift_sum'] == 0.0

    def test_broken_identity_raises(self):
        with pytest.raises(AssertionError):
            self._decomposition(residual_shift=1e-3).check()

    def test_at(self):
        np.testing.assert_allclose(self._decomposition().at(0.5), [0.5, -0.5])


class TestReports:
    def test_variation_report_errors(self):
        rep = VariationReport(2.0, [4, 8], np.zeros((2, 2)), [1.2, 1.05], [0.1, 0.1], 1.0)
        assert rep.absolute_errors == pytest.approx([0.2, 0.05])
        assert rep.relative_error == pytest.approx(0.05)
        assert rep.monotone
        assert rep.within_band(0.1)
        assert not rep.within_band(0.01)

    def test_band_uses_finest_resolution(self):
        rep = VariationReport(2.0, [4, 8, 16], np.zeros((2, 3)), [1.5, 1.2, 1.05], [0.1, 0.1, 0.1], 1.0)
        assert rep.within_band(0.1)
        assert not rep.within_band(0.04)

    def test_monotone_within_standard_errors(self):
        rep = VariationReport(2.0, [4, 8], np.zeros((2, 2)), [1.01, 1.02], [0.01, 0.01], 1.0)
        assert not rep.monotone
        assert rep.monotone_within(2.0)

    def test_young_report(self, tmp_path):
        rep = YoungCheckReport([16, 32], [[0.4, 0.2], [0.1, 0.05]])
        assert rep.max_discrepancies == [0.4, 0.1]
        assert rep.ratios == [4.0]
        assert rep.monotone
        rep.to_json(tmp_path / 'young.json')
        assert json.loads((tmp_path / 'young.json').read_text())['monotone'] is True

    def test_failure_report(self):
        rep = TestReport.failure('suite.check', ValueError('mal'))
        assert not rep.passed
        assert rep.details == {'error': 'ValueError', 'message': 'mal'}
        assert rep.to_dict()['statistic'] == 'nan'

    def test_manifest_json(self):
        manifest = RunManifest(config={'b': 1, 'a': np.int64(2)}, tool_version='0.1.0',
                               reports={'s': [TestReport('x', np.float64(0.1), 1.0, np.bool_(True))]},
                               wall_clock_seconds=3.5)
        assert manifest.passed
        text = manifest.to_json(include_wall_clock=False)
        data = json.loads(text)
        assert 'wall_clock_seconds' not in data
        assert data['config'] == {'a': 2, 'b': 1}
        assert list(data) == sorted(data)
