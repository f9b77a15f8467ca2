import numpy as np
import pytest
from scipy import stats

from fdyson.matrix_ensemble import gap_scale
from fdyson.suites.density import moment_oracle_report, moment_scaling_report


def rayleigh_quantiles(scale, n=100000):
    """Muestra determinista: cuantiles medios de Rayleigh(scale)"""
    return stats.rayleigh(scale=scale).ppf((np.arange(n) + 0.5) / n)


class TestNegativeMoments:
    H = 0.75

    @pytest.mark.parametrize('q', [1.0, 1.5])
    def test_oracle_heavy_tail_band(self, q):
        scale = gap_scale(1.0, self.H)
        rep = moment_oracle_report(rayleigh_quantiles(scale), q, scale)
        assert rep.threshold == 0.10
        assert rep.passed

    def test_oracle_heavy_tail_rejects_wrong_scale(self):
        scale = gap_scale(1.0, self.H)
        rep = moment_oracle_report(rayleigh_quantiles(0.5 * scale), 1.5, scale)
        assert rep.statistic > rep.threshold
        assert not rep.passed

    @pytest.mark.parametrize('q', [0.5, 1.0, 1.5])
    def test_scaling_exact(self, q):
        base = rayleigh_quantiles(1.0, 1000)
        gap_s, gap_T = base * gap_scale(0.5, self.H), base * gap_scale(1.0, self.H)
        rep = moment_scaling_report(gap_s, gap_T, q, self.H, 0.5, 1.0, 0.20)
        assert rep.statistic == pytest.approx(0.0, abs=1e-9)
        assert rep.passed
        assert rep.details['expected'] == pytest.approx(-q * self.H)

    @pytest.mark.parametrize('q', [0.5, 1.0, 1.5])
    def test_scaling_gate_applies_to_every_q(self, q):
        # sin cambio de escala entre s y T el exponente es 0
        gaps = rayleigh_quantiles(1.0, 1000)
        rep = moment_scaling_report(gaps, gaps, q, self.H, 0.5, 1.0, 0.20)
        assert rep.statistic == pytest.approx(1.0)
        assert not rep.passed
