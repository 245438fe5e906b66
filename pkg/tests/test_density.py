"""Density families: metrics, integrability conditions, level sets."""

import math

import numpy as np
import pytest

from normbridge.density import (INF, BetaLike, ExpType, ParetoLike,
                                TabulatedDensity, Uniform, conjugate)
from normbridge.errors import DomainError, UsageError


def test_conjugate_indices():
    assert conjugate(1) == INF
    assert conjugate(INF) == 1.0
    assert conjugate(2.0) == 2.0
    assert conjugate(4.0) == pytest.approx(4.0 / 3.0)


class TestUniform:
    def test_known_scalars(self):
        u = Uniform()
        assert u.mean_m() == pytest.approx(0.5, abs=1e-12)
        assert u.kappa() == pytest.approx(1.0, abs=1e-12)

    def test_b_interpolates_between_kappa_and_m(self):
        u = Uniform()
        assert u.b_p(1) == 1.0
        assert u.b_p(INF) == 0.5
        # |1-t|_2 over [0,1]
        assert u.b_p(2.0) == pytest.approx(1.0 / math.sqrt(3.0), rel=1e-9)

    def test_survival_and_domain(self):
        u = Uniform()
        assert u.survival(0.25) == 0.75
        with pytest.raises(DomainError):
            u.survival(1.5)


class TestBetaLike:
    def test_metrics(self):
        b = BetaLike(1.0)
        assert b.mean_m() == pytest.approx(1.0 / 3.0)
        assert b.kappa() == pytest.approx(0.5)

    def test_condition_table_closed_end(self):
        # needs p > alpha + 1, or p = 1 with alpha = 0
        assert BetaLike(0.0).check_conditions(1).eq2_holds
        assert not BetaLike(1.0).check_conditions(1).eq2_holds
        assert not BetaLike(1.0).check_conditions(2).eq2_holds
        assert BetaLike(1.0).check_conditions(3).eq2_holds
        assert BetaLike(2.0).check_conditions(INF).eq2_holds

    def test_condition_open_end_always_holds(self):
        b = BetaLike(3.0, closed_end=False)
        for p in (1, 1.5, 2, INF):
            rep = b.check_conditions(p)
            assert rep.eq1_holds and rep.eq2_holds

    def test_invalid_alpha(self):
        with pytest.raises(UsageError):
            BetaLike(-1.0)


class TestParetoLike:
    def test_metrics(self):
        p = ParetoLike(3.0)
        assert p.mean_m() == pytest.approx(1.0)
        assert p.kappa() == INF

    def test_infinite_mean_at_heavy_tails(self):
        assert ParetoLike(2.0).mean_m() == INF

    def test_b_p_closed_form_vs_tail_condition(self):
        # finite exactly when alpha > 2 and p > 1 + 1/(alpha-2)
        p = ParetoLike(4.0)
        assert math.isfinite(p.b_p(2.0))
        assert p.b_p(1.2) == INF
        assert ParetoLike(3.0).b_p(2.0) == INF
        assert math.isfinite(ParetoLike(3.0).b_p(2.5))

    def test_conditions(self):
        assert not ParetoLike(3.0).check_conditions(1.5).eq2_holds
        assert ParetoLike(3.0).check_conditions(2.5).eq2_holds
        assert ParetoLike(1.5).check_conditions(2.0).eq1_holds


class TestExpType:
    def test_exponential_special_case(self):
        e = ExpType(1.0, 2.0)
        # psi = 2 exp(-2t): mean 1/2, tail ratio 1/2
        assert e.mean_m() == pytest.approx(0.5, rel=1e-10)
        assert e.kappa() == pytest.approx(0.5, rel=1e-10)

    def test_stretched_tail_is_unbounded(self):
        assert ExpType(0.5, 1.0).kappa() == INF

    def test_compressed_tail_kappa_numeric(self):
        e = ExpType(2.0, 1.0)
        k = e.kappa()
        assert math.isfinite(k)
        # the maximizer certifies the value from below
        grid = np.linspace(0.0, 20.0, 20001)
        assert k >= max(e.ratio(t) for t in grid) - 1e-9

    def test_conditions(self):
        assert not ExpType(0.5, 1.0).check_conditions(1).eq2_holds
        assert ExpType(0.5, 1.0).check_conditions(1.5).eq2_holds
        assert ExpType(1.0, 1.0).check_conditions(1).eq2_holds
        assert ExpType(2.0, 3.0).check_conditions(1).eq2_holds


class TestLevelSet:
    def test_uniform_level_set_is_left_interval(self):
        # ratio (1-t) decreases, so the level set hangs off t = 0
        u = Uniform()
        lo, hi = u.level_set(0.75)
        assert lo == pytest.approx(0.0, abs=1e-9)
        assert hi == pytest.approx(0.25, abs=1e-6)

    def test_threshold_above_max_raises(self):
        with pytest.raises(DomainError):
            Uniform().level_set(1.5)


class TestTabulated:
    def make_uniform(self, n=101):
        ts = np.linspace(0.0, 1.0, n)
        return TabulatedDensity(ts, np.ones(n))

    def test_matches_uniform(self):
        t = self.make_uniform()
        assert t.mean_m() == pytest.approx(0.5, rel=1e-12)
        assert t.kappa() == pytest.approx(1.0, rel=1e-12)
        assert t.survival(0.3) == pytest.approx(0.7, rel=1e-12)

    def test_normalization_guard(self):
        ts = np.linspace(0.0, 1.0, 11)
        with pytest.raises(UsageError):
            TabulatedDensity(ts, 2.0 * np.ones(11))

    def test_interior_zero_breaks_p1(self):
        ts = np.linspace(0.0, 1.0, 5)
        psis = np.array([2.0, 2.0, 0.0, 2.0, 2.0])
        psis = psis / np.trapezoid(psis, ts)
        d = TabulatedDensity(ts, psis)
        rep = d.check_conditions(1)
        assert not rep.eq2_holds

    def test_csv_round_trip(self, tmp_path):
        path = tmp_path / "density.csv"
        ts = np.linspace(0.0, 1.0, 21)
        lines = ["t,psi"] + [f"{t},{1.0}" for t in ts]
        path.write_text("\n".join(lines) + "\n")
        d = TabulatedDensity.from_csv(path)
        assert d.mean_m() == pytest.approx(0.5, rel=1e-12)

    def test_csv_header_required(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0.0,1.0\n1.0,1.0\n")
        with pytest.raises(UsageError):
            TabulatedDensity.from_csv(path)
