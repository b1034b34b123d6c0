import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meanfield import (Affine, BallSampler, BallSpec, Constant, DiskDomain,
                       DomainError, IntervalDomain, MeanfieldError,
                       QuadratureSpec, RadialPower, RectangleDomain,
                       beardon_threshold, contains_closed_ball, discretize,
                       factor_kappa, harmonic_poly, kappa_beardon, kappa_one,
                       laplacian_sign_estimate, max_combine,
                       max_principle_check, scaled)
# Aliased: pytest must not collect the library's test_* operations.
from meanfield import test_beardon as run_beardon
from meanfield import test_harmonic as run_harmonic
from meanfield import test_subharmonic as run_subharmonic

Q = QuadratureSpec(32, 16)
UNIT_SQUARE = RectangleDomain([0, 0], [1, 1])
SAMPLER = BallSampler(spacing=0.2)


class TestKappaConstants:
    def test_beardon_values(self):
        assert kappa_beardon(1) == 0.5
        assert kappa_beardon(2) == pytest.approx(0.6065306597126334, abs=1e-12)
        assert kappa_beardon(3) == pytest.approx(2 / 3, abs=1e-14)
        assert kappa_beardon(4) == pytest.approx(0.7071067811865476, abs=1e-10)

    def test_kappa_one_values(self):
        assert kappa_one(1) == pytest.approx(0.5, abs=1e-15)
        assert kappa_one(2) == pytest.approx(-0.5 + 0.5 * math.sqrt(5), abs=1e-12)
        assert kappa_one(3) == pytest.approx(-0.75 + 0.5 * math.sqrt(8.25), abs=1e-10)
        assert kappa_one(3) == pytest.approx(0.6861406616345072, abs=1e-10)

    def test_invalid_dimension(self):
        with pytest.raises(MeanfieldError):
            kappa_beardon(0)
        with pytest.raises(MeanfieldError):
            kappa_one(0)

    def test_ordering_with_equality_only_at_one(self):
        for n in range(1, 11):
            kb, k1 = kappa_beardon(n), kappa_one(n)
            assert k1 >= kb - 1e-12
            if n == 1:
                assert abs(k1 - kb) <= 1e-12
            else:
                assert k1 - kb > 1e-12

    def test_factor_zero_at_kappa_one(self):
        for n in range(1, 11):
            assert abs(factor_kappa(n, kappa_one(n))) <= 1e-12

    def test_factor_values(self):
        assert factor_kappa(2, 0.5) == pytest.approx(0.25, abs=1e-15)
        assert factor_kappa(1, 0.5) == pytest.approx(0.0, abs=1e-15)

    def test_factor_domain(self):
        with pytest.raises(MeanfieldError):
            factor_kappa(2, 0.0)
        with pytest.raises(MeanfieldError):
            factor_kappa(2, 1.0)

    @given(st.integers(1, 10), st.floats(0.01, 0.99))
    @settings(max_examples=300, deadline=None)
    def test_factor_sign_characterizes_kappa_one(self, n, kappa):
        f = factor_kappa(n, kappa)
        k1 = kappa_one(n)
        if kappa < k1 - 1e-9:
            assert f > 0
        elif kappa > k1 + 1e-9:
            assert f < 0


class TestHarmonicTest:
    def test_harmonic_passes(self):
        rep = run_harmonic(harmonic_poly("x2-y2"), UNIT_SQUARE, SAMPLER, Q,
                            tol=1e-8)
        assert rep.passed
        assert rep.worst_margin <= 1e-12

    def test_square_norm_fails_with_closed_form_margin(self):
        rep = run_harmonic(RadialPower([0, 0], 1), UNIT_SQUARE, SAMPLER, Q,
                            tol=1e-8)
        assert not rep.passed
        r = rep.witness.radius
        # |B - S| = 2 r^2 / (n + 2) for |x|^2, largest at the biggest ball.
        assert rep.worst_margin == pytest.approx(2 * r**2 / 4, rel=1e-10)

    def test_constant_passes_margin_zero(self):
        rep = run_harmonic(Constant(5.0, 2), UNIT_SQUARE, SAMPLER, Q)
        assert rep.passed
        assert rep.worst_margin <= 1e-13

    def test_report_metadata(self):
        rep = run_harmonic(harmonic_poly("xy"), UNIT_SQUARE, SAMPLER, Q)
        assert rep.balls_tested > 0
        assert rep.sampler is SAMPLER
        assert rep.quadrature is Q
        assert contains_closed_ball(UNIT_SQUARE, rep.witness)


class TestSubharmonicTest:
    def test_square_norm_passes(self):
        rep = run_subharmonic(RadialPower([0, 0], 1), UNIT_SQUARE, SAMPLER, Q)
        assert rep.passed

    def test_negated_fails_with_sign_flipped_margin(self):
        rep = run_subharmonic(scaled(RadialPower([0, 0], 1), -1.0),
                               UNIT_SQUARE, SAMPLER, Q, tol=1e-8)
        assert not rep.passed
        r = rep.witness.radius
        assert rep.worst_margin == pytest.approx(2 * r**2 / 4, rel=1e-10)

    def test_abs_x_passes_in_1d(self):
        absx = max_combine([Affine(0, [1.0]), Affine(0, [-1.0])])
        rep = run_subharmonic(absx, IntervalDomain(-1, 1),
                               BallSampler(spacing=0.25),
                               QuadratureSpec(32, 64))
        assert rep.passed

    def test_abs_x_brute_force_oracle(self):
        # For a ball straddling the kink: B = (a^2 + r^2) / (2r), S = r,
        # so S - B = (r^2 - a^2) / (2r) = (r - |a|)^2 (r + |a|) / ((r - |a|) 2r) >= 0.
        a, r = 0.1, 0.5
        s = 0.5 * (abs(a - r) + abs(a + r))
        # Independent oracle by dense trapezoid integration of |x|.
        xs = np.linspace(a - r, a + r, 200_001)
        b_quad = np.trapezoid(np.abs(xs), xs) / (2 * r)
        assert s - b_quad >= 0
        assert s - b_quad == pytest.approx((r**2 - a**2) / (2 * r), rel=1e-6)


class TestBeardonTest:
    def test_harmonic_margin_zero_any_kappa(self):
        for kappa in (0.3, 0.6065306597126334, 0.95):
            rep = run_beardon(harmonic_poly("x2-y2"), UNIT_SQUARE, SAMPLER,
                               Q, kappa, tol=1e-8)
            assert rep.passed
            assert abs(rep.worst_margin) <= 1e-12

    def test_square_norm_pass_and_fail(self):
        f = RadialPower([0, 0], 1)
        assert run_beardon(f, UNIT_SQUARE, SAMPLER, Q,
                            math.exp(-0.5)).passed
        assert not run_beardon(f, UNIT_SQUARE, SAMPLER, Q, 0.9).passed

    def test_kappa_validation(self):
        with pytest.raises(MeanfieldError):
            run_beardon(Constant(1, 2), UNIT_SQUARE, SAMPLER, Q, 1.2)


class TestBeardonThreshold:
    def test_square_norm_threshold(self):
        f = RadialPower([0, 0], 1)
        kstar = beardon_threshold(f, BallSpec([0.0, 0.0], 0.7), Q,
                                  tol_kappa=1e-4)
        assert kstar == pytest.approx(math.sqrt(0.5), abs=1e-3)

    def test_power_four_threshold(self):
        f = RadialPower([0, 0], 4)
        kstar = beardon_threshold(f, BallSpec([0.0, 0.0], 0.5), Q,
                                  tol_kappa=1e-4)
        assert kstar == pytest.approx((2 / 10) ** 0.125, abs=1e-3)
        assert kstar == pytest.approx(0.8178, abs=2e-3)

    def test_harmonic_degenerate(self):
        kstar = beardon_threshold(harmonic_poly("xy"),
                                  BallSpec([0.5, 0.5], 0.4), Q)
        assert kstar == 1.0


class TestLaplacianSignEstimate:
    def test_square_norm_exact(self):
        for n in (1, 2, 3):
            f = RadialPower(np.zeros(n), 1)
            est = laplacian_sign_estimate(f, np.zeros(n), [0.4, 0.2, 0.1], Q)
            assert est == pytest.approx(2.0 * n, abs=1e-10)

    def test_harmonic_zero(self):
        est = laplacian_sign_estimate(harmonic_poly("x2-y2"), [0.2, 0.1],
                                      [0.3, 0.15, 0.075], Q)
        assert est == pytest.approx(0.0, abs=1e-10)

    def test_quartic_1d(self):
        # S_0(r) = r^4: per-radius estimates 2 r^2 extrapolate to zero.
        quartic = RadialPower(np.zeros(1), 2)
        est = laplacian_sign_estimate(quartic, [0.0], [0.4, 0.2, 0.1, 0.05], Q)
        assert est == pytest.approx(0.0, abs=1e-10)

    def test_radii_validation(self):
        f = Constant(1.0, 2)
        with pytest.raises(MeanfieldError):
            laplacian_sign_estimate(f, [0, 0], [0.1, 0.2, 0.3], Q)
        with pytest.raises(MeanfieldError):
            laplacian_sign_estimate(f, [0, 0], [0.2, 0.1], Q)


class TestMaxPrinciple:
    def test_square_norm(self):
        d = discretize(DiskDomain([0, 0], 1.0), 1 / 32)
        assert max_principle_check(RadialPower([0, 0], 1), d)
        assert not max_principle_check(scaled(RadialPower([0, 0], 1), -1.0), d)

    def test_subharmonic_pass_implies_max_principle(self):
        d = discretize(UNIT_SQUARE, 1 / 32)
        suite = [RadialPower([0.3, 0.3], 1), RadialPower([0.5, 0.5], 2),
                 harmonic_poly("im3"), Constant(2.0, 2)]
        for f in suite:
            rep = run_subharmonic(f, UNIT_SQUARE, SAMPLER, Q)
            if rep.passed:
                assert max_principle_check(f, d)


class TestVerdictMonotonicity:
    def test_harmonic_implies_subharmonic_implies_beardon(self):
        suite = [harmonic_poly("x2-y2"), harmonic_poly("im3"),
                 Constant(3.0, 2), RadialPower([0.5, 0.5], 1),
                 RadialPower([0.2, 0.8], 3),
                 scaled(RadialPower([0.5, 0.5], 1), -1.0)]
        kappas = [0.3, kappa_beardon(2), kappa_one(2)]
        for f in suite:
            harm = run_harmonic(f, UNIT_SQUARE, SAMPLER, Q).passed
            sub = run_subharmonic(f, UNIT_SQUARE, SAMPLER, Q).passed
            if harm:
                assert sub
            if sub:
                for kappa in kappas:
                    assert run_beardon(f, UNIT_SQUARE, SAMPLER, Q,
                                        kappa).passed


class TestWorkerCap:
    def test_threaded_sweep_matches_serial(self, monkeypatch):
        f = RadialPower([0.3, 0.6], 2)
        serial = run_subharmonic(f, UNIT_SQUARE, SAMPLER, Q)
        monkeypatch.setenv("MEANFIELD_THREADS", "4")
        threaded = run_subharmonic(f, UNIT_SQUARE, SAMPLER, Q)
        assert threaded.worst_margin == serial.worst_margin
        assert threaded.verdict == serial.verdict
        assert np.array_equal(threaded.witness.center, serial.witness.center)

    def test_garbage_env_value_falls_back_to_serial(self, monkeypatch):
        from meanfield.classify import worker_count
        monkeypatch.setenv("MEANFIELD_THREADS", "lots")
        assert worker_count() == 1


class TestBallSampler:
    def test_all_emitted_balls_admissible(self):
        for spec in (UNIT_SQUARE, DiskDomain([0, 0], 1.0)):
            for ball in SAMPLER.balls(spec):
                assert contains_closed_ball(spec, ball)

    def test_at_least_four_radii_per_center(self):
        balls = SAMPLER.balls(UNIT_SQUARE)
        per_center = {}
        for b in balls:
            per_center.setdefault(tuple(b.center), []).append(b.radius)
        assert all(len(v) >= 4 for v in per_center.values())

    def test_empty_sampler_raises(self):
        tiny = BallSampler(spacing=0.5, r_max=1e-6, r_min=1e-3)
        with pytest.raises(DomainError):
            tiny.balls(UNIT_SQUARE)

    def test_validation(self):
        with pytest.raises(DomainError):
            BallSampler(spacing=-0.1)
        with pytest.raises(DomainError):
            BallSampler(spacing=0.1, num_radii=2)
        with pytest.raises(DomainError):
            BallSampler(spacing=0.1, ratio=1.5)
