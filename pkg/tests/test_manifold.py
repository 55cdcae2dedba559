from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fillin_lab.errors import DegenerateMetricError, DomainError, ResolutionError
from fillin_lab.manifold import (AxisymS2, Round, Scaled, WarpedBand, conformal_scalar,
                                 fd_band_curvature, gradient_norm2, lambda1, lambda1_dense,
                                 laplace_beltrami, read_profile_csv, scalar_curvature,
                                 sphere_area, unit_ball_volume, write_profile_csv)

# frozen oracles
UNIT_S2_AREA = 4.0 * math.pi
UNIT_S3_AREA = 2.0 * math.pi ** 2
UNIT_BALL_3 = 4.0 * math.pi / 3.0


def dumbbell():
    return AxisymS2.from_function(lambda x: np.sin(x) * (1.0 - 0.7 * np.sin(x) ** 2))


class TestRound:
    def test_scalar_curvature_closed_form(self):
        # (n-1)(n-2)/rho^2
        assert Round(3, 1.0).scalar_curvature()[0] == 2.0
        assert Round(4, 2.0).scalar_curvature()[0] == pytest.approx(6.0 / 4.0, rel=1e-15)
        assert Round(5, 1.0).scalar_curvature()[0] == 12.0

    def test_area_and_ball_volume(self):
        assert sphere_area(3) == pytest.approx(UNIT_S2_AREA, rel=1e-15)
        assert sphere_area(4) == pytest.approx(UNIT_S3_AREA, rel=1e-15)
        assert unit_ball_volume(3) == pytest.approx(UNIT_BALL_3, rel=1e-15)
        assert Round(3, 2.0).area() == pytest.approx(16.0 * math.pi, rel=1e-15)

    def test_integral_of_constant(self):
        assert Round(3, 1.0).integrate(3.0) == pytest.approx(12.0 * math.pi, rel=1e-15)

    def test_scaled_resolves_to_round(self):
        m = Scaled(Round(3, 1.0), 4.0)
        assert m.resolve().radius == pytest.approx(2.0)
        assert m.scalar_curvature()[0] == pytest.approx(0.5)


class TestAxisym:
    def test_round_profile_curvature(self):
        m = AxisymS2.round()
        assert np.max(np.abs(m.scalar_curvature() - 2.0)) < 1e-7

    def test_ellipsoid_area_matches_closed_form(self):
        # oblate/prolate ellipsoid of revolution with equatorial radius 1, polar semi-axis e
        e = 1.3
        ecc = math.sqrt(1.0 - 1.0 / e ** 2)
        exact = 2.0 * math.pi * (1.0 + e / ecc * math.asin(ecc))
        assert AxisymS2.ellipsoid(e).area() == pytest.approx(exact, rel=1e-9)

    def test_gauss_bonnet(self):
        for m in (AxisymS2.ellipsoid(0.7), AxisymS2.ellipsoid(1.4), dumbbell()):
            # int K dA = 4 pi and R = 2K
            assert m.integrate(m.scalar_curvature() / 2.0) == pytest.approx(4.0 * math.pi, rel=1e-6)

    def test_laplacian_of_cos_on_round_sphere(self):
        m = AxisymS2.round()
        f = np.cos(m.x)
        # cos is a first eigenfunction: Lap f = -2 f
        assert np.max(np.abs(laplace_beltrami(m, f) + 2.0 * f)) < 1e-4

    def test_laplacian_of_constant_is_zero(self):
        assert np.max(np.abs(dumbbell().laplacian(np.ones(401)))) == 0.0

    def test_gradient_norm_of_cos(self):
        m = AxisymS2.round()
        g2 = gradient_norm2(m, np.cos(m.x))
        assert np.max(np.abs(g2 - np.sin(m.x) ** 2)) < 1e-8

    def test_laplacian_is_conservative(self):
        m = AxisymS2.ellipsoid(1.2)
        f = np.cos(m.x) ** 3 + np.sin(m.x) ** 2
        _, w = m._symmetric_form()
        lap = m.laplacian(f)
        # exact in the operator's own weights
        assert abs(np.sum(w * lap)) < 1e-12 * np.sum(w * np.abs(lap))
        # second order under Simpson quadrature
        errs = []
        for nx in (201, 401):
            mm = AxisymS2.ellipsoid(1.2, nx)
            ff = np.cos(mm.x) ** 3 + np.sin(mm.x) ** 2
            errs.append(abs(mm.integrate(mm.laplacian(ff))))
        assert errs[1] < 1e-3 and errs[0] / errs[1] > 3.5

    def test_rejects_degenerate_profiles(self):
        x = np.linspace(0.0, math.pi, 101)
        with pytest.raises(DegenerateMetricError):
            AxisymS2(x, 2.0 * np.sin(x))  # cone angle at the poles
        with pytest.raises(DegenerateMetricError):
            AxisymS2(x, np.sin(x) + 0.1)
        with pytest.raises(ResolutionError):
            AxisymS2(x[:5], np.sin(x[:5]))

    def test_profile_csv_roundtrip(self, tmp_path):
        m = AxisymS2.ellipsoid(1.2)
        write_profile_csv(m, tmp_path / "p.csv")
        r = read_profile_csv(tmp_path / "p.csv")
        assert np.array_equal(r.a, m.a) and np.array_equal(r.b, m.b)

    @settings(max_examples=15, deadline=None)
    @given(st.floats(0.6, 1.6))
    def test_ellipsoid_curvature_positive(self, e):
        assert np.min(scalar_curvature(AxisymS2.ellipsoid(e, 201))) > 0


class TestLambda1:
    def test_round(self):
        assert lambda1(Round(3, 2.0))[0] == pytest.approx(0.25)
        lam, f = lambda1(AxisymS2.round())
        assert lam == pytest.approx(1.0, abs=1e-7)
        assert np.max(np.abs(f - 1.0)) < 1e-6

    def test_iterative_matches_dense(self):
        m = dumbbell()
        lam, f = lambda1(m)
        lam_d, f_d = lambda1_dense(m)
        assert lam == pytest.approx(lam_d, abs=1e-9)
        assert np.max(np.abs(f - f_d)) < 1e-5

    def test_sign_changing_curvature_beats_min_R(self):
        m = dumbbell()
        assert m.scalar_curvature().min() < 0
        assert 2.0 * lambda1(m)[0] > m.scalar_curvature().min()


class TestConformalAndBands:
    def test_conformal_scalar_flat_to_round(self):
        # u = (2/(1+r^2))^{(n-2)/2} maps flat R^3 to the unit sphere: R = 6
        r = np.linspace(0.0, 2.0, 11)
        u = (2.0 / (1.0 + r ** 2)) ** 0.5
        lap = -3.0 * (2.0 ** 0.5) * (1.0 + r ** 2) ** -2.5
        assert np.max(np.abs(conformal_scalar(0.0, u, lap, 3) - 6.0)) < 1e-12

    def test_conformal_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            conformal_scalar(0.0, np.array([0.0]), np.array([0.0]), 3)

    def test_euclidean_band_is_flat(self):
        s = np.linspace(1.0, 2.0, 81)
        band = WarpedBand(s, [Scaled(AxisymS2.round(), si ** 2) for si in s])
        bc = fd_band_curvature(band)
        assert np.max(np.abs(bc.R[bc.interior])) < 1e-6
        assert np.max(np.abs(bc.H - 2.0 / s[:, None])) < 1e-8

    def test_round_cylinder(self):
        s = np.linspace(0.0, 1.0, 11)
        bc = fd_band_curvature(WarpedBand(s, [Round(4, 1.0)] * 11))
        assert np.max(np.abs(bc.R - 6.0)) < 1e-10
        assert np.max(np.abs(bc.H)) < 1e-12

    def test_schwarzschild_slice_is_scalar_flat(self):
        m = 0.1
        s = np.geomspace(0.5, 2.0, 201)
        u = (1.0 - 2.0 * m / s) ** -0.5
        band = WarpedBand(s, [Round(3, float(si)) for si in s], lapse=u)
        bc = fd_band_curvature(band)
        assert np.max(np.abs(bc.R[bc.interior])) < 1e-4
