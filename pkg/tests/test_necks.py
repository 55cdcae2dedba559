from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fillin_lab.errors import AlignmentError, DegenerateMetricError, DomainError, PreconditionError
from fillin_lab.manifold import (AxisymS2, Round, Scaled, WarpedBand, conformal_mean,
                                 fd_band_curvature)
from fillin_lab.necks import (CollarBend, bending_profile, build_cap_neck, build_isotopy_neck,
                              build_schwarzschild_neck, check_bmn_hypotheses, collar_bend,
                              mu_of, rescale_neck, solve_c_mu, transition_function)
from fillin_lab.paths import constant_path, eccentricity_path


class TestSchwarzschildNeck:
    def test_n3_unit_mean_curvature(self):
        neck = build_schwarzschild_neck(3, 1.0, 0.0)
        assert neck.m == pytest.approx(3.0 / 8.0, abs=1e-15)
        assert neck.r2 == pytest.approx(9.0 / 16.0, abs=1e-15)
        assert neck.r1 == pytest.approx(3.0 / 16.0, abs=1e-15)

    def test_n4_unit_mean_curvature(self):
        neck = build_schwarzschild_neck(4, 1.0, 0.0)
        assert neck.m == pytest.approx(4.0 / 9.0, abs=1e-15)
        assert neck.r2 == pytest.approx(2.0 / 3.0, abs=1e-15)
        assert neck.r1 == pytest.approx(math.sqrt(2.0) / 3.0, abs=1e-14)

    def test_zero_mass_limit(self):
        assert build_schwarzschild_neck(3, 2.0 - 1e-9, 0.0).m < 1e-9

    @pytest.mark.parametrize("n,H,h", [(3, 1.0, 0.0), (3, 1.5, 0.4), (4, 2.0, 1.0), (5, 0.5, 0.1)])
    def test_residuals_and_outer_radius(self, n, H, h):
        neck = build_schwarzschild_neck(n, H, h)
        assert max(abs(v) for v in neck.residuals.values()) < 1e-10
        r = np.linspace(neck.r1, neck.r2, 1000)
        rpsi = r * neck.psi(r)
        assert rpsi[-1] == pytest.approx(1.0, abs=1e-12)
        assert np.all(rpsi <= 1.0 + 1e-12)

    @pytest.mark.parametrize("H,h", [(0.0, 0.0), (2.0, 0.0), (1.0, 1.0), (1.0, -0.1)])
    def test_domain(self, H, h):
        with pytest.raises(DomainError):
            build_schwarzschild_neck(3, H, h)

    def test_fd_curvature_of_band(self):
        neck = build_schwarzschild_neck(3, 1.0, 0.5)
        band = neck.band(401)
        fd = fd_band_curvature(band)
        # unit round slices: R = 0 for tau2 = 1
        assert np.max(np.abs(fd.R[fd.interior])) < 1e-4
        assert np.max(np.abs(fd.H[2] + 0.5)) < 1e-6


class TestRescaleNeck:
    def test_bound_on_round_sphere(self):
        neck = rescale_neck(3, Round(3, 1.0), 1.0, 0.0, 0.5)
        v = neck.verification
        assert v["bound"] == pytest.approx(1.0, abs=1e-15)
        assert v["passed"]
        assert v["min_R_fd"] >= 1.0 - 1e-4

    def test_infeasible(self):
        with pytest.raises(PreconditionError, match="min R_gamma"):
            rescale_neck(3, Round(3, 1.0), 2.0, 0.0, 0.1)

    def test_inner_mean_curvature(self):
        neck = rescale_neck(3, Round(3, 1.0), 1.0, 0.5, 0.1)
        assert neck.mu < 1.0
        assert abs(float(neck.mean_curvature(neck.r1)) + 0.5) < 1e-8
        assert abs(float(neck.mean_curvature(neck.r2)) - 1.0) < 1e-8


class TestCMu:
    def test_quadratic_root(self):
        assert solve_c_mu(4, 2.0) == pytest.approx((9.0 - math.sqrt(17.0)) / 8.0, abs=1e-14)

    def test_small_mu_limit(self):
        assert solve_c_mu(3, 1e-8) < 1e-5

    def test_monotone(self):
        assert solve_c_mu(3, 1.0) < solve_c_mu(3, 2.0)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(3, 7), st.floats(-3, 1), st.floats(1e-3, 2.0))
    def test_identity_and_order(self, n, lg, dlg):
        mu1, mu2 = 10.0 ** lg, 10.0 ** (lg + dlg)
        c1, c2 = solve_c_mu(n, mu1), solve_c_mu(n, mu2)
        assert c1 ** (1 - 2 / n) / (1 - c1) == pytest.approx(mu1, rel=1e-12)
        assert c1 < c2

    def test_domain(self):
        with pytest.raises(DomainError):
            solve_c_mu(3, 0.0)


class TestCapNeck:
    def test_example(self):
        neck = build_cap_neck(3, 2.0, 0.3)
        mu = (2.0 / 3.0) * 6.3 ** (2.0 / 3.0) * 0.3 ** (1.0 / 3.0)
        assert neck.mu_eps == pytest.approx(mu, rel=1e-14)
        cm = solve_c_mu(3, mu)
        assert neck.alpha_eps == pytest.approx((1.0 - cm) * 4.2, rel=1e-12)
        assert max(abs(v) for v in neck.residuals.values()) < 1e-10

    def test_theta_to_zero(self):
        assert build_cap_neck(3, 2.0, 1e-12).alpha_eps == pytest.approx(4.0, rel=1e-6)

    @pytest.mark.parametrize("n", range(3, 8))
    @pytest.mark.parametrize("lam", [1.5, 2.0, 4.0])
    def test_residual_grid(self, n, lam):
        for th in np.logspace(-3, 1, 9):
            r = build_cap_neck(n, lam, float(th)).residuals
            assert max(abs(v) for v in r.values()) < 1e-10

    def test_inner_angle_identity(self):
        n, lam, th, eps = 4, 3.0, 0.7, 0.4
        neck = build_cap_neck(n, lam, th, eps)
        x1 = n * neck.sigma * neck.t1 / 2
        assert math.sin(x1) ** 2 == pytest.approx((n - 1) * th / (n * (lam - eps) ** 2 + (n - 1) * th),
                                                  abs=1e-12)

    def test_band_curvature_and_ends(self):
        neck = build_cap_neck(3, 2.0, 0.3)
        band = neck.band(nt=401)
        fd = fd_band_curvature(band)
        # R = theta + alpha^{-2} R_gamma with R_gamma = 2
        exact = 0.3 + 2.0 / neck.alpha(band.s)[:, None] ** 2
        assert np.max(np.abs(fd.R - exact)[fd.interior]) < 1e-4
        assert neck.alpha(neck.t1) == pytest.approx(1.0, abs=1e-12)
        assert float(neck.alpha(neck.t2) * neck.mean_curvature(neck.t2)) == pytest.approx(1.0, abs=1e-10)

    def test_nonpositive_theta(self):
        with pytest.raises(DomainError):
            build_cap_neck(3, 2.0, 0.0)

    def test_mu_formula(self):
        assert mu_of(3, 2.0, 0.3) == pytest.approx((2 / 3) * 6.3 ** (2 / 3) * 0.3 ** (1 / 3), rel=1e-15)


class TestIsotopyNeck:
    def test_constant_round_path(self):
        neck = build_isotopy_neck(constant_path(Round(3, 1.0)), 0.1, 0.05)
        assert neck.Lambda == 1.0
        assert np.max(np.abs(neck.Hbar - 0.1)) < 1e-12
        assert np.max(np.abs(np.diff(neck.B) / np.diff(neck.t) - 0.05)) < 1e-12
        assert neck.min_R > 0

    def test_eccentric_path(self):
        neck = build_isotopy_neck(eccentricity_path(1.05, "ramp"), 0.1, 0.05)
        assert math.isfinite(neck.Lambda) and neck.min_R > 0
        assert neck.R_fd[neck.fd_interior].min() > 0
        assert np.max(np.abs(neck.R_fd - neck.R)[neck.fd_interior]) < 1e-4

    def test_preconditions(self):
        with pytest.raises(PreconditionError):
            build_isotopy_neck(constant_path(Round(3, 1.0)), 0.0, 0.0)


def collar_base():
    t = np.linspace(-0.3, 0.0, 121)
    return WarpedBand(t, [Scaled(AxisymS2.ellipsoid(1.1), (1.0 + 0.5 * ti) ** 2) for ti in t])


class TestCollar:
    def test_round_linear_kappa(self):
        t = np.linspace(-0.3, 0.0, 121)
        base = WarpedBand(t, [Round(3, 1.0 + 0.5 * ti) for ti in t])
        kappa = (lambda t: -t, lambda t: -np.ones_like(np.asarray(t, dtype=float)),
                 lambda t: -1e-9 * np.ones_like(np.asarray(t, dtype=float)))
        res = collar_bend(CollarBend(base, 0.4, kappa=kappa))
        fd = fd_band_curvature(res.band)
        assert np.max(np.abs(fd.R - res.R)[fd.interior]) < 1e-4

    def test_axisym_expansion_matches_fd(self):
        base = collar_base()
        x = base.slices[0].x
        res = collar_bend(CollarBend(base, 0.3 + 0.1 * np.cos(x)))
        fd = fd_band_curvature(res.band)
        assert np.max(np.abs(fd.R - res.R)[fd.interior]) < 1e-4

    def test_target_mean_curvature(self):
        res = collar_bend(CollarBend.from_target(collar_base(), 0.5))
        assert np.max(np.abs(res.H[-1] - 0.5)) < 1e-12

    def test_linear_growth_in_K(self):
        t = np.linspace(-0.05, 0.0, 61)
        base = WarpedBand(t, [Scaled(AxisymS2.ellipsoid(1.1), (1.0 + 0.5 * ti) ** 2) for ti in t])
        x = base.slices[0].x
        mins = []
        for K in (20.0, 40.0, 80.0):
            res = collar_bend(CollarBend(base, 0.3 + 0.1 * np.cos(x), K=K, t1=0.05))
            mins.append(float(res.R.min()))
        d1, d2 = mins[1] - mins[0], mins[2] - mins[1]
        assert d1 > 0 and d2 / d1 == pytest.approx(2.0, rel=0.1)

    def test_degenerate(self):
        base = collar_base()
        with pytest.raises(DegenerateMetricError):
            collar_bend(CollarBend(base, 0.3, K=100.0))


class TestTransition:
    def test_plateau_and_far(self):
        assert transition_function(1.0, 0.5, 0.5) == 0.5
        assert transition_function(1.0, 0.5, 3.0) == 1.0

    def test_laplacian_decay(self):
        # on the product cylinder the Laplacian is the s-second derivative
        rs = np.array([4.0, 8.0, 16.0, 32.0])
        sup = []
        for r in rs:
            s = np.linspace(0.0, 3.0 * r, 6001)
            u = transition_function(r, 0.5, s)
            sup.append(np.max(np.abs(np.gradient(np.gradient(u, s), s))))
        slope = np.polyfit(np.log(rs), np.log(sup), 1)[0]
        # at least as fast as 1/r; the exact rate is 1/r^2
        assert slope < -0.8
        assert slope == pytest.approx(-2.0, abs=0.05)


class TestBending:
    def test_boundary_values(self):
        w, cert = bending_profile(np.array([0.0]), 1.0)
        assert w[0] == 0.0 and cert.dw_dnu == 0.5

    def test_certificate_negative(self):
        d = np.linspace(0.0, 0.2, 51)
        w, cert = bending_profile(d, 1.0)
        # the bound is decreasing in d, so its maximum is the d = 0 value 2 (1/4) (1/2 - 1)
        assert cert.bound.max() == pytest.approx(-0.25, abs=1e-15)
        assert np.all(np.diff(cert.bound) < 0)
        assert cert.bound[-1] == pytest.approx(2 * 0.25 * (1 - 0.4) ** -1.75 * (0.5 - 1.0 - 0.4), rel=1e-14)
        assert cert.eps == 0.25
        assert np.all(w[1:] < 0)

    def test_window(self):
        with pytest.raises(DomainError):
            bending_profile(np.linspace(0.0, 0.25, 5), 1.0)


class TestGluing:
    def band(self, lapse=None, scale=1.0):
        s = np.linspace(1.0, 2.0, 41)
        return WarpedBand(s, [Round(3, scale * si) for si in s], lapse=lapse)

    def test_identical_fails(self):
        r = check_bmn_hypotheses(self.band(), self.band())
        assert not r.passed and r.mean_curvature_gap == 0.0

    @staticmethod
    def bumped(d=0.2):
        # u^4 g_base with u = 1 + d (s - 2): u = 1 and du/dnu = d on the boundary s = 2
        s = np.linspace(1.0, 2.0, 41)
        u = 1.0 + d * (s - 2.0)
        return WarpedBand(s, [Round(3, si * ui ** 2) for si, ui in zip(s, u)], lapse=u ** 2)

    def test_conformal_bump_passes(self):
        d = 0.2
        base = self.band()
        r = check_bmn_hypotheses(self.bumped(d), base)
        assert r.passed
        H = fd_band_curvature(base).H[-1]
        expected = float(np.min(conformal_mean(H, d, 3) - H))
        assert expected == pytest.approx(4.0 * d, rel=1e-14)
        assert r.mean_curvature_gap == pytest.approx(expected, rel=1e-6)

    def test_swap_negates_gap(self):
        g = self.bumped()
        a, b = check_bmn_hypotheses(g, self.band()), check_bmn_hypotheses(self.band(), g)
        assert np.array_equal(a.gap_field, -b.gap_field)

    def test_metric_mismatch(self):
        r = check_bmn_hypotheses(self.band(scale=1.0 + 1e-3), self.band())
        assert not r.passed and r.metric_gap > 1e-3

    def test_grid_mismatch(self):
        s = np.linspace(1.0, 2.5, 41)
        other = WarpedBand(s, [Round(3, si) for si in s])
        with pytest.raises(AlignmentError):
            check_bmn_hypotheses(self.band(), other)
