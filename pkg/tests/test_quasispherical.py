from __future__ import annotations

import math

import numpy as np
import pytest

from fillin_lab.acceptance import SEED, _axisym_flow, _round_flow
from fillin_lab.errors import DomainError, PreconditionError
from fillin_lab.manifold import AxisymS2, Round, fd_band_curvature
from fillin_lab.paths import constant_path, eccentricity_path, path_norms
from fillin_lab.quasispherical import (BartnikData, adm_mass, alpha_exponent, build_base,
                                       flux_mass, h0_threshold, mass_bracket, mass_upper_bound,
                                       measure_deviation, nnsc_fillin_test, radial_mass, run_flow,
                                       s0_of, total_mean_curvature)

PI = math.pi


@pytest.fixture(scope="module")
def ecc_base():
    return build_base(eccentricity_path(1.05, "bump"), 0.1)


class TestBase:
    def test_constant_standard_path_is_euclidean(self):
        base = build_base(constant_path(Round(3, 1.0)), 0.1)
        assert base.euclidean and base.s0 == 1.0 and base.eps_achieved == 0.0
        geo = base.geometry(3.0)
        assert np.all(geo.Hbar == 2.0 / 3.0)
        assert np.all(geo.deviation == 0.0)

    def test_eccentric_path(self, ecc_base):
        assert ecc_base.eps_achieved <= 0.1
        assert ecc_base.s0 == pytest.approx(math.exp(math.tan(5 * PI / 12) / ecc_base.delta), rel=1e-15)
        assert ecc_base.s0 == s0_of(ecc_base.delta)

    def test_deviation_formula(self, ecc_base):
        path, d = ecc_base.path, ecc_base.delta
        for s in np.geomspace(1.5, 0.9 * ecc_base.s0, 25):
            t = float(ecc_base.t_of_s(s))
            rates = path.rates(t)
            speed = np.sqrt(sum(mult * r1 ** 2 for mult, r1, _ in rates))
            expected = d / (PI * (1.0 + d * d * math.log(s) ** 2)) * speed
            assert np.max(np.abs(ecc_base.geometry(s).deviation * s - expected)) < 1e-6

    def test_node_speed_matches_norm_report(self, ecc_base):
        path = ecc_base.path
        d1 = path_norms(path).d1
        speed = [np.max(np.sqrt(sum(m * r1 ** 2 for m, r1, _ in path.rates(t)))) for t in path.t]
        assert np.max(np.abs(d1 - speed)) < 1e-3 * d1.max()

    def test_delta_is_largest_dyadic(self, ecc_base):
        assert measure_deviation(ecc_base.path, 2.0 * ecc_base.delta) > 0.1

    def test_base_is_scalar_flat_beyond_s0(self, ecc_base):
        geo = ecc_base.geometry(2.0 * ecc_base.s0)
        assert np.max(np.abs(geo.R_base)) < 1e-6

    def test_requires_standard_end(self):
        with pytest.raises(PreconditionError):
            build_base(constant_path(Round(3, 2.0)), 0.1)

    def test_target_range(self):
        with pytest.raises(DomainError):
            build_base(constant_path(Round(3, 1.0)), 1.0)


class TestFlow:
    def test_schwarzschild_oracle(self):
        flow = run_flow(build_base(constant_path(Round(3, 1.0)), 0.0, s_max=100.0), 2.0, seed=SEED)
        exact = (1.0 - 0.75 / flow.s) ** -0.5
        assert np.max(np.abs(flow.u[:, 0] - exact)) < 1e-8

    def test_fixed_point(self):
        flow = run_flow(build_base(constant_path(Round(3, 1.0)), 0.0, s_max=50.0), 1.0)
        assert np.max(np.abs(flow.u - 1.0)) < 1e-14

    def test_axisym_flow(self):
        flow = _axisym_flow()
        assert flow.u.min() > 0
        last = flow.u[-1]
        assert np.max(np.abs(last - np.mean(last))) < 1e-4
        assert flow.monotone_ok

    def test_axisym_band_is_scalar_flat(self):
        flow = _axisym_flow()
        bc = fd_band_curvature(flow.band(np.arange(0, 160)))
        assert np.max(np.abs(bc.R[bc.interior])) < 1e-3

    def test_rejects_nonpositive_lapse(self):
        with pytest.raises(DomainError):
            run_flow(build_base(constant_path(Round(3, 1.0)), 0.0, s_max=10.0), -1.0)


class TestTotalMeanCurvature:
    def test_euclidean(self):
        flow = run_flow(build_base(constant_path(Round(3, 1.0)), 0.0, s_max=20.0), 1.0)
        for s in (1.0, 2.5, 7.0, 20.0):
            I = total_mean_curvature(flow, s)
            assert I == pytest.approx(8.0 * PI * s, rel=1e-12)
            assert I >= s ** 0.5 * 8.0 * PI

    def test_schwarzschild(self):
        flow = _round_flow(3, 2.0)
        exact = 8.0 * PI * flow.s * np.sqrt(1.0 - 0.75 / flow.s)
        assert np.max(np.abs(flow.I - exact) / exact) < 1e-8
        assert np.all(np.diff(flow.I) > 0)

    def test_monotone_certificates(self):
        for flow in (_round_flow(3, 2.0), _round_flow(3, 0.8), _axisym_flow()):
            assert flow.monotone_ok


class TestMass:
    def test_schwarzschild_n3(self):
        assert adm_mass(_round_flow(3, 2.0)) == pytest.approx(0.375, abs=1e-6)

    def test_euclidean_zero(self):
        assert abs(adm_mass(_round_flow(3, 1.0))) < 1e-10

    def test_n4(self):
        assert adm_mass(_round_flow(4, (1.0 - 0.2) ** -0.5)) == pytest.approx(0.1, abs=1e-5)

    @pytest.mark.parametrize("n,m", [(3, 0.1), (3, 0.375), (4, 0.1)])
    def test_flux_and_radial_agree(self, n, m):
        flow = _round_flow(n, (1.0 - 2.0 * m) ** -0.5)
        assert abs(adm_mass(flow) - radial_mass(flow)) < 1e-6
        assert abs(flux_mass(flow, -1) - radial_mass(flow)) < 1e-3

    def test_refuses_short_flow(self, ecc_base):
        flow = run_flow(build_base(constant_path(Round(3, 1.0)), 0.0, s_max=5.0), 2.0)
        with pytest.raises(PreconditionError):
            adm_mass(flow)

    def test_brown_york_dominates_adm_on_euclidean_base(self):
        base = build_base(constant_path(Round(3, 1.0)), 0.0)
        rep = mass_upper_bound(base, 2.0, flow=_round_flow(3, 2.0))
        assert rep.brown_york_bound >= rep.adm_estimate
        # with H = 1 the bound equals (1/(8 pi)) int (2 - 1) dA = 1/2
        assert rep.brown_york_bound == pytest.approx(0.5, rel=1e-14)


class TestBracket:
    def test_euclidean_bracket(self):
        base = build_base(constant_path(Round(3, 1.0)), 0.0)
        for H in (0.25, 1.0, 2.0, 3.0):
            rep = mass_upper_bound(base, 2.0 / H)
            assert rep.bracket == pytest.approx(8 * PI - 4 * PI * H, abs=1e-12)
            assert (rep.verdict == "NoNNSCFillIn") == (H > 2)

    def test_small_H_inconclusive(self):
        rep = mass_upper_bound(build_base(constant_path(Round(3, 1.0)), 0.0), 2.0 / 1e-6)
        assert rep.bracket > 0 and rep.verdict == "Inconclusive"

    def test_s0_four(self):
        # alpha(3, 0) = 1/2, s0^{1/2} = 2, s0^{n-2} = 4
        b = mass_bracket(3, 0.0, 4.0, 100.0 * PI)
        assert b == pytest.approx(8 * PI * 4 - 2 * 100 * PI, rel=1e-14)
        assert b < 0


class TestThreshold:
    def test_values(self):
        assert h0_threshold(3, 0.0, 1.0) == pytest.approx(8 * PI, rel=1e-15)
        assert h0_threshold(3, 1e-12, 1.0) == pytest.approx(8 * PI, rel=1e-12)
        assert h0_threshold(3, 0.0, 4.0) == pytest.approx(16 * PI, rel=1e-15)

    def test_monotone(self):
        assert h0_threshold(3, 0.1, 4.0) < h0_threshold(3, 0.1, 8.0)
        assert h0_threshold(3, 0.1, 4.0) < h0_threshold(3, 0.3, 4.0)
        assert alpha_exponent(3, 0.0) == 0.5

    @pytest.mark.parametrize("args", [(2, 0.1, 1.0), (3, 1.0, 1.0), (3, 0.1, 0.5)])
    def test_domain(self, args):
        with pytest.raises(DomainError):
            h0_threshold(*args)


class TestNnscTest:
    def run(self, H):
        return nnsc_fillin_test(BartnikData(3, Round(3, 1.0), H), constant_path(Round(3, 1.0)), 0.0)

    def test_verdicts(self):
        assert self.run(3.0).verdict == "NoNNSCFillIn"
        assert self.run(1.0).verdict == "Inconclusive"

    def test_H0(self):
        assert self.run(1.0).H0 == pytest.approx(2.0, abs=1e-6)

    def test_axisym_data(self):
        data = BartnikData(3, AxisymS2.round(), 3.0)
        rep = nnsc_fillin_test(data, eccentricity_path(1.05, "bump"), 0.1)
        assert rep.s0 > 1.0 and rep.H0 > 0
        assert (rep.verdict == "NoNNSCFillIn") == (3.0 > rep.H0)

    def test_path_must_start_at_data(self):
        with pytest.raises(PreconditionError):
            nnsc_fillin_test(BartnikData(3, Round(3, 2.0), 1.0), constant_path(Round(3, 1.0)), 0.0)

    def test_from_dict(self):
        data = BartnikData.from_dict({"n": 3, "metric": {"kind": "round"}, "H": 1.5})
        assert data.constant_H and data.H[0] == 1.5
