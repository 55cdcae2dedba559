from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from fillin_lab.errors import DomainError, PreconditionError
from fillin_lab.manifold import AxisymS2, Round, lambda1_dense
from fillin_lab.necks import build_cap_neck
from fillin_lab.paths import constant_path
from fillin_lab.quasispherical import BartnikData, nnsc_fillin_test
from fillin_lab.theta import (DICHOTOMY, ThetaBound, amplification, decay_certificate, decay_curve,
                              fillin_lower_bound, monotone_envelope, psc_fillin_condition,
                              spectral_lower_bound, theta_closed_form, uniform_decay_constants)

# frozen oracle: root of (8/27)(6 + t)^2 t = 4
THETA0_N3 = 0.336254806632891


class TestClosedForm:
    def test_values(self):
        assert theta_closed_form(2, 0.5).value == 1.5
        assert theta_closed_form(3, 2.0).value == 0.0
        assert theta_closed_form(3, 4.0).value == -18.0

    @pytest.mark.parametrize("n,H", [(2, 1.0), (2, -0.1), (3, 1.0), (4, 3.0)])
    def test_window(self, n, H):
        with pytest.raises(DomainError):
            theta_closed_form(n, H)

    def test_zero_matches_mass_threshold(self):
        rep = nnsc_fillin_test(BartnikData(3, Round(3, 1.0), 1.0), constant_path(Round(3, 1.0)), 0.0)
        assert abs(theta_closed_form(3, rep.H0).value) < 1e-6

    def test_record(self):
        b = theta_closed_form(3, 3.0)
        d = b.to_dict()
        assert d["kind"] == "ClosedForm" and d["hypotheses"][0]["holds"]

    def test_bound_needs_hypothesis(self):
        with pytest.raises(PreconditionError):
            ThetaBound("LowerBound", "x", value=1.0)
        with pytest.raises(DomainError):
            ThetaBound("Other", "x", value=1.0, hypotheses=[None])


class TestAmplification:
    def test_trivial_branch(self):
        assert amplification(3, 2.0, -1.0) == 2.0

    def test_small_theta_limit(self):
        assert amplification(3, 2.0, 1e-12) == pytest.approx(4.0, rel=1e-6)

    def test_matches_cap_neck(self):
        assert amplification(4, 2.5, 0.8) == pytest.approx(build_cap_neck(4, 2.5, 0.8).alpha_eps, rel=1e-15)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(3, 7), st.floats(1.01, 10.0), st.floats(1e-4, 50.0))
    def test_above_one(self, n, lam, th):
        assert amplification(n, lam, th) > 1.0


class TestDecayConstants:
    def test_alpha0(self):
        assert uniform_decay_constants(3)[1] == 2.0
        assert uniform_decay_constants(4)[1] == pytest.approx(math.sqrt(2.0), rel=1e-15)

    def test_theta0_n3(self):
        th0, _ = uniform_decay_constants(3)
        ref = brentq(lambda x: 8.0 / 27.0 * (6.0 + x) ** 2 * x - 4.0, 0.0, 1.0, xtol=1e-15)
        assert th0 == pytest.approx(ref, abs=1e-12)
        assert th0 == pytest.approx(THETA0_N3, abs=1e-12)

    @pytest.mark.parametrize("n", range(3, 8))
    def test_certificate(self, n):
        th0, _ = uniform_decay_constants(n)
        assert decay_certificate(n, th0) == pytest.approx(2.0, abs=1e-10)
        assert decay_certificate(n, 0.5 * th0) > 2.0


class TestDecayCurve:
    def test_n3_envelope(self):
        H = np.geomspace(1.5, 1500.0, 200)
        b = decay_curve(3, 1.5, 0.7, H)
        assert b.params["beta"] == 2.0
        assert np.allclose(b.curve["envelope"], 4 * 0.7 * 1.5 ** 2 * H ** -2.0, rtol=1e-14, atol=0)

    def test_iterate_k3(self):
        b = decay_curve(3, 1.0, 1.0, [8.0])
        assert b.curve["iterate"][0] == 1.0 / 64.0

    @pytest.mark.parametrize("n", [3, 4, 6])
    def test_dominates_and_decreases(self, n):
        H0 = 1.3
        H = np.unique(np.concatenate([np.geomspace(H0, 1e3 * H0, 300), H0 * 2.0 ** np.arange(10)]))
        b = decay_curve(n, H0, 0.4, H)
        env, it = b.curve["envelope"], b.curve["iterate"]
        assert np.all(env >= it * (1 - 1e-12))
        assert np.all(np.diff(env) < 0)
        assert b.hypotheses_hold and not b.flags

    def test_preconditions(self):
        with pytest.raises(PreconditionError):
            decay_curve(3, 0.5, 1.0, [1.0])
        with pytest.raises(PreconditionError):
            decay_curve(3, 1.0, 0.0, [1.0])
        with pytest.raises(PreconditionError):
            decay_curve(3, 2.0, 1.0, [1.0])

    def test_csv(self, tmp_path):
        b = decay_curve(3, 1.0, 1.0, [1.0, 2.0, 4.0])
        b.write_csv(tmp_path / "d.csv")
        lines = (tmp_path / "d.csv").read_text().splitlines()
        assert lines[0] == "H,envelope,iterate" and len(lines) == 4


class TestEnvelope:
    def test_single(self):
        e = monotone_envelope([(1.0, 3.0)])
        assert e.values.tolist() == [3.0] and not e.flagged

    def test_repair(self):
        e = monotone_envelope([(1.0, 5.0), (2.0, 7.0)])
        assert e.values.tolist() == [5.0, 5.0]
        assert e.violations == ((1.0, 2.0),)

    def test_empty(self):
        with pytest.raises(PreconditionError):
            monotone_envelope([])


class TestLowerBounds:
    def test_values(self):
        b = fillin_lower_bound(3, 2.0, 1.0)
        assert b.value == 1.5 and DICHOTOMY in b.flags
        assert fillin_lower_bound(3, 2.0, 0.0).value == 2.0

    def test_equality_edge(self):
        with pytest.raises(PreconditionError):
            fillin_lower_bound(3, 2.0, 2.0)

    def test_continuity_at_zero(self):
        vals = [fillin_lower_bound(3, 2.0, h).value for h in (1e-2, 1e-4, 1e-6)]
        assert abs(vals[-1] - 2.0) < 1e-11
        assert vals[0] < vals[1] < vals[2]

    def test_spectral_round(self):
        b = spectral_lower_bound(Round(3, 1.0))
        assert b.value == pytest.approx(2.0, abs=1e-14)
        assert b.hypotheses_hold

    def test_spectral_beats_min_R(self):
        m = AxisymS2.from_function(lambda x: np.sin(x) * (1.0 - 0.7 * np.sin(x) ** 2))
        b = spectral_lower_bound(m)
        assert b.value == pytest.approx(2.0 * lambda1_dense(m)[0], abs=1e-8)
        assert b.value > b.params["min_R"]
        assert b.params["cylinder_error"] < 1e-4


class TestPscCondition:
    def test_examples(self):
        c = psc_fillin_condition(3, 2.0, 1.0)
        assert c and c.threshold == 2.0
        assert not psc_fillin_condition(3, 2.0, 2.0)
        c7 = psc_fillin_condition(7, 30.0, 5.0)
        assert c7 and c7.threshold == pytest.approx(6.0, rel=1e-15)

    def test_field(self):
        assert not psc_fillin_condition(3, 2.0, np.array([1.0, 2.5]))
