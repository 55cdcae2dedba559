"""Acceptance battery: twelve criteria with measured errors and tolerances."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
import scipy.optimize

from .manifold import AxisymS2, Round, Scaled, WarpedBand, fd_band_curvature
from .necks import (CollarBend, build_cap_neck, build_isotopy_neck, build_schwarzschild_neck,
                    collar_bend, rescale_neck, schwarzschild_psi, solve_c_mu)
from .paths import constant_path, eccentricity_path
from .quasispherical import (BartnikData, adm_mass, build_base, nnsc_fillin_test,
                             radial_mass, run_flow)
from .theta import (amplification, decay_certificate, decay_curve, monotone_envelope,
                    spectral_lower_bound, theta_closed_form, uniform_decay_constants)

SEED = 20240101


@dataclass
class Check:
    """``value <= tol`` (errors and violations are both non-negative)."""

    label: str
    value: float
    tol: float
    scaled: bool = True

    def passed(self, factor: float = 1.0) -> bool:
        tol = self.tol * factor if self.scaled else self.tol
        return bool(np.isfinite(self.value) and self.value <= tol)


@dataclass
class CriterionResult:
    index: int
    name: str
    tags: tuple
    checks: list = field(default_factory=list)
    seconds: float = 0.0
    error: str | None = None
    factor: float = 1.0

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.passed(self.factor) for c in self.checks)

    @property
    def worst(self) -> Check | None:
        bad = [c for c in self.checks if not c.passed(self.factor)]
        pool = bad or self.checks
        if not pool:
            return None
        return max(pool, key=lambda c: c.value / c.tol if c.tol > 0 else (0.0 if c.value <= 0 else math.inf))

    def line(self) -> str:
        w = self.worst
        status = "PASS" if self.passed else "FAIL"
        if self.error is not None:
            detail = f"error: {self.error}"
        elif w is None:
            detail = "no checks"
        else:
            tol = w.tol * self.factor if w.scaled else w.tol
            detail = f"{w.label}: measured {w.value:.3e} <= tol {tol:.1e}"
        return f"[{status}] {self.index:2d} {self.name} ({self.seconds:.2f}s) {detail}"

    def to_dict(self) -> dict:
        return {"index": self.index, "name": self.name, "tags": list(self.tags),
                "passed": self.passed, "seconds": self.seconds, "error": self.error,
                "tolerance_factor": self.factor,
                "checks": [{"label": c.label, "measured": c.value,
                            "tolerance": c.tol * self.factor if c.scaled else c.tol,
                            "passed": c.passed(self.factor)} for c in self.checks]}


def _viol(x: float) -> float:
    """Amount by which a required inequality ``x >= 0`` fails."""
    return max(0.0, -float(x))


# --------------------------------------------------------------------------
# shared solves
# --------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _round_flow(n: int, u1: float, s_max: float | None = None):
    base = build_base(constant_path(Round(n, 1.0)), 0.0, s_max=s_max)
    return run_flow(base, u1, seed=SEED)


@lru_cache(maxsize=None)
def _axisym_flow():
    base = build_base(eccentricity_path(1.05, "bump"), 0.1)
    return run_flow(base, base.geometry(1.0).Hbar / 1.9, seed=SEED)


# --------------------------------------------------------------------------
# criteria
# --------------------------------------------------------------------------

def c01_flow_oracle():
    t0 = time.perf_counter()
    base = build_base(constant_path(Round(3, 1.0)), 0.0, s_max=100.0)
    flow = run_flow(base, 2.0, seed=SEED)
    dt = time.perf_counter() - t0
    exact = (1.0 - 0.75 / flow.s) ** -0.5
    return [Check("L-inf error vs (1-0.75/s)^(-1/2)", float(np.max(np.abs(flow.u[:, 0] - exact))), 1e-8),
            Check("runtime seconds", dt, 2.0, scaled=False)]


def c02_two_masses():
    checks = []
    for n in (3, 4):
        for m in (0.1, 0.375):
            flow = _round_flow(n, (1.0 - 2.0 * m) ** -0.5)
            flux, radial = adm_mass(flow), radial_mass(flow)
            checks.append(Check(f"|flux - radial| n={n} m={m}", abs(flux - radial), 1e-6))
            checks.append(Check(f"|flux - m| n={n} m={m}", abs(flux - m), 1e-6))
    return checks


def c03_threshold():
    path = constant_path(Round(3, 1.0))
    rel, h0err = 0.0, 0.0
    for H in (0.5, 1.0, 1.5, 3.0, 4.0):
        rep = nnsc_fillin_test(BartnikData(3, Round(3, 1.0), H), path, 0.0)
        exact = 8.0 * math.pi - 4.0 * math.pi * H
        rel = max(rel, abs(rep.bracket - exact) / abs(exact))
        h0err = max(h0err, abs(rep.H0 - 2.0))
        if (rep.verdict == "NoNNSCFillIn") != (H > 2):
            rel = math.inf
    theta_zero = abs(theta_closed_form(3, rep.H0).value)
    return [Check("bracket relative error", rel, 1e-6), Check("|H0 - 2|", h0err, 1e-6),
            Check("|theta(3, H0)|", theta_zero, 1e-6)]


def c04_closed_form():
    H2 = np.linspace(0.0, 0.99, 100)
    H3 = np.linspace(2.0, 20.0, 100)
    e2 = max(abs(theta_closed_form(2, h).value - 2.0 * (1.0 - h * h)) for h in H2)
    e3 = max(abs(theta_closed_form(3, h).value - 6.0 * (1.0 - h * h / 4.0)) for h in H3)
    flags = sum(monotone_envelope([(h, theta_closed_form(k, h)) for h in H]).flagged
                for k, H in ((2, H2), (3, H3)))
    return [Check("n=2 error", e2, 0.0), Check("n=3 error", e3, 0.0),
            Check("envelope flags", float(flags), 0.0, scaled=False)]


def c05_cap_residuals():
    t0 = time.perf_counter()
    res, aerr = 0.0, 0.0
    for n in range(3, 8):
        for lam in (1.5, 2.0, 4.0):
            for th in np.logspace(-3, 1, 10):
                neck = build_cap_neck(n, lam, float(th))
                r = neck.residuals
                res = max(res, max(abs(v) for k, v in r.items() if k != "closed_form"))
                ref = amplification(n, lam, float(th))
                aerr = max(aerr, abs(neck.alpha_eps - ref) / ref)
    dt = time.perf_counter() - t0
    return [Check("max equation residual", res, 1e-10), Check("alpha closed-form error", aerr, 1e-10),
            Check("runtime seconds", dt, 1.0, scaled=False)]


def c06_c_mu():
    rng = np.random.default_rng(SEED)
    resid = 0.0
    mono = 0
    for _ in range(1000):
        n = int(rng.integers(3, 8))
        mu1, mu2 = np.sort(10.0 ** rng.uniform(-3, 1, 2))
        c1, c2 = solve_c_mu(n, mu1), solve_c_mu(n, mu2)
        p = 1.0 - 2.0 / n
        resid = max(resid, abs(c1 ** p - mu1 * (1.0 - c1)), abs(c2 ** p - mu2 * (1.0 - c2)))
        mono += int(not (mu1 < mu2 and c1 < c2))
    root = abs(solve_c_mu(4, 2.0) - (9.0 - math.sqrt(17.0)) / 8.0)
    return [Check("max residual", resid, 1e-13), Check("n=4 mu=2 root error", root, 1e-12),
            Check("monotonicity violations", float(mono), 0.0, scaled=False)]


def c07_decay_constants():
    aerr = max(abs(uniform_decay_constants(n)[1] - 2.0 ** (1.0 / (n - 2))) for n in range(3, 8))
    th0, _ = uniform_decay_constants(3)
    eq = abs(8.0 / 27.0 * (6.0 + th0) ** 2 * th0 - 4.0)
    ref = scipy.optimize.brentq(lambda x: 8.0 / 27.0 * (6.0 + x) ** 2 * x - 4.0, 0.0, 1.0, xtol=1e-15)
    cert = max(abs(decay_certificate(n, uniform_decay_constants(n)[0]) - 2.0) for n in range(3, 8))
    return [Check("alpha0 error", aerr, 0.0), Check("(8/27)(6+t)^2 t - 4", eq, 1e-10),
            Check("|theta0 - independent root|", abs(th0 - ref), 1e-10),
            Check("|4(1 - c_mu(theta0)) - 2|", cert, 1e-10)]


def c08_decay_envelope():
    H0, th = 1.5, 0.7
    H = np.unique(np.concatenate([np.geomspace(H0, 1e3 * H0, 400), H0 * 2.0 ** np.arange(10)]))
    d = decay_curve(3, H0, th, H)
    env = 4.0 * th * H0 ** 2 * H ** -2.0
    return [Check("|beta - 2|", abs(d.params["beta"] - 2.0), 0.0),
            Check("envelope formula relative error", float(np.max(np.abs(d.curve["envelope"] / env - 1.0))), 1e-14),
            Check("iterate excess over envelope", _viol(np.min(d.curve["envelope"] / d.curve["iterate"]) - 1.0 + 1e-12), 0.0)]


def c09_schwarzschild_neck():
    neck = build_schwarzschild_neck(3, 1.0, 0.0)
    r2psi = neck.r2 * schwarzschild_psi(neck.r2, neck.m, 3)
    H1 = neck.mean_curvature(neck.r1)
    H2 = neck.mean_curvature(neck.r2)
    resc = rescale_neck(3, AxisymS2.ellipsoid(1.05), 1.0, 0.0, 0.1)
    v = resc.verification
    return [Check("|m - 3/8|", abs(neck.m - 0.375), 1e-12),
            Check("|r1 - 3/16|", abs(neck.r1 - 0.1875), 1e-12),
            Check("|r2 - 9/16|", abs(neck.r2 - 0.5625), 1e-12),
            Check("|r2 psi(r2) - 1|", abs(r2psi - 1.0), 1e-12),
            Check("|H(r1) - h|", abs(float(H1)), 1e-10),
            Check("|H(r2) - H|", abs(float(H2) - 1.0), 1e-10),
            Check("rescaled closed-form R below bound", _viol(v["min_R_closed_form"] - v["bound"]), 1e-12),
            Check("rescaled FD R below bound", _viol(v["min_R_fd"] - v["bound"]), 1e-4)]


def _collar_case():
    t = np.linspace(-0.3, 0.0, 121)
    base = WarpedBand(t, [Scaled(AxisymS2.ellipsoid(1.1), (1.0 + 0.5 * ti) ** 2) for ti in t])
    x = base.slices[0].resolve().x
    return base, x


def c10_curvature_oracles():
    base, x = _collar_case()
    res = collar_bend(CollarBend(base, 0.3 + 0.1 * np.cos(x)))
    fd = fd_band_curvature(res.band)
    collar_err = float(np.max(np.abs(fd.R - res.R)[fd.interior]))
    tgt = collar_bend(CollarBend.from_target(base, 0.5))
    h_err = float(np.max(np.abs(tgt.H[-1] - 0.5)))
    flow = _axisym_flow()
    flat = 0.0
    for lo, hi in ((0, 160), (120, 600), (560, flow.s.size)):
        bc = fd_band_curvature(flow.band(np.arange(lo, hi)))
        flat = max(flat, float(np.max(np.abs(bc.R[bc.interior]))))
    dumbbell = AxisymS2.from_function(lambda x: np.sin(x) * (1.0 - 0.7 * np.sin(x) ** 2))
    cyl = spectral_lower_bound(dumbbell).params["cylinder_error"]
    return [Check("collar expansion vs FD", collar_err, 1e-4), Check("|H4(0) - H|", h_err, 1e-12),
            Check("solved band |R|", flat, 1e-3), Check("cylinder |R - 2 lambda1|", cyl, 1e-4)]


def c11_monotonicity():
    flows = [_round_flow(3, 2.0), _round_flow(3, (1 - 0.2) ** -0.5), _round_flow(4, (1 - 0.2) ** -0.5),
             _round_flow(3, 1.0), _round_flow(3, 0.8), _axisym_flow()]
    worst = min(float(np.min(f.monotone_ratio)) for f in flows)
    return [Check("certificate shortfall", _viol(worst - (1.0 - 1e-6)), 0.0)]


def c12_isotopy():
    neck = build_isotopy_neck(constant_path(Round(3, 1.0)), 0.1, 0.05)
    ecc = build_isotopy_neck(eccentricity_path(1.05, "ramp"), 0.1, 0.05)
    fd_min = float(ecc.R_fd[ecc.fd_interior].min())
    return [Check("constant path Lambda - 1", neck.Lambda - 1.0, 0.0),
            Check("constant path R positivity", _viol(neck.min_R - 1e-300), 0.0),
            Check("eccentric path Lambda finite", 0.0 if math.isfinite(ecc.Lambda) else math.inf, 0.0),
            Check("eccentric path R positivity", _viol(ecc.min_R - 1e-300), 0.0),
            Check("eccentric path FD R positivity", _viol(fd_min - 1e-300), 0.0),
            Check("eccentric FD vs closed form", float(np.max(np.abs(ecc.R_fd - ecc.R)[ecc.fd_interior])), 1e-4)]


CRITERIA: list[tuple[str, tuple, Callable]] = [
    ("schwarzschild-flow-oracle", ("flow", "schwarzschild", "quasispherical"), c01_flow_oracle),
    ("two-mass-agreement", ("mass", "schwarzschild", "quasispherical"), c02_two_masses),
    ("threshold-cross-check", ("mass", "threshold", "quasispherical", "theta"), c03_threshold),
    ("closed-form-theta", ("theta",), c04_closed_form),
    ("cap-neck-residuals", ("neck", "cap"), c05_cap_residuals),
    ("c-mu-solver", ("neck", "cap", "c-mu"), c06_c_mu),
    ("uniform-decay-constants", ("theta", "decay"), c07_decay_constants),
    ("decay-envelope", ("theta", "decay"), c08_decay_envelope),
    ("neck-closed-forms", ("neck",), c09_schwarzschild_neck),
    ("curvature-oracles", ("curvature", "collar", "flow", "spectral"), c10_curvature_oracles),
    ("monotonicity-certificates", ("flow", "monotonicity", "quasispherical"), c11_monotonicity),
    ("isotopy-neck", ("neck", "isotopy"), c12_isotopy),
]


def selected(filter_: str | None = None) -> list[int]:
    """Indices (1-based) whose name or tags contain ``filter_``."""
    out = []
    for i, (name, tags, _) in enumerate(CRITERIA, start=1):
        if filter_ is None or filter_ in name or filter_ in tags or filter_ == str(i):
            out.append(i)
    return out


def run_criterion(index: int, factor: float = 1.0) -> CriterionResult:
    name, tags, fn = CRITERIA[index - 1]
    res = CriterionResult(index, name, tags, factor=factor)
    t0 = time.perf_counter()
    try:
        res.checks = fn()
    except Exception as exc:  # reported as a failing row
        res.error = f"{type(exc).__name__}: {exc}"
    res.seconds = time.perf_counter() - t0
    return res


def validate_suite(filter_: str | None = None, stress: bool = False) -> list[CriterionResult]:
    """Run the selected criteria; ``stress`` tightens every tolerance by 100."""
    factor = 0.01 if stress else 1.0
    return [run_criterion(i, factor) for i in selected(filter_)]
