"""Quasi-spherical flow over an asymptotically flat base.

The base is ``ds^2 + s^2 gamma_{t(s)}`` with ``t(s) = (2/pi) arctan(delta ln s)``;
it is Euclidean once ``t(s) >= 5/6``, i.e. for ``s >= s0 = exp(tan(5 pi/12)/delta)``.
The lapse ``u`` of ``u^2 ds^2 + s^2 gamma_{t(s)}`` solves

    Hbar du/ds = u^2 Lap u + (u - u^3) R_slice / 2 - R_base u / 2,

which makes the metric scalar flat.  The module also evaluates the ADM
mass, the mass upper bound and the non-fill-in thresholds.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg

from ._numerics import bisect_increasing
from .errors import (DegenerateMetricError, DomainError, NumericalFailure,
                     PreconditionError)
from .manifold import (AxisymS2, Round, Scaled, SphereMetric, WarpedBand,
                       read_field_csv, read_profile_csv, sphere_area, unit_ball_volume)
from .paths import NEAR_1, MetricPath, path_norms

S0_ANGLE = 5.0 * math.pi / 12.0
STEP_RATIO = 1.0 / 200.0
STEP_RATIO_NEAR_1 = 1.0 / 400.0
MONOTONE_TOL = 1e-6


def is_standard(metric: SphereMetric, tol: float = 1e-12) -> bool:
    """True if ``metric`` is the unit round metric (to ``tol``)."""
    m = metric.resolve()
    if isinstance(m, Round):
        return abs(m.radius - 1.0) <= tol
    return bool(np.max(np.abs(m.a - 1.0)) <= tol and np.max(np.abs(m.b - np.sin(m.x))) <= tol)


def alpha_exponent(n: int, eps: float) -> float:
    """``alpha(n, eps) = (n-2)(1-eps)/2``."""
    return (n - 2) * (1.0 - eps) / 2.0


def s0_of(delta: float) -> float:
    return math.exp(math.tan(S0_ANGLE) / delta)


# --------------------------------------------------------------------------
# base
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SliceGeometry:
    """Geometry of the base slice ``s^2 gamma_{t(s)}``."""

    s: float
    gamma: SphereMetric
    Hbar: np.ndarray
    R_slice: np.ndarray
    R_base: np.ndarray
    deviation: np.ndarray
    lap: object = field(repr=False, default=None)

    @property
    def metric(self) -> Scaled:
        return Scaled(self.gamma, self.s ** 2)


@dataclass(frozen=True, eq=False)
class BaseAF:
    """Asymptotically flat base built from a metric path.

    ``delta`` is ``None`` for the Euclidean base (constant standard path).
    """

    path: MetricPath
    delta: float | None
    s0: float
    eps_achieved: float
    eps_target: float
    s_max: float
    sup_d1: float
    corners_s: tuple = ()

    @property
    def n(self) -> int:
        return self.path.n

    @property
    def euclidean(self) -> bool:
        return self.delta is None

    @property
    def truncated(self) -> bool:
        return self.s_max < self.s0

    @property
    def alpha(self) -> float:
        return alpha_exponent(self.n, self.eps_achieved)

    def t_of_s(self, s):
        if self.euclidean:
            return np.ones_like(np.asarray(s, dtype=float))
        return 2.0 / math.pi * np.arctan(self.delta * np.log(s))

    def dt_ds(self, s):
        if self.euclidean:
            return 0.0 * np.asarray(s, dtype=float)
        w = self.delta * np.log(s)
        return 2.0 * self.delta / math.pi / (s * (1.0 + w * w))

    def d2t_ds2(self, s):
        if self.euclidean:
            return 0.0 * np.asarray(s, dtype=float)
        d = self.delta
        w = d * np.log(s)
        return -2.0 * d / math.pi * (1.0 + w * w + 2.0 * d * w) / (s * (1.0 + w * w)) ** 2

    def geometry(self, s: float, with_operator: bool = False) -> SliceGeometry:
        """Slice quantities at ``s`` (mean curvature along ``d/ds``, curvatures)."""
        if self.euclidean or s >= self.s0:
            return _euclidean_geometry(self.path.slices[-1] if self.euclidean else self._std, s,
                                       with_operator)
        t = float(self.t_of_s(s))
        gamma = self.path.at(t)
        tp, tpp = float(self.dt_ds(s)), float(self.d2t_ds2(s))
        rates = self.path.rates(t, gamma)
        k = [(mult, 1.0 / s + 0.5 * tp * r1) for mult, r1, _ in rates]
        Hbar = sum(mult * ki for mult, ki in k)
        A2 = sum(mult * ki ** 2 for mult, ki in k)
        dev = np.sqrt(sum(mult * (0.5 * tp * r1) ** 2 for mult, r1, _ in rates))
        dH = sum(mult * (-1.0 / s ** 2 + 0.5 * (tpp * r1 + tp ** 2 * (r2 - r1 ** 2)))
                 for mult, r1, r2 in rates)
        R_slice = gamma.scalar_curvature() / s ** 2
        R_base = R_slice - 2.0 * dH - Hbar ** 2 - A2
        size = gamma.size
        lap = _scaled_diagonals(gamma, s) if with_operator and size > 1 else None
        return SliceGeometry(s, gamma, Hbar * np.ones(size), R_slice, R_base * np.ones(size),
                             dev * np.ones(size), lap)

    @property
    def _std(self) -> SphereMetric:
        return self.path.slices[-1]

    def band(self, s) -> WarpedBand:
        """The base metric as a band over the nodes ``s``."""
        s = np.asarray(s, dtype=float)
        return WarpedBand(s, [self.geometry(si).metric for si in s])

    def to_dict(self) -> dict:
        return {"delta": self.delta, "s0": self.s0, "epsilon_achieved": self.eps_achieved,
                "epsilon_target": self.eps_target, "alpha": self.alpha, "s_max": self.s_max,
                "euclidean": self.euclidean, "truncated": self.truncated, "sup_d1": self.sup_d1}


def _scaled_diagonals(gamma, s: float):
    return tuple(d / s ** 2 for d in gamma.resolve().laplacian_diagonals())


def _euclidean_geometry(std: SphereMetric, s: float, with_operator: bool) -> SliceGeometry:
    n = std.n
    size = std.size
    R_std = std.scalar_curvature()
    Hbar = (n - 1) / s * np.ones(size)
    R_slice = R_std / s ** 2
    R_base = (R_std - (n - 1) * (n - 2)) / s ** 2 if size > 1 else np.zeros(1)
    lap = _scaled_diagonals(std, s) if with_operator and size > 1 else None
    return SliceGeometry(s, std, Hbar, R_slice, R_base * np.ones(size), np.zeros(size), lap)


def measure_deviation(path: MetricPath, delta: float, samples: int = 1001) -> float:
    """``max_s s |Abar_s - gbar_s/s|`` over ``[1, s0(delta)]``.

    The slices are sampled uniformly in ``t``, i.e. at ``s = exp(tan(pi t/2)/delta)``.
    """
    s0 = s0_of(delta)
    base = BaseAF(path, delta, s0, 0.0, 0.0, s0, 0.0)
    t = np.linspace(0.0, NEAR_1, samples)
    s = np.exp(np.tan(0.5 * math.pi * t) / delta)
    return max(float(np.max(base.geometry(si).deviation)) * si for si in s)


def build_base(path: MetricPath, eps_target: float, s_max: float | None = None,
               min_delta: float = 2.0 ** -20) -> BaseAF:
    """Asymptotically flat base with second-fundamental-form deviation ``<= eps_target``.

    ``delta`` is halved from 1 until the measured deviation meets the target.
    """
    if not path.constant_near_1 or not is_standard(path.slices[-1]):
        raise PreconditionError("the path must be the standard metric for t >= 5/6")
    if abs(path.length - 1.0) > 1e-12:
        raise PreconditionError("the path must be parametrized on [0, 1]")
    if not (0 <= eps_target < 1):
        raise DomainError("eps_target must lie in [0, 1)")
    for m in path.slices:
        if np.min(m.scalar_curvature()) <= 0:
            raise PreconditionError("the path leaves the positive scalar curvature metrics")
    norms = path_norms(path)
    if path.is_constant:
        sm = 1e4 if s_max is None else float(s_max)
        return BaseAF(path, None, 1.0, 0.0, eps_target, sm, 0.0)
    if not eps_target > 0:
        raise DomainError("a non-constant path needs eps_target > 0")
    delta = 1.0
    while True:
        dev = measure_deviation(path, delta)
        if dev <= eps_target:
            break
        delta *= 0.5
        if delta < min_delta:
            raise NumericalFailure("no interpolation rate meets the deviation target",
                                   {"last_deviation": dev})
    s0 = s0_of(delta)
    sm = max(1e4, 10.0 * s0) if s_max is None else float(s_max)
    corners = tuple(math.exp(math.tan(math.pi * c / 2.0) / delta) for c in path.corners
                    if c < NEAR_1)
    return BaseAF(path, delta, s0, float(dev), eps_target, sm, float(norms.sup_d1), corners)


# --------------------------------------------------------------------------
# flow
# --------------------------------------------------------------------------

_SQ6 = math.sqrt(6.0)
RADAU_C = np.array([(4.0 - _SQ6) / 10.0, (4.0 + _SQ6) / 10.0, 1.0])
RADAU_A = np.array([
    [(88.0 - 7.0 * _SQ6) / 360.0, (296.0 - 169.0 * _SQ6) / 1800.0, (-2.0 + 3.0 * _SQ6) / 225.0],
    [(296.0 + 169.0 * _SQ6) / 1800.0, (88.0 + 7.0 * _SQ6) / 360.0, (-2.0 - 3.0 * _SQ6) / 225.0],
    [(16.0 - _SQ6) / 36.0, (16.0 + _SQ6) / 36.0, 1.0 / 9.0],
])


def _tri_apply(lap, u: np.ndarray) -> np.ndarray:
    lo, d, up = lap
    out = d * u
    out[1:] += lo * u[:-1]
    out[:-1] += up * u[1:]
    return out


def flow_rhs(geo: SliceGeometry, u: np.ndarray) -> np.ndarray:
    lap = _tri_apply(geo.lap, u) if geo.lap is not None else 0.0
    return (u * u * lap + 0.5 * (u - u ** 3) * geo.R_slice - 0.5 * geo.R_base * u) / geo.Hbar


def flow_jacobian(geo: SliceGeometry, u: np.ndarray):
    """Tridiagonal Jacobian ``dF/du`` as ``(sub, main, super)``."""
    lap = _tri_apply(geo.lap, u) if geo.lap is not None else 0.0
    d = (2.0 * u * lap + 0.5 * (1.0 - 3.0 * u * u) * geo.R_slice - 0.5 * geo.R_base) / geo.Hbar
    if geo.lap is None:
        return np.zeros(0), d, np.zeros(0)
    w = u * u / geo.Hbar
    lo, m, up = geo.lap
    return w[1:] * lo, d + w * m, w[:-1] * up


def _stage_system(h: float, Js) -> np.ndarray:
    """Banded form of ``I - h (A x J)`` with unknowns ordered node-major."""
    N = Js[0][1].size
    ab = np.zeros((11, 3 * N))
    for a in range(3):
        ab[5, a::3] += 1.0
        for b in range(3):
            lo, m, up = Js[b]
            f = -h * RADAU_A[a, b]
            # row 3i+a, column 3j+b sits at ab[5 + row - col, col]
            ab[5 + a - b, b::3] += f * m
            ab[5 + 3 + a - b, b:3 * (N - 1):3] += f * lo
            ab[5 - 3 + a - b, 3 + b::3] += f * up
    return ab


def flow_grid(s_max: float, marks=(), ratio: float = STEP_RATIO,
              ratio_near_1: float = STEP_RATIO_NEAR_1) -> np.ndarray:
    """Geometric grid from 1 to ``s_max`` that contains every mark."""
    pts = [1.0]
    s = 1.0
    marks = sorted(m for m in marks if 1.0 < m < s_max)
    while s < s_max:
        r = ratio_near_1 if s < 2.0 else ratio
        nxt = s * (1.0 + r)
        for m in marks:
            if s < m < nxt * (1 + 0.5 * r):
                nxt = m
                break
        if nxt >= s_max * (1 - 0.5 * r):
            nxt = s_max
        pts.append(nxt)
        s = nxt
    return np.array(pts)


def _radau_step(base: BaseAF, s: float, h: float, y: np.ndarray, rng, newton_tol: float = 1e-13,
                maxiter: int = 12):
    """One Radau IIA step; returns ``(y_new, geometry at s + h)`` or ``None``."""
    N = y.size
    geos = [base.geometry(s + c * h, with_operator=True) for c in RADAU_C]
    U = np.tile(y, (3, 1))
    for attempt in range(2):
        ok = False
        for it in range(maxiter):
            F = np.array([flow_rhs(g, U[i]) for i, g in enumerate(geos)])
            G = U - y - h * (RADAU_A @ F)
            Js = [flow_jacobian(g, U[i]) for i, g in enumerate(geos)]
            if N == 1:
                M = np.eye(3) - h * RADAU_A * np.array([J[1][0] for J in Js])[None, :]
                dU = np.linalg.solve(M, -G[:, 0])[:, None]
            else:
                ab = _stage_system(h, Js)
                dU = scipy.linalg.solve_banded((5, 5), ab, -G.T.reshape(-1)).reshape(N, 3).T
            g0 = float(np.max(np.abs(G)))
            lam = 1.0
            for _ in range(8):
                trial = U + lam * dU
                if np.all(trial > 0):
                    Ft = np.array([flow_rhs(g, trial[i]) for i, g in enumerate(geos)])
                    gt = float(np.max(np.abs(trial - y - h * (RADAU_A @ Ft))))
                    if gt <= g0 or lam < 0.01:
                        break
                lam *= 0.5
            else:
                return None
            if not np.all(trial > 0):
                return None
            U = trial
            if float(np.max(np.abs(lam * dU))) <= newton_tol * (1.0 + float(np.max(np.abs(U)))):
                ok = True
                break
        if ok:
            return U[-1].copy(), geos[-1]
        # seeded perturbation of the initial guess, then one more attempt
        U = np.tile(y, (3, 1)) * (1.0 + 1e-6 * rng.standard_normal((3, N)))
    return None


@dataclass(frozen=True, eq=False)
class FlowSolution:
    """Lapse samples ``u[k]`` on the slices ``s[k]`` of the base."""

    base: BaseAF
    s: np.ndarray
    u: np.ndarray
    u1: np.ndarray
    I: np.ndarray
    Hbar: np.ndarray
    seed: int = 0
    corner_slices: tuple = ()

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def s_max(self) -> float:
        return float(self.s[-1])

    @property
    def monotone_ratio(self) -> np.ndarray:
        """``I(s) / (s^alpha I(1))``."""
        return self.I / (self.s ** self.base.alpha * self.I[0])

    @property
    def monotone_ok(self) -> bool:
        return bool(np.all(self.monotone_ratio >= 1.0 - MONOTONE_TOL))

    @property
    def mass_report(self) -> MassReport:
        return mass_upper_bound(self.base, self.u1, flow=self)

    def band(self, idx=None) -> WarpedBand:
        """The solved metric ``u^2 ds^2 + s^2 gamma_{t(s)}`` as a band."""
        idx = np.arange(self.s.size) if idx is None else np.asarray(idx)
        s = self.s[idx]
        return WarpedBand(s, [self.base.geometry(si).metric for si in s], lapse=self.u[idx])

    def to_dict(self) -> dict:
        return {"s_max": self.s_max, "slices": int(self.s.size), "u_min": float(self.u.min()),
                "u_final_mean": float(np.mean(self.u[-1])), "monotone_ok": self.monotone_ok,
                "monotone_ratio_min": float(self.monotone_ratio.min()), "seed": self.seed}


def total_mean_curvature(flow: FlowSolution, s: float) -> float:
    """``I(s) = int Hbar_s u^{-1} dmu`` on the slice ``s`` (interpolated between nodes)."""
    if not (flow.s[0] <= s <= flow.s[-1]):
        raise DomainError("s outside the solved range")
    k = int(np.searchsorted(flow.s, s))
    if k < flow.s.size and flow.s[k] == s:
        return float(flow.I[k])
    geo = flow.base.geometry(s)
    uk = np.array([np.interp(s, flow.s, flow.u[:, j]) for j in range(flow.u.shape[1])])
    return float(geo.metric.integrate(geo.Hbar / uk))


def run_flow(base: BaseAF, u1, s_max: float | None = None, seed: int = 0,
             ratio: float = STEP_RATIO, ratio_near_1: float = STEP_RATIO_NEAR_1) -> FlowSolution:
    """Solve the quasi-spherical equation from ``u(1) = u1`` to ``s_max``.

    Radau IIA (order 5) steps on a geometric grid, damped Newton on each
    step, step halving on failure or loss of positivity.
    """
    s_max = base.s_max if s_max is None else float(s_max)
    g1 = base.geometry(1.0)
    y = np.array(g1.gamma.field(u1), dtype=float)
    if np.any(y <= 0):
        raise DomainError("initial lapse must be positive")
    marks = [base.s0, *base.corners_s] if not base.euclidean else []
    grid = flow_grid(s_max, marks, ratio, ratio_near_1)
    rng = np.random.default_rng(seed)
    N = y.size
    us = np.empty((grid.size, N))
    Hb = np.empty((grid.size, N))
    I = np.empty(grid.size)
    us[0] = y
    Hb[0] = g1.Hbar
    I[0] = g1.metric.integrate(g1.Hbar / y)
    for k in range(grid.size - 1):
        if np.min(Hb[k]) <= 0:
            raise PreconditionError(f"the foliation is not mean convex at s={grid[k]:.6g}")
        s, target = grid[k], grid[k + 1]
        cur = y
        geo = None
        h = target - s
        while s < target:
            h = min(h, target - s)
            res = _radau_step(base, s, h, cur, rng)
            if res is None:
                h *= 0.5
                if h < 1e-12 * target:
                    raise NumericalFailure("step size underflow in the flow solve",
                                           {"s": s, "u_min": float(cur.min()), "u_max": float(cur.max())})
                continue
            cur, geo = res
            s = s + h
            if abs(target - s) <= 1e-14 * target:
                s = target
        y = cur
        if np.any(y <= 0):
            raise DegenerateMetricError(f"lapse reached zero near s={target:.6g}")
        us[k + 1] = y
        Hb[k + 1] = geo.Hbar
        I[k + 1] = geo.metric.integrate(geo.Hbar / y)
    corner_idx = tuple(int(np.argmin(np.abs(grid - c))) for c in base.corners_s)
    return FlowSolution(base, grid, us, np.array(g1.gamma.field(u1)), I, Hb, seed, corner_idx)


# --------------------------------------------------------------------------
# mass
# --------------------------------------------------------------------------

def flux_mass(flow: FlowSolution, k: int) -> float:
    """Coordinate-sphere flux at node ``k`` (Euclidean region)."""
    s = flow.s[k]
    n = flow.n
    std = flow.base.path.slices[-1]
    return s ** (n - 2) / (2.0 * sphere_area(n)) * std.integrate(flow.u[k] ** 2 - 1.0)


def radial_mass(flow: FlowSolution, k: int = -1) -> float:
    """``s^{n-2} (1 - u^{-2}) / 2`` averaged over the unit sphere at node ``k``."""
    s = flow.s[k]
    n = flow.n
    std = flow.base.path.slices[-1]
    return 0.5 * s ** (n - 2) * std.integrate(1.0 - flow.u[k] ** -2.0) / sphere_area(n)


def adm_mass(flow: FlowSolution) -> float:
    """ADM mass by Richardson extrapolation (in ``1/s``) of the sphere flux.

    Uses the nodes nearest ``s_max``, ``s_max/2`` and ``s_max/4``.
    """
    base = flow.base
    if base.truncated or flow.s_max < base.s0:
        raise PreconditionError("the Euclidean region is truncated; mass is undefined")
    if flow.s_max < 10.0 * base.s0:
        raise PreconditionError("the flow must reach 10 s0 for the mass extrapolation")
    ks = [int(np.argmin(np.abs(flow.s - flow.s_max / q))) for q in (1.0, 2.0, 4.0)]
    x = np.array([1.0 / flow.s[k] for k in ks])
    m = np.array([flux_mass(flow, k) for k in ks])
    V = np.vander(x, 3, increasing=True)
    return float(np.linalg.solve(V, m)[0])


@dataclass(frozen=True)
class MassReport:
    """Mass bound and verdict for one base and initial lapse."""

    n: int
    s0: float
    epsilon_achieved: float
    alpha: float
    h0: float
    bracket: float
    eq_mass_bound: float
    brown_york_bound: float | None
    adm_estimate: float | None
    total_mean_curvature: float
    H0: float | None = None

    @property
    def verdict(self) -> str:
        return "NoNNSCFillIn" if self.eq_mass_bound < 0 else "Inconclusive"

    def to_dict(self) -> dict:
        return {"n": self.n, "s0": self.s0, "epsilon_achieved": self.epsilon_achieved,
                "alpha": self.alpha, "h0": self.h0, "bracket": self.bracket,
                "eq_mass_bound": self.eq_mass_bound, "brown_york_bound": self.brown_york_bound,
                "adm_estimate": self.adm_estimate, "total_mean_curvature": self.total_mean_curvature,
                "H0": self.H0, "verdict": self.verdict}


def mass_constant(n: int) -> float:
    """``C(n) = 1 / ((n-1) |S^{n-1}|)``, the Brown-York normalization.

    With it the slice bound decreases to the ADM mass along a Euclidean base.
    """
    return 1.0 / ((n - 1) * sphere_area(n))


def h0_threshold(n: int, eps: float, s0: float) -> float:
    """``h0 = n (n-1) omega_n s0^{n - alpha - 2}`` with ``omega_n`` the unit-ball volume."""
    if n < 3:
        raise DomainError("n >= 3 is required")
    if not (0 <= eps < 1):
        raise DomainError("eps must lie in [0, 1)")
    if not s0 >= 1:
        raise DomainError("s0 >= 1 is required")
    return n * (n - 1) * unit_ball_volume(n) * s0 ** (n - alpha_exponent(n, eps) - 2)


def mass_bracket(n: int, eps: float, s0: float, weighted_integral: float) -> float:
    """``n(n-1) omega_n s0^{n-2} - s0^alpha * weighted_integral``."""
    return (n * (n - 1) * unit_ball_volume(n) * s0 ** (n - 2)
            - s0 ** alpha_exponent(n, eps) * weighted_integral)


def mass_upper_bound(base: BaseAF, u1, flow: FlowSolution | None = None,
                     run: bool = False) -> MassReport:
    """Mass bound for the flow with initial lapse ``u1``.

    With ``flow`` (or ``run=True``) the Brown-York type bound on the slice
    ``s0`` and the ADM mass (if the flow reaches ``10 s0``) are added.
    """
    n = base.n
    g1 = base.geometry(1.0)
    u1 = g1.gamma.field(u1)
    if np.any(u1 <= 0):
        raise DomainError("initial lapse must be positive")
    weighted = g1.gamma.integrate(g1.Hbar / u1)
    eps = base.eps_achieved
    bracket = mass_bracket(n, eps, base.s0, weighted)
    C = mass_constant(n)
    by = adm = None
    if flow is None and run:
        flow = run_flow(base, u1)
    if flow is not None:
        k = int(np.argmin(np.abs(flow.s - base.s0)))
        if flow.s[k] == base.s0:
            geo = base.geometry(base.s0)
            by = C * geo.metric.integrate(geo.Hbar - geo.Hbar / flow.u[k])
        if not base.truncated and flow.s_max >= 10 * base.s0:
            adm = adm_mass(flow)
    elif base.s0 == 1.0:
        by = C * g1.metric.integrate(g1.Hbar - g1.Hbar / u1)
    return MassReport(n=n, s0=base.s0, epsilon_achieved=eps, alpha=base.alpha,
                      h0=h0_threshold(n, eps, base.s0), bracket=bracket, eq_mass_bound=C * bracket,
                      brown_york_bound=by, adm_estimate=adm, total_mean_curvature=weighted)


# --------------------------------------------------------------------------
# Bartnik data and the non-fill-in test
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BartnikData:
    """Dimension, boundary metric and mean curvature."""

    n: int
    metric: SphereMetric
    H: np.ndarray

    def __post_init__(self):
        if self.metric.n != self.n:
            raise PreconditionError("metric dimension does not match n")
        object.__setattr__(self, "H", np.asarray(self.metric.field(self.H), dtype=float))

    @property
    def constant_H(self) -> bool:
        return bool(np.ptp(self.H) == 0.0)

    @classmethod
    def from_json(cls, path) -> "BartnikData":
        path = Path(path)
        with path.open(encoding="utf-8") as fh:
            d = json.load(fh)
        return cls.from_dict(d, path.parent)

    @classmethod
    def from_dict(cls, d: dict, root: Path | None = None) -> "BartnikData":
        root = Path(".") if root is None else root
        n = int(d["n"])
        md = d["metric"]
        kind = md.get("kind")
        if kind == "round":
            metric = Round(n, float(md.get("radius", 1.0)))
        elif kind == "axisym":
            if n != 3:
                raise PreconditionError("axisymmetric data needs n = 3")
            if "profile_csv" in md:
                metric = read_profile_csv(root / md["profile_csv"])
            else:
                metric = AxisymS2.from_function(np.sin, int(md.get("nx", 401)))
        else:
            raise PreconditionError(f"unknown metric kind {kind!r}")
        if "scale" in md:
            metric = Scaled(metric, float(md["scale"]))
        H = d["H"]
        if isinstance(H, dict):
            H = read_field_csv(root / H["csv"], metric.resolve())
        return cls(n, metric, H)


def nnsc_fillin_test(data: BartnikData, path: MetricPath, eps_target: float,
                     s_max: float | None = None, run: bool = False) -> MassReport:
    """Mass-bound test for the data with initial lapse ``Hbar_1 / H``.

    For constant ``H`` the smallest constant making the bound negative for
    this path is added as ``H0``.
    """
    if np.any(data.H <= 0):
        raise PreconditionError("H must be positive")
    if not same_start(path, data.metric):
        raise PreconditionError("the path must start at the data's metric")
    base = build_base(path, eps_target, s_max)
    g1 = base.geometry(1.0)
    u1 = g1.Hbar / data.H
    rep = mass_upper_bound(base, u1, run=run)
    H0 = None
    if data.constant_H:
        area = g1.gamma.area()
        f = lambda H: -mass_bracket(data.n, base.eps_achieved, base.s0, H * area)  # noqa: E731
        hi = 1.0
        while f(hi) <= 0:
            hi *= 2.0
        H0 = bisect_increasing(f, 0.0, hi)
    return MassReport(**{**rep.__dict__, "H0": H0})


def same_start(path: MetricPath, metric: SphereMetric, tol: float = 1e-12) -> bool:
    a, b = path.slices[0].resolve(), metric.resolve()
    if type(a) is not type(b):
        return False
    if isinstance(a, Round):
        return a.n == b.n and abs(a.radius - b.radius) <= tol * b.radius
    return (a.size == b.size and np.max(np.abs(a.b - b.b)) <= tol
            and np.max(np.abs(a.a - b.a)) <= tol)
