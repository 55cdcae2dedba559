"""One-parameter families of sphere metrics.

A :class:`MetricPath` stores slices at parameter nodes together with the
diagonal metric coefficients.  Between nodes the coefficients are
interpolated by quintic splines, piecewise between declared corners, so
paths that are polynomial of low degree on pieces are reproduced exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline, make_interp_spline

from ._numerics import differentiate, fornberg_weights
from .errors import AlignmentError, DomainError, PreconditionError, ResolutionError
from .manifold import (AxisymS2, Round, SphereMetric, log_rates, metric_components,
                       metric_from_components, metric_from_dict, same_grid)

DEFAULT_NT = 121
NEAR_0 = 1.0 / 20.0
NEAR_1 = 5.0 / 6.0
CONST_TOL = 1e-12


@dataclass(frozen=True)
class NormReport:
    """Grid maxima of ``|gamma'|``, ``|gamma''|`` and ``|R|`` along a path."""

    sup_d1: float
    sup_d2: float
    sup_R: float
    d1: np.ndarray = field(repr=False, compare=False)
    d2: np.ndarray = field(repr=False, compare=False)

    def to_dict(self) -> dict:
        return {"sup_d1": self.sup_d1, "sup_d2": self.sup_d2, "sup_R": self.sup_R}


@dataclass(frozen=True, eq=False)
class MetricPath:
    """Samples ``gamma(t_i)`` of a path of sphere metrics.

    Parameters
    ----------
    t : array
        Increasing nodes starting at 0; ``t[-1]`` is the parameter length.
    slices : sequence of SphereMetric
        Slice metrics on a shared grid.
    corners : sequence of float
        Interior nodes where the path is only continuous.
    """

    t: np.ndarray
    slices: tuple
    corners: tuple = ()

    def __post_init__(self):
        t = np.array(self.t, dtype=float)
        slices = tuple(m.resolve() for m in self.slices)
        if t.ndim != 1 or t.size < 5:
            raise ResolutionError("a path needs at least 5 parameter nodes")
        if len(slices) != t.size:
            raise AlignmentError("one slice per parameter node is required")
        if t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise PreconditionError("path nodes must increase from 0")
        if any(not same_grid(slices[0], m) for m in slices[1:]):
            raise AlignmentError("path slices must share dimension and grid")
        corners = tuple(sorted(float(c) for c in self.corners))
        for c in corners:
            if not np.any(np.abs(t - c) <= 1e-12 * t[-1]) or c <= 0 or c >= t[-1]:
                raise PreconditionError(f"corner {c} is not an interior node")
        t.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "slices", slices)
        object.__setattr__(self, "corners", corners)

    # basic attributes
    @property
    def length(self) -> float:
        return float(self.t[-1])

    @property
    def n(self) -> int:
        return self.slices[0].n

    @property
    def template(self) -> SphereMetric:
        return self.slices[0]

    @cached_property
    def samples(self) -> np.ndarray:
        """Component samples of shape ``(nt, ndir, size)``."""
        return np.array([[c for _, c in metric_components(m)] for m in self.slices])

    @cached_property
    def multiplicities(self) -> tuple:
        return tuple(mult for mult, _ in metric_components(self.slices[0]))

    def _window_constant(self, mask: np.ndarray, ref: np.ndarray) -> bool:
        block = self.samples[mask]
        scale = max(1.0, float(np.max(np.abs(ref))))
        return bool(np.max(np.abs(block - ref)) <= CONST_TOL * scale)

    @cached_property
    def constant_near_0(self) -> bool:
        return self._window_constant(self.t <= NEAR_0 * self.length + 1e-14, self.samples[0])

    @cached_property
    def constant_near_1(self) -> bool:
        return self._window_constant(self.t >= NEAR_1 * self.length - 1e-14, self.samples[-1])

    @cached_property
    def is_constant(self) -> bool:
        return bool(np.max(np.abs(self.samples - self.samples[0])) == 0.0)

    # interpolation
    @cached_property
    def _segments(self):
        edges = [0.0, *self.corners, self.length]
        segs = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            i0 = int(np.argmin(np.abs(self.t - lo)))
            i1 = int(np.argmin(np.abs(self.t - hi)))
            tt = self.t[i0:i1 + 1]
            yy = self.samples[i0:i1 + 1]
            if tt.size >= 6:
                spl = make_interp_spline(tt, yy, k=5, axis=0)
            elif tt.size >= 4:
                spl = CubicSpline(tt, yy, axis=0, bc_type="not-a-knot")
            else:
                spl = CubicSpline(tt, yy, axis=0, bc_type="natural")
            segs.append((lo, hi, spl))
        return segs

    def components(self, t, nu: int = 0) -> np.ndarray:
        """Interpolated coefficients (or their ``nu``-th derivative) at ``t``.

        Inside a flagged constant end window the exact end sample (and zero
        derivatives) is returned.
        """
        scalar = np.ndim(t) == 0
        tt = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(tt < -1e-12) or np.any(tt > self.length * (1 + 1e-12)):
            raise DomainError("parameter outside the path")
        out = np.empty((tt.size,) + self.samples.shape[1:])
        for lo, hi, spl in self._segments:
            sel = (tt >= lo) & (tt <= hi)
            if np.any(sel):
                out[sel] = spl(np.clip(tt[sel], lo, hi), nu)
        for flag, sel, ref in ((self.constant_near_0, tt <= NEAR_0 * self.length, self.samples[0]),
                               (self.constant_near_1, tt >= NEAR_1 * self.length, self.samples[-1])):
            if flag and np.any(sel):
                out[sel] = ref if nu == 0 else 0.0
        return out[0] if scalar else out

    def at(self, t: float) -> SphereMetric:
        """The slice metric at parameter ``t``."""
        return metric_from_components(self.template, list(self.components(float(t))))

    def rates(self, t: float, metric: SphereMetric | None = None):
        """``(mult, c'/c, c''/c)`` per metric direction at ``t``."""
        m = self.at(t) if metric is None else metric
        d1 = self.components(t, 1)
        d2 = self.components(t, 2)
        r1 = log_rates(m, list(d1))
        r2 = log_rates(m, list(d2))
        return [(mult, a, b) for (mult, a), (_, b) in zip(r1, r2)]

    # serialization
    def to_dict(self) -> dict:
        return {"t": self.t.tolist(), "corners": list(self.corners),
                "slices": [m.to_dict() for m in self.slices]}

    @classmethod
    def from_dict(cls, d: dict) -> "MetricPath":
        return cls(np.asarray(d["t"], dtype=float), [metric_from_dict(s) for s in d["slices"]],
                   tuple(d.get("corners", ())))


# --------------------------------------------------------------------------
# norms
# --------------------------------------------------------------------------

def _tensor_norm(mults, rates) -> np.ndarray:
    """Pointwise norm of a diagonal tensor given its ratios to the metric."""
    return np.sqrt(sum(mult * r ** 2 for mult, r in zip(mults, rates)))


def _segment_derivatives(path: MetricPath, order: int) -> np.ndarray:
    """Node derivatives of the samples, one-sided at corners (largest kept)."""
    t, y = path.t, path.samples
    out = np.zeros_like(y)
    best = np.full(t.size, -1.0)
    edges = [0.0, *path.corners, path.length]
    for lo, hi in zip(edges[:-1], edges[1:]):
        i0 = int(np.argmin(np.abs(t - lo)))
        i1 = int(np.argmin(np.abs(t - hi)))
        seg = slice(i0, i1 + 1)
        if i1 - i0 + 1 < order + 1:
            continue
        d = differentiate(y[seg], t[seg], order, axis=0)
        mag = np.max(np.abs(d.reshape(d.shape[0], -1)), axis=1)
        for k, i in enumerate(range(i0, i1 + 1)):
            if mag[k] > best[i]:
                best[i] = mag[k]
                out[i] = d[k]
    return out


def path_norms(path: MetricPath) -> NormReport:
    """Grid maxima of ``|gamma'|_gamma``, ``|gamma''|_gamma`` and ``|R_gamma|``."""
    if path.t.size < 5:
        raise ResolutionError("path_norms needs at least 5 nodes")
    if path.is_constant:
        R = float(np.max(np.abs(path.slices[0].scalar_curvature())))
        z = np.zeros(path.t.size)
        return NormReport(0.0, 0.0, R, z, z.copy())
    d1 = _segment_derivatives(path, 1)
    d2 = _segment_derivatives(path, 2)
    mults = path.multiplicities
    n1 = np.empty(path.t.size)
    n2 = np.empty(path.t.size)
    supR = 0.0
    for i, m in enumerate(path.slices):
        r1 = [r for _, r in log_rates(m, list(d1[i]))]
        r2 = [r for _, r in log_rates(m, list(d2[i]))]
        n1[i] = float(np.max(_tensor_norm(mults, r1)))
        n2[i] = float(np.max(_tensor_norm(mults, r2)))
        supR = max(supR, float(np.max(np.abs(m.scalar_curvature()))))
    return NormReport(float(n1.max()), float(n2.max()), supR, n1, n2)


# --------------------------------------------------------------------------
# constructions
# --------------------------------------------------------------------------

def _grid(nt: int, length: float = 1.0) -> np.ndarray:
    return np.linspace(0.0, length, nt)


def convex_path(a: SphereMetric, b: SphereMetric, nt: int = DEFAULT_NT) -> MetricPath:
    """Affine path of metric tensors from ``a`` (t=0) to ``b`` (t >= 2/3).

    ``nt - 1`` should be a multiple of 6 so that 2/3 is a node.
    """
    a, b = a.resolve(), b.resolve()
    if not same_grid(a, b):
        raise AlignmentError("convex_path endpoints must share dimension and grid")
    t = _grid(nt)
    if not np.any(np.abs(t - 2.0 / 3.0) < 1e-12):
        raise ResolutionError("the t grid must contain 2/3; use nt = 6k + 1")
    ca = np.array([c for _, c in metric_components(a)])
    cb = np.array([c for _, c in metric_components(b)])
    lam = np.minimum(1.5 * t, 1.0)
    slices = [a if l == 0 else b if l == 1 else
              metric_from_components(a, list((1 - l) * ca + l * cb)) for l in lam]
    corner = float(t[np.argmin(np.abs(t - 2.0 / 3.0))])
    return MetricPath(t, slices, () if same_metric(a, b) else (corner,))


def same_metric(a: SphereMetric, b: SphereMetric) -> bool:
    if not same_grid(a, b):
        return False
    return all(np.array_equal(ca, cb) for (_, ca), (_, cb)
               in zip(metric_components(a), metric_components(b)))


def bump_kernel(x: np.ndarray, sigma: float) -> np.ndarray:
    """Normalized even kernel ``(1 - (x/sigma)^2)^4`` supported in ``(-sigma, sigma)``."""
    y = np.asarray(x, dtype=float) / sigma
    # integral of (1-y^2)^4 over [-1, 1] is 256/315
    return np.where(np.abs(y) < 1, (1 - y * y) ** 4, 0.0) * (315.0 / 256.0) / sigma


def mollify(path: MetricPath, sigma: float, window=(0.5, NEAR_1)) -> MetricPath:
    """Convolve the path with the bump kernel on ``window`` (fractions of length).

    The convolution integrates the piecewise-polynomial interpolant exactly
    (Gauss-Legendre on every node interval).
    """
    if not (0 < sigma <= 1.0 / 6.0):
        raise DomainError("mollification width must satisfy 0 < sigma <= 1/6")
    L = path.length
    lo, hi = window[0] * L, window[1] * L
    s_sig = sigma * L
    if lo - s_sig < -1e-12 or hi + s_sig > L + 1e-12:
        raise DomainError("convolution window leaves the path")
    xg, wg = np.polynomial.legendre.leggauss(8)
    t = path.t
    new = path.samples.copy()
    sel = np.where((t >= lo - 1e-12) & (t <= hi + 1e-12))[0]
    for i in sel:
        a, b = t[i] - s_sig, t[i] + s_sig
        cuts = np.unique(np.concatenate([[a, b], t[(t > a) & (t < b)]]))
        acc = np.zeros(new.shape[1:])
        for p, q in zip(cuts[:-1], cuts[1:]):
            tau = 0.5 * (q - p) * xg + 0.5 * (p + q)
            vals = path.components(tau)
            k = bump_kernel(t[i] - tau, s_sig) * wg * 0.5 * (q - p)
            acc += np.tensordot(k, vals, axes=(0, 0))
        new[i] = acc
    slices = [path.slices[i] if not (lo - 1e-12 <= t[i] <= hi + 1e-12)
              else metric_from_components(path.template, list(new[i])) for i in range(t.size)]
    corners = tuple(c for c in path.corners if not (lo - s_sig < c < hi + s_sig))
    return MetricPath(t, slices, corners)


def one_sided_derivatives(path: MetricPath, t0: float, width: int = 5):
    """Left and right sample derivatives at node ``t0``."""
    i = int(np.argmin(np.abs(path.t - t0)))
    left = slice(i - width + 1, i + 1)
    right = slice(i, i + width)
    wl = fornberg_weights(path.t[left], path.t[i], 1)
    wr = fornberg_weights(path.t[right], path.t[i], 1)
    dl = np.tensordot(wl, path.samples[left], axes=(0, 0))
    dr = np.tensordot(wr, path.samples[right], axes=(0, 0))
    return dl, dr


def flatten_profile(T: float):
    """The reparametrization ``c(t) = (L/2) t^2 - t^3/3`` with ``L = (6T)^{1/3}``."""
    if not T > 0:
        raise DomainError("T must be positive")
    L = np.cbrt(6.0 * T)

    def c(t):
        return 0.5 * L * t ** 2 - t ** 3 / 3.0

    def dc(t):
        return L * t - t ** 2

    return L, c, dc


@dataclass(frozen=True, eq=False)
class FlattenedPath:
    """``t -> gamma(c(t))`` on ``[0, L]`` with the source path kept for the chain rule."""

    source: MetricPath
    T: float
    path: MetricPath

    @property
    def length(self) -> float:
        return self.path.length

    def derivative(self, t: float) -> np.ndarray:
        """Chain-rule derivative of the coefficients at ``t``."""
        L, c, dc = flatten_profile(self.T)
        tau = c(t) / self.T * self.source.length
        return self.source.components(min(tau, self.source.length), 1) * dc(t) * self.source.length / self.T

    def endpoint_derivative_norm(self) -> float:
        t = self.length
        m = self.path.at(t)
        rates = [r for _, r in log_rates(m, list(self.derivative(t)))]
        return float(np.max(_tensor_norm(self.path.multiplicities, rates)))


def flatten_reparametrize(path: MetricPath, T: float, nt: int | None = None) -> FlattenedPath:
    """Reparametrize ``path`` (read on ``[0, T]``) as ``t -> gamma(c(t))``.

    The result lives on ``[0, (6T)^{1/3}]`` and has vanishing derivative at
    the right end.
    """
    L, c, _ = flatten_profile(T)
    nt = path.t.size if nt is None else nt
    t = np.linspace(0.0, L, nt)
    tau = np.clip(c(t) / T, 0.0, 1.0) * path.length
    tau[-1] = path.length
    tau[0] = 0.0
    slices = [path.at(x) for x in tau]
    slices[0], slices[-1] = path.slices[0], path.slices[-1]
    return FlattenedPath(path, float(T), MetricPath(t, slices))


# --------------------------------------------------------------------------
# generators
# --------------------------------------------------------------------------

def constant_path(metric: SphereMetric, nt: int = DEFAULT_NT) -> MetricPath:
    return MetricPath(_grid(nt), [metric.resolve()] * nt)


def round_radius_path(n: int, radius: Callable[[np.ndarray], np.ndarray] | None = None,
                      nt: int = DEFAULT_NT, knots=None) -> MetricPath:
    """Round slices of radius ``radius(t)``, or piecewise linear through ``knots``.

    ``knots`` is a sequence of ``(t, rho)`` pairs; interior knots become
    corners and must be grid nodes.
    """
    t = _grid(nt)
    corners = ()
    if knots is not None:
        kt = np.array([k[0] for k in knots], dtype=float)
        kr = np.array([k[1] for k in knots], dtype=float)
        rho = np.interp(t, kt, kr)
        corners = tuple(float(t[np.argmin(np.abs(t - c))]) for c in kt[1:-1])
    elif radius is not None:
        rho = np.asarray(radius(t), dtype=float) * np.ones_like(t)
    else:
        rho = np.ones_like(t)
    return MetricPath(t, [Round(n, float(r)) for r in rho], corners)


def smoothstep(y):
    """Quintic smoothstep clipped to [0, 1]."""
    y = np.clip(y, 0.0, 1.0)
    return y ** 3 * (10.0 - 15.0 * y + 6.0 * y * y)


def smooth_transition(y):
    """C-infinity step: 0 for y <= 0, 1 for y >= 1."""
    y = np.asarray(y, dtype=float)
    g = lambda z: np.where(z > 0, np.exp(-1.0 / np.where(z > 0, z, 1.0)), 0.0)  # noqa: E731
    a, b = g(y), g(1.0 - y)
    return a / (a + b)


def eccentricity_path(e: float = 1.05, mode: str = "ramp", nt: int = DEFAULT_NT,
                      nx: int = 401) -> MetricPath:
    """Ellipsoids of revolution with polar semi-axis ``e(t)``.

    ``mode="ramp"`` goes from the round sphere to eccentricity ``e``;
    ``mode="bump"`` starts and ends round and peaks at ``e`` in between.
    Both are constant on ``[0, 1/20]`` and ``[5/6, 1]``.
    """
    t = _grid(nt)
    y = (t - NEAR_0) / (NEAR_1 - NEAR_0)
    if mode == "ramp":
        w = smooth_transition(y)
    elif mode == "bump":
        w = smooth_transition(2.0 * y) * smooth_transition(2.0 - 2.0 * y)
    else:
        raise DomainError(f"unknown eccentricity mode {mode!r}")
    slices = [AxisymS2.ellipsoid(1.0 + (e - 1.0) * wi, nx) for wi in w]
    return MetricPath(t, slices)


def path_from_spec(spec: str, metric: SphereMetric | None = None) -> MetricPath:
    """Build a path from a short text description or a JSON file.

    ``const`` (constant at ``metric``), ``round-radius:R0:R1`` (convex path
    between round metrics), ``ecc:E`` (ramp), ``ecc-bump:E`` or a path to a
    JSON document produced by :meth:`MetricPath.to_dict`.
    """
    name, *args = spec.split(":")
    if name == "const":
        if metric is None:
            raise PreconditionError("the constant path needs a base metric")
        return constant_path(metric)
    if name == "round-radius":
        n = 3 if metric is None else metric.n
        r0, r1 = (float(a) for a in args)
        return convex_path(Round(n, r0), Round(n, r1))
    if name == "ecc":
        return eccentricity_path(float(args[0]) if args else 1.05, "ramp")
    if name == "ecc-bump":
        return eccentricity_path(float(args[0]) if args else 1.05, "bump")
    p = Path(spec)
    if p.suffix == ".json" or p.exists():
        with p.open(encoding="utf-8") as fh:
            return MetricPath.from_dict(json.load(fh))
    raise PreconditionError(f"unknown path description {spec!r}")
