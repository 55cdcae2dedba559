"""Discretized sphere geometry.

Metrics on S^{n-1}: :class:`Round` (any n), :class:`AxisymS2`
(n = 3, ``a(x)^2 dx^2 + b(x)^2 dphi^2`` on a uniform grid in ``x``) and
:class:`Scaled` copies.  Scalar fields are 1-D arrays aligned with the
metric grid; on a round metric a field is a length-1 array.

Also provides the warped band ``u^2 ds^2 + g_s`` and its finite-difference
scalar curvature, the first eigenpair of ``-Lap + R/2`` and the conformal
transformation laws.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np
import scipy.integrate
import scipy.linalg
import scipy.sparse

from ._numerics import differentiate, even_pole_extrapolate
from .errors import (AlignmentError, DegenerateMetricError, DomainError,
                     NumericalFailure, PreconditionError, ResolutionError)

POLE_TOL = 1e-6
DEFAULT_NX = 401


def sphere_area(n: int, radius: float = 1.0) -> float:
    """Area of the round sphere S^{n-1} of the given radius."""
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2) * radius ** (n - 1)


def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n."""
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def conformal_constant(n: int) -> float:
    """c_n = 4(n-1)/(n-2)."""
    if n < 3:
        raise DomainError("conformal constant needs n >= 3")
    return 4.0 * (n - 1) / (n - 2)


# --------------------------------------------------------------------------
# metrics
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Round:
    """Round metric of radius ``radius`` on S^{n-1}."""

    n: int
    radius: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"dimension n must be an integer >= 2, got {self.n}")
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise DegenerateMetricError(f"radius must be positive, got {self.radius}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "radius", float(self.radius))

    kind = "round"
    size = 1
    grid = None

    def field(self, values) -> np.ndarray:
        v = np.atleast_1d(np.asarray(values, dtype=float))
        if v.size == 1:
            return v.reshape(1)
        if np.ptp(v) == 0.0:
            return v[:1].copy()
        raise ResolutionError("only constant fields are representable on a Round metric")

    def scalar_curvature(self) -> np.ndarray:
        return np.array([(self.n - 1) * (self.n - 2) / self.radius ** 2])

    def laplacian(self, u) -> np.ndarray:
        self.field(u)
        return np.zeros(1)

    def laplacian_matrix(self):
        return scipy.sparse.csr_matrix((1, 1))

    def integrate(self, f) -> float:
        return float(self.field(f)[0]) * self.area()

    def area(self) -> float:
        return sphere_area(self.n, self.radius)

    def resolve(self) -> "Round":
        return self

    def to_dict(self) -> dict:
        return {"kind": "round", "n": self.n, "radius": self.radius}


def _pad(f: np.ndarray, parity: int, k: int = 2) -> np.ndarray:
    """Extend samples on [0, pi] by ``k`` ghost nodes using pole parity."""
    left = parity * f[k:0:-1]
    right = parity * f[-2:-k - 2:-1]
    return np.concatenate([left, f, right])


def _d1(f: np.ndarray, h: float, parity: int) -> np.ndarray:
    """Fourth-order centered derivative with parity ghost nodes."""
    p = _pad(f, parity)
    return (-p[4:] + 8.0 * p[3:-1] - 8.0 * p[1:-3] + p[:-4]) / (12.0 * h)


def _mid(f: np.ndarray, parity: int) -> np.ndarray:
    """Fourth-order interpolation to the half nodes x_{i+1/2}."""
    p = _pad(f, parity, 1)
    return (9.0 * (p[1:-2] + p[2:-1]) - (p[:-3] + p[3:])) / 16.0


@dataclass(frozen=True, eq=False)
class AxisymS2:
    """Axisymmetric metric ``a(x)^2 dx^2 + b(x)^2 dphi^2`` on S^2.

    Parameters
    ----------
    x : array
        Uniform grid on ``[0, pi]``.
    b : array
        Rotational profile, positive inside, zero at both poles.
    a : array, optional
        Meridian stretch, positive; defaults to 1 (arc-length form).
    """

    x: np.ndarray
    b: np.ndarray
    a: np.ndarray = None

    kind = "axisym"
    n = 3

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        b = np.array(self.b, dtype=float)
        a = np.ones_like(x) if self.a is None else np.array(self.a, dtype=float)
        if x.ndim != 1 or x.size < 9:
            raise ResolutionError("AxisymS2 needs a 1-D grid with at least 9 nodes")
        if b.shape != x.shape or a.shape != x.shape:
            raise AlignmentError("profile arrays must match the x grid")
        h = math.pi / (x.size - 1)
        if abs(x[0]) > 1e-12 or abs(x[-1] - math.pi) > 1e-12 or np.max(np.abs(np.diff(x) - h)) > 1e-9 * h:
            raise ResolutionError("AxisymS2 grid must be uniform on [0, pi]")
        scale = np.max(np.abs(b))
        if abs(b[0]) > 1e-10 * scale or abs(b[-1]) > 1e-10 * scale:
            raise DegenerateMetricError("profile b must vanish at both poles")
        b[0] = b[-1] = 0.0
        if np.any(b[1:-1] <= 0) or np.any(a <= 0) or not np.all(np.isfinite(b) & np.isfinite(a)):
            raise DegenerateMetricError("profile must be positive away from the poles")
        for arr, name in ((x, "x"), (b, "b"), (a, "a")):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        db = _d1(b, h, -1)
        s0, s1 = db[0] / a[0], db[-1] / a[-1]
        if abs(s0 - 1.0) > POLE_TOL or abs(s1 + 1.0) > POLE_TOL:
            raise DegenerateMetricError(
                f"pole regularity violated: b'/a = {s0:.3e} at x=0 and {s1:.3e} at x=pi")

    # construction helpers
    @classmethod
    def from_function(cls, bfunc, nx: int = DEFAULT_NX, afunc=None) -> "AxisymS2":
        x = np.linspace(0.0, math.pi, nx)
        b = np.asarray(bfunc(x), dtype=float)
        a = None if afunc is None else np.asarray(afunc(x), dtype=float)
        return cls(x, b, a)

    @classmethod
    def round(cls, radius: float = 1.0, nx: int = DEFAULT_NX) -> "AxisymS2":
        return cls.from_function(lambda x: radius * np.sin(x), nx,
                                 lambda x: radius * np.ones_like(x))

    @classmethod
    def ellipsoid(cls, e: float, nx: int = DEFAULT_NX) -> "AxisymS2":
        """Ellipsoid of revolution with polar semi-axis ``e`` (1 is round)."""
        return cls.from_function(np.sin, nx, lambda x: np.sqrt(np.cos(x) ** 2 + e ** 2 * np.sin(x) ** 2))

    @property
    def h(self) -> float:
        return math.pi / (self.x.size - 1)

    @property
    def size(self) -> int:
        return self.x.size

    @property
    def grid(self) -> np.ndarray:
        return self.x

    def field(self, values) -> np.ndarray:
        v = np.asarray(values, dtype=float)
        if v.ndim == 0 or v.size == 1:
            return np.full(self.size, float(v.reshape(-1)[0]))
        if v.shape != self.x.shape:
            raise AlignmentError(f"field of length {v.size} on a grid of {self.size} nodes")
        return v

    def scalar_curvature(self) -> np.ndarray:
        h, a, b = self.h, self.a, self.b
        q = _d1(b, h, -1) / a
        dq = _d1(q, h, 1)
        K = np.empty_like(b)
        K[1:-1] = -dq[1:-1] / (a[1:-1] * b[1:-1])
        K[0] = even_pole_extrapolate(K[1], K[2], K[3])
        K[-1] = even_pole_extrapolate(K[-2], K[-3], K[-4])
        return 2.0 * K

    def _symmetric_form(self):
        """Return ``(c, w)``: ``Lap u = (c_{+}(u_{+}-u) - c_{-}(u-u_{-})) / w``."""
        h, a, b = self.h, self.a, self.b
        c = _mid(b, -1) / _mid(a, 1) / h ** 2
        w = a * b
        w = w.copy()
        w[0] = a[0] ** 2 * h / 8.0
        w[-1] = a[-1] ** 2 * h / 8.0
        return c, w

    def laplacian_diagonals(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Sub-, main and super-diagonal of the (tridiagonal) Laplacian matrix."""
        c, w = self._symmetric_form()
        main = np.zeros(self.size)
        main[:-1] -= c
        main[1:] -= c
        return c / w[1:], main / w, c / w[:-1]

    def laplacian_matrix(self) -> scipy.sparse.csr_matrix:
        lo, main, up = self.laplacian_diagonals()
        return scipy.sparse.diags([lo, main, up], [-1, 0, 1], format="csr")

    def laplacian(self, u) -> np.ndarray:
        u = self.field(u)
        c, w = self._symmetric_form()
        flux = c * np.diff(u)
        out = np.zeros_like(u)
        out[:-1] += flux
        out[1:] -= flux
        return out / w

    def integrate(self, f) -> float:
        f = self.field(f)
        return 2.0 * math.pi * float(scipy.integrate.simpson(f * self.a * self.b, x=self.x))

    def area(self) -> float:
        return self.integrate(1.0)

    def resolve(self) -> "AxisymS2":
        return self

    def to_dict(self) -> dict:
        return {"kind": "axisym", "n": 3, "x": self.x.tolist(), "b": self.b.tolist(), "a": self.a.tolist()}


@dataclass(frozen=True, eq=False)
class Scaled:
    """The metric ``factor * base``."""

    base: Union[Round, AxisymS2]
    factor: float

    def __post_init__(self):
        if isinstance(self.base, Scaled):
            raise DomainError("Scaled metrics may not be nested")
        if not (self.factor > 0 and math.isfinite(self.factor)):
            raise DegenerateMetricError(f"scale factor must be positive, got {self.factor}")
        object.__setattr__(self, "factor", float(self.factor))

    kind = "scaled"

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def size(self) -> int:
        return self.base.size

    @property
    def grid(self):
        return self.base.grid

    def field(self, values) -> np.ndarray:
        return self.base.field(values)

    def scalar_curvature(self) -> np.ndarray:
        return self.base.scalar_curvature() / self.factor

    def laplacian(self, u) -> np.ndarray:
        return self.base.laplacian(u) / self.factor

    def laplacian_matrix(self):
        return self.base.laplacian_matrix() / self.factor

    def integrate(self, f) -> float:
        return self.base.integrate(f) * self.factor ** ((self.n - 1) / 2)

    def area(self) -> float:
        return self.integrate(1.0)

    def resolve(self) -> Union[Round, AxisymS2]:
        k = math.sqrt(self.factor)
        if isinstance(self.base, Round):
            return Round(self.base.n, self.base.radius * k)
        return AxisymS2(self.base.x, self.base.b * k, self.base.a * k)

    def to_dict(self) -> dict:
        return {"kind": "scaled", "factor": self.factor, "base": self.base.to_dict()}


SphereMetric = Union[Round, AxisymS2, Scaled]


def metric_from_dict(d: dict) -> SphereMetric:
    kind = d.get("kind")
    if kind == "round":
        return Round(int(d["n"]), float(d.get("radius", 1.0)))
    if kind == "axisym":
        return AxisymS2(np.asarray(d["x"]), np.asarray(d["b"]),
                        None if d.get("a") is None else np.asarray(d["a"]))
    if kind == "scaled":
        return Scaled(metric_from_dict(d["base"]), float(d["factor"]))
    raise DomainError(f"unknown metric kind {kind!r}")


def same_grid(m1: SphereMetric, m2: SphereMetric) -> bool:
    if m1.n != m2.n or m1.size != m2.size:
        return False
    g1, g2 = m1.grid, m2.grid
    if g1 is None or g2 is None:
        return g1 is None and g2 is None
    return bool(np.array_equal(g1, g2))


def metric_components(metric: SphereMetric):
    """Diagonal metric coefficients as ``[(multiplicity, array), ...]``."""
    m = metric.resolve()
    if isinstance(m, Round):
        return [(m.n - 1, np.array([m.radius ** 2]))]
    return [(1, m.a ** 2), (1, m.b ** 2)]


def metric_from_components(template: SphereMetric, comps: Sequence[np.ndarray]) -> SphereMetric:
    """Inverse of :func:`metric_components` on the grid of ``template``."""
    m = template.resolve()
    if isinstance(m, Round):
        return Round(m.n, float(np.sqrt(comps[0][0])))
    b = np.sqrt(np.maximum(comps[1], 0.0))
    b[0] = b[-1] = 0.0
    return AxisymS2(m.x, b, np.sqrt(comps[0]))


def log_rates(metric: SphereMetric, dcomps: Sequence[np.ndarray]):
    """Ratios ``dc_i / c_i`` with the pole limit of the rotational direction.

    At the poles ``b^2 / a^2 -> x^2`` so both directions share the rate of
    ``a^2`` there.
    """
    comps = metric_components(metric)
    out = []
    for (mult, c), dc in zip(comps, dcomps):
        r = np.zeros(c.shape)
        np.divide(dc, c, out=r, where=c > 0)
        out.append((mult, r))
    if len(out) == 2:
        out[1][1][0] = out[0][1][0]
        out[1][1][-1] = out[0][1][-1]
    return out


# --------------------------------------------------------------------------
# module-level operations
# --------------------------------------------------------------------------

def scalar_curvature(metric: SphereMetric) -> np.ndarray:
    """Scalar curvature of a sphere metric as a field on its grid."""
    return metric.scalar_curvature()


def laplace_beltrami(metric: SphereMetric, field) -> np.ndarray:
    """Laplace-Beltrami operator applied to ``field``."""
    return metric.laplacian(field)


def gradient_norm2(metric: SphereMetric, field) -> np.ndarray:
    """Pointwise ``|grad f|^2`` with respect to ``metric``."""
    m = metric.resolve()
    f = m.field(field)
    if isinstance(m, Round):
        return np.zeros(1)
    df = _d1(f, m.h, 1)
    return df ** 2 / m.a ** 2


def integrate(metric: SphereMetric, field) -> float:
    """Integral of ``field`` against the area form of ``metric``."""
    return metric.integrate(field)


# --------------------------------------------------------------------------
# eigenvalue problem
# --------------------------------------------------------------------------

def _generalized_form(m: AxisymS2):
    """Symmetric tridiagonal stiffness (bands) and mass weights for ``-Lap + R/2``."""
    c, w = m._symmetric_form()
    R = m.scalar_curvature()
    diag = np.zeros(m.size)
    diag[:-1] += c
    diag[1:] += c
    diag += w * R / 2.0
    return diag, -c, w, R


def lambda1(metric: SphereMetric, tol: float = 1e-8, maxiter: int = 20000):
    """First eigenpair of ``-Lap + R/2`` by shifted inverse iteration.

    Returns
    -------
    lam : float
        Eigenvalue.
    f : ndarray
        Positive eigenfunction with ``max f = 1``.
    """
    m = metric.resolve()
    if isinstance(m, Round):
        return float(m.scalar_curvature()[0] / 2.0), np.ones(1)
    diag, off, w, R = _generalized_form(m)
    sigma = R.min() / 2.0 - 0.1
    ab = np.zeros((2, m.size))
    ab[0, 1:] = off
    ab[1] = diag - sigma * w
    chol = scipy.linalg.cholesky_banded(ab)

    def apply(f):
        out = diag * f
        out[:-1] += off * f[1:]
        out[1:] += off * f[:-1]
        return out

    f = np.ones(m.size)
    lam = np.nan
    res = np.inf
    for it in range(maxiter):
        f = scipy.linalg.cho_solve_banded((chol, False), w * f)
        f /= np.max(np.abs(f))
        Af = apply(f)
        lam = float(f @ Af / (f @ (w * f)))
        res = float(np.max(np.abs(Af / w - lam * f)))
        if res <= 1e-2 * tol and it > 2:
            break
    if res > tol:
        raise NumericalFailure("inverse iteration did not converge",
                               {"residual": res, "iterations": maxiter, "lambda": lam})
    if f[np.argmax(np.abs(f))] < 0:
        f = -f
    return lam, f


def lambda1_dense(metric: SphereMetric):
    """Dense symmetric eigensolve of the same discretized operator (oracle)."""
    m = metric.resolve()
    if isinstance(m, Round):
        return float(m.scalar_curvature()[0] / 2.0), np.ones(1)
    diag, off, w, _ = _generalized_form(m)
    s = 1.0 / np.sqrt(w)
    d = diag * s * s
    e = off * s[:-1] * s[1:]
    vals, vecs = scipy.linalg.eigh_tridiagonal(d, e, select="i", select_range=(0, 0))
    f = vecs[:, 0] * s
    f /= f[np.argmax(np.abs(f))]
    return float(vals[0]), f


# --------------------------------------------------------------------------
# conformal transformation laws
# --------------------------------------------------------------------------

def conformal_scalar(R, u, lap_u, n: int) -> np.ndarray:
    """Scalar curvature of ``u^{4/(n-2)} g`` from ``R_g``, ``u`` and ``Lap_g u``."""
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0):
        raise DomainError("conformal factor must be positive")
    cn = conformal_constant(n)
    return u ** (-(n + 2) / (n - 2)) * (np.asarray(R) * u - cn * np.asarray(lap_u))


def conformal_mean(H, normal_derivative, n: int) -> np.ndarray:
    """Boundary mean curvature after a conformal change with ``u = 1`` on the boundary."""
    return np.asarray(H, dtype=float) + conformal_constant(n) / 2.0 * np.asarray(normal_derivative, dtype=float)


# --------------------------------------------------------------------------
# warped bands
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WarpedBand:
    """The metric ``u(s,.)^2 ds^2 + g_s`` on ``S^{n-1} x [s_lo, s_hi]``.

    Parameters
    ----------
    s : array
        Strictly increasing coordinate samples (at least 4).
    slices : sequence of SphereMetric
        Slice metrics ``g_s``, all on one grid.
    lapse : array, optional
        Shape ``(ns,)`` or ``(ns, size)``; defaults to 1.
    orientation : int
        +1 if the outward direction is increasing ``s``.
    """

    s: np.ndarray
    slices: tuple
    lapse: np.ndarray = None
    orientation: int = 1

    def __post_init__(self):
        s = np.array(self.s, dtype=float)
        slices = tuple(m.resolve() for m in self.slices)
        if s.ndim != 1 or s.size < 4:
            raise ResolutionError("a band needs at least 4 slices")
        if len(slices) != s.size:
            raise AlignmentError("one slice metric per s sample is required")
        if np.any(np.diff(s) <= 0):
            raise PreconditionError("band coordinate must be strictly increasing")
        first = slices[0]
        if any(not same_grid(first, m) for m in slices[1:]):
            raise AlignmentError("band slices must share one grid")
        size = first.size
        u = np.ones(s.size) if self.lapse is None else np.array(self.lapse, dtype=float)
        if u.ndim == 1:
            if u.size != s.size:
                raise AlignmentError("lapse length differs from the s grid")
            u = np.repeat(u[:, None], size, axis=1)
        if u.shape != (s.size, size):
            raise AlignmentError(f"lapse shape {u.shape} does not match ({s.size}, {size})")
        if np.any(u <= 0):
            raise DegenerateMetricError("lapse must be positive")
        if self.orientation not in (1, -1):
            raise DomainError("orientation must be +1 or -1")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "slices", slices)
        object.__setattr__(self, "lapse", u)

    @property
    def n(self) -> int:
        return self.slices[0].n

    @property
    def size(self) -> int:
        return self.slices[0].size


@dataclass(frozen=True, eq=False)
class BandCurvature:
    """Finite-difference geometry of a band.

    ``R`` is the scalar curvature, ``H`` and ``norm_A2`` the mean curvature and
    squared second fundamental form of each slice with respect to the unit
    normal ``u^{-1} d/ds``, ``principal`` the principal curvatures as
    ``[(multiplicity, array (ns, size)), ...]``.  ``extrapolated`` marks slices
    whose s-derivatives come from one-sided stencils.
    """

    R: np.ndarray
    H: np.ndarray
    norm_A2: np.ndarray
    principal: list
    extrapolated: np.ndarray = field(repr=False)

    @property
    def interior(self) -> np.ndarray:
        return ~self.extrapolated


def fd_band_curvature(band: WarpedBand) -> BandCurvature:
    """Scalar curvature of a warped band by finite differences in ``s``.

    Uses ``R = R_slice - 2 u^{-1} dH/ds - H^2 - |A|^2 - 2 Lap_slice(u)/u`` with
    ``A = (2u)^{-1} d g_s / ds``.  Derivatives in ``s`` use five-point
    stencils (one-sided near the ends, flagged as extrapolated).
    """
    s, u = band.s, band.lapse
    comps = [metric_components(m) for m in band.slices]
    ndir = len(comps[0])
    principal = []
    for d in range(ndir):
        mult = comps[0][d][0]
        c = np.array([cm[d][1] for cm in comps])
        principal.append((mult, c))
    dcs = [differentiate(c, s, 1, axis=0) for _, c in principal]
    rates = [log_rates(m, [dc[i] for dc in dcs]) for i, m in enumerate(band.slices)]
    kappa = []
    for d in range(ndir):
        r = np.array([rates[i][d][1] for i in range(s.size)])
        kappa.append((principal[d][0], r / (2.0 * u)))
    H = sum(mult * k for mult, k in kappa)
    A2 = sum(mult * k ** 2 for mult, k in kappa)
    dH = differentiate(H, s, 1, axis=0)
    Rhat = np.array([m.scalar_curvature() for m in band.slices])
    lap = np.array([m.laplacian(u[i]) if m.size > 1 else np.zeros(1)
                    for i, m in enumerate(band.slices)])
    R = Rhat - 2.0 * dH / u - H ** 2 - A2 - 2.0 * lap / u
    ext = np.zeros(s.size, dtype=bool)
    k = min(2, s.size // 2)
    ext[:k] = True
    ext[-k:] = True
    return BandCurvature(R=R, H=H, norm_A2=A2, principal=kappa, extrapolated=ext)


# --------------------------------------------------------------------------
# CSV input/output
# --------------------------------------------------------------------------

def _read_columns(path, names: Sequence[str]) -> dict:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or any(k not in reader.fieldnames for k in names):
            raise PreconditionError(f"{path}: expected CSV header with columns {','.join(names)}")
        rows = list(reader)
    return {k: np.array([float(r[k]) for r in rows]) for k in names}


def read_profile_csv(path) -> AxisymS2:
    """Read an axisymmetric profile from CSV columns ``x,b`` and optionally ``a``."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), [])
    names = ["x", "b", "a"] if "a" in header else ["x", "b"]
    cols = _read_columns(path, names)
    return AxisymS2(cols["x"], cols["b"], cols.get("a"))


def read_field_csv(path, metric: SphereMetric | None = None) -> np.ndarray:
    """Read a scalar field from a CSV file with header ``x,value``."""
    cols = _read_columns(path, ["x", "value"])
    if metric is not None and metric.grid is not None:
        if cols["x"].size != metric.size or np.max(np.abs(cols["x"] - metric.grid)) > 1e-9:
            raise AlignmentError(f"{path}: field grid does not match the metric grid")
    return cols["value"]


def write_profile_csv(metric: AxisymS2, path) -> None:
    """Write ``x,b,a`` rows readable by :func:`read_profile_csv`."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "b", "a"])
        for x, b, a in zip(metric.x, metric.b, metric.a):
            w.writerow([repr(float(x)), repr(float(b)), repr(float(a))])


def write_band_csv(band: WarpedBand, path, R: np.ndarray | None = None) -> None:
    """Write band samples as CSV rows ``s,x,u,b,R``."""
    if R is None:
        R = fd_band_curvature(band).R
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["s", "x", "u", "b", "R"])
        for i, m in enumerate(band.slices):
            if isinstance(m, Round):
                xs, bs = [0.0], [m.radius]
            else:
                xs, bs = m.x, m.b
            for j, (x, b) in enumerate(zip(xs, bs)):
                w.writerow([f"{band.s[i]:.17g}", f"{x:.17g}", f"{band.lapse[i, j]:.17g}",
                            f"{b:.17g}", f"{R[i, j]:.17g}"])
