"""Explicit neck metrics and their verifiers.

* Schwarzschild bands ``psi(r)^2 (dr^2 + r^2 gamma)`` and their rescaling;
* spherical-cap necks ``dt^2 + c^2 sigma^{-2} sin^{4/n}(n sigma t / 2) gamma``;
* isotopy necks ``e^{2 Lambda t} dt^2 + e^{2B(t)} gamma(t)``;
* collar bends ``dt^2 + (1 + omega kappa)^2 g_hat``;
* the cylinder transition function, the bending profile and the checker
  for the boundary-gluing hypotheses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.optimize import minimize_scalar

from ._numerics import bisect_increasing, differentiate
from .errors import (AlignmentError, DegenerateMetricError, DomainError,
                     NumericalFailure, PreconditionError)
from .manifold import (Round, Scaled, SphereMetric, WarpedBand, fd_band_curvature,
                       gradient_norm2, metric_components, metric_from_components, same_grid)
from .paths import MetricPath, smoothstep

FD_TOL = 1e-4


# --------------------------------------------------------------------------
# Schwarzschild necks
# --------------------------------------------------------------------------

def schwarzschild_psi(r, m: float, n: int):
    """Conformal factor ``(1 + m / (2 r^{n-2}))^{2/(n-2)}``."""
    r = np.asarray(r, dtype=float)
    return (1.0 + m / (2.0 * r ** (n - 2))) ** (2.0 / (n - 2))


def schwarzschild_mean_curvature(r, m: float, n: int):
    """Mean curvature of the coordinate sphere ``r`` in the direction of ``d/dr``."""
    r = np.asarray(r, dtype=float)
    psi = schwarzschild_psi(r, m, n)
    return (n - 1) / r * psi ** (-n / 2.0) * (1.0 - m / (2.0 * r ** (n - 2)))


@dataclass(frozen=True, eq=False)
class SchwarzschildNeck:
    """Schwarzschild band between the spheres ``r1 < r2``.

    The band metric is ``tau2 psi^2 dr^2 + (r psi)^2 gamma``; for ``tau2 = 1``
    this is ``psi^2 (dr^2 + r^2 gamma)``.  ``m`` is the mass parameter of the
    unscaled band.
    """

    n: int
    m: float
    r1: float
    r2: float
    H_outer: float
    h_inner: float
    tau2: float = 1.0
    gamma: SphereMetric | None = None
    flags: dict = field(default_factory=dict)
    verification: dict = field(default_factory=dict)

    @property
    def tau(self) -> float:
        return math.sqrt(self.tau2)

    @property
    def mu(self) -> float:
        return float((self.r1 * self.psi(self.r1)) ** 2)

    @property
    def horizon(self) -> float:
        return (self.m / 2.0) ** (1.0 / (self.n - 2))

    def psi(self, r):
        return schwarzschild_psi(r, self.m, self.n)

    def mean_curvature(self, r):
        """Mean curvature of the slice ``r`` in the direction of increasing ``r``."""
        return schwarzschild_mean_curvature(r, self.m, self.n) / self.tau

    def scalar_curvature(self, r, R_gamma):
        """``r^{-2} psi^{-2} (R_gamma - (n-1)(n-2)/tau2)``."""
        r = np.asarray(r, dtype=float)
        return (np.asarray(R_gamma) - (self.n - 1) * (self.n - 2) / self.tau2) / (r * self.psi(r)) ** 2

    @property
    def residuals(self) -> dict:
        n, tau = self.n, self.tau
        Hu = self.H_outer * tau
        return {
            "mass": self.m - (0.5 - Hu ** 2 / (2.0 * (n - 1) ** 2)),
            "outer_radius": float(self.r2 * self.psi(self.r2) - 1.0),
            "outer_mean_curvature": float(self.mean_curvature(self.r2) - self.H_outer),
            "inner_mean_curvature": float(self.mean_curvature(self.r1) + self.h_inner),
        }

    def band(self, nr: int = 401, gamma: SphereMetric | None = None, pad: int = 2) -> WarpedBand:
        """Discretized band on a geometric grid, padded by ``pad`` cells at each end."""
        gamma = self.gamma if gamma is None else gamma
        if gamma is None:
            gamma = Round(self.n, 1.0)
        q = (self.r2 / self.r1) ** (1.0 / (nr - 1))
        r = self.r1 * q ** np.arange(-pad, nr + pad)
        r[pad], r[pad + nr - 1] = self.r1, self.r2
        psi = self.psi(r)
        slices = [Scaled(gamma, float((ri * pi) ** 2)) for ri, pi in zip(r, psi)]
        return WarpedBand(r, slices, lapse=self.tau * psi)

    def to_dict(self) -> dict:
        return {"kind": "schwarzschild", "n": self.n, "m": self.m, "r1": self.r1, "r2": self.r2,
                "H_outer": self.H_outer, "h_inner": self.h_inner, "tau2": self.tau2, "mu": self.mu,
                "flags": dict(self.flags), "verification": dict(self.verification),
                "residuals": self.residuals}


def _inner_radius(n: int, m: float, h: float) -> float:
    """Root of ``H_r = -h`` nearest the horizon, inside it."""
    rh = (m / 2.0) ** (1.0 / (n - 2))
    if h == 0.0:
        return rh
    f = lambda r: float(schwarzschild_mean_curvature(r, m, n))  # noqa: E731
    opt = minimize_scalar(f, bounds=(1e-6 * rh, rh), method="bounded",
                          options={"xatol": 1e-14 * rh})
    if f(opt.x) > -h:
        raise DomainError(f"inner mean curvature h={h} exceeds the band's range {-f(opt.x):.6g}")
    # H_r increases from its minimum to 0 on [r_min, rh]
    return bisect_increasing(lambda r: f(r) + h, float(opt.x), rh)


def build_schwarzschild_neck(n: int, H: float, h: float, tau2: float = 1.0,
                             gamma: SphereMetric | None = None) -> SchwarzschildNeck:
    """Schwarzschild band with outer mean curvature ``H`` and inner ``h``.

    Parameters
    ----------
    n : int
        Ambient dimension (at least 3).
    H : float
        Outer mean curvature, ``0 < H < n - 1``.
    h : float
        Inner mean curvature (outward from the band), ``0 <= h < H``.
    """
    if n < 3:
        raise DomainError("Schwarzschild necks need n >= 3")
    if not (0 < H < n - 1):
        raise DomainError(f"outer mean curvature must lie in (0, {n - 1}), got {H}")
    if not (0 <= h < H):
        raise DomainError(f"inner mean curvature must lie in [0, H), got {h}")
    m = 0.5 - H ** 2 / (2.0 * (n - 1) ** 2)
    r2 = ((n - 1 + H) / (2.0 * (n - 1))) ** (2.0 / (n - 2))
    r1 = _inner_radius(n, m, h)
    rr = np.linspace(r1, r2, 1000)
    rpsi = rr * schwarzschild_psi(rr, m, n)
    flags = {"r_psi_monotone": bool(np.all(np.diff(rpsi) > 0)),
             "r_psi_max": float(rpsi.max())}
    tau = math.sqrt(tau2)
    return SchwarzschildNeck(n=n, m=m, r1=r1, r2=r2, H_outer=H / tau, h_inner=h / tau,
                             tau2=tau2, gamma=gamma, flags=flags)


def rescale_neck(n: int, gamma: SphereMetric, H: float, h: float, eps: float,
                 nr: int = 401) -> SchwarzschildNeck:
    """Schwarzschild neck on the data ``(gamma, H)`` with controlled scalar curvature.

    The band satisfies ``R >= min R_gamma - (n-2)/(n-1) H^2 - eps``; this is
    checked on the grid both from the closed form and by finite differences.
    """
    if gamma.n != n:
        raise PreconditionError("metric dimension does not match n")
    if not H > 0:
        raise PreconditionError("H > 0 is required")
    minR = float(np.min(gamma.scalar_curvature()))
    gap = minR - (n - 2) / (n - 1) * H ** 2
    if not gap > 0:
        raise PreconditionError(
            f"min R_gamma > (n-2)/(n-1) H^2 violated: {minR:.6g} <= {(n - 2) / (n - 1) * H ** 2:.6g}")
    if not (0 <= h < H):
        raise PreconditionError("0 <= h < H violated")
    if not (0 < eps < gap):
        raise PreconditionError(f"0 < eps < min R_gamma - (n-2)/(n-1) H^2 = {gap:.6g} violated")
    tau2 = (n - 1) * (n - 2) / ((n - 2) * H ** 2 / (n - 1) + eps)
    tau = math.sqrt(tau2)
    neck = build_schwarzschild_neck(n, tau * H, tau * h, tau2=tau2, gamma=gamma)
    bound = gap - eps
    band = neck.band(nr, gamma, pad=2)
    rs = band.s
    inside = slice(2, rs.size - 2)
    R_closed = np.array([neck.scalar_curvature(r, gamma.scalar_curvature()) for r in rs])[inside]
    fd = fd_band_curvature(band)
    R_fd = fd.R[inside]
    verification = {
        "bound": bound,
        "min_R_closed_form": float(R_closed.min()),
        "min_R_fd": float(R_fd.min()),
        "max_fd_error": float(np.max(np.abs(R_fd - R_closed))),
        "mu_below_one": neck.mu < 1.0,
        "grid_points": int(rs.size),
    }
    verification["passed"] = bool(R_closed.min() >= bound * (1 - 1e-12)
                                  and R_fd.min() >= bound - FD_TOL and neck.mu < 1.0)
    object.__setattr__(neck, "verification", verification)
    return neck


# --------------------------------------------------------------------------
# c_mu and spherical-cap necks
# --------------------------------------------------------------------------

def solve_c_mu(n: int, mu: float) -> float:
    """Root ``c`` in (0, 1) of ``x^{1-2/n} = mu (1 - x)``."""
    if n < 3:
        raise DomainError("solve_c_mu needs n >= 3")
    if not (mu > 0 and math.isfinite(mu)):
        raise DomainError(f"mu must be positive, got {mu}")
    p = 1.0 - 2.0 / n
    # work in log form to keep tiny roots at full relative precision
    g = lambda x: p * math.log(x) - math.log(mu) - math.log1p(-x)  # noqa: E731
    lo, hi = 1e-300, 0.5
    while g(hi) < 0:
        hi = 0.5 * (1.0 + hi)
        if hi >= 1.0:
            return float(np.nextafter(1.0, 0.0))
    return bisect_increasing(g, lo, hi)


def mu_of(n: int, lam: float, theta: float) -> float:
    """``((n-1)/n) (theta + n lam^2/(n-1))^{2/n} theta^{1-2/n}``."""
    return (n - 1) / n * (theta + n * lam ** 2 / (n - 1)) ** (2.0 / n) * theta ** (1.0 - 2.0 / n)


@dataclass(frozen=True)
class CapNeck:
    """Spherical-cap neck ``dt^2 + alpha(t)^2 gamma`` on ``[t1, t2]``."""

    n: int
    lam: float
    theta: float
    eps: float
    sigma: float
    c: float
    t1: float
    t2: float
    alpha_eps: float
    mu_eps: float
    c_mu: float

    def alpha(self, t):
        t = np.asarray(t, dtype=float)
        return self.c / self.sigma * np.sin(self.n * self.sigma * t / 2.0) ** (2.0 / self.n)

    def mean_curvature(self, t):
        return (self.n - 1) * self.sigma / np.tan(self.n * self.sigma * np.asarray(t) / 2.0)

    @property
    def residuals(self) -> dict:
        n, s, c = self.n, self.sigma, self.c
        x1, x2 = n * s * self.t1 / 2.0, n * s * self.t2 / 2.0
        return {
            "scalar_curvature": n * (n - 1) * s ** 2 - self.theta,
            "inner_mean_curvature": (n - 1) * s / math.tan(x1) - (self.lam - self.eps),
            "inner_scale": c / s * math.sin(x1) ** (2.0 / n) - 1.0,
            "outer_normalized_mean_curvature": c * (n - 1) / math.tan(x2) * math.sin(x2) ** (2.0 / n) - 1.0,
            "outer_scale": self.alpha_eps - c / s * math.sin(x2) ** (2.0 / n),
            "inner_angle": math.sin(x1) ** 2 - (n - 1) * self.theta / (n * (self.lam - self.eps) ** 2 + (n - 1) * self.theta),
            "closed_form": self.alpha_eps - closed_form_alpha(n, self.lam - self.eps, self.theta, self.c_mu),
        }

    def band(self, gamma: SphereMetric | None = None, nt: int = 201) -> WarpedBand:
        gamma = Round(self.n, 1.0) if gamma is None else gamma
        t = np.linspace(self.t1, self.t2, nt)
        return WarpedBand(t, [Scaled(gamma, float(a ** 2)) for a in self.alpha(t)])

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in ("n", "lam", "theta", "eps", "sigma", "c", "t1", "t2",
                                           "alpha_eps", "mu_eps", "c_mu")}
        d["kind"] = "cap"
        d["residuals"] = self.residuals
        return d


def closed_form_alpha(n: int, lam_eff: float, theta: float, c_mu: float) -> float:
    return ((1.0 - c_mu) * (lam_eff ** 2 + (n - 1) * theta / n)) ** (1.0 / (n - 2))


def build_cap_neck(n: int, lam: float, theta: float, eps: float = 0.0) -> CapNeck:
    """Cap neck amplifying the boundary mean curvature from ``lam - eps`` to 1."""
    if n < 3:
        raise DomainError("cap necks need n >= 3")
    if not lam > 1:
        raise DomainError("lambda > 1 is required")
    if not theta > 0:
        raise DomainError("theta must be positive; theta <= 0 is handled by the trivial branch alpha = 2")
    if not (0 <= eps < lam - 1):
        raise DomainError("0 <= eps < lambda - 1 is required")
    le = lam - eps
    sigma = math.sqrt(theta / (n * (n - 1)))
    x1 = math.atan2((n - 1) * sigma, le)
    t1 = 2.0 * x1 / (n * sigma)
    c = sigma / math.sin(x1) ** (2.0 / n)
    mu = mu_of(n, le, theta)
    cm = solve_c_mu(n, mu)
    x2 = math.asin(math.sqrt(cm))
    t2 = 2.0 * x2 / (n * sigma)
    alpha = c / sigma * math.sin(x2) ** (2.0 / n)
    return CapNeck(n=n, lam=lam, theta=theta, eps=eps, sigma=sigma, c=c, t1=t1, t2=t2,
                   alpha_eps=alpha, mu_eps=mu, c_mu=cm)


# --------------------------------------------------------------------------
# isotopy necks
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class IsotopyNeck:
    """``e^{2 Lambda t} dt^2 + e^{2B(t)} gamma(t)`` over a PSC path."""

    path: MetricPath
    eps0: float
    c0: float
    t: np.ndarray
    B: np.ndarray
    Lambda: float
    Hbar: np.ndarray
    R: np.ndarray
    R_fd: np.ndarray | None = None
    fd_interior: np.ndarray | None = None

    @property
    def mu(self) -> float:
        return float(math.exp(2.0 * self.B[-1]))

    @property
    def eps1(self) -> float:
        return float(math.exp(-self.Lambda) * self.eps0)

    @property
    def min_R(self) -> float:
        return float(self.R.min())

    def band(self) -> WarpedBand:
        slices = [Scaled(self.path.at(ti), float(math.exp(2 * b))) for ti, b in zip(self.t, self.B)]
        return WarpedBand(self.t, slices, lapse=np.exp(self.Lambda * self.t))

    def to_dict(self) -> dict:
        d = {"kind": "isotopy", "eps0": self.eps0, "c0": self.c0, "Lambda": self.Lambda,
             "mu": self.mu, "eps1": self.eps1, "min_R": self.min_R, "nt": int(self.t.size),
             "Hbar_ends": [float(np.min(self.Hbar[0])), float(np.min(self.Hbar[-1]))],
             "min_Hbar": float(self.Hbar.min())}
        if self.R_fd is not None:
            d["min_R_fd"] = float(self.R_fd[self.fd_interior].min())
        d["residuals"] = {"Hbar_0": float(np.max(np.abs(self.Hbar[0] - self.eps0))),
                          "Hbar_1": float(np.max(np.abs(self.Hbar[-1] - self.eps0)))}
        return d


def build_isotopy_neck(path: MetricPath, eps0: float, c0: float, nt: int = 481,
                       max_doublings: int = 40, verify_fd: bool = True) -> IsotopyNeck:
    """Isotopy neck with the smallest power-of-two ``Lambda`` giving ``R > 0``.

    ``B' = (eps0 - min_x tr gamma'/2)/(n-1)`` so that the slice mean
    curvature (along ``d/dt``) is at least ``eps0`` and equals it at both
    ends where the path is constant.
    """
    if not eps0 > 0:
        raise PreconditionError("eps0 must be positive")
    if not (0 < c0 < eps0):
        raise PreconditionError("0 < c0 < eps0 is required")
    if not (path.constant_near_0 and path.constant_near_1):
        raise PreconditionError("the path must be constant near both ends")
    if abs(path.length - 1.0) > 1e-12:
        raise PreconditionError("the path must be parametrized on [0, 1]")
    n = path.n
    for m in path.slices:
        if np.min(m.scalar_curvature()) <= 0:
            raise PreconditionError("the path leaves the positive scalar curvature metrics")
    t = np.linspace(0.0, 1.0, nt)
    metrics = [path.at(ti) for ti in t]
    rates = [path.rates(ti, m) for ti, m in zip(t, metrics)]
    tr = np.array([sum(mult * r1 for mult, r1, _ in rs) for rs in rates])
    mtr = tr.min(axis=1)
    Bp = (eps0 - 0.5 * mtr) / (n - 1)
    Bpp = differentiate(Bp, t, 1)
    B = cumulative_trapezoid(Bp, t, initial=0.0)
    # principal curvatures of e^{2B} gamma(t) along d/dt
    kap = [np.array([Bp[i] + 0.5 * rates[i][d][1] for i in range(nt)]) for d in range(len(rates[0]))]
    mults = [mult for mult, _, _ in rates[0]]
    Hbar = sum(mult * k for mult, k in zip(mults, kap))
    A2 = sum(mult * k ** 2 for mult, k in zip(mults, kap))
    dtr = np.array([sum(mult * (r2 - r1 ** 2) for mult, r1, r2 in rs) for rs in rates])
    dH = (n - 1) * Bpp[:, None] + 0.5 * dtr
    Rhat = np.array([m.scalar_curvature() * math.exp(-2 * b) for m, b in zip(metrics, B)])
    Rbar = Rhat - 2.0 * dH - Hbar ** 2 - A2
    if Hbar.min() < c0:
        raise NumericalFailure("slice mean curvature dropped below c0", {"min_Hbar": float(Hbar.min())})
    tt = t[:, None]
    Lam, R = None, None
    worst = None
    for k in range(max_doublings + 1):
        L = 2.0 ** k
        e = np.exp(-2.0 * L * tt)
        Rg = e * (2.0 * L * Hbar + Rbar) + (1.0 - e) * Rhat
        if Rg.min() > 0:
            Lam, R = L, Rg
            break
        worst = float(t[np.unravel_index(np.argmin(Rg), Rg.shape)[0]])
    if Lam is None:
        raise NumericalFailure("no Lambda <= 2^40 makes the band positive", {"limiting_t": worst})
    neck = IsotopyNeck(path=path, eps0=eps0, c0=c0, t=t, B=B, Lambda=Lam, Hbar=Hbar, R=R)
    if verify_fd:
        fd = fd_band_curvature(neck.band())
        object.__setattr__(neck, "R_fd", fd.R)
        object.__setattr__(neck, "fd_interior", fd.interior)
    return neck


# --------------------------------------------------------------------------
# collar bend
# --------------------------------------------------------------------------

def default_kappa(K: float):
    """``kappa(t) = -t - K t^2 / 2`` and its first two derivatives."""
    return (lambda t: -t - 0.5 * K * t ** 2,
            lambda t: -1.0 - K * t,
            lambda t: -K * np.ones_like(np.asarray(t, dtype=float)))


@dataclass(frozen=True, eq=False)
class CollarBend:
    """Bending data for ``dt^2 + (1 + omega kappa(t))^2 g_hat(t)`` on ``t <= 0``.

    ``base`` is the product-type band ``dt^2 + g_hat(t)`` over ``[-t0, 0]``
    (lapse 1, outward direction ``+t``); ``omega`` is a field on the slice
    grid; ``kappa`` is ``(kappa, kappa', kappa'')`` as callables.
    """

    base: WarpedBand
    omega: np.ndarray
    K: float = 10.0
    t1: float = 0.1
    kappa: tuple | None = None

    def __post_init__(self):
        if np.max(np.abs(self.base.lapse - 1.0)) > 0:
            raise PreconditionError("the collar base must have unit lapse")
        if self.base.s[-1] != 0.0:
            raise PreconditionError("the collar base must end at t = 0")
        om = self.base.slices[0].field(self.omega)
        if np.any(om <= 0):
            raise PreconditionError("omega must be positive")
        object.__setattr__(self, "omega", om)
        if self.kappa is None:
            object.__setattr__(self, "kappa", default_kappa(self.K))
        k, dk, d2k = self.kappa
        if abs(float(k(0.0))) > 1e-12 or abs(float(dk(0.0)) + 1.0) > 1e-12:
            raise PreconditionError("kappa(0) = 0 and kappa'(0) = -1 are required")
        tw = self.base.s[self.base.s >= -self.t1]
        if np.max(d2k(tw)) >= 0:
            raise PreconditionError("kappa'' must be negative on the bending interval")

    @classmethod
    def from_target(cls, base: WarpedBand, H_target, **kw) -> "CollarBend":
        """Choose ``omega = (H_base(0) - H_target)/(n-1)``."""
        fd = fd_band_curvature(base)
        omega = (fd.H[-1] - base.slices[-1].field(H_target)) / (base.n - 1)
        return cls(base, omega, **kw)


@dataclass(frozen=True, eq=False)
class CollarResult:
    band: WarpedBand
    R: np.ndarray
    H: np.ndarray
    base_R: np.ndarray
    base_H: np.ndarray


def collar_bend(bend: CollarBend, n: int | None = None) -> CollarResult:
    """Bent band, its scalar curvature by the expansion, and slice mean curvatures.

    ``R4 = R3 - 2(n-1) w k''/p - (n-1)(n-2) w^2 k'^2/p^2 - w k (2 + w k) Rhat/p^2
    - 2(n-2) k Lap(w)/p^3 - (n-2)(n-5) k^2 |grad w|^2/p^4 - 2n w k' H3/p`` with
    ``p = 1 + w k`` and slice operators of ``g_hat``.
    """
    base = bend.base
    n = base.n if n is None else n
    t = base.s
    w = bend.omega[None, :]
    k, dk, d2k = (np.asarray(f(t), dtype=float)[:, None] * np.ones_like(w) for f in bend.kappa)
    p = 1.0 + w * k
    if np.any(p <= 0):
        raise DegenerateMetricError("1 + omega kappa must stay positive")
    fd = fd_band_curvature(base)
    R3, H3 = fd.R, fd.H
    m0 = base.slices[0]
    Rhat = np.array([m.scalar_curvature() for m in base.slices])
    lap = np.array([m.laplacian(bend.omega) for m in base.slices])
    grad2 = np.array([gradient_norm2(m, bend.omega) for m in base.slices])
    R4 = (R3 - 2 * (n - 1) * w * d2k / p - (n - 1) * (n - 2) * (w * dk / p) ** 2
          - w * k * (2 + w * k) * Rhat / p ** 2 - 2 * (n - 2) * k * lap / p ** 3
          - (n - 2) * (n - 5) * k ** 2 * grad2 / p ** 4 - 2 * n * w * dk * H3 / p)
    H4 = H3 + (n - 1) * w * dk / p
    slices = []
    for i, m in enumerate(base.slices):
        comps = [c * p[i] ** 2 if c.size > 1 else c * p[i, 0] ** 2 for _, c in metric_components(m)]
        slices.append(metric_from_components(m, comps))
    if isinstance(m0, Round) and np.ptp(bend.omega) > 0:
        raise PreconditionError("omega must be constant on round slices")
    band = WarpedBand(t, slices)
    return CollarResult(band=band, R=R4, H=H4, base_R=R3, base_H=H3)


# --------------------------------------------------------------------------
# transition function, bending profile, gluing hypotheses
# --------------------------------------------------------------------------

def ramp(x):
    """Quintic smoothstep on [1, 2]: 0 for x <= 1, 1 for x >= 2."""
    return smoothstep(np.asarray(x, dtype=float) - 1.0)


def ramp_derivatives(x):
    y = np.clip(np.asarray(x, dtype=float) - 1.0, 0.0, 1.0)
    return 30 * y ** 2 * (1 - y) ** 2, 60 * y * (1 - y) * (1 - 2 * y)


def transition_function(r: float, alpha: float, s) -> np.ndarray:
    """``alpha + (1 - alpha) ramp(s / r)``."""
    if not r > 0:
        raise DomainError("r must be positive")
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    return alpha + (1.0 - alpha) * ramp(np.asarray(s, dtype=float) / r)


@dataclass(frozen=True)
class BendingCertificate:
    alpha: float
    beta: float
    dw_dnu: float
    bound: np.ndarray = field(repr=False)
    eps: float = 0.0

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "dw_dnu": self.dw_dnu,
                "max_bound": float(self.bound.max()), "eps": self.eps}


def bending_profile(d, C1: float):
    """``w = (1 - beta d)^alpha - 1`` with ``beta = 2 C1``, ``alpha = 1/4``.

    Returns ``w`` and a certificate holding ``dw/dnu`` at ``d = 0`` and the
    upper bound ``2 alpha C1^2 (1 - beta d)^{alpha-2} (2 alpha - 1 - beta d)``
    on the grid, together with ``eps = -max(bound)``.
    """
    if not C1 > 0:
        raise DomainError("C1 must be positive")
    d = np.asarray(d, dtype=float)
    alpha, beta = 0.25, 2.0 * C1
    if np.any(d < 0) or beta * float(np.max(d)) >= 0.5:
        raise DomainError("need 0 <= d and beta * max(d) < 1/2")
    q = 1.0 - beta * d
    w = q ** alpha - 1.0
    bound = 2 * alpha * C1 ** 2 * q ** (alpha - 2) * (2 * alpha - 1 - beta * d)
    cert = BendingCertificate(alpha, beta, alpha * beta, bound, float(-bound.max()))
    return w, cert


@dataclass(frozen=True)
class GluingReport:
    metric_gap: float
    mean_curvature_gap: float
    min_R: float
    gap_field: np.ndarray = field(repr=False)

    @property
    def passed(self) -> bool:
        return self.metric_gap < 1e-10 and self.mean_curvature_gap > 0

    def to_dict(self) -> dict:
        return {"metric_gap": self.metric_gap, "mean_curvature_gap": self.mean_curvature_gap,
                "min_R": self.min_R, "passed": self.passed}


def check_bmn_hypotheses(g_band: WarpedBand, gt_band: WarpedBand) -> GluingReport:
    """Compare two bands at their common boundary slice.

    Reports the largest boundary metric discrepancy (slice coefficients and
    squared lapse), the minimum of ``H_g - H_gt`` and the minimum scalar
    curvature over both bands.
    """
    if g_band.orientation != gt_band.orientation:
        raise AlignmentError("bands disagree on the outward direction")
    i = -1 if g_band.orientation == 1 else 0
    a, b = g_band.slices[i], gt_band.slices[i]
    if not same_grid(a, b) or g_band.s[i] != gt_band.s[i]:
        raise AlignmentError("bands do not share the boundary slice grid")
    gap = max(float(np.max(np.abs(ca - cb))) for (_, ca), (_, cb)
              in zip(metric_components(a), metric_components(b)))
    gap = max(gap, float(np.max(np.abs(g_band.lapse[i] ** 2 - gt_band.lapse[i] ** 2))))
    f1, f2 = fd_band_curvature(g_band), fd_band_curvature(gt_band)
    o = g_band.orientation
    hgap = o * (f1.H[i] - f2.H[i])
    minR = min(float(f1.R[f1.interior].min()), float(f2.R[f2.interior].min()))
    return GluingReport(gap, float(hgap.min()), minR, hgap)
