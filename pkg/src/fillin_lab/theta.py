"""Bounds on the fill-in invariant ``theta(Sigma, gamma, H)``.

``theta`` is the supremum over fill-ins of the infimum of scalar curvature.
It is not computable directly, so this module works with closed forms,
amplification factors, decay envelopes and lower bounds.  Each result is
returned as a :class:`ThetaBound` that carries the hypotheses it checked.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from ._numerics import bisect_increasing
from .errors import DomainError, NumericalFailure, PreconditionError
from .manifold import SphereMetric, WarpedBand, fd_band_curvature, lambda1
from .necks import closed_form_alpha, mu_of, solve_c_mu

DICHOTOMY = "dichotomy: either the bound holds or theta = 0 and is not attained"
CYLINDER_TOL = 1e-4
DECAY_RTOL = 1e-12


@dataclass
class Hypothesis:
    name: str
    lhs: float
    rhs: float
    relation: str
    holds: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs,
                "relation": self.relation, "holds": self.holds}


def _check(name: str, lhs: float, relation: str, rhs: float) -> Hypothesis:
    ops = {"<": lhs < rhs, "<=": lhs <= rhs, ">": lhs > rhs, ">=": lhs >= rhs}
    return Hypothesis(name, float(lhs), float(rhs), relation, bool(ops[relation]))


@dataclass
class ThetaBound:
    """A value or curve bounding ``theta``.

    ``kind`` is one of ``ClosedForm``, ``LowerBound``, ``UpperBound`` and
    ``DecayCurve``.
    """

    kind: str
    provenance: str
    value: float | None = None
    curve: dict | None = None
    hypotheses: list = field(default_factory=list)
    flags: list = field(default_factory=list)
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("ClosedForm", "LowerBound", "UpperBound", "DecayCurve"):
            raise DomainError(f"unknown bound kind {self.kind!r}")
        if not self.hypotheses:
            raise PreconditionError("a bound needs at least one checked hypothesis")

    @property
    def hypotheses_hold(self) -> bool:
        return all(h.holds for h in self.hypotheses)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "provenance": self.provenance,
             "hypotheses": [h.to_dict() for h in self.hypotheses], "flags": list(self.flags)}
        if self.value is not None:
            d["value"] = self.value
        if self.curve is not None:
            d["curve"] = {k: np.asarray(v).tolist() for k, v in self.curve.items()}
        if self.params:
            d["params"] = self.params
        return d

    def write_csv(self, path) -> None:
        """Write a decay curve as ``H,envelope,iterate`` rows."""
        if self.kind != "DecayCurve":
            raise PreconditionError("only decay curves export CSV")
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["H", "envelope", "iterate"])
            for row in zip(*(self.curve[k] for k in ("H", "envelope", "iterate"))):
                w.writerow([repr(float(v)) for v in row])


def theta_closed_form(n: int, H: float) -> ThetaBound:
    """Exact ``theta`` for the round circle (``n = 2``) and round 2-sphere (``n = 3``)."""
    H = float(H)
    if n == 2:
        if not 0 <= H < 1:
            raise DomainError("n = 2 closed form is valid for 0 <= H < 1")
        value = 2.0 * (1.0 - H * H)
        hyp = [_check("H < 1", H, "<", 1.0)]
    elif n == 3:
        if not H >= 2:
            raise DomainError("n = 3 closed form is valid for H >= 2")
        value = 6.0 * (1.0 - H * H / 4.0)
        hyp = [_check("H >= 2", H, ">=", 2.0)]
    else:
        raise DomainError("closed forms exist only for n in {2, 3}")
    return ThetaBound("ClosedForm", "round-sphere-closed-form", value=value, hypotheses=hyp,
                      params={"n": n, "H": H})


def amplification(n: int, lam: float, theta_lam: float) -> float:
    """Factor ``alpha`` with ``theta(lam) <= alpha^{-2} theta(1)``.

    Non-positive ``theta_lam`` takes the trivial branch ``alpha = 2``.
    """
    if n < 3:
        raise DomainError("n >= 3 is required")
    if not lam > 1:
        raise DomainError("lambda > 1 is required")
    if theta_lam <= 0:
        return 2.0
    c = solve_c_mu(n, mu_of(n, lam, theta_lam))
    alpha = closed_form_alpha(n, lam, theta_lam, c)
    if not alpha > 1:
        raise NumericalFailure("amplification factor is not above 1",
                               {"n": n, "lambda": lam, "theta": theta_lam, "alpha": alpha})
    return alpha


def _c_mu_at(n: int, theta: float) -> float:
    return solve_c_mu(n, mu_of(n, 2.0, theta))


def uniform_decay_constants(n: int) -> tuple[float, float]:
    """``(theta0, alpha0)``: ``alpha0 = 2^{1/(n-2)}`` and ``theta0`` with ``c_mu(theta0) = 1/2`` at lambda = 2."""
    if n < 3:
        raise DomainError("n >= 3 is required")
    alpha0 = 2.0 ** (1.0 / (n - 2))
    hi = 1.0
    while _c_mu_at(n, hi) < 0.5:
        hi *= 2.0
    theta0 = bisect_increasing(lambda th: _c_mu_at(n, th) - 0.5, 0.0 if hi > 1 else 1e-300, hi)
    return theta0, alpha0


def decay_certificate(n: int, theta: float) -> float:
    """``4 (1 - c_mu(theta))``; equals 2 at ``theta0``."""
    return 4.0 * (1.0 - _c_mu_at(n, theta))


def decay_curve(n: int, H0: float, theta_H0: float, H_grid) -> ThetaBound:
    """Envelope ``C H^{-beta}`` and the halving iterates ``alpha0^{-2k} theta_H0``."""
    H = np.asarray(H_grid, dtype=float)
    if not H0 >= 1:
        raise PreconditionError("H0 >= 1 is required")
    if not theta_H0 > 0:
        raise PreconditionError("theta(H0) > 0 is required")
    if H.size == 0 or np.min(H) < H0:
        raise PreconditionError("the H grid must lie in [H0, inf)")
    _, alpha0 = uniform_decay_constants(n)
    beta = 2.0 * math.log2(alpha0)
    C = alpha0 ** 2 * theta_H0 * H0 ** beta
    envelope = C * H ** -beta
    k = np.floor(np.log2(H / H0)).astype(int)
    iterate = alpha0 ** (-2.0 * k) * theta_H0
    dominated = bool(np.all(envelope >= iterate * (1.0 - DECAY_RTOL)))
    hyp = [_check("H0 >= 1", H0, ">=", 1.0), _check("theta(H0) > 0", theta_H0, ">", 0.0),
           Hypothesis("envelope dominates iterates", float(np.min(envelope / iterate)), 1.0,
                      ">=", dominated)]
    flags = [] if dominated else ["envelope below an iterate"]
    return ThetaBound("DecayCurve", "exponential-decay", value=C,
                      curve={"H": H, "envelope": envelope, "iterate": iterate},
                      hypotheses=hyp, flags=flags,
                      params={"n": n, "alpha0": alpha0, "beta": beta, "C": C, "H0": float(H0)})


@dataclass(frozen=True)
class Envelope:
    """Non-increasing envelope of upper bounds sampled at ``H``."""

    H: np.ndarray
    values: np.ndarray
    raw: np.ndarray
    violations: tuple

    @property
    def flagged(self) -> bool:
        return bool(self.violations)

    def to_dict(self) -> dict:
        return {"H": self.H.tolist(), "envelope": self.values.tolist(), "raw": self.raw.tolist(),
                "violations": [list(v) for v in self.violations]}


def monotone_envelope(bounds) -> Envelope:
    """Running minimum as ``H`` increases; pairs contradicting monotonicity are flagged."""
    pts = []
    for H, b in bounds:
        v = b.value if isinstance(b, ThetaBound) else b
        pts.append((float(H), float(v)))
    if not pts:
        raise PreconditionError("at least one bound is required")
    pts.sort(key=lambda p: p[0])
    H = np.array([p[0] for p in pts])
    raw = np.array([p[1] for p in pts])
    env = np.minimum.accumulate(raw)
    violations = []
    for j in range(1, raw.size):
        i = int(np.argmin(raw[:j]))
        if raw[j] > raw[i]:
            violations.append((float(H[i]), float(H[j])))
    return Envelope(H, env, raw, tuple(violations))


def fillin_lower_bound(n: int, minR: float, maxH: float) -> ThetaBound:
    """``min R - (n-2)/(n-1) max H^2``, valid up to the zero-and-unattained alternative."""
    if n < 2:
        raise DomainError("n >= 2 is required")
    if maxH < 0:
        raise PreconditionError("max H must be non-negative")
    loss = (n - 2) / (n - 1) * maxH ** 2
    if not minR > loss:
        raise PreconditionError(f"min R must exceed (n-2)/(n-1) max H^2 = {loss:.17g}")
    hyp = [_check("min R > (n-2)/(n-1) max H^2", minR, ">", loss)]
    prov = "zero-mean-curvature-lower-bound" if maxH == 0 else "fill-in-lower-bound"
    return ThetaBound("LowerBound", prov, value=minR - loss, hypotheses=hyp, flags=[DICHOTOMY],
                      params={"n": n, "minR": minR, "maxH": maxH})


def spectral_lower_bound(metric: SphereMetric, nt: int = 21) -> ThetaBound:
    """``2 lambda_1`` of ``-Lap + R/2``; the cylinder ``f_1^2 dt^2 + gamma`` is checked to have ``R = 2 lambda_1``."""
    lam, f = lambda1(metric)
    if not lam > 0:
        raise PreconditionError(f"lambda_1 must be positive, got {lam:.6g}")
    t = np.linspace(0.0, 1.0, nt)
    band = WarpedBand(t, [metric] * nt, lapse=np.tile(metric.field(f), (nt, 1)))
    R = fd_band_curvature(band).R
    err = float(np.max(np.abs(R - 2.0 * lam)))
    minR = float(np.min(metric.scalar_curvature()))
    hyp = [_check("lambda_1 > 0", lam, ">", 0.0),
           _check("cylinder |R - 2 lambda_1|", err, "<", CYLINDER_TOL)]
    return ThetaBound("LowerBound", "spectral-lower-bound", value=2.0 * lam, hypotheses=hyp,
                      flags=[DICHOTOMY], params={"lambda1": lam, "min_R": minR, "cylinder_error": err})


@dataclass(frozen=True)
class PscCondition:
    """Outcome of ``max H < ((n-1) min R0 / (n-2))^{1/2}``."""

    holds: bool
    threshold: float
    max_H: float

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> dict:
        return {"holds": self.holds, "threshold": self.threshold, "max_H": self.max_H}


def psc_fillin_condition(n: int, minR0: float, H) -> PscCondition:
    """Sufficient condition for a positive scalar curvature fill-in."""
    if n < 3:
        raise DomainError("n >= 3 is required")
    if not minR0 > 0:
        raise PreconditionError("min R0 must be positive")
    threshold = math.sqrt((n - 1) * minR0 / (n - 2))
    maxH = float(np.max(np.asarray(H, dtype=float)))
    return PscCondition(bool(maxH < threshold), threshold, maxH)
