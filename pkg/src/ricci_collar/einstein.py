"""Closed-form Einstein metrics on the solid torus and their checks.

In the arc-length gauge (radial coefficient identically 1, coordinate s with
s(r) the integral of h), a rotationally symmetric solution of Ric(G) = tau G
on the whole torus has, with kappa = sqrt(2 |tau|) and a free constant c > 0:

    tau > 0:  fbar = (4 pi / kappa) sin(kappa s / 2),
              gbar = sqrt(2 c) cos(kappa s / 2),   0 < s0 < pi / kappa
    tau < 0:  fbar = (4 pi / kappa) sinh(kappa s / 2),
              gbar = sqrt(c) cosh(kappa s / 2)
    tau = 0:  fbar = 2 pi s,  gbar = sqrt(c)

All three families satisfy the core regularity conditions
fbar(0) = 0, fbar_s(0) = 2 pi, gbar_s(0) = 0 exactly.  For tau > 0 the
tangential coefficient is bounded by 4 pi / kappa, so no such metric can
induce a boundary circle with alpha >= 4 pi / kappa: ``boundary_match``
returns an ``Obstruction`` value in that case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InvalidConstant, InvalidS0, NonPositiveMetric
from .expr import Jet2
from .geometry import chebyshev_points, ricci_components
from .ode import quadrature
from .profiles import ExprProfile, Profile

__all__ = [
    "EinsteinSpec",
    "ArcProfiles",
    "einstein_profiles",
    "CoreRegularity",
    "core_regularity",
    "ArcLengthMap",
    "arc_length",
    "BoundaryMatch",
    "Obstruction",
    "boundary_match",
    "einstein_residual",
    "product_identity_residual",
]


@dataclass(frozen=True)
class EinsteinSpec:
    """Einstein constant tau, profile constant c > 0, arc-length depth s0."""

    tau: float
    c: float
    s0: float
    kappa: float = field(init=False)

    def __post_init__(self):
        if self.c <= 0.0:
            raise InvalidConstant(f"profile constant must be positive, got {self.c}")
        if self.s0 <= 0.0:
            raise InvalidS0(f"arc-length depth must be positive, got {self.s0}")
        kappa = math.sqrt(2.0 * abs(self.tau))
        object.__setattr__(self, "kappa", kappa)
        if self.tau > 0.0 and self.s0 >= math.pi / kappa:
            raise InvalidS0(
                f"for positive tau, s0 must lie in (0, {math.pi / kappa}), got {self.s0}"
            )


@dataclass(frozen=True)
class ArcProfiles:
    """Tangential profiles (fbar, gbar) in the arc-length gauge on [0, s0];
    the radial coefficient is identically 1."""

    f: Profile
    g: Profile
    s0: float


def einstein_profiles(spec: EinsteinSpec) -> ArcProfiles:
    """Closed-form profiles solving Ric(G) = tau G for the given constants."""
    k = spec.kappa
    if spec.tau > 0.0:
        f = ExprProfile.from_text(f"{4.0 * math.pi / k!r}*sin({0.5 * k!r}*r)")
        g = ExprProfile.from_text(f"{math.sqrt(2.0 * spec.c)!r}*cos({0.5 * k!r}*r)")
    elif spec.tau < 0.0:
        f = ExprProfile.from_text(f"{4.0 * math.pi / k!r}*sinh({0.5 * k!r}*r)")
        g = ExprProfile.from_text(f"{math.sqrt(spec.c)!r}*cosh({0.5 * k!r}*r)")
    else:
        f = ExprProfile.from_text(f"{2.0 * math.pi!r}*r")
        g = ExprProfile.constant(math.sqrt(spec.c))
    return ArcProfiles(f=f, g=g, s0=spec.s0)


@dataclass(frozen=True)
class CoreRegularity:
    """Values at the core circle and pass/fail of the regularity conditions
    fbar(0) = 0, fbar_s(0) = 2 pi, gbar_s(0) = 0."""

    f_value: float
    f_slope: float
    g_slope: float
    tolerance: float

    @property
    def f_value_ok(self) -> bool:
        return abs(self.f_value) <= self.tolerance

    @property
    def f_slope_ok(self) -> bool:
        return abs(self.f_slope - 2.0 * math.pi) <= self.tolerance

    @property
    def g_slope_ok(self) -> bool:
        return abs(self.g_slope) <= self.tolerance

    @property
    def passed(self) -> bool:
        return self.f_value_ok and self.f_slope_ok and self.g_slope_ok


def core_regularity(p: ArcProfiles, tolerance: float = 1e-9) -> CoreRegularity:
    """Check the three core conditions from one-sided jets at s = 0."""
    fj = p.f.jet(0.0)
    gj = p.g.jet(0.0)
    return CoreRegularity(fj.v0, fj.v1, gj.v1, tolerance)


class ArcLengthMap:
    """Arc-length reparametrization s(r) = integral of h from 0 to r.

    Strictly increasing for positive h; ``s0`` is the total depth s(1).
    """

    def __init__(self, h: Profile):
        self._h = h
        self._s0: float | None = None

    def _integrand(self, rho: float) -> float:
        v = self._h.value(rho)
        if v <= 0.0:
            raise NonPositiveMetric(f"h({rho}) = {v} is not positive")
        return v

    def __call__(self, r: float) -> float:
        if r == 0.0:
            return 0.0
        return quadrature(self._integrand, 0.0, r)

    @property
    def s0(self) -> float:
        if self._s0 is None:
            self._s0 = self(1.0)
        return self._s0


def arc_length(h: Profile) -> ArcLengthMap:
    return ArcLengthMap(h)


@dataclass(frozen=True)
class BoundaryMatch:
    """Constants (s0, c) whose closed-form family attains fbar(s0) = alpha,
    gbar(s0) = beta."""

    s0: float
    c: float


@dataclass(frozen=True)
class Obstruction:
    """No Einstein metric with this tau can induce the requested boundary
    circle length: for tau > 0 the tangential profile never reaches
    4 pi / kappa."""

    tau: float
    alpha: float
    threshold: float


def boundary_match(tau: float, alpha: float, beta: float) -> BoundaryMatch | Obstruction:
    """Invert the closed forms for (s0, c) given boundary values alpha, beta.

    Solvable for every tau <= 0; for tau > 0 exactly the inputs with
    alpha < 4 pi / kappa are solvable.
    """
    if not (alpha > 0.0 and beta > 0.0):
        raise ValueError("alpha and beta must be positive")
    if tau > 0.0:
        kappa = math.sqrt(2.0 * tau)
        threshold = 4.0 * math.pi / kappa
        if alpha >= threshold:
            return Obstruction(tau=tau, alpha=alpha, threshold=threshold)
        cos_ks0 = 1.0 - alpha * alpha * kappa * kappa / (8.0 * math.pi * math.pi)
        s0 = math.acos(cos_ks0) / kappa
        c = beta * beta / (1.0 + cos_ks0)
        return BoundaryMatch(s0=s0, c=c)
    if tau < 0.0:
        kappa = math.sqrt(-2.0 * tau)
        u = alpha * kappa / (4.0 * math.pi)
        s0 = 2.0 * math.asinh(u) / kappa
        c = beta * beta / (1.0 + u * u)
        return BoundaryMatch(s0=s0, c=c)
    return BoundaryMatch(s0=alpha / (2.0 * math.pi), c=beta * beta)


_UNIT_JET = Jet2(1.0, 0.0, 0.0)


def einstein_residual(p: ArcProfiles, tau: float, n_samples: int) -> float:
    """Max componentwise |Ric(G) - tau G| over samples of (0, s0]."""
    worst = 0.0
    for s in chebyshev_points(0.0, p.s0, n_samples):
        fj = p.f.jet(s)
        gj = p.g.jet(s)
        ric = ricci_components(fj, gj, _UNIT_JET)
        worst = max(
            worst,
            abs(ric.ll - tau * fj.v0 * fj.v0),
            abs(ric.mm - tau * gj.v0 * gj.v0),
            abs(ric.rr - tau),
        )
    return worst


def product_identity_residual(p: ArcProfiles, tau: float, s: float) -> float:
    """Residual of (fbar gbar)_ss + 2 tau fbar gbar, computed from jets.

    This combination vanishes identically for every Einstein family; it is
    the workhorse identity behind the closed forms.
    """
    fj = p.f.jet(s)
    gj = p.g.jet(s)
    product_ss = fj.v2 * gj.v0 + 2.0 * fj.v1 * gj.v1 + fj.v0 * gj.v2
    return product_ss + 2.0 * tau * fj.v0 * gj.v0
