"""Pointwise geometry of rotationally symmetric tensors on a boundary collar.

The solid torus carries cylindrical coordinates (lambda, mu, r) with the
angles normalized to (0, 1] and r in [0, 1]; the collar of width x is the set
with r in (1-x, 1].  A rotationally symmetric metric is

    G = f(r)^2 dlam (x) dlam + g(r)^2 dmu (x) dmu + h(r)^2 dr (x) dr

with f, g, h positive radial profiles, and a rotationally symmetric
(0,2)-tensor is

    T = phi(r) dlam (x) dlam + psi(r) dmu (x) dmu + sigma(r) dr (x) dr.

This module evaluates the Ricci curvature of G, extracts the induced boundary
metric and second fundamental form, and evaluates the first-integral
constraint that any exact solution of Ric(G) = T satisfies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveMetric
from .expr import Jet2
from .profiles import Profile, as_profile

__all__ = [
    "CollarSpec",
    "RicciValue",
    "BoundaryData",
    "RotSymMetric",
    "RotSymTensor",
    "ricci_components",
    "boundary_data_of",
    "constraint_residual",
    "chebyshev_points",
]


@dataclass(frozen=True)
class CollarSpec:
    """Collar width x; the radial parameter lives in (1-x, 1]."""

    x: float

    def __post_init__(self):
        if not (0.0 < self.x <= 1.0):
            raise ValueError(f"collar width must lie in (0, 1], got {self.x}")

    @property
    def r_min(self) -> float:
        return 1.0 - self.x


@dataclass(frozen=True)
class RicciValue:
    """Ricci curvature components in the (dlam^2, dmu^2, dr^2) basis."""

    ll: float
    mm: float
    rr: float


@dataclass(frozen=True)
class BoundaryData:
    """Induced boundary metric coefficients (alpha^2, beta^2) and second
    fundamental form coefficients (eta, theta) with respect to the outward
    unit normal."""

    alpha: float
    beta: float
    eta: float
    theta: float

    def __post_init__(self):
        if not (self.alpha > 0.0 and self.beta > 0.0):
            raise ValueError("alpha and beta must be positive")


@dataclass(frozen=True)
class RotSymMetric:
    """Rotationally symmetric metric: radial profiles (f, g, h) on a collar."""

    f: Profile
    g: Profile
    h: Profile
    collar: CollarSpec

    @classmethod
    def from_profiles(cls, f, g, h, x: float) -> "RotSymMetric":
        return cls(as_profile(f), as_profile(g), as_profile(h), CollarSpec(x))

    def jets(self, r: float) -> tuple[Jet2, Jet2, Jet2]:
        return self.f.jet(r), self.g.jet(r), self.h.jet(r)

    def values(self, r: float) -> tuple[float, float, float]:
        return self.f.value(r), self.g.value(r), self.h.value(r)


@dataclass(frozen=True)
class RotSymTensor:
    """Rotationally symmetric (0,2)-tensor: radial profiles (phi, psi, sigma)."""

    phi: Profile
    psi: Profile
    sigma: Profile
    collar: CollarSpec

    @classmethod
    def from_profiles(cls, phi, psi, sigma, x: float) -> "RotSymTensor":
        return cls(as_profile(phi), as_profile(psi), as_profile(sigma), CollarSpec(x))

    def jets(self, r: float) -> tuple[Jet2, Jet2, Jet2]:
        return self.phi.jet(r), self.psi.jet(r), self.sigma.jet(r)

    def values(self, r: float) -> tuple[float, float, float]:
        return self.phi.value(r), self.psi.value(r), self.sigma.value(r)


def _require_positive(fj: Jet2, gj: Jet2, hj: Jet2) -> None:
    if fj.v0 <= 0.0 or gj.v0 <= 0.0 or hj.v0 <= 0.0:
        raise NonPositiveMetric(
            f"metric coefficients must be positive, got f={fj.v0}, g={gj.v0}, h={hj.v0}"
        )


def ricci_components(fj: Jet2, gj: Jet2, hj: Jet2) -> RicciValue:
    """Ricci curvature of a rotationally symmetric metric from profile jets.

    With subscripts denoting radial derivatives:

        Ric_ll = -f f_rr / h^2 + f f_r h_r / h^3 - f f_r g_r / (g h^2)
        Ric_mm = -g g_rr / h^2 + g g_r h_r / h^3 - g f_r g_r / (f h^2)
        Ric_rr = -f_rr / f + f_r h_r / (f h) - g_rr / g + g_r h_r / (g h)
    """
    _require_positive(fj, gj, hj)
    f, f1, f2 = fj.v0, fj.v1, fj.v2
    g, g1, g2 = gj.v0, gj.v1, gj.v2
    h, h1, h2j = hj.v0, hj.v1, hj.v2
    del h2j
    h2 = h * h
    h3 = h2 * h
    ll = -f * f2 / h2 + f * f1 * h1 / h3 - f * f1 * g1 / (g * h2)
    mm = -g * g2 / h2 + g * g1 * h1 / h3 - g * f1 * g1 / (f * h2)
    rr = -f2 / f + f1 * h1 / (f * h) - g2 / g + g1 * h1 / (g * h)
    return RicciValue(ll, mm, rr)


def boundary_data_of(G: RotSymMetric) -> BoundaryData:
    """Boundary data of a metric: induced metric coefficients alpha = f(1),
    beta = g(1) and second fundamental form coefficients eta = f(1) f_r(1) / h(1),
    theta = g(1) g_r(1) / h(1) (outward unit normal)."""
    fj, gj, hj = G.jets(1.0)
    _require_positive(fj, gj, hj)
    return BoundaryData(
        alpha=fj.v0,
        beta=gj.v0,
        eta=fj.v0 * fj.v1 / hj.v0,
        theta=gj.v0 * gj.v1 / hj.v0,
    )


def constraint_residual(
    fj: Jet2, gj: Jet2, hj: Jet2, phi: float, psi: float, sigma: float
) -> float:
    """First-integral residual 2 f_r g_r/(f g) + h^2 phi/f^2 + h^2 psi/g^2 - sigma.

    Eliminating the second derivatives between the three component equations
    of Ric(G) = T leaves this algebraic relation; it vanishes identically
    along any exact solution.
    """
    _require_positive(fj, gj, hj)
    f, g, h = fj.v0, gj.v0, hj.v0
    h2 = h * h
    return 2.0 * fj.v1 * gj.v1 / (f * g) + (h2 * phi / (f * f) + h2 * psi / (g * g)) - sigma


def chebyshev_points(lo: float, hi: float, n: int) -> np.ndarray:
    """n Chebyshev-distributed sample points strictly inside (lo, hi),
    ascending.  They cluster at both ends without touching them, which suits
    half-open collars."""
    if n < 2:
        raise ValueError("need at least two sample points")
    k = np.arange(1, n + 1, dtype=float)
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    pts = mid + half * np.cos((2.0 * k - 1.0) * np.pi / (2.0 * n))
    return np.sort(pts)
