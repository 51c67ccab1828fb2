"""Radial profiles: the inputs every geometric formula consumes.

A profile is anything that yields a ``Jet2`` (value, first, second derivative)
at a radial coordinate.  Two concrete representations are supported:

* ``ExprProfile`` wraps a parsed closed-form expression; jets are exact.
* ``GridProfile`` carries samples of value and first derivative on strictly
  increasing abscissae.  Between nodes it interpolates with the cubic Hermite
  polynomial; the second derivative comes from the interpolant.  This is the
  natural representation for solver output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .expr import Jet2, RadialExpr, eval_jet2, parse_expr

__all__ = ["Profile", "ExprProfile", "GridProfile", "as_profile"]


@dataclass(frozen=True)
class ExprProfile:
    """Profile backed by a closed-form expression."""

    expr: RadialExpr

    @classmethod
    def from_text(cls, text: str) -> "ExprProfile":
        return cls(parse_expr(text))

    @classmethod
    def constant(cls, value: float) -> "ExprProfile":
        return cls.from_text(repr(float(value)))

    def jet(self, r: float) -> Jet2:
        return eval_jet2(self.expr, r)

    def value(self, r: float) -> float:
        return eval_jet2(self.expr, r).v0

    def __str__(self) -> str:
        return str(self.expr)


@dataclass(frozen=True)
class GridProfile:
    """Cubic-Hermite profile through (abscissa, value, derivative) samples.

    Evaluation slightly outside the covered interval (within 1e-9 of its
    span) clamps to the end polynomial so roundoff-perturbed endpoints work;
    anything farther out raises ``DomainError``.  At an interior node the jet
    is taken from the interval to the node's right, so second derivatives are
    single-valued everywhere.
    """

    rs: np.ndarray
    values: np.ndarray
    derivs: np.ndarray
    _span: float = field(init=False, repr=False)

    def __post_init__(self):
        rs = np.ascontiguousarray(np.asarray(self.rs, dtype=float))
        vs = np.ascontiguousarray(np.asarray(self.values, dtype=float))
        ds = np.ascontiguousarray(np.asarray(self.derivs, dtype=float))
        if rs.ndim != 1 or rs.size < 2:
            raise ValueError("a grid profile needs at least two nodes")
        if vs.shape != rs.shape or ds.shape != rs.shape:
            raise ValueError("values/derivs must match the abscissae in shape")
        if not np.all(np.diff(rs) > 0.0):
            raise ValueError("grid abscissae must be strictly increasing")
        if not (np.all(np.isfinite(rs)) and np.all(np.isfinite(vs)) and np.all(np.isfinite(ds))):
            raise ValueError("grid data must be finite")
        for name, arr in (("rs", rs), ("values", vs), ("derivs", ds)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "_span", float(rs[-1] - rs[0]))

    @property
    def r_lo(self) -> float:
        return float(self.rs[0])

    @property
    def r_hi(self) -> float:
        return float(self.rs[-1])

    def _segment(self, r: float) -> int:
        tol = 1e-9 * self._span
        if r < self.rs[0] - tol or r > self.rs[-1] + tol:
            raise DomainError(
                f"r={r} outside sampled interval [{self.rs[0]}, {self.rs[-1]}]"
            )
        i = int(np.searchsorted(self.rs, r, side="right")) - 1
        return min(max(i, 0), self.rs.size - 2)

    def jet(self, r: float) -> Jet2:
        i = self._segment(r)
        w = self.rs[i + 1] - self.rs[i]
        u = (r - self.rs[i]) / w
        v0, v1 = self.values[i], self.values[i + 1]
        d0, d1 = self.derivs[i] * w, self.derivs[i + 1] * w
        h00 = (2.0 * u - 3.0) * u * u + 1.0
        h10 = ((u - 2.0) * u + 1.0) * u
        h01 = (3.0 - 2.0 * u) * u * u
        h11 = (u - 1.0) * u * u
        val = v0 * h00 + d0 * h10 + v1 * h01 + d1 * h11
        g00 = 6.0 * u * (u - 1.0)
        g10 = (3.0 * u - 4.0) * u + 1.0
        g01 = -g00
        g11 = (3.0 * u - 2.0) * u
        der = (v0 * g00 + d0 * g10 + v1 * g01 + d1 * g11) / w
        s00 = 12.0 * u - 6.0
        s10 = 6.0 * u - 4.0
        s01 = -s00
        s11 = 6.0 * u - 2.0
        sec = (v0 * s00 + d0 * s10 + v1 * s01 + d1 * s11) / (w * w)
        return Jet2(float(val), float(der), float(sec))

    def value(self, r: float) -> float:
        i = self._segment(r)
        w = self.rs[i + 1] - self.rs[i]
        u = (r - self.rs[i]) / w
        v0, v1 = self.values[i], self.values[i + 1]
        d0, d1 = self.derivs[i] * w, self.derivs[i + 1] * w
        h00 = (2.0 * u - 3.0) * u * u + 1.0
        h10 = ((u - 2.0) * u + 1.0) * u
        h01 = (3.0 - 2.0 * u) * u * u
        h11 = (u - 1.0) * u * u
        return float(v0 * h00 + d0 * h10 + v1 * h01 + d1 * h11)


# Any object with jet(r) -> Jet2 and value(r) -> float works as a profile.
Profile = ExprProfile | GridProfile


def as_profile(spec) -> Profile:
    """Coerce a profile spec: pass profiles through, parse strings, wrap numbers."""
    if isinstance(spec, (ExprProfile, GridProfile)):
        return spec
    if isinstance(spec, RadialExpr):
        return ExprProfile(spec)
    if isinstance(spec, str):
        return ExprProfile.from_text(spec)
    if isinstance(spec, (int, float)):
        return ExprProfile.constant(float(spec))
    raise TypeError(f"cannot interpret {spec!r} as a radial profile")
