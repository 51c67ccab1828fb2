"""Solving, verifying, and canonicalizing Ric(G) = T on the boundary collar.

Workflow:

1. ``feasibility`` evaluates the boundary quantity
   Q = (2 eta theta + beta^2 phi(1) + alpha^2 psi(1)) / sigma(1); Q > 0 is
   necessary and sufficient for a rotationally symmetric solution attaining
   the given induced metric and second fundamental form, and it pins the
   radial coefficient at the boundary to h(1) = alpha beta / sqrt(Q).

2. ``solve_collar`` integrates a six-dimensional terminal-value system for
   auxiliary profiles (F, G, H) and their derivatives backward from r = 1,
   taking the positive square root for H_rr.  The third equation enforces the
   first integral by construction.  The solution metric is recovered on the
   images of H_r: the accepted samples provide an exact grid for
   f = F o H_r^{-1}, g = G o H_r^{-1}, h = (H / H_rr) o H_r^{-1}.

3. ``verify_ricci`` measures max |Ric(G) - T| and the first-integral residual
   on Chebyshev-distributed samples.

4. ``canonical_gauge`` integrates the gauge equation H_rr = H / (h o H_r)
   backward; two metrics with equal Ricci curvature and boundary behavior
   produce identical gauge triples, which is the mechanism behind uniqueness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional

import numpy as np

from .errors import ImmediateBreakdown, InfeasibleBoundaryData, NonPositiveMetric
from .geometry import (
    BoundaryData,
    CollarSpec,
    RotSymMetric,
    RotSymTensor,
    chebyshev_points,
    constraint_residual,
    ricci_components,
)
from .ode import (
    IntegratorControls,
    OdeSystem,
    Termination,
    TerminationKind,
    Trajectory,
    integrate_terminal,
)
from .profiles import GridProfile

__all__ = [
    "Verdict",
    "FeasibilityReport",
    "feasibility",
    "CollarState",
    "CollarSolution",
    "solve_collar",
    "ResidualReport",
    "verify_ricci",
    "CanonicalGauge",
    "canonical_gauge",
    "MatchResult",
    "metrics_match",
]

# Breakdown margins: integration stops before any guarded quantity falls
# below this floor, keeping the last valid sample.
GUARD_FLOOR = 1e-10
HR_MARGIN = 1e-12
# Default cap on accepted steps for solves whose output is interpolated
# between samples; keeps cubic-Hermite error far below the tolerances the
# residual checks run at.  Callers override via IntegratorControls.max_step.
DEFAULT_STEP_CAP = 2e-3


class Verdict(Enum):
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    DEGENERATE_SIGMA_CONSISTENT = "DegenerateSigmaConsistent"
    DEGENERATE_SIGMA_INCONSISTENT = "DegenerateSigmaInconsistent"


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of the boundary sign condition.

    ``q`` is (2 eta theta + beta^2 phi(1) + alpha^2 psi(1)) / sigma(1) when
    sigma(1) != 0 (None otherwise).  When feasible, ``h1`` is the forced
    boundary value of h and ``normal_coefficient`` = 1/h1 scales d/dr into
    the outward unit normal.
    """

    verdict: Verdict
    q: Optional[float]
    h1: Optional[float]
    normal_coefficient: Optional[float]
    numerator: float
    sigma1: float


def feasibility(
    phi1: float, psi1: float, sigma1: float, bd: BoundaryData
) -> FeasibilityReport:
    """Classify boundary data against tensor values at r = 1.

    Degeneracy (sigma(1) = 0) is a verdict, not an error: any exact solution
    then forces the numerator to vanish, tested at 1e-12 of its term scale.
    """
    t_cross = 2.0 * bd.eta * bd.theta
    t_phi = bd.beta * bd.beta * phi1
    t_psi = bd.alpha * bd.alpha * psi1
    numerator = t_cross + (t_phi + t_psi)
    if sigma1 == 0.0:
        scale = max(abs(t_cross), abs(t_phi), abs(t_psi))
        verdict = (
            Verdict.DEGENERATE_SIGMA_CONSISTENT
            if abs(numerator) <= 1e-12 * scale
            else Verdict.DEGENERATE_SIGMA_INCONSISTENT
        )
        return FeasibilityReport(verdict, None, None, None, numerator, sigma1)
    q = numerator / sigma1
    if q > 0.0:
        h1 = bd.alpha * bd.beta / math.sqrt(q)
        return FeasibilityReport(Verdict.FEASIBLE, q, h1, 1.0 / h1, numerator, sigma1)
    return FeasibilityReport(Verdict.INFEASIBLE, q, None, None, numerator, sigma1)


class CollarState(NamedTuple):
    """One state of the six-dimensional solver system."""

    f: float
    g: float
    h: float
    f_r: float
    g_r: float
    h_r: float

    @classmethod
    def from_vector(cls, u) -> "CollarState":
        return cls(*map(float, u))


@dataclass(frozen=True)
class ResidualReport:
    """Componentwise max |Ric(G) - T| and max first-integral residual over
    verification samples, with the argmax locations."""

    max_ll: float
    argmax_ll: float
    max_mm: float
    argmax_mm: float
    max_rr: float
    argmax_rr: float
    max_constraint: float
    argmax_constraint: float
    n_samples: int
    r_lo: float
    r_hi: float

    @property
    def max_ricci(self) -> float:
        return max(self.max_ll, self.max_mm, self.max_rr)


@dataclass(frozen=True)
class CollarSolution:
    """Constructed solution of Ric(G) = T with the given boundary data.

    ``epsilon`` is the parameter depth the integration achieved; ``epsilon0``
    is the collar width of the reconstructed metric.  The metric's profiles
    are sampled grids on (1 - epsilon0, 1].
    """

    trajectory: Trajectory
    epsilon: float
    epsilon0: float
    metric: RotSymMetric
    residuals: ResidualReport
    feasibility: FeasibilityReport
    boundary: BoundaryData

    @property
    def termination(self) -> Termination:
        return self.trajectory.status


def _collar_system(T: RotSymTensor) -> OdeSystem:
    phi_p, psi_p, sig_p = T.phi, T.psi, T.sigma
    hr_floor = T.collar.r_min + HR_MARGIN

    def radicand(u) -> float:
        fh, gh, hh, fr, gr, hr = u
        phi_v = phi_p.value(hr)
        psi_v = psi_p.value(hr)
        sig_v = sig_p.value(hr)
        hh2 = hh * hh
        # Grouping the phi/psi terms keeps the expression bitwise symmetric
        # under the exchange (f, phi) <-> (g, psi).
        num = 2.0 * fr * gr / (fh * gh) + (
            hh2 * phi_v / (fh * fh) + hh2 * psi_v / (gh * gh)
        )
        return num / sig_v

    def rhs(r: float, u: np.ndarray) -> np.ndarray:
        fh, gh, hh, fr, gr, hr = u
        phi_v = phi_p.value(hr)
        psi_v = psi_p.value(hr)
        hh2 = hh * hh
        frr = fr * hr / hh - fr * gr / gh - hh2 * phi_v / fh
        grr = gr * hr / hh - fr * gr / fh - hh2 * psi_v / gh
        rad = radicand(u)
        if rad <= 0.0:
            raise NonPositiveMetric("radicand of the H_rr equation is nonpositive")
        return np.array([fr, gr, hr, frr, grr, math.sqrt(rad)])

    def guard(r: float, u: np.ndarray) -> Optional[str]:
        fh, gh, hh, fr, gr, hr = u
        if fh < GUARD_FLOOR or gh < GUARD_FLOOR or hh < GUARD_FLOOR:
            return "a metric profile fell below the positivity floor"
        if hr <= hr_floor:
            return "H_r left the tensor's collar"
        if abs(sig_p.value(hr)) < GUARD_FLOOR:
            return "sigma vanished along the trajectory"
        if radicand(u) < GUARD_FLOOR:
            return "radicand of the H_rr equation fell below the floor"
        return None

    return OdeSystem(6, rhs, guard)


def _third_derivative(u, du, T: RotSymTensor) -> float:
    """d^3 H / dr^3 from differentiating the H_rr equation analytically.

    Needs first derivatives of the tensor profiles at H_r; nothing is
    differenced numerically.
    """
    fh, gh, hh, fr, gr, hr = u
    frr, grr, hrr = du[3], du[4], du[5]
    pj = T.phi.jet(hr)
    qj = T.psi.jet(hr)
    sj = T.sigma.jet(hr)
    hh2 = hh * hh
    fg = fh * gh
    num = 2.0 * fr * gr / fg + (hh2 * pj.v0 / (fh * fh) + hh2 * qj.v0 / (gh * gh))
    num_r = (
        2.0 * (frr * gr + fr * grr) / fg
        - 2.0 * fr * gr * (fr * gh + fh * gr) / (fg * fg)
        + (2.0 * hh * hr * pj.v0 + hh2 * pj.v1 * hrr) / (fh * fh)
        - 2.0 * hh2 * pj.v0 * fr / (fh * fh * fh)
        + (2.0 * hh * hr * qj.v0 + hh2 * qj.v1 * hrr) / (gh * gh)
        - 2.0 * hh2 * qj.v0 * gr / (gh * gh * gh)
    )
    w_r = num_r / sj.v0 - num * sj.v1 * hrr / (sj.v0 * sj.v0)
    return w_r / (2.0 * hrr)


def _with_step_cap(controls: IntegratorControls) -> IntegratorControls:
    if math.isfinite(controls.max_step):
        return controls
    return IntegratorControls(
        rtol=controls.rtol,
        atol=controls.atol,
        initial_step=min(controls.initial_step, DEFAULT_STEP_CAP),
        min_step=controls.min_step,
        max_steps=controls.max_steps,
        max_step=DEFAULT_STEP_CAP,
        fixed_step=controls.fixed_step,
    )


def solve_collar(
    T: RotSymTensor,
    bd: BoundaryData,
    controls: Optional[IntegratorControls] = None,
    n_verify: int = 200,
) -> CollarSolution:
    """Construct the rotationally symmetric metric with Ric(G) = T, induced
    boundary metric diag(alpha^2, beta^2), and second fundamental form
    diag(eta, theta).

    Integrates backward from the terminal state
    (alpha, beta, 1, eta/alpha, theta/beta, 1) until the full collar is
    covered or a definedness guard trips; the achieved widths are reported,
    not prescribed.  Raises ``InfeasibleBoundaryData`` when the sign
    condition fails and ``ImmediateBreakdown`` when guards fail at r = 1.
    """
    if controls is None:
        controls = IntegratorControls()
    phi1, psi1, sigma1 = T.values(1.0)
    report = feasibility(phi1, psi1, sigma1, bd)
    if report.verdict is not Verdict.FEASIBLE:
        raise InfeasibleBoundaryData(
            f"verdict {report.verdict.value}: Q={report.q}, sigma(1)={sigma1}"
        )

    system = _collar_system(T)
    terminal = np.array(
        [bd.alpha, bd.beta, 1.0, bd.eta / bd.alpha, bd.theta / bd.beta, 1.0]
    )
    reason = system.guard(1.0, terminal)
    if reason is not None:
        raise ImmediateBreakdown(f"guards fail at the boundary: {reason}")

    traj = integrate_terminal(
        system, 1.0, terminal, T.collar.r_min, _with_step_cap(controls)
    )
    if len(traj) < 2:
        raise ImmediateBreakdown(
            f"no step was accepted at the boundary: {traj.status.reason}"
        )

    st = traj.states_ascending
    dv = traj.derivs_ascending
    epsilon = 1.0 - traj.r_last
    epsilon0 = 1.0 - float(st[0, 5])

    nodes = st[:, 5]
    hrr = dv[:, 5]
    hrrr = np.array(
        [_third_derivative(st[i], dv[i], T) for i in range(st.shape[0])]
    )
    f_vals = st[:, 0]
    g_vals = st[:, 1]
    h_vals = st[:, 2] / hrr
    f_ders = st[:, 3] / hrr
    g_ders = st[:, 4] / hrr
    h_ders = (nodes * hrr - st[:, 2] * hrrr) / (hrr * hrr * hrr)

    metric = RotSymMetric(
        GridProfile(nodes, f_vals, f_ders),
        GridProfile(nodes, g_vals, g_ders),
        GridProfile(nodes, h_vals, h_ders),
        CollarSpec(epsilon0),
    )
    residuals = verify_ricci(metric, T, n_verify)
    return CollarSolution(traj, epsilon, epsilon0, metric, residuals, report, bd)


def verify_ricci(G: RotSymMetric, T: RotSymTensor, n_samples: int) -> ResidualReport:
    """Max componentwise |Ric(G) - T| and first-integral residual over
    Chebyshev-distributed samples of the common collar."""
    if n_samples < 2:
        raise ValueError("need at least two verification samples")
    lo = max(G.collar.r_min, T.collar.r_min)
    samples = chebyshev_points(lo, 1.0, n_samples)
    worst = {"ll": (0.0, lo), "mm": (0.0, lo), "rr": (0.0, lo), "c": (0.0, lo)}
    for r in samples:
        fj, gj, hj = G.jets(r)
        ric = ricci_components(fj, gj, hj)
        phi_v, psi_v, sig_v = T.values(r)
        for key, dev in (
            ("ll", abs(ric.ll - phi_v)),
            ("mm", abs(ric.mm - psi_v)),
            ("rr", abs(ric.rr - sig_v)),
            ("c", abs(constraint_residual(fj, gj, hj, phi_v, psi_v, sig_v))),
        ):
            if dev > worst[key][0]:
                worst[key] = (dev, float(r))
    return ResidualReport(
        max_ll=worst["ll"][0],
        argmax_ll=worst["ll"][1],
        max_mm=worst["mm"][0],
        argmax_mm=worst["mm"][1],
        max_rr=worst["rr"][0],
        argmax_rr=worst["rr"][1],
        max_constraint=worst["c"][0],
        argmax_constraint=worst["c"][1],
        n_samples=n_samples,
        r_lo=lo,
        r_hi=1.0,
    )


@dataclass(frozen=True)
class CanonicalGauge:
    """Gauge-aligned profiles (f o H_r, g o H_r, H) plus the gauge trajectory.

    The grids are indexed by the gauge parameter r of the trajectory; equal
    metrics yield equal triples, and equal triples on a common interval force
    the metrics to coincide on the corresponding collar.
    """

    f: GridProfile
    g: GridProfile
    h: GridProfile
    trajectory: Trajectory


def canonical_gauge(
    G: RotSymMetric, y0: float, controls: Optional[IntegratorControls] = None
) -> CanonicalGauge:
    """Integrate the gauge equation H_rr = H / (h o H_r) backward from
    r = 1 - y0 with H(1-y0) = 1, H_r(1-y0) = 1 - y0."""
    if controls is None:
        controls = IntegratorControls()
    x = G.collar.x
    if not (0.0 <= y0 < x):
        raise ValueError(f"y0 must lie in [0, collar width {x}), got {y0}")
    hr_floor = G.collar.r_min + HR_MARGIN

    def rhs(r: float, u: np.ndarray) -> np.ndarray:
        hh, hr = u
        return np.array([hr, hh / G.h.value(hr)])

    def guard(r: float, u: np.ndarray) -> Optional[str]:
        hh, hr = u
        if hh < GUARD_FLOOR:
            return "H fell below the positivity floor"
        if hr <= hr_floor:
            return "H_r left the metric's collar"
        if hh / G.h.value(hr) < GUARD_FLOOR:
            return "H_rr fell below the floor"
        return None

    r_top = 1.0 - y0
    traj = integrate_terminal(
        OdeSystem(2, rhs, guard),
        r_top,
        np.array([1.0, r_top]),
        G.collar.r_min,
        _with_step_cap(controls),
    )
    rs = traj.rs_ascending
    hh = traj.states_ascending[:, 0]
    hr = traj.states_ascending[:, 1]
    hrr = traj.derivs_ascending[:, 1]
    f_vals = np.empty_like(rs)
    f_ders = np.empty_like(rs)
    g_vals = np.empty_like(rs)
    g_ders = np.empty_like(rs)
    for i, w in enumerate(hr):
        fj = G.f.jet(w)
        gj = G.g.jet(w)
        f_vals[i], f_ders[i] = fj.v0, fj.v1 * hrr[i]
        g_vals[i], g_ders[i] = gj.v0, gj.v1 * hrr[i]
    return CanonicalGauge(
        f=GridProfile(rs, f_vals, f_ders),
        g=GridProfile(rs, g_vals, g_ders),
        h=GridProfile(rs, hh, hr),
        trajectory=traj,
    )


class MatchResult(NamedTuple):
    matched: bool
    max_deviation: float


def metrics_match(
    G: RotSymMetric, G2: RotSymMetric, tol: float, n_samples: int = 200
) -> MatchResult:
    """Componentwise comparison of two metrics on their common collar.

    True iff the max deviation of (f, g, h) over Chebyshev samples is at
    most ``tol``; uniqueness of the collar problem makes this literal
    equality test meaningful.
    """
    lo = max(G.collar.r_min, G2.collar.r_min)
    dev = 0.0
    for r in chebyshev_points(lo, 1.0, max(n_samples, 200)):
        a = G.values(r)
        b = G2.values(r)
        for va, vb in zip(a, b):
            dev = max(dev, abs(va - vb))
    return MatchResult(dev <= tol, dev)
