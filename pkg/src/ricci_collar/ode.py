"""Terminal-value ODE integration with dense output, plus quadrature.

The integrator steps an embedded Dormand-Prince 5(4) pair *backward* from a
terminal point: internally it substitutes t = r_terminal - r so the stepper
always advances forward, which is what the standard error controller assumes.
A trajectory records every accepted sample (r, state, rhs) in decreasing r,
supports cubic Hermite dense evaluation, bisects stop predicates, and treats
definedness-guard failures as breakdowns that keep the last valid sample.

All operations are deterministic: identical inputs produce bitwise-identical
trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import (
    IntegrationFailure,
    MaxStepsExceeded,
    NotMonotone,
    OutOfRange,
    StepUnderflow,
    TargetOutOfRange,
)

__all__ = [
    "OdeSystem",
    "IntegratorControls",
    "Termination",
    "TerminationKind",
    "Trajectory",
    "integrate_terminal",
    "invert_monotone",
    "quadrature",
]


@dataclass(frozen=True)
class OdeSystem:
    """First-order system y' = rhs(r, y) with an optional definedness guard.

    ``guard(r, y)`` returns None while the state is acceptable and a reason
    string once it is not; guard failure terminates integration as a
    breakdown rather than an error.
    """

    dimension: int
    rhs: Callable[[float, np.ndarray], np.ndarray]
    guard: Optional[Callable[[float, np.ndarray], Optional[str]]] = None


@dataclass(frozen=True)
class IntegratorControls:
    """Adaptive step control parameters.

    ``max_step`` caps accepted steps (used by callers that later interpolate
    between samples); ``fixed_step`` disables adaptivity entirely and is
    meant for convergence studies.
    """

    rtol: float = 1e-10
    atol: float = 1e-12
    initial_step: float = 1e-3
    min_step: float = 1e-12
    max_steps: int = 100_000
    max_step: float = math.inf
    fixed_step: Optional[float] = None

    def __post_init__(self):
        if not (self.rtol > 0.0 and self.atol > 0.0):
            raise ValueError("tolerances must be positive")
        if not (0.0 < self.min_step <= self.initial_step):
            raise ValueError("need 0 < min_step <= initial_step")
        if self.max_step <= 0.0:
            raise ValueError("max_step must be positive")
        if self.fixed_step is not None and self.fixed_step <= 0.0:
            raise ValueError("fixed_step must be positive")


class TerminationKind(Enum):
    REACHED_END = "ReachedEnd"
    STOPPED_BY_PREDICATE = "StoppedByPredicate"
    BREAKDOWN = "Breakdown"


@dataclass(frozen=True)
class Termination:
    kind: TerminationKind
    r_stop: float
    reason: Optional[str] = None


# Dormand-Prince 5(4) tableau (FSAL).
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = tuple(
    np.array(row)
    for row in (
        (),
        (1 / 5,),
        (3 / 40, 9 / 40),
        (44 / 45, -56 / 15, 32 / 9),
        (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
        (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
        (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
    )
)
_E = np.array(
    (
        71 / 57600,
        0.0,
        -71 / 16695,
        71 / 1920,
        -17253 / 339200,
        22 / 525,
        -1 / 40,
    )
)

_RHS_ERRORS = (ArithmeticError, ValueError)


class Trajectory:
    """Accepted samples of a terminal-value integration, r strictly decreasing.

    Dense evaluation uses the cubic Hermite interpolant of each step, built
    from the stored states and right-hand sides; it reproduces stored samples
    exactly.
    """

    def __init__(
        self,
        rs: Sequence[float],
        states: Sequence[np.ndarray],
        derivs: Sequence[np.ndarray],
        status: Termination,
    ):
        self.rs = np.asarray(rs, dtype=float)
        self.states = np.asarray(states, dtype=float)
        self.derivs = np.asarray(derivs, dtype=float)
        self.status = status
        if self.rs.size >= 2 and not np.all(np.diff(self.rs) < 0.0):
            raise ValueError("trajectory abscissae must strictly decrease")
        for arr in (self.rs, self.states, self.derivs):
            arr.setflags(write=False)
        # Ascending views for search and reconstruction.
        self.rs_ascending = np.ascontiguousarray(self.rs[::-1])
        self.states_ascending = np.ascontiguousarray(self.states[::-1])
        self.derivs_ascending = np.ascontiguousarray(self.derivs[::-1])
        for arr in (self.rs_ascending, self.states_ascending, self.derivs_ascending):
            arr.setflags(write=False)

    def __len__(self) -> int:
        return int(self.rs.size)

    @property
    def r_terminal(self) -> float:
        return float(self.rs[0])

    @property
    def r_last(self) -> float:
        return float(self.rs[-1])

    def dense_eval(self, r: float) -> np.ndarray:
        rs = self.rs_ascending
        tol = 1e-12 * max(1.0, abs(rs[-1] - rs[0]))
        if r < rs[0] - tol or r > rs[-1] + tol:
            raise OutOfRange(f"r={r} outside covered interval [{rs[0]}, {rs[-1]}]")
        if rs.size == 1:
            return self.states_ascending[0].copy()
        i = int(np.searchsorted(rs, r, side="right")) - 1
        i = min(max(i, 0), rs.size - 2)
        return _hermite(
            rs[i], self.states_ascending[i], self.derivs_ascending[i],
            rs[i + 1], self.states_ascending[i + 1], self.derivs_ascending[i + 1],
            r,
        )

    def component(self, index: int) -> np.ndarray:
        """Sampled values of one state component, in ascending-r order."""
        return self.states_ascending[:, index]


def _hermite(r0, y0, d0, r1, y1, d1, r):
    w = r1 - r0
    u = (r - r0) / w
    h00 = (2.0 * u - 3.0) * u * u + 1.0
    h10 = ((u - 2.0) * u + 1.0) * u
    h01 = (3.0 - 2.0 * u) * u * u
    h11 = (u - 1.0) * u * u
    return y0 * h00 + (w * d0) * h10 + y1 * h01 + (w * d1) * h11


def _error_norm(err: np.ndarray, y: np.ndarray, y_new: np.ndarray, controls) -> float:
    scale = controls.atol + controls.rtol * np.maximum(np.abs(y), np.abs(y_new))
    ratios = err / scale
    # fsum keeps the norm independent of component ordering, so symmetric
    # systems integrate bitwise-symmetrically.
    return math.sqrt(math.fsum(float(q) * float(q) for q in ratios) / err.size)


def integrate_terminal(
    sys: OdeSystem,
    r_terminal: float,
    terminal_state: Sequence[float],
    r_min: float,
    controls: Optional[IntegratorControls] = None,
    stop: Optional[Callable[[float, np.ndarray], Optional[str]]] = None,
) -> Trajectory:
    """Integrate y' = rhs backward from (r_terminal, terminal_state) toward r_min.

    Integration ends at r_min (ReachedEnd), where the stop predicate first
    triggers (StoppedByPredicate, localized by bisection on the dense
    output), or at breakdown: a guard failure or rhs blowup that persists
    down to the minimum step (Breakdown, keeping the last valid sample).

    Raises ``StepUnderflow`` when the error tolerance alone cannot be met and
    ``MaxStepsExceeded`` when the step budget runs out.
    """
    if controls is None:
        controls = IntegratorControls()
    if not r_min < r_terminal:
        raise ValueError("r_min must be below r_terminal")
    y = np.asarray(terminal_state, dtype=float).copy()
    if y.shape != (sys.dimension,):
        raise ValueError(f"terminal state must have shape ({sys.dimension},)")
    if sys.guard is not None:
        reason = sys.guard(r_terminal, y)
        if reason is not None:
            raise ValueError(f"terminal state fails definedness guard: {reason}")

    span = r_terminal - r_min

    def g(t: float, state: np.ndarray) -> np.ndarray:
        out = np.asarray(sys.rhs(r_terminal - t, state), dtype=float)
        if out.shape != (sys.dimension,):
            raise ValueError("rhs returned wrong dimension")
        return -out

    t = 0.0
    k1 = g(t, y)
    rs = [r_terminal]
    states = [y.copy()]
    derivs = [-k1]
    status: Optional[Termination] = None

    fixed = controls.fixed_step
    h = fixed if fixed is not None else min(controls.initial_step, controls.max_step, span)
    n_attempts = 0
    stop_hit = None

    while t < span:
        if n_attempts >= controls.max_steps:
            raise MaxStepsExceeded(f"exceeded {controls.max_steps} step attempts")
        n_attempts += 1
        clipped = h >= span - t
        h_try = span - t if clipped else h

        failure = None
        try:
            K = np.empty((7, y.size))
            K[0] = k1
            for i in range(1, 7):
                yi = y + h_try * (_A[i] @ K[:i])
                K[i] = g(t + _C[i] * h_try, yi)
            y_new = yi  # stage 7 state is the 5th-order solution (FSAL)
            err_vec = h_try * (_E @ K)
            if not (np.all(np.isfinite(y_new)) and np.all(np.isfinite(err_vec))):
                failure = "non-finite state or error estimate"
        except _RHS_ERRORS as exc:
            failure = str(exc) or exc.__class__.__name__

        t_new = span if clipped else t + h_try
        r_new = r_min if clipped else r_terminal - t_new

        if failure is None and sys.guard is not None:
            failure = sys.guard(r_new, y_new)

        if failure is not None:
            if fixed is not None or h_try * 0.5 < controls.min_step:
                status = Termination(TerminationKind.BREAKDOWN, rs[-1], failure)
                break
            h = h_try * 0.5
            continue

        if fixed is None:
            err = _error_norm(err_vec, y, y_new, controls)
            if err > 1.0:
                h = h_try * max(0.1, 0.9 * err ** -0.2)
                if h < controls.min_step:
                    raise StepUnderflow(
                        f"error tolerance unmet at minimum step near r={rs[-1]}"
                    )
                continue
            growth = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            h = min(h_try * growth, controls.max_step)

        # Accept.
        k7 = K[6]
        prev_r, prev_y, prev_d = rs[-1], states[-1], derivs[-1]
        t, y, k1 = t_new, y_new, k7
        rs.append(r_new)
        states.append(y.copy())
        derivs.append(-k7)

        if stop is not None:
            reason = stop(r_new, y)
            if reason:
                stop_hit = (prev_r, prev_y, prev_d, r_new, y.copy(), -k7, reason)
                break

    if stop_hit is not None:
        r0, y0s, d0s, r1, y1s, d1s, reason = stop_hit
        # The predicate is quiet at r0 (previous sample) and firing at r1;
        # bisect on this step's dense output.  The Hermite data always
        # belongs to the full step [r1, r0].
        r_hi, r_lo = r0, r1
        y_lo = y1s
        for _ in range(100):
            if r_hi - r_lo <= 1e-12 * max(1.0, abs(r_hi)):
                break
            r_mid = 0.5 * (r_hi + r_lo)
            y_mid = _hermite(r1, y1s, d1s, r0, y0s, d0s, r_mid)
            hit = stop(r_mid, y_mid)
            if hit:
                r_lo, y_lo = r_mid, y_mid
                reason = hit
            else:
                r_hi = r_mid
        try:
            d_stop = np.asarray(sys.rhs(r_lo, y_lo), dtype=float)
        except _RHS_ERRORS:
            d_stop = d1s
        rs[-1], states[-1], derivs[-1] = r_lo, np.asarray(y_lo), d_stop
        reason_text = reason if isinstance(reason, str) else "stop predicate"
        status = Termination(TerminationKind.STOPPED_BY_PREDICATE, rs[-1], reason_text)

    if status is None:
        status = Termination(TerminationKind.REACHED_END, rs[-1])
    return Trajectory(rs, states, derivs, status)


def invert_monotone(traj: Trajectory, component: int, target: float) -> float:
    """Solve component(r) = target along a strictly monotone trajectory component.

    Brackets on the stored samples, then refines on the dense output with a
    safeguarded root finder.
    """
    rs = traj.rs_ascending
    vals = traj.states_ascending[:, component]
    diffs = np.diff(vals)
    if np.all(diffs > 0.0):
        ordered = vals
        rs_ord = rs
    elif np.all(diffs < 0.0):
        ordered = vals[::-1]
        rs_ord = rs[::-1]
    else:
        raise NotMonotone(f"component {component} is not strictly monotone")

    if target == ordered[0]:
        return float(rs_ord[0])
    if target == ordered[-1]:
        return float(rs_ord[-1])
    if target < ordered[0] or target > ordered[-1]:
        raise TargetOutOfRange(
            f"target {target} outside [{ordered[0]}, {ordered[-1]}]"
        )

    j = int(np.searchsorted(ordered, target, side="left"))
    exact = np.flatnonzero(vals == target)
    if exact.size:
        return float(rs[exact[0]])
    lo = min(rs_ord[j - 1], rs_ord[j])
    hi = max(rs_ord[j - 1], rs_ord[j])

    def objective(r: float) -> float:
        return float(traj.dense_eval(r)[component] - target)

    root = brentq(objective, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200)
    return float(root)


def quadrature(p, a: float, b: float) -> float:
    """Integral of a radial profile (or plain callable) over [a, b].

    Composite 10-point Gauss-Legendre, doubling the panel count until the
    refinement changes the value by no more than 1e-12 * (b - a) * max|p|.
    """
    if a > b:
        raise ValueError("need a <= b")
    if a == b:
        return 0.0
    fn = p.value if hasattr(p, "value") else p
    nodes, weights = np.polynomial.legendre.leggauss(10)

    max_abs = 0.0

    def panelized(n_panels: int) -> float:
        nonlocal max_abs
        edges = np.linspace(a, b, n_panels + 1)
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            mid = 0.5 * (lo + hi)
            half = 0.5 * (hi - lo)
            vals = [fn(mid + half * xi) for xi in nodes]
            max_abs = max(max_abs, max(abs(v) for v in vals))
            total += half * math.fsum(w * v for w, v in zip(weights, vals))
        return total

    previous = panelized(1)
    n = 2
    while n <= 2 ** 16:
        current = panelized(n)
        if abs(current - previous) <= 1e-12 * (b - a) * max_abs:
            return current
        previous = current
        n *= 2
    raise IntegrationFailure("quadrature refinement did not converge")
