"""Integrator, dense output, inversion, and quadrature tests.

The workhorse benchmark is y'' = y integrated backward from y(1) = y'(1) = 1,
whose solution e^{r-1} is closed-form at every point.
"""

import math

import numpy as np
import pytest

from ricci_collar import (
    IntegratorControls,
    MaxStepsExceeded,
    NotMonotone,
    OdeSystem,
    OutOfRange,
    StepUnderflow,
    TargetOutOfRange,
    TerminationKind,
    as_profile,
    integrate_terminal,
    invert_monotone,
    quadrature,
)

EXP_SYSTEM = OdeSystem(2, lambda r, y: np.array([y[1], y[0]]))


def exp_trajectory(r_min=0.0, controls=None, stop=None):
    return integrate_terminal(EXP_SYSTEM, 1.0, [1.0, 1.0], r_min, controls, stop)


class TestIntegrateTerminal:
    def test_exponential_benchmark(self):
        traj = exp_trajectory(r_min=0.5)
        assert traj.status.kind is TerminationKind.REACHED_END
        assert traj.r_last == 0.5
        y = traj.dense_eval(0.5)
        assert abs(y[0] - math.exp(-0.5)) < 1e-9

    def test_constant_solution(self):
        sys0 = OdeSystem(1, lambda r, y: np.array([0.0]))
        traj = integrate_terminal(sys0, 1.0, [4.25], 0.0)
        assert traj.status.kind is TerminationKind.REACHED_END
        assert all(s[0] == 4.25 for s in traj.states)

    def test_stop_predicate_bisection(self):
        traj = exp_trajectory(
            stop=lambda r, y: "slope below half" if y[1] < 0.5 else None
        )
        assert traj.status.kind is TerminationKind.STOPPED_BY_PREDICATE
        assert traj.status.reason == "slope below half"
        assert traj.status.r_stop == pytest.approx(1.0 + math.log(0.5), abs=1e-6)

    def test_breakdown_keeps_last_valid_sample(self):
        sys1 = OdeSystem(
            1,
            lambda r, y: np.array([1.0]),
            guard=lambda r, y: "y fell below 1/2" if y[0] < 0.5 else None,
        )
        traj = integrate_terminal(sys1, 1.0, [1.0], 0.0)
        assert traj.status.kind is TerminationKind.BREAKDOWN
        assert traj.status.reason == "y fell below 1/2"
        # solution is y(r) = r; the guard boundary sits at r = 1/2
        assert traj.status.r_stop == pytest.approx(0.5, abs=1e-9)
        assert traj.states[-1][0] >= 0.5

    def test_step_underflow(self):
        rough = OdeSystem(1, lambda r, y: np.array([0.0 if r > 0.5 else 1e14]))
        with pytest.raises(StepUnderflow):
            integrate_terminal(rough, 1.0, [1.0], 0.0)

    def test_max_steps(self):
        controls = IntegratorControls(fixed_step=1e-5, max_steps=10)
        with pytest.raises(MaxStepsExceeded):
            exp_trajectory(controls=controls)

    def test_guard_rejects_terminal_state(self):
        sys1 = OdeSystem(
            1, lambda r, y: np.array([1.0]), guard=lambda r, y: "bad start"
        )
        with pytest.raises(ValueError, match="bad start"):
            integrate_terminal(sys1, 1.0, [1.0], 0.0)

    def test_determinism(self):
        a = exp_trajectory()
        b = exp_trajectory()
        assert np.array_equal(a.rs, b.rs)
        assert np.array_equal(a.states, b.states)
        assert np.array_equal(a.derivs, b.derivs)

    def test_convergence_order(self):
        """Halving a fixed step cuts the max error by at least 2^4 * 0.8."""
        errors = []
        for h in (0.5, 0.25, 0.125, 0.0625):
            traj = integrate_terminal(
                EXP_SYSTEM, 1.0, [1.0, 1.0], -1.0, IntegratorControls(fixed_step=h)
            )
            errors.append(
                max(
                    abs(traj.states[i][0] - math.exp(traj.rs[i] - 1.0))
                    for i in range(len(traj))
                )
            )
        for coarse, fine in zip(errors, errors[1:]):
            assert coarse / fine >= 2**4 * 0.8

    def test_tolerance_monotonicity(self):
        errors = []
        for rtol in (1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10):
            traj = exp_trajectory(
                controls=IntegratorControls(rtol=rtol, atol=1e-14)
            )
            errors.append(abs(traj.states[-1][0] - math.exp(-1.0)))
        for coarse, fine in zip(errors, errors[1:]):
            assert fine <= coarse


class TestDenseEval:
    def test_exact_at_samples(self):
        traj = exp_trajectory()
        for i in range(len(traj)):
            assert np.array_equal(traj.dense_eval(float(traj.rs[i])), traj.states[i])

    def test_midpoint_accuracy(self):
        traj = exp_trajectory(r_min=0.5)
        assert abs(traj.dense_eval(0.75)[0] - math.exp(-0.25)) < 1e-9

    def test_fourth_order_local_error(self):
        traj = exp_trajectory(controls=IntegratorControls(fixed_step=0.05))
        worst = max(
            abs(traj.dense_eval(r)[0] - math.exp(r - 1.0))
            for r in np.linspace(0.01, 0.99, 197)
        )
        assert worst < 1e-7  # ~ |y''''| h^4 / 384 at h = 0.05

    def test_out_of_range(self):
        traj = exp_trajectory(r_min=0.5)
        with pytest.raises(OutOfRange):
            traj.dense_eval(0.4)
        with pytest.raises(OutOfRange):
            traj.dense_eval(1.1)


class TestInvertMonotone:
    def test_closed_form_targets(self):
        traj = exp_trajectory()
        assert invert_monotone(traj, 1, 0.8) == pytest.approx(
            1.0 + math.log(0.8), abs=1e-8
        )
        assert invert_monotone(traj, 1, 1.0) == 1.0

    def test_identity_roundtrip(self):
        """invert then evaluate lands back on the target within 1e-10."""
        traj = exp_trajectory()
        rng = np.random.default_rng(11)
        lo, hi = math.exp(-1.0), 1.0
        for target in rng.uniform(lo + 1e-6, hi - 1e-6, 100):
            r = invert_monotone(traj, 0, float(target))
            assert abs(traj.dense_eval(r)[0] - target) <= 1e-10

    def test_target_out_of_range(self):
        traj = exp_trajectory()
        with pytest.raises(TargetOutOfRange):
            invert_monotone(traj, 1, 2.0)

    def test_not_monotone(self):
        oscillator = OdeSystem(2, lambda r, y: np.array([y[1], -y[0]]))
        traj = integrate_terminal(oscillator, 8.0, [0.0, 1.0], 0.0)
        with pytest.raises(NotMonotone):
            invert_monotone(traj, 0, 0.3)


class TestQuadrature:
    def test_constant(self):
        assert quadrature(as_profile(1), 0.0, 1.0) == pytest.approx(1.0, abs=1e-14)

    def test_linear(self):
        assert quadrature(as_profile("2*r"), 0.0, 1.0) == pytest.approx(1.0, abs=1e-13)

    def test_cosine(self):
        value = quadrature(as_profile("cos(pi*r)"), 0.0, 0.5)
        assert value == pytest.approx(1.0 / math.pi, abs=1e-13)

    def test_plain_callable_and_empty_interval(self):
        assert quadrature(lambda r: r * r, 0.0, 1.0) == pytest.approx(1 / 3, abs=1e-13)
        assert quadrature(lambda r: 5.0, 0.3, 0.3) == 0.0
