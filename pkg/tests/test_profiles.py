"""Grid-profile interpolation quality and domain handling."""

import math

import numpy as np
import pytest

from ricci_collar import DomainError, ExprProfile, GridProfile, as_profile


def _grid_of(fn, dfn, lo, hi, n):
    rs = np.linspace(lo, hi, n)
    return GridProfile(rs, [fn(r) for r in rs], [dfn(r) for r in rs])


class TestGridProfile:
    def test_exact_at_nodes(self):
        grid = _grid_of(math.exp, math.exp, 0.0, 1.0, 11)
        for r in grid.rs:
            jet = grid.jet(float(r))
            assert jet.v0 == math.exp(r)
            assert jet.v1 == math.exp(r)

    def test_interpolation_orders(self):
        """Cubic Hermite: value O(h^4), slope O(h^3), curvature O(h^2)."""
        fn = lambda r: math.exp(2.0 * r)
        dfn = lambda r: 2.0 * math.exp(2.0 * r)
        grid = _grid_of(fn, dfn, 0.0, 1.0, 501)  # h = 0.002
        rng = np.random.default_rng(7)
        for r in rng.uniform(0.0, 1.0, 50):
            jet = grid.jet(float(r))
            assert abs(jet.v0 - fn(r)) < 1e-9
            assert abs(jet.v1 - dfn(r)) < 1e-6
            assert abs(jet.v2 - 4.0 * fn(r)) < 1e-3

    def test_edge_tolerance_and_domain(self):
        grid = _grid_of(math.exp, math.exp, 0.0, 1.0, 11)
        grid.value(-1e-12)
        grid.value(1.0 + 1e-12)
        with pytest.raises(DomainError):
            grid.value(-0.1)
        with pytest.raises(DomainError):
            grid.value(1.1)

    def test_rejects_bad_grids(self):
        with pytest.raises(ValueError):
            GridProfile([0.0, 0.0, 1.0], [1.0, 1.0, 1.0], [0.0, 0.0, 0.0])
        with pytest.raises(ValueError):
            GridProfile([0.0], [1.0], [0.0])
        with pytest.raises(ValueError):
            GridProfile([0.0, 1.0], [1.0, math.inf], [0.0, 0.0])


class TestAsProfile:
    def test_coercions(self):
        assert isinstance(as_profile("sin(r)"), ExprProfile)
        assert as_profile(2.5).value(0.3) == 2.5
        grid = _grid_of(math.exp, math.exp, 0.0, 1.0, 5)
        assert as_profile(grid) is grid

    def test_rejects_junk(self):
        with pytest.raises(TypeError):
            as_profile(object())
