"""Shared oracles and manufactured-case builders for the test suite.

The oracles are deliberately independent of the library's evaluation path:
sympy differentiates symbolically, the finite-difference helpers use central
stencils on plain values, and the manufactured families carry hand-derived
closed-form curvature.
"""

import math

import numpy as np
import sympy as sp

from ricci_collar import (
    BoundaryData,
    GridProfile,
    RotSymMetric,
    RotSymTensor,
    boundary_data_of,
    ricci_components,
)

# ---------------------------------------------------------------------------
# Independent differentiation oracles
# ---------------------------------------------------------------------------

def fd_first(fn, r, h=1e-4):
    return (fn(r + h) - fn(r - h)) / (2.0 * h)


def fd_second(fn, r, h=1e-4):
    return (fn(r + h) - 2.0 * fn(r) + fn(r - h)) / (h * h)


def sympy_ricci(f_text: str, g_text: str, h_text: str):
    """Symbolic Ricci components of a rotationally symmetric metric.

    The formulas are retyped here from scratch so the test path shares no
    code with the implementation; sympy supplies the derivatives.
    """
    r = sp.symbols("r")
    f = sp.sympify(f_text)
    g = sp.sympify(g_text)
    h = sp.sympify(h_text)
    fr, gr, hr = (sp.diff(expr, r) for expr in (f, g, h))
    frr, grr = sp.diff(f, r, 2), sp.diff(g, r, 2)
    ll = -f * frr / h**2 + f * fr * hr / h**3 - f * fr * gr / (g * h**2)
    mm = -g * grr / h**2 + g * gr * hr / h**3 - g * fr * gr / (f * h**2)
    rr = -frr / f + fr * hr / (f * h) - grr / g + gr * hr / (g * h)
    return sp.lambdify(r, (ll, mm, rr), "math")


# ---------------------------------------------------------------------------
# Manufactured families with closed-form curvature
# ---------------------------------------------------------------------------

def exponential_case(a, b, p, q, c, x=1.0):
    """Metric (a e^{p r}, b e^{q r}, c) and its exact Ricci tensor.

    Hand algebra: Ric_ll = -a^2 p (p+q) e^{2pr} / c^2,
    Ric_mm = -b^2 q (p+q) e^{2qr} / c^2, Ric_rr = -(p^2 + q^2).
    """
    G = RotSymMetric.from_profiles(
        f"{a!r}*exp({p!r}*r)", f"{b!r}*exp({q!r}*r)", f"{c!r}", x
    )
    T = RotSymTensor.from_profiles(
        f"{-a * a * p * (p + q) / (c * c)!r}*exp({2.0 * p!r}*r)",
        f"{-b * b * q * (p + q) / (c * c)!r}*exp({2.0 * q!r}*r)",
        f"{-(p * p + q * q)!r}",
        x,
    )
    return G, T, boundary_data_of(G)


def einstein_negative_case(c2, x=1.0):
    """Hyperbolic Einstein metric for tau = -1/2 (kappa = 1) restricted to a
    collar, with T = tau G as the manufactured right-hand side."""
    f = f"{4.0 * math.pi!r}*sinh(0.5*r)"
    g = f"{math.sqrt(c2)!r}*cosh(0.5*r)"
    G = RotSymMetric.from_profiles(f, g, "1", x)
    T = RotSymTensor.from_profiles(
        f"-0.5*({f})^2", f"-0.5*({g})^2", "-0.5", x
    )
    return G, T, boundary_data_of(G)


def random_feasible_cases(n, seed=20260810):
    """Deterministic batch of manufactured feasible solve cases."""
    rng = np.random.default_rng(seed)
    cases = []
    while len(cases) < n:
        a = float(rng.uniform(0.5, 2.0))
        b = float(rng.uniform(0.5, 2.0))
        p = float(rng.uniform(0.4, 1.2)) * (1 if rng.random() < 0.5 else -1)
        q = float(rng.uniform(0.4, 1.2)) * (1 if rng.random() < 0.5 else -1)
        c = float(rng.uniform(0.5, 2.0))
        if abs(p + q) < 0.2:
            continue
        cases.append(exponential_case(a, b, p, q, c))
    return cases


def ricci_tensor_grid(G: RotSymMetric, n_nodes=2001) -> RotSymTensor:
    """Sample Ric(G) onto a Hermite grid, for round trips with grid tensors.

    Node derivatives come from central differences of the sampled component
    values; with ~2000 nodes the grid reproduces the closed form far below
    the solver tolerances.
    """
    lo = G.collar.r_min
    pad = 1e-6 * G.collar.x
    rs = np.linspace(lo + pad, 1.0, n_nodes)
    step = 1e-6 * G.collar.x

    def components(r):
        return ricci_components(*G.jets(r))

    vals = np.array([(c.ll, c.mm, c.rr) for c in map(components, rs)])
    ders = np.empty_like(vals)
    for i, r in enumerate(rs):
        r_lo = max(r - step, lo + pad / 2)
        r_hi = min(r + step, 1.0)
        c_lo, c_hi = components(r_lo), components(r_hi)
        ders[i] = [
            (c_hi.ll - c_lo.ll) / (r_hi - r_lo),
            (c_hi.mm - c_lo.mm) / (r_hi - r_lo),
            (c_hi.rr - c_lo.rr) / (r_hi - r_lo),
        ]
    return RotSymTensor(
        GridProfile(rs, vals[:, 0], ders[:, 0]),
        GridProfile(rs, vals[:, 1], ders[:, 1]),
        GridProfile(rs, vals[:, 2], ders[:, 2]),
        G.collar,
    )


def m1_case():
    """The exponential manufactured pair used throughout: G = (e^r, e^{2r}, 1)."""
    G = RotSymMetric.from_profiles("exp(r)", "exp(2*r)", "1", 1.0)
    T = RotSymTensor.from_profiles("-3*exp(2*r)", "-6*exp(4*r)", "-5", 1.0)
    return G, T, boundary_data_of(G)


def m1_boundary():
    e = math.e
    return BoundaryData(e, e * e, e * e, 2.0 * e**4)
