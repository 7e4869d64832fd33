"""Norms, conserved variables, energies, and rate fitting."""

import math

import numpy as np
import pytest

from hermwave.boundary import BoundarySpec
from hermwave.conservative import full_step_conservative
from hermwave.diagnostics import (
    ErrorReport,
    conservative_energy,
    conserved_pair,
    default_npts,
    dissipative_energy,
    field_interpolant,
    fit_rate,
    gauss_rule,
    l2_error,
    l2_error_field,
    l2_errors_pair,
    pp_subtract,
    seminorm_energy,
    seminorm_sq,
)
from hermwave.dissipative import SchemeConfig
from hermwave.grid import DUAL, PRIMAL, Field1D, FieldPair, Grid1D, TwoLevelState
from hermwave.poly import CellPolynomial, PiecewisePolynomial, shift


def _sine_data(xs, h, count, fn=np.sin):
    out = np.zeros((len(xs), count))
    for l in range(count):
        out[:, l] = fn(xs + l * math.pi / 2) * h**l / math.factorial(l)
    return out


def test_gauss_rule_integrates_polynomials():
    x, w = gauss_rule(3)
    assert np.dot(w, x**4) == pytest.approx(2.0 / 5.0, rel=1e-14)
    assert default_npts(3) == 8


def test_l2_error_exact_polynomial_is_zero():
    p = CellPolynomial(0.5, 1.0, [1.0, 2.0, -0.5])
    pp = PiecewisePolynomial([0.0, 1.0], [p])
    err = l2_error(pp, p, npts=4)
    assert err <= 1e-14


def test_l2_error_constant_reference():
    # zero field against exact = 1 over a length-L domain: sqrt(L)
    z = PiecewisePolynomial([0.0, 2.0], [CellPolynomial(1.0, 2.0, [0.0])])
    err = l2_error(z, lambda x: np.ones_like(x), npts=2)
    assert err == pytest.approx(math.sqrt(2.0), rel=1e-14)


def test_l2_error_clip_restricts_domain():
    one = PiecewisePolynomial([-1.0, 3.0], [CellPolynomial(1.0, 4.0, [1.0])])
    err = l2_error(one, lambda x: np.zeros_like(x), npts=2, clip=(0.0, 1.0))
    assert err == pytest.approx(1.0, rel=1e-14)


def test_l2_error_field_against_riemann_sum():
    n = 10
    grid = Grid1D(0.0, 2 * math.pi, n, periodic=True)
    m = 1
    xs = grid.nodes(PRIMAL)
    f = Field1D(grid, PRIMAL, 0.0, _sine_data(xs, grid.h, m + 1))
    bc = BoundarySpec()
    # npts beyond the polynomial-exact default: the integrand mixes in sin
    got = l2_error_field(f, np.sin, bc, npts=12)
    pp = field_interpolant(f, bc)
    xq = np.linspace(0.0, 2 * math.pi, 400_000, endpoint=False) + 1.1e-7
    d = pp(xq) - np.sin(xq)
    ref = math.sqrt(np.mean(d * d) * 2 * math.pi)
    assert got == pytest.approx(ref, rel=1e-8)


def test_pair_errors_match_single_field_calls():
    n, m = 8, 2
    grid = Grid1D(0.0, 2 * math.pi, n, periodic=True)
    xs = grid.nodes(PRIMAL)
    u = Field1D(grid, PRIMAL, 0.0, _sine_data(xs, grid.h, m + 1))
    v = Field1D(grid, PRIMAL, 0.0, _sine_data(xs, grid.h, m, fn=np.cos))
    pair = FieldPair(u, v)
    bc = BoundarySpec()
    eu, edux, ev = l2_errors_pair(pair, np.sin, np.cos, np.cos, bc)
    assert eu == pytest.approx(l2_error_field(u, np.sin, bc), rel=1e-13)
    assert ev == pytest.approx(
        l2_error_field(v, np.cos, bc, npts=default_npts(m)), rel=1e-13
    )
    ppdu = field_interpolant(u, bc).derivative(1)
    assert edux == pytest.approx(
        l2_error(ppdu, np.cos, default_npts(m)), rel=1e-13
    )


def _two_level_fields(n, m, rng, span=3.0):
    grid = Grid1D(0.0, span, n, periodic=True)
    cur = Field1D(grid, PRIMAL, 0.0, rng.standard_normal((n, m + 1)))
    prev = Field1D(grid, DUAL, -0.1, rng.standard_normal((n, m + 1)))
    return grid, cur, prev


def test_conserved_pair_coincident_levels_vanish():
    rng = np.random.default_rng(41)
    grid, cur, _ = _two_level_fields(6, 1, rng)
    bc = BoundarySpec()
    pc = field_interpolant(cur, bc)
    pair = conserved_pair(pc, pc, 0.0)
    xq = np.linspace(0.0, 3.0, 97, endpoint=False) + 1e-4
    assert np.abs(pair.p_plus(xq)).max() <= 1e-13
    assert np.abs(pair.p_minus(xq)).max() <= 1e-13


def test_conserved_pair_zero_current():
    rng = np.random.default_rng(42)
    grid, cur, prev = _two_level_fields(6, 1, rng)
    bc = BoundarySpec()
    zero = Field1D(grid, PRIMAL, 0.0, np.zeros_like(cur.values))
    pz = field_interpolant(zero, bc)
    pv = field_interpolant(prev, bc)
    delta = 0.11
    pair = conserved_pair(pz, pv, delta)
    xq = np.linspace(0.0, 3.0, 53, endpoint=False) + 2.7e-4
    np.testing.assert_allclose(pair.p_plus(xq), -pv(xq + delta), atol=1e-12)
    np.testing.assert_allclose(pair.p_minus(xq), -pv(xq - delta), atol=1e-12)


def test_conserved_pair_union_slicing():
    """delta = h/4 cuts every cell at the shifted edges of the other level."""
    rng = np.random.default_rng(43)
    n = 6
    grid, cur, prev = _two_level_fields(n, 1, rng)
    h = grid.h
    bc = BoundarySpec()
    pair = conserved_pair(
        field_interpolant(cur, bc), field_interpolant(prev, bc), h / 4
    )
    for member, frac in ((pair.p_plus, 0.25), (pair.p_minus, 0.75)):
        sizes = np.diff(member.breakpoints)
        # cell edges at k*h plus shifted previous edges at (k + frac)*h
        want = set()
        for k in range(n):
            want.add(round(k * h, 12))
            want.add(round((k + frac) * h, 12))
        got = {round(b, 12) for b in member.breakpoints[:-1]}
        assert want <= got
        assert np.all(sizes > 0)


def test_conserved_pair_needs_periodic():
    p = PiecewisePolynomial([0.0, 1.0], [CellPolynomial(0.5, 1.0, [1.0])])
    with pytest.raises(ValueError):
        conserved_pair(p, p, 0.1)


def test_pp_subtract_pointwise():
    rng = np.random.default_rng(44)
    grid, cur, prev = _two_level_fields(5, 2, rng)
    bc = BoundarySpec()
    a = field_interpolant(cur, bc)
    b = field_interpolant(prev, bc)  # window offset by h/2
    d = pp_subtract(a, b)
    xq = np.linspace(0.0, 3.0, 101, endpoint=False) + 3.1e-4
    np.testing.assert_allclose(d(xq), a(xq) - b(xq), atol=1e-12)


def test_seminorm_zero():
    z = PiecewisePolynomial([0.0, 1.0], [CellPolynomial(0.5, 1.0, [0.0, 0.0])])
    assert seminorm_sq(z, 2) == 0.0


@pytest.mark.parametrize("m", [1, 2, 3])
def test_seminorm_constant_derivative(m):
    # only the degree-(m+1) coefficient: derivative m+1 is the constant
    # K = a * (m+1)! / h**(m+1); the integral over length s is K**2 * s
    a, h, s = 0.7, 0.5, 1.3
    coeffs = np.zeros(m + 2)
    coeffs[m + 1] = a
    p = CellPolynomial(0.2, h, coeffs)
    pp = PiecewisePolynomial([0.2, 0.2 + s], [p])
    K = a * math.factorial(m + 1) / h ** (m + 1)
    assert seminorm_sq(pp, m + 1) == pytest.approx(K * K * s, rel=1e-13)


def test_seminorm_shift_invariance():
    rng = np.random.default_rng(45)
    n = 4
    grid = Grid1D(0.0, 2.0, n, periodic=True)
    f = Field1D(grid, PRIMAL, 0.0, rng.standard_normal((n, 3)))
    pp = field_interpolant(f, BoundarySpec())
    base = seminorm_sq(pp, 3)
    h = grid.h
    for j in (1, 2, 3):
        assert seminorm_sq(shift(pp, j * h / 4), 3) == pytest.approx(base, rel=1e-12)


def test_dissipative_energy_zero():
    grid = Grid1D(0.0, 1.0, 4, periodic=True)
    pair = FieldPair(
        Field1D(grid, PRIMAL, 0.0, np.zeros((4, 3))),
        Field1D(grid, PRIMAL, 0.0, np.zeros((4, 2))),
    )
    assert dissipative_energy(pair, 2.0, BoundarySpec()) == 0.0


@pytest.mark.parametrize("m", [1, 2])
def test_dissipative_energy_constant_curvature(m):
    # u = x**(m+1) on walls: the interpolant reproduces it cell by cell,
    # so |I u|_{m+1}^2 = ((m+1)!)**2 * L exactly; v = 0 adds nothing
    n, L = 5, 1.0
    grid = Grid1D(0.0, L, n, periodic=False)
    xs = grid.nodes(PRIMAL)
    h = grid.h
    uvals = np.zeros((len(xs), m + 1))
    for l in range(m + 1):
        fall = math.factorial(m + 1) / math.factorial(m + 1 - l)
        uvals[:, l] = fall * xs ** (m + 1 - l) * h**l / math.factorial(l)
    pair = FieldPair(
        Field1D(grid, PRIMAL, 0.0, uvals),
        Field1D(grid, PRIMAL, 0.0, np.zeros((len(xs), m))),
    )
    speed = 1.5
    bc = BoundarySpec("dirichlet0", "dirichlet0")
    K = math.factorial(m + 1)
    want = speed * speed * K * K * L
    assert dissipative_energy(pair, speed, bc) == pytest.approx(want, rel=1e-12)


def test_conservative_energy_invariant_under_step():
    n, m = 10, 2
    grid = Grid1D(0.0, 2 * math.pi, n, periodic=True)
    cfg = SchemeConfig(m=m, lam=0.8)
    dt = cfg.dt(grid.h)
    xs = grid.nodes(PRIMAL)
    xd = grid.nodes(DUAL)
    cur = Field1D(grid, PRIMAL, 0.0, _sine_data(xs, grid.h, m + 1))
    pvals = np.zeros((n, m + 1))
    for l in range(m + 1):
        pvals[:, l] = np.sin(xd + dt / 2 + l * math.pi / 2) * grid.h**l / math.factorial(l)
    prev = Field1D(grid, DUAL, -dt / 2, pvals)
    bc = BoundarySpec()
    state = TwoLevelState(cur, prev)
    e0 = conservative_energy(state.current, state.previous, cfg.speed, dt, bc)
    for _ in range(5):
        state = full_step_conservative(state, cfg, bc)
    e5 = conservative_energy(state.current, state.previous, cfg.speed, dt, bc)
    assert e5 == pytest.approx(e0, rel=1e-12)
    assert e0 > 0.0


def test_conservative_energy_matches_manual_assembly():
    rng = np.random.default_rng(46)
    grid, cur, prev = _two_level_fields(8, 1, rng, span=2.0)
    bc = BoundarySpec()
    speed, dt = 1.3, 0.05
    e = conservative_energy(cur, prev, speed, dt, bc)
    pair = conserved_pair(
        field_interpolant(cur, bc), field_interpolant(prev, bc), 0.5 * speed * dt
    )
    assert e == pytest.approx(seminorm_energy(pair, 2), rel=1e-13)


def test_fit_rate_exact_power_law():
    hs = np.array([0.4, 0.2, 0.1, 0.05])
    errs = 2.7 * hs**3
    assert fit_rate(hs, errs) == pytest.approx(3.0, abs=1e-12)


def test_fit_rate_constant_errors():
    hs = np.array([0.4, 0.2, 0.1])
    errs = np.full(3, 0.123)
    assert fit_rate(hs, errs) == pytest.approx(0.0, abs=1e-12)


def test_fit_rate_needs_three_levels():
    with pytest.raises(ValueError):
        fit_rate([0.2, 0.1], [1.0, 0.5])


def test_error_report_rates():
    hs = np.array([0.4, 0.2, 0.1])
    errs = 5.0 * hs**2
    rep = ErrorReport(
        ns=np.array([5, 10, 20]), hs=hs, dts=0.8 * hs, err_u=errs
    )
    np.testing.assert_allclose(rep.pair_rates(), [2.0, 2.0], rtol=1e-12)
    assert rep.rate() == pytest.approx(2.0, abs=1e-12)


def test_error_report_validation():
    with pytest.raises(ValueError):
        ErrorReport(
            ns=np.array([5, 10]),
            hs=np.array([0.1, 0.2]),  # not decreasing
            dts=np.array([0.1, 0.2]),
            err_u=np.array([1.0, 2.0]),
        )
    with pytest.raises(ValueError):
        ErrorReport(
            ns=np.array([5, 10]),
            hs=np.array([0.2, 0.1]),
            dts=np.array([0.2, 0.1]),
            err_u=np.array([1.0, 0.0]),  # nonpositive error
        )
