"""Error norms, convergence rates, and conserved-variable energies.

The conservative scheme preserves the seminorm energy

    E(t_n) = |P_+|_{m+1}^2 + |P_-|_{m+1}^2,
    P_± = p^n - S_± p^{n-1/2},   S_± w(x) = w(x ± c dt/2),

where p^n, p^{n-1/2} are the global piecewise interpolants of the two
levels and |f|_r^2 integrates the squared r-th derivative. Both members
are piecewise polynomial on the union of the cell edges of p^n with the
shifted edges of p^{n-1/2} (for dt = h/2 that slices each cell into four
h/4 pieces), so the integral is computed exactly: per union piece, a
Gauss rule with enough points for the degree-2m square of the degree-m
derivative. No quadrature error enters the drift measurement.

The dissipative analogue c^2 |I_m u|_{m+1}^2 + |I_{m-1} v|_m^2 is what
the (u, v) scheme dissipates at every interpolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boundary import BoundarySpec, BoundarySpec2D, corner_sources, pair_sources
from .grid import Field1D, Field2D, FieldPair, flip
from .interp import apply_interp, apply_interp_2d
from .poly import CellPolynomial, PiecewisePolynomial, shift


def gauss_rule(npts: int):
    """Gauss-Legendre nodes/weights on [-1, 1]."""
    return np.polynomial.legendre.leggauss(npts)


def default_npts(m: int) -> int:
    # exact for the degree-2(2m+1) integrands of the property tests
    return 2 * m + 2


# ---------------------------------------------------------------------------
# global interpolants of nodal fields


def field_interpolant(field: Field1D, bc: BoundarySpec) -> PiecewisePolynomial:
    """Piecewise Hermite interpolant on the field's cells.

    Cells sit between consecutive nodes of the field's own parity; with
    walls, a dual field contributes ghost-backed half cells at the edges
    (their pieces extend past the domain; integration clips).
    """
    data, centers = pair_sources(field, bc)
    coeffs = apply_interp(data)
    h = field.grid.h
    pieces = [CellPolynomial(c, h, coeffs[i]) for i, c in enumerate(centers)]
    bp = np.concatenate([centers - 0.5 * h, centers[-1:] + 0.5 * h])
    return PiecewisePolynomial(bp, pieces, periodic=field.grid.periodic)


# ---------------------------------------------------------------------------
# L2 errors


def l2_error(pp: PiecewisePolynomial, exact, npts: int,
             clip: tuple[float, float] | None = None) -> float:
    """sqrt(integral (pp - exact)^2), per-piece Gauss quadrature.

    Args:
        clip: optional (lo, hi) restricting the integral (ghost-backed
            edge pieces of wall problems stick out of the domain).
    """
    xg, wg = gauss_rule(npts)
    total = 0.0
    for i, p in enumerate(pp.pieces):
        a, b = pp.breakpoints[i], pp.breakpoints[i + 1]
        if clip is not None:
            a, b = max(a, clip[0]), min(b, clip[1])
            if b <= a:
                continue
        x = 0.5 * (a + b) + 0.5 * (b - a) * xg
        d = p(x) - exact(x)
        total += 0.5 * (b - a) * np.dot(wg, d * d)
    return math.sqrt(total)


def _domain_clip(field):
    # periodic interpolants live on a window shifted by up to h/2; one full
    # period is integrated either way, so only walls need clipping
    if field.grid.periodic:
        return None
    return field.grid.x_left, field.grid.x_right


def l2_error_field(field: Field1D, exact, bc: BoundarySpec,
                   npts: int | None = None) -> float:
    m = field.order
    pp = field_interpolant(field, bc)
    return l2_error(pp, exact, npts or default_npts(m), clip=_domain_clip(field))


def l2_errors_pair(pair: FieldPair, exact_u, exact_dux, exact_v,
                   bc: BoundarySpec, npts: int | None = None):
    """(u, u_x, v) errors of a dissipative state in one sweep."""
    m = pair.u.order
    npts = npts or default_npts(m)
    ppu = field_interpolant(pair.u, bc)
    ppv = field_interpolant(pair.v, bc)
    clip = _domain_clip(pair.u)
    return (
        l2_error(ppu, exact_u, npts, clip),
        l2_error(ppu.derivative(1), exact_dux, npts, clip),
        l2_error(ppv, exact_v, npts, clip),
    )


def l2_error_field_2d(field: Field2D, exact, bc: BoundarySpec2D,
                      npts: int | None = None) -> float:
    """L2 error of the global tensor interpolant against exact(X, Y)."""
    mx, my = field.orders
    npts = npts or default_npts(max(mx, my))
    data, cx, cy = corner_sources(field, bc)
    coeffs = apply_interp_2d(data)  # (ncx, ncy, 2mx+2, 2my+2)
    hx, hy = field.grid.hx, field.grid.hy
    xg, wg = gauss_rule(npts)
    vx = np.vander(0.5 * xg, coeffs.shape[-2], increasing=True)  # (p, a)
    vy = np.vander(0.5 * xg, coeffs.shape[-1], increasing=True)
    vals = np.einsum("ijab,pa,qb->ijpq", coeffs, vx, vy, optimize=True)
    x = cx[:, None] + 0.5 * hx * xg[None, :]  # (ncx, p)
    y = cy[:, None] + 0.5 * hy * xg[None, :]
    diff = vals - exact(x[:, None, :, None], y[None, :, None, :])
    w2 = wg[:, None] * wg[None, :]
    total = np.sum(diff * diff * w2) * (0.25 * hx * hy)
    return math.sqrt(total)


# ---------------------------------------------------------------------------
# conserved variables and seminorm energies


@dataclass(frozen=True)
class ConservedPair:
    p_plus: PiecewisePolynomial
    p_minus: PiecewisePolynomial


def pp_subtract(a: PiecewisePolynomial, b: PiecewisePolynomial) -> PiecewisePolynomial:
    """a - b on the union breakpoint set; both periodic with equal period.

    b is looked up through its own periodic window, so the two fields may
    live on windows offset by half a cell.
    """
    lo, hi = a.domain
    span = hi - lo
    blo = b.domain[0]
    tol = 1e-12 * span
    edges = list(a.breakpoints)
    for e in b.breakpoints[:-1]:
        w = lo + (e - lo) % span
        edges.append(w)
    edges = sorted(edges)
    merged = [lo]
    for e in edges:
        if e - merged[-1] > tol:
            merged.append(e)
    if hi - merged[-1] <= tol:
        merged[-1] = hi
    else:
        merged.append(hi)
    pieces = []
    for i in range(len(merged) - 1):
        xm = 0.5 * (merged[i] + merged[i + 1])
        ia = int(np.searchsorted(a.breakpoints, xm, side="right") - 1)
        pa = a.pieces[min(ia, len(a.pieces) - 1)]
        xw = blo + (xm - blo) % (b.domain[1] - blo)
        ib = int(np.searchsorted(b.breakpoints, xw, side="right") - 1)
        pb = b.pieces[min(ib, len(b.pieces) - 1)]
        pb = CellPolynomial(pb.center + (xm - xw), pb.width, pb.coeffs)
        ca = pa.recentered(xm, pa.width)
        cb = pb.recentered(xm, pa.width)
        n = max(len(ca.coeffs), len(cb.coeffs))
        cc = np.zeros(n)
        cc[: len(ca.coeffs)] = ca.coeffs
        cc[: len(cb.coeffs)] -= cb.coeffs
        pieces.append(CellPolynomial(xm, pa.width, cc))
    return PiecewisePolynomial(np.asarray(merged), pieces, periodic=True)


def conserved_pair(current: PiecewisePolynomial, previous: PiecewisePolynomial,
                   delta: float) -> ConservedPair:
    """P_± = current - S_± previous with shift distance delta = c*dt/2."""
    if not (current.periodic and previous.periodic):
        raise ValueError("conserved variables need a periodic domain")
    return ConservedPair(
        p_plus=pp_subtract(current, shift(previous, delta)),
        p_minus=pp_subtract(current, shift(previous, -delta)),
    )


def seminorm_sq(pp: PiecewisePolynomial, order: int) -> float:
    """|pp|_order^2 = integral of the squared order-th derivative, exact."""
    total = 0.0
    for i, p in enumerate(pp.pieces):
        q = p.derivative(order)
        deg = len(q.coeffs) - 1
        xg, wg = gauss_rule(deg + 1)
        a, b = pp.breakpoints[i], pp.breakpoints[i + 1]
        x = 0.5 * (a + b) + 0.5 * (b - a) * xg
        vals = q(x)
        total += 0.5 * (b - a) * np.dot(wg, vals * vals)
    return total


def seminorm_energy(pair: ConservedPair, order: int) -> float:
    """E = |P_+|_order^2 + |P_-|_order^2 (order = m+1 for the scheme)."""
    return seminorm_sq(pair.p_plus, order) + seminorm_sq(pair.p_minus, order)


def conservative_energy(current: Field1D, previous: Field1D, speed: float,
                        dt: float, bc: BoundarySpec) -> float:
    """E(t_n) from a two-level nodal state."""
    cur = field_interpolant(current, bc)
    prev = field_interpolant(previous, bc)
    pair = conserved_pair(cur, prev, 0.5 * speed * dt)
    return seminorm_energy(pair, current.order + 1)


def dissipative_energy(state: FieldPair, speed: float, bc: BoundarySpec) -> float:
    """c^2 |I_m u|_{m+1}^2 + |I_{m-1} v|_m^2 on a periodic domain."""
    m = state.u.order
    ppu = field_interpolant(state.u, bc)
    ppv = field_interpolant(state.v, bc)
    return speed * speed * seminorm_sq(ppu, m + 1) + seminorm_sq(ppv, m)


# ---------------------------------------------------------------------------
# convergence-rate fitting


@dataclass(frozen=True)
class ErrorReport:
    """Refinement-study results; errors indexed coarsest first."""

    ns: np.ndarray
    hs: np.ndarray
    dts: np.ndarray
    err_u: np.ndarray
    err_dux: np.ndarray | None = None
    err_v: np.ndarray | None = None

    def __post_init__(self):
        if np.any(np.diff(self.hs) >= 0):
            raise ValueError("refinement levels must have strictly decreasing h")
        for e in (self.err_u, self.err_dux, self.err_v):
            if e is not None and not np.all(e > 0):
                raise ValueError("error norms must be positive")

    def pair_rates(self) -> np.ndarray:
        e, h = self.err_u, self.hs
        return np.log(e[:-1] / e[1:]) / np.log(h[:-1] / h[1:])

    def rate(self) -> float:
        return fit_rate(self.hs, self.err_u)


def fit_rate(hs, errors) -> float:
    """Least-squares slope of log error vs log h over the finest half.

    The coarsest levels of a refinement study sit outside the asymptotic
    range; ceil(levels/2) finest levels enter the fit.
    """
    hs = np.asarray(hs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if len(hs) < 3:
        raise ValueError(f"rate fit needs at least 3 levels, got {len(hs)}")
    k = (len(hs) + 1) // 2
    return float(np.polyfit(np.log(hs[-k:]), np.log(errors[-k:]), 1)[0])
