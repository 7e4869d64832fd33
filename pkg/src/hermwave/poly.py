"""Scaled-basis polynomial arithmetic on grid cells.

A cell polynomial of width h centered at x_c is stored through the
coefficients a_l of

    p(x) = sum_l a_l ((x - x_c) / h)**l,

so that a_l = (h**l / l!) * d^l p / dx^l evaluated at the center. Keeping
the h-scaling inside the coefficients makes every entry O(1) for smooth
data regardless of the polynomial degree, which is what the interpolation
and time-stepping modules rely on. Physical derivatives only appear at
API boundaries.

The 2D variant is a tensor product: coeffs[k, l] multiplies
((x-x_c)/h_x)**k * ((y-y_c)/h_y)**l.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class CellPolynomial:
    """One polynomial piece in the scaled monomial basis.

    Attributes:
        center: physical coordinate of the cell midpoint.
        width: cell width h > 0 used for the basis scaling.
        coeffs: dense coefficient array a_l, lowest degree first.
    """

    center: float
    width: float
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=float))
        if self.width <= 0.0:
            raise ValueError(f"cell width must be positive, got {self.width}")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        """Evaluate by Horner's rule in the scaled variable xi = (x-center)/h.

        Callers may evaluate outside the cell (ghost logic does); no check.
        """
        xi = (np.asarray(x, dtype=float) - self.center) / self.width
        out = np.zeros_like(xi) + self.coeffs[-1]
        for a in self.coeffs[-2::-1]:
            out = out * xi + a
        return out

    def derivative(self, order: int = 1) -> "CellPolynomial":
        """Differentiate `order` times; degree drops accordingly.

        Orders beyond the degree yield the zero polynomial (length 1).
        """
        if order < 0:
            raise ValueError("derivative order must be nonnegative")
        if order == 0:
            return self
        a = self.coeffs
        if order > self.degree:
            return CellPolynomial(self.center, self.width, np.zeros(1))
        n = len(a) - order
        j = np.arange(n)
        # d^r/dx^r xi^(j+r) = (j+r)!/j! xi^j / h^r
        fall = np.array([math.factorial(jj + order) // math.factorial(jj) for jj in j], dtype=float)
        return CellPolynomial(self.center, self.width, a[order:] * fall / self.width**order)

    def scaled_derivs(self, x: float, nmax: int) -> np.ndarray:
        """Node data read-off: b_l = (h**l/l!) p^(l)(x) for l = 0..nmax.

        b_l = sum_{j>=l} C(j,l) a_j xi0**(j-l) with xi0 = (x-center)/h.
        """
        xi0 = (x - self.center) / self.width
        a = self.coeffs
        out = np.zeros(nmax + 1)
        for l in range(min(nmax, self.degree) + 1):
            s = 0.0
            for j in range(self.degree, l - 1, -1):
                s = s * xi0 + math.comb(j, l) * a[j]
            out[l] = s
        return out

    def recentered(self, center: float, width: float | None = None) -> "CellPolynomial":
        """Re-express in the basis of a different center (and optionally width).

        Exact affine composition p(xi0 + r*eta) carried out by Horner with
        polynomial accumulation; the represented function is unchanged.
        """
        w = self.width if width is None else width
        xi0 = (center - self.center) / self.width
        r = w / self.width
        a = self.coeffs
        out = np.zeros(len(a))
        out[0] = a[-1]
        deg = 0
        for c in a[-2::-1]:
            # out <- out * (xi0 + r*eta) + c
            new = np.zeros(len(a))
            new[: deg + 1] += out[: deg + 1] * xi0
            new[1 : deg + 2] += out[: deg + 1] * r
            new[0] += c
            out = new
            deg += 1
        return CellPolynomial(center, w, out)


@dataclass(frozen=True)
class CellPolynomial2D:
    """Tensor-product piece; coeffs[k, l] goes with xi**k * eta**l."""

    center: tuple[float, float]
    widths: tuple[float, float]
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=float))
        if self.coeffs.ndim != 2:
            raise ValueError("2D cell polynomial needs a 2D coefficient array")

    def __call__(self, x, y):
        xi = (np.asarray(x, dtype=float) - self.center[0]) / self.widths[0]
        eta = (np.asarray(y, dtype=float) - self.center[1]) / self.widths[1]
        # Horner in xi of Horner-in-eta row evaluations
        rows = np.zeros(np.broadcast(xi, eta).shape + (self.coeffs.shape[0],))
        for k in range(self.coeffs.shape[0]):
            acc = np.zeros_like(eta) + self.coeffs[k, -1]
            for a in self.coeffs[k, -2::-1]:
                acc = acc * eta + a
            rows[..., k] = acc
        out = rows[..., -1]
        for k in range(self.coeffs.shape[0] - 2, -1, -1):
            out = out * xi + rows[..., k]
        return out

    def derivative(self, orders: tuple[int, int]) -> "CellPolynomial2D":
        ox, oy = orders
        kx, ly = self.coeffs.shape
        if ox >= kx or oy >= ly:
            return CellPolynomial2D(self.center, self.widths, np.zeros((1, 1)))
        fx = np.array([math.factorial(j + ox) // math.factorial(j) for j in range(kx - ox)])
        fy = np.array([math.factorial(j + oy) // math.factorial(j) for j in range(ly - oy)])
        c = self.coeffs[ox:, oy:] * fx[:, None] * fy[None, :]
        c = c / (self.widths[0] ** ox * self.widths[1] ** oy)
        return CellPolynomial2D(self.center, self.widths, c)


@dataclass(frozen=True)
class PiecewisePolynomial:
    """Piecewise cell polynomials on strictly increasing breakpoints.

    Piece i is valid on [breakpoints[i], breakpoints[i+1]]; the pieces
    jointly cover the domain with no gaps. A piece's basis center does not
    have to lie inside its interval (shifted fields wrap that way).
    """

    breakpoints: np.ndarray
    pieces: tuple
    periodic: bool = False

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if len(self.pieces) != len(bp) - 1:
            raise ValueError("need exactly one piece per breakpoint interval")
        if np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must be strictly increasing")

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    def piece_index(self, x):
        lo, hi = self.domain
        x = np.asarray(x, dtype=float)
        if self.periodic:
            x = lo + np.mod(x - lo, hi - lo)
        idx = np.searchsorted(self.breakpoints, x, side="right") - 1
        return np.clip(idx, 0, len(self.pieces) - 1), x

    def __call__(self, x):
        idx, xw = self.piece_index(x)
        idx = np.atleast_1d(idx)
        xw = np.atleast_1d(xw)
        out = np.empty_like(xw)
        for i in np.unique(idx):
            sel = idx == i
            out[sel] = self.pieces[i](xw[sel])
        if np.isscalar(x) or np.ndim(x) == 0:
            return float(out[0])
        return out

    def derivative(self, order: int = 1) -> "PiecewisePolynomial":
        return PiecewisePolynomial(
            self.breakpoints, [p.derivative(order) for p in self.pieces], self.periodic
        )


def shift(f: PiecewisePolynomial, delta: float) -> PiecewisePolynomial:
    """Translate a periodic field: eval(shift(f, d), x) == eval(f, x + d).

    Breakpoints and piece centers move by -delta and are wrapped back into
    the fundamental domain; coefficients are untouched (a translated
    polynomial keeps its scaled coefficients). At most one piece straddles
    the domain edge and is split in two.
    """
    if not f.periodic:
        raise ValueError("shift is only defined for periodic piecewise polynomials")
    lo, hi = f.domain
    span = hi - lo
    if abs(delta) >= np.min(np.diff(f.breakpoints)):
        raise ValueError("shift distance must be smaller than the smallest cell")
    tol = 1e-12 * span
    segs = []
    for i, p in enumerate(f.pieces):
        a = f.breakpoints[i] - delta
        b = f.breakpoints[i + 1] - delta
        c = p.center - delta
        k = math.floor((a - lo) / span + tol)
        a, b, c = a - k * span, b - k * span, c - k * span
        if b <= hi + tol:
            segs.append((a, min(b, hi), CellPolynomial(c, p.width, p.coeffs)))
        else:
            segs.append((a, hi, CellPolynomial(c, p.width, p.coeffs)))
            segs.append((lo, b - span, CellPolynomial(c - span, p.width, p.coeffs)))
    segs = [s for s in segs if s[1] - s[0] > tol]
    segs.sort(key=lambda s: s[0])
    bp = [lo] + [s[1] for s in segs]
    bp[-1] = hi
    return PiecewisePolynomial(np.array(bp), [s[2] for s in segs], periodic=True)
