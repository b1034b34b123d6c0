"""Scalar fields: analytic catalog with exact Laplacians, and grid samples.

Analytic entries double as test oracles (each reports its exact Laplacian).
Grid fields interpolate multilinearly and carry no exact Laplacian.
Pointwise maxima of fields stay evaluatable everywhere; their Laplacian is
defined only where the active branch is unique.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionMismatchError, FieldError
from .geometry import BallSpec
from .gridfile import GridData, read_grid

_POLE_TOL = 1e-13


def _pts(points, dim: int) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != dim:
        raise DimensionMismatchError(
            f"expected dimension {dim}, got {pts.shape[1]}"
        )
    return pts


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere in R^n."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def psi_fundamental(rho, n: int):
    """Radial kernel harmonic off its pole, increasing in rho.

    n=1: rho;  n=2: ln(rho)/(2*pi);  n>=3: -rho^(2-n)/((n-2)*sigma_{n-1}).
    """
    rho = np.asarray(rho, dtype=float)
    if n == 1:
        return rho
    if n == 2:
        return np.log(rho) / (2.0 * math.pi)
    return -(rho ** (2 - n)) / ((n - 2) * sphere_area(n))


class ScalarField:
    """Evaluatable continuous scalar field; immutable after construction."""

    dim: int
    provenance: str = "analytic"

    def __call__(self, points) -> np.ndarray:
        """Values at ``points`` of shape (m, dim); returns shape (m,)."""
        return self._evaluate(_pts(points, self.dim))

    def _evaluate(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def laplacian(self, points) -> np.ndarray:
        raise FieldError(f"{type(self).__name__} has no exact Laplacian")

    def covers_ball(self, ball: BallSpec) -> bool:
        """Whether the closed ball lies in the field's domain of definition."""
        return True


class Constant(ScalarField):
    def __init__(self, value: float, dim: int = 2):
        self.value = float(value)
        self.dim = dim

    def _evaluate(self, pts):
        return np.full(len(pts), self.value)

    def laplacian(self, points):
        return np.zeros(len(_pts(points, self.dim)))


class Affine(ScalarField):
    """a0 + g . x (harmonic)."""

    def __init__(self, a0: float, grad):
        self.a0 = float(a0)
        self.grad = np.atleast_1d(np.asarray(grad, dtype=float))
        self.dim = len(self.grad)

    def _evaluate(self, pts):
        return self.a0 + pts @ self.grad

    def laplacian(self, points):
        return np.zeros(len(_pts(points, self.dim)))


class Monomial(ScalarField):
    """Coordinate monomial x^alpha for a multi-index alpha."""

    def __init__(self, alpha):
        self.alpha = np.atleast_1d(np.asarray(alpha, dtype=int))
        if np.any(self.alpha < 0):
            raise FieldError("multi-index entries must be non-negative")
        self.dim = len(self.alpha)

    def _evaluate(self, pts):
        return np.prod(pts ** self.alpha, axis=1)

    def laplacian(self, points):
        pts = _pts(points, self.dim)
        out = np.zeros(len(pts))
        for k, ak in enumerate(self.alpha):
            if ak < 2:
                continue
            a2 = self.alpha.copy()
            a2[k] -= 2
            out += ak * (ak - 1) * np.prod(pts ** a2, axis=1)
        return out


class Poly2D(ScalarField):
    """Bivariate polynomial sum(c * x^i * y^j); exact Laplacian."""

    dim = 2

    def __init__(self, terms, name: str = "poly2d"):
        self.terms = [(float(c), int(i), int(j)) for c, i, j in terms]
        self.name = name

    def _evaluate(self, pts):
        x, y = pts[:, 0], pts[:, 1]
        out = np.zeros(len(pts))
        for c, i, j in self.terms:
            out += c * x**i * y**j
        return out

    def laplacian(self, points):
        pts = _pts(points, 2)
        x, y = pts[:, 0], pts[:, 1]
        out = np.zeros(len(pts))
        for c, i, j in self.terms:
            if i >= 2:
                out += c * i * (i - 1) * x ** (i - 2) * y**j
            if j >= 2:
                out += c * j * (j - 1) * x**i * y ** (j - 2)
        return out


_HARMONIC_2D = {
    "re1": [(1, 1, 0)],
    "im1": [(1, 0, 1)],
    "re2": [(1, 2, 0), (-1, 0, 2)],
    "im2": [(2, 1, 1)],
    "re3": [(1, 3, 0), (-3, 1, 2)],
    "im3": [(3, 2, 1), (-1, 0, 3)],
    "re4": [(1, 4, 0), (-6, 2, 2), (1, 0, 4)],
    "im4": [(4, 3, 1), (-4, 1, 3)],
    "x2-y2": [(1, 2, 0), (-1, 0, 2)],
    "x3-3xy2": [(1, 3, 0), (-3, 1, 2)],
    "xy": [(1, 1, 1)],
}


def harmonic_poly(poly_id: str) -> Poly2D:
    """Named harmonic polynomial (Re/Im powers of x+iy up to degree 4)."""
    if poly_id not in _HARMONIC_2D:
        raise FieldError(
            f"unknown harmonic polynomial {poly_id!r}; "
            f"known: {sorted(_HARMONIC_2D)}"
        )
    return Poly2D(_HARMONIC_2D[poly_id], name=poly_id)


class RadialPower(ScalarField):
    """|x - a|^(2p) for a positive integer p."""

    def __init__(self, center, p: int):
        self.center = np.atleast_1d(np.asarray(center, dtype=float))
        self.p = int(p)
        if self.p < 1:
            raise FieldError("radial power needs p >= 1")
        self.dim = len(self.center)

    def _evaluate(self, pts):
        rho2 = np.sum((pts - self.center) ** 2, axis=1)
        return rho2**self.p

    def laplacian(self, points):
        pts = _pts(points, self.dim)
        rho2 = np.sum((pts - self.center) ** 2, axis=1)
        tp, n = 2 * self.p, self.dim
        return tp * (tp + n - 2) * rho2 ** (self.p - 1)


class ExpHarmonic(ScalarField):
    """exp(x) cos(y) or exp(x) sin(y); harmonic, non-polynomial (2-D)."""

    dim = 2

    def __init__(self, part: str = "cos"):
        if part not in ("cos", "sin"):
            raise FieldError("part must be 'cos' or 'sin'")
        self.part = part

    def _evaluate(self, pts):
        trig = np.cos if self.part == "cos" else np.sin
        return np.exp(pts[:, 0]) * trig(pts[:, 1])

    def laplacian(self, points):
        return np.zeros(len(_pts(points, 2)))


class FundamentalShift(ScalarField):
    """coeff * Psi(|x - center| / scale) + offset; harmonic off the pole."""

    def __init__(self, center, scale: float, coeff: float, offset: float = 0.0):
        self.center = np.atleast_1d(np.asarray(center, dtype=float))
        self.scale = float(scale)
        self.coeff = float(coeff)
        self.offset = float(offset)
        if self.scale <= 0:
            raise FieldError("scale must be positive")
        self.dim = len(self.center)

    def _rho(self, pts):
        rho = np.linalg.norm(pts - self.center, axis=1)
        if np.any(rho < _POLE_TOL * max(1.0, self.scale)):
            raise FieldError(
                "evaluation at the fundamental-solution singularity"
            )
        return rho

    def _evaluate(self, pts):
        return self.coeff * psi_fundamental(self._rho(pts) / self.scale,
                                            self.dim) + self.offset

    def laplacian(self, points):
        pts = _pts(points, self.dim)
        self._rho(pts)
        return np.zeros(len(pts))


class MaxField(ScalarField):
    """Pointwise maximum of fields; continuous, subharmonic if all are."""

    provenance = "max_combination"

    def __init__(self, fields):
        fields = list(fields)
        if not fields:
            raise FieldError("max combination of an empty list")
        dims = {f.dim for f in fields}
        if len(dims) != 1:
            raise FieldError(f"mixed dimensions in max combination: {dims}")
        self.fields = fields
        self.dim = dims.pop()

    def _evaluate(self, pts):
        return np.max([f._evaluate(pts) for f in self.fields], axis=0)

    def laplacian(self, points):
        """Branch Laplacian; errors on kink sets (ambiguous active branch)."""
        pts = _pts(points, self.dim)
        values = np.array([f._evaluate(pts) for f in self.fields])
        order = np.argsort(values, axis=0)
        top, second = order[-1], order[-2] if len(self.fields) > 1 else order[-1]
        vtop = values[top, np.arange(len(pts))]
        vsecond = values[second, np.arange(len(pts))]
        gap_tol = 1e-9 * (1.0 + np.abs(vtop))
        if len(self.fields) > 1 and np.any(vtop - vsecond <= gap_tol):
            raise FieldError("Laplacian requested on a kink set of a max "
                             "combination")
        out = np.empty(len(pts))
        for k, f in enumerate(self.fields):
            sel = top == k
            if np.any(sel):
                out[sel] = f.laplacian(pts[sel])
        return out

    def covers_ball(self, ball):
        return all(f.covers_ball(ball) for f in self.fields)


class ScaledField(ScalarField):
    """offset + scale * field(x)."""

    def __init__(self, inner: ScalarField, scale: float, offset: float = 0.0):
        self.inner = inner
        self.scale = float(scale)
        self.offset = float(offset)
        self.dim = inner.dim
        self.provenance = inner.provenance

    def _evaluate(self, pts):
        return self.offset + self.scale * self.inner._evaluate(pts)

    def laplacian(self, points):
        return self.scale * self.inner.laplacian(points)

    def covers_ball(self, ball):
        return self.inner.covers_ball(ball)


class GridField(ScalarField):
    """Multilinear interpolation of grid samples on their bounding box."""

    provenance = "grid"

    def __init__(self, grid: GridData):
        self.grid = grid
        self.dim = grid.dim

    def _evaluate(self, pts):
        return self.grid.interpolate(pts)

    def covers_ball(self, ball):
        return bool(
            np.all(ball.center - ball.radius >= self.grid.lo - 1e-12)
            and np.all(ball.center + ball.radius <= self.grid.hi + 1e-12)
        )


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def eval_at(field: ScalarField, p) -> float:
    """Field value at a single point."""
    return float(field(np.atleast_2d(np.asarray(p, dtype=float)))[0])


def laplacian_exact(field: ScalarField, p) -> float:
    """Exact Laplacian at a single point (analytic entries only)."""
    return float(field.laplacian(np.atleast_2d(np.asarray(p, dtype=float)))[0])


def max_combine(fields) -> MaxField:
    """Pointwise maximum of a non-empty list of fields."""
    return MaxField(fields)


def scaled(field: ScalarField, scale: float, offset: float = 0.0) -> ScaledField:
    return ScaledField(field, scale, offset)


def one_d_tent(k: float) -> MaxField:
    """max(1, k - k^2 x, k + k^2 (x - 1)) on the line."""
    if k < 2:
        raise FieldError("tent construction needs k >= 2")
    return max_combine([
        Affine(1.0, [0.0]),
        Affine(k, [-(k**2)]),
        Affine(k - k**2, [k**2]),
    ])


def load_grid_field(path) -> GridField:
    """Grid field from a plain-text sample file (validated)."""
    return GridField(read_grid(path))
