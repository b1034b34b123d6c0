"""Finite-tolerance decision procedures for the mean-value characterizations.

Verdicts are "no violation found at this sampler and tolerance", never a
proof: each report carries the sampler metadata, the worst signed margin,
and the ball that achieved it.  The kappa constants and the contraction
factor are exact formula evaluations.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, MeanfieldError
from .fields import GridField, ScalarField
from .geometry import BallSpec, DomainSpec, DiscretizedDomain, contains_closed_ball
from .means import QuadratureSpec, ball_average, sphere_average


def kappa_beardon(n: int) -> float:
    """Dimension-dependent contraction: 1/2, exp(-1/2), (2/n)^(1/(n-2))."""
    if n < 1:
        raise MeanfieldError(f"dimension must be >= 1, got {n}")
    if n == 1:
        return 0.5
    if n == 2:
        return math.exp(-0.5)
    return (2.0 / n) ** (1.0 / (n - 2))


def kappa_one(n: int) -> float:
    """Largest admissible contraction: -n/4 + sqrt(n^2/4 + 2n)/2.

    Positive root of k^2 + (n/2) k - n/2; at n=1 it equals kappa_beardon(1),
    for n >= 2 it is strictly larger.
    """
    if n < 1:
        raise MeanfieldError(f"dimension must be >= 1, got {n}")
    return -n / 4.0 + 0.5 * math.sqrt(n * n / 4.0 + 2.0 * n)


def factor_kappa(n: int, kappa: float) -> float:
    """Contraction factor n (1 - kappa) / 2 - kappa^2.

    Positive iff kappa < kappa_one(n), zero at kappa = kappa_one(n).
    """
    if not 0.0 < kappa < 1.0:
        raise MeanfieldError(f"kappa must lie in (0, 1), got {kappa}")
    return n * (1.0 - kappa) / 2.0 - kappa**2


def worker_count() -> int:
    """Worker cap from MEANFIELD_THREADS (default 1, serial)."""
    raw = os.environ.get("MEANFIELD_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class BallSampler:
    """Finite surrogate for "all balls with closure inside the domain".

    Centers on a lattice of the given spacing; radii on the geometric ladder
    r_max * ratio^j, j = 0..num_radii-1, clipped below by r_min.  Only balls
    admitted by contains_closed_ball are emitted, and centers that retain
    fewer than 4 ladder radii are dropped.
    """

    spacing: float
    r_max: float | None = None
    ratio: float = 2.0 ** -0.5
    num_radii: int = 6
    r_min: float = 0.0

    def __post_init__(self):
        if self.spacing <= 0:
            raise DomainError("sampler spacing must be positive")
        if not 0.0 < self.ratio < 1.0:
            raise DomainError("ladder ratio must lie in (0, 1)")
        if self.num_radii < 4:
            raise DomainError("radius ladder needs at least 4 rungs")

    def balls(self, spec: DomainSpec) -> list[BallSpec]:
        lo, hi = spec.bbox()
        axes = [
            np.arange(lo[k] + 0.5 * self.spacing, hi[k], self.spacing)
            for k in range(spec.dim)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        centers = np.column_stack([m.ravel() for m in mesh])
        sd = spec.signed_distance(centers)
        centers = centers[sd < 0]
        r_top = self.r_max
        if r_top is None:
            if len(centers) == 0:
                raise DomainError("sampler empty: no lattice centers inside")
            r_top = float(-np.min(spec.signed_distance(centers))) * 0.95
        ladder = [
            r_top * self.ratio**j
            for j in range(self.num_radii)
            if r_top * self.ratio**j >= self.r_min
        ]
        out = []
        for c in centers:
            admissible = [
                BallSpec(c, r)
                for r in ladder
                if contains_closed_ball(spec, BallSpec(c, r))
            ]
            if len(admissible) >= 4:
                out.extend(admissible)
        if not out:
            raise DomainError(
                "sampler empty: domain too small for the radius ladder"
            )
        return out


@dataclass(frozen=True)
class ClassificationReport:
    """Verdict plus the worst-violation witness for one mean-value test."""

    test: str
    verdict: str                    # "pass" | "fail"
    worst_margin: float             # signed, test-specific
    witness: BallSpec
    balls_tested: int
    tolerance: float
    sampler: BallSampler
    quadrature: QuadratureSpec
    kappa: float | None = None

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def default_tolerance(field_obj: ScalarField, value_scale: float) -> float:
    """Tolerance by field class: exact quadrature vs interpolated/kinked."""
    scale = max(value_scale, 1e-30)
    if field_obj.provenance == "analytic":
        return 1e-8
    if field_obj.provenance == "grid":
        return 1e-4 * scale
    # Max combinations: quadrature accuracy degrades on kinks.
    return 1e-3 * scale


def field_resolution(field_obj: ScalarField) -> float:
    """Smallest scale the field resolves (grid spacing; 0 for analytic)."""
    if isinstance(field_obj, GridField):
        spans = field_obj.grid.hi - field_obj.grid.lo
        return float(
            max(spans[k] / (field_obj.grid.shape[k] - 1)
                for k in range(field_obj.dim))
        )
    return 0.0


def _sweep(margins_of, balls):
    workers = worker_count()
    if workers == 1:
        return [margins_of(b) for b in balls]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(margins_of, balls))


def _run_test(name: str, field_obj: ScalarField, spec: DomainSpec,
              sampler: BallSampler, quad: QuadratureSpec,
              margin_of, tol: float | None,
              kappa: float | None = None) -> ClassificationReport:
    balls = sampler.balls(spec)
    if tol is None:
        centers = np.array([b.center for b in balls])
        vals = field_obj(centers)
        scale = max(float(np.ptp(vals)), float(np.max(np.abs(vals))))
        tol = default_tolerance(field_obj, scale)
    margins = _sweep(margin_of, balls)
    worst = int(np.argmax(margins))
    worst_margin = float(margins[worst])
    return ClassificationReport(
        test=name,
        verdict="pass" if worst_margin <= tol else "fail",
        worst_margin=worst_margin,
        witness=balls[worst],
        balls_tested=len(balls),
        tolerance=tol,
        sampler=sampler,
        quadrature=quad,
        kappa=kappa,
    )


def test_harmonic(field_obj: ScalarField, spec: DomainSpec,
                  sampler: BallSampler,
                  quad: QuadratureSpec = QuadratureSpec(),
                  tol: float | None = None) -> ClassificationReport:
    """Ball mean equals sphere mean on every sampled ball (two-sided)."""

    def margin(b):
        return abs(ball_average(field_obj, b, quad)
                   - sphere_average(field_obj, b, quad))

    return _run_test("harmonic", field_obj, spec, sampler, quad, margin, tol)


def test_subharmonic(field_obj: ScalarField, spec: DomainSpec,
                     sampler: BallSampler,
                     quad: QuadratureSpec = QuadratureSpec(),
                     tol: float | None = None) -> ClassificationReport:
    """Ball mean below sphere mean on every sampled ball (one-sided)."""

    def margin(b):
        return (ball_average(field_obj, b, quad)
                - sphere_average(field_obj, b, quad))

    return _run_test("subharmonic", field_obj, spec, sampler, quad, margin, tol)


def test_beardon(field_obj: ScalarField, spec: DomainSpec,
                 sampler: BallSampler, quad: QuadratureSpec,
                 kappa: float, tol: float | None = None
                 ) -> ClassificationReport:
    """Contracted sphere mean S_a(kappa r) below the ball mean B_a(r)."""
    if not 0.0 < kappa < 1.0:
        raise MeanfieldError(f"kappa must lie in (0, 1), got {kappa}")

    def margin(b):
        contracted = BallSpec(b.center, kappa * b.radius)
        return (sphere_average(field_obj, contracted, quad)
                - ball_average(field_obj, b, quad))

    return _run_test("beardon", field_obj, spec, sampler, quad, margin, tol,
                     kappa=kappa)


def beardon_threshold(field_obj: ScalarField, ball: BallSpec,
                      quad: QuadratureSpec = QuadratureSpec(),
                      tol_kappa: float = 1e-3) -> float:
    """Largest kappa with S_a(kappa r) <= B_a(r) at this ball, by bisection.

    Returns 1.0 when the difference never changes sign (degenerate case,
    e.g. harmonic fields where both means coincide).
    """
    b_mean = ball_average(field_obj, ball, quad)
    scale = 1.0 + abs(b_mean)

    def gap(kappa):
        contracted = BallSpec(ball.center, kappa * ball.radius)
        return sphere_average(field_obj, contracted, quad) - b_mean

    hi = 1.0 - 1e-12
    g_hi = gap(hi)
    if abs(g_hi) <= 1e-11 * scale:
        return 1.0          # degenerate: threshold is one
    if g_hi < 0:
        return 1.0          # inequality holds on all of (0, 1)
    lo = 1e-9
    if gap(lo) > 0:
        raise MeanfieldError(
            "no sign change of S_a(kappa r) - B_a(r) on (0, 1)"
        )
    while hi - lo > tol_kappa:
        mid = 0.5 * (lo + hi)
        if gap(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def laplacian_sign_estimate(field_obj: ScalarField, p, radii,
                            quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Laplacian estimate 2n (S_p(r) - u(p)) / r^2, Richardson-extrapolated.

    The per-radius estimates expand in even powers of r; a Neville table in
    r^2 extrapolates them to r -> 0.  Exact at any single radius for
    quadratic fields.
    """
    radii = [float(r) for r in radii]
    if len(radii) < 3:
        raise MeanfieldError("need at least 3 radii")
    if any(b >= a for a, b in zip(radii, radii[1:])):
        raise MeanfieldError("radii must be strictly decreasing")
    p = np.atleast_1d(np.asarray(p, dtype=float))
    n = field_obj.dim
    up = float(field_obj(p[None, :])[0])
    x = np.array([r**2 for r in radii])
    y = np.array([
        2.0 * n * (sphere_average(field_obj, BallSpec(p, r), quad) - up) / r**2
        for r in radii
    ])
    # Neville extrapolation of the polynomial through (x_i, y_i) to x = 0.
    table = y.copy()
    for level in range(1, len(x)):
        for i in range(len(x) - level):
            table[i] = (x[i + level] * table[i] - x[i] * table[i + 1]) / (
                x[i + level] - x[i]
            )
    return float(table[0])


def max_principle_check(field_obj: ScalarField,
                        domain: DiscretizedDomain) -> bool:
    """Interior maximum does not exceed the boundary maximum (tol-relative)."""
    interior = field_obj(domain.interior_points)
    boundary = field_obj(domain.boundary_points)
    span = max(
        float(max(interior.max(), boundary.max())
              - min(interior.min(), boundary.min())),
        1e-30,
    )
    return bool(interior.max() <= boundary.max() + 1e-9 * span)
