"""Generators for the explicit function families used as counterexamples.

Two families: blow-up sequences whose surface averages grow like k while
the volume averages stay bounded (a piecewise-linear tent on the interval;
maxima of rescaled fundamental solutions anchored outside the boundary in
higher dimension), and the even radial powers |x|^(2p) whose contracted
sphere mean exceeds the ball mean up to a contraction that approaches one.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import FieldError, MeanfieldError
from .fields import (MaxField, RadialPower, ScalarField, one_d_tent,
                     psi_fundamental)
from .geometry import DiscretizedDomain, DomainSpec, IntervalDomain


def blowup_1d(k: int) -> MaxField:
    """Tent field max(1, k - k^2 x, k + k^2 (x - 1)) on the interval (0, 1)."""
    if k < 2:
        raise MeanfieldError(f"tent construction needs k >= 2, got {k}")
    return one_d_tent(float(k))


def blowup_1d_means(k: int) -> tuple[float, float]:
    """Closed-form (surface mean, volume mean) of the 1-D tent field."""
    if k < 2:
        raise MeanfieldError(f"tent construction needs k >= 2, got {k}")
    kf = float(k)
    volume = (1.0 - 2.0 * (kf - 1.0) / kf**2 + 2.0 * (kf - 1.0) / kf
              - (kf - 1.0) ** 2 / kf**2)
    return kf, volume


class BlowupField(ScalarField):
    """max(1, max_j v_j) with v_j a fundamental solution anchored at ybar_j.

    All branches share the same additive offset (every anchor sits at the
    same distance delta outside its boundary point), so the active branch
    is always the nearest anchor: evaluation reduces to one nearest-neighbor
    distance query instead of a maximum over all branches.
    """

    provenance = "max_combination"

    def __init__(self, anchor_centers: np.ndarray, delta: float, k: float):
        self.anchor_centers = np.asarray(anchor_centers, dtype=float)
        self.delta = float(delta)
        self.k = float(k)
        self.dim = self.anchor_centers.shape[1]
        self._tree = cKDTree(self.anchor_centers)
        self._offset = (self.k**2 * psi_fundamental(1.0, self.dim) + self.k)

    def _evaluate(self, pts):
        dist, _ = self._tree.query(pts, k=1)
        if np.any(dist < 1e-13 * self.delta):
            raise FieldError(
                "evaluation at a fundamental-solution singularity"
            )
        branch = (-self.k**2 * psi_fundamental(dist / self.delta, self.dim)
                  + self._offset)
        return np.maximum(1.0, branch)


@dataclass(frozen=True)
class BlowupParams:
    """Anchors and schedule data of one blow-up field."""

    k: int
    delta_k: float
    anchors: np.ndarray          # boundary points y_j
    anchor_centers: np.ndarray   # exterior ball centers ybar_j
    patch_radius: float          # half the anchor spacing along the boundary
    boundary_min: float          # min of the field over the probe set


def blowup_sequence(spec: DomainSpec, k: int, delta_k: float | None = None,
                    probe_factor: int = 4, max_anchors: int = 4_000_000
                    ) -> tuple[BlowupField, BlowupParams]:
    """Blow-up field on a domain with the exterior sphere property.

    Boundary anchors are equispaced in arc length and doubled until the
    field exceeds k - 1 on a probe set ``probe_factor`` times denser, which
    realizes the finite covering of the boundary constructively.  The field
    equals k at every anchor and one deep inside the domain.
    """
    if k <= 2:
        raise MeanfieldError(f"blow-up sequence needs k > 2, got {k}")
    if delta_k is None:
        delta_k = float(k) ** -2
    if delta_k <= 0:
        raise MeanfieldError("delta_k must be positive")
    bound = spec.exterior_sphere_bound()
    if delta_k > bound:
        raise MeanfieldError(
            f"delta_k={delta_k:g} exceeds the exterior sphere bound {bound:g}"
        )
    total_len = sum(spec.component_lengths())
    m = max(4, int(np.ceil(total_len / delta_k)))
    while True:
        anchors = spec.boundary_points(m)
        normals = spec.boundary_normal(anchors)
        centers = anchors + delta_k * normals
        field = BlowupField(centers, delta_k, float(k))
        probes = spec.boundary_points(probe_factor * len(anchors))
        boundary_min = float(np.min(field(probes)))
        if boundary_min >= k - 1:
            break
        if 2 * m > max_anchors:
            raise MeanfieldError(
                f"anchor densification failed within budget {max_anchors}; "
                f"achieved boundary minimum {boundary_min:.6g} < {k - 1}"
            )
        m *= 2
    params = BlowupParams(
        k=k, delta_k=delta_k, anchors=anchors, anchor_centers=centers,
        patch_radius=0.5 * total_len / len(anchors),
        boundary_min=boundary_min,
    )
    return field, params


def interior_flat_threshold(n: int) -> int:
    """Smallest k > 2 whose interior branch bound drops below one.

    Evaluates -k^2 Psi(2) + k^2 Psi(1) + k < 1: beyond twice the anchor
    offset the field is clipped to the constant one.
    """
    gap = float(psi_fundamental(2.0, n) - psi_fundamental(1.0, n))
    k = 3
    while not (-(k**2) * gap + k < 1.0):
        k += 1
        if k > 10**6:
            raise MeanfieldError("no flat-interior threshold found")
    return k


@dataclass(frozen=True)
class BlowupRow:
    """One row of the blow-up verification table."""

    k: int
    delta_k: float
    surface_mean: float
    volume_mean: float
    anchors: int


def verify_blowup(spec: DomainSpec, ks, delta_fn=None,
                  grid: DiscretizedDomain | None = None,
                  probe_factor: int = 4) -> list[BlowupRow]:
    """Surface and volume means of the blow-up family for each k.

    The default schedule delta_k = k^-2 keeps k times the boundary-strip
    measure bounded; a schedule that violates this precondition triggers a
    warning but the table is still computed.  Surface means use boundary
    probe sets, volume means the coverage-weighted grid sum (closed forms
    on intervals).
    """
    ks = [int(k) for k in ks]
    if delta_fn is None:
        delta_fn = lambda k: float(k) ** -2  # noqa: E731
    deltas = [delta_fn(k) for k in ks]
    budget = [k * d for k, d in zip(ks, deltas)]
    if len(budget) > 1 and budget[-1] > 4.0 * max(budget[0], 1e-300):
        warnings.warn(
            "delta schedule lets k * delta_k grow: volume averages may be "
            "unbounded", stacklevel=2,
        )

    rows = []
    if isinstance(spec, IntervalDomain):
        for k in ks:
            surface, volume = blowup_1d_means(k)
            rows.append(BlowupRow(k=k, delta_k=0.0, surface_mean=surface,
                                  volume_mean=volume, anchors=2))
        return rows

    if grid is None:
        raise MeanfieldError("verify_blowup needs a discretized grid in 2-D")
    for k, delta in zip(ks, deltas):
        field, params = blowup_sequence(spec, k, delta,
                                        probe_factor=probe_factor)
        probes = spec.boundary_points(probe_factor * len(params.anchors))
        surface_mean = float(np.mean(field(probes)))
        volume_mean = grid.volume_mean(field(grid.interior_points))
        rows.append(BlowupRow(
            k=k, delta_k=delta, surface_mean=surface_mean,
            volume_mean=volume_mean, anchors=len(params.anchors),
        ))
    return rows


@dataclass(frozen=True)
class PowerFamily:
    """Closed-form means of |x|^(2p) and its sharp contraction."""

    p: int
    n: int
    kappa_min: float

    def ball_mean(self, r: float) -> float:
        return self.n * r ** (2 * self.p) / (2 * self.p + self.n)

    def sphere_mean(self, r: float) -> float:
        return r ** (2 * self.p)


def power_family(p: int, n: int) -> tuple[RadialPower, PowerFamily]:
    """Field |x|^(2p) with its closed-form mean record.

    The sharp contraction kappa_min = (n / (2p + n))^(1 / (2p)) increases
    with p toward one.
    """
    if p < 1:
        raise MeanfieldError(f"power family needs p >= 1, got {p}")
    if n not in (1, 2, 3):
        raise MeanfieldError(f"power family supports n in 1..3, got {n}")
    record = PowerFamily(
        p=p, n=n, kappa_min=(n / (2.0 * p + n)) ** (1.0 / (2.0 * p))
    )
    return RadialPower(np.zeros(n), p), record
