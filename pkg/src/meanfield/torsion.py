"""Torsion problem: grid solve of Delta v + 1 = 0 with v = 0 on the boundary.

The interior Laplacian is the standard 3-point (n=1) / 5-point (n=2) stencil
with Shortley-Weller shortened legs at boundary cut points, solved by a
general Krylov iteration (BiCGSTAB) with diagonal preconditioning.  The
boundary flux q = -dv/dnu converts surface means into volume means; its
extremes normalized by |boundary| / |volume| are the integral Harnack
constants, and its weighted variance is the ball-deficit of the boundary
flux (zero exactly when the domain is a ball).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import LinearOperator, bicgstab

from .errors import ConvergenceError, DomainError, MeanfieldError
from .fields import RadialPower, ScalarField, ScaledField
from .geometry import DiscretizedDomain


@dataclass(frozen=True)
class FluxSamples:
    """Boundary flux q = -dv/dnu at the cut points, with surface weights."""

    points: np.ndarray        # (M, n)
    normals: np.ndarray       # (M, n)
    q: np.ndarray             # (M,)
    weights: np.ndarray       # (M,)
    first_order: np.ndarray   # (M,) bool: one-sided stencil fell back


@dataclass
class TorsionSolution:
    """Interior nodal values of v plus solver and flux metadata."""

    domain: DiscretizedDomain
    v: np.ndarray
    residual_norm: float
    _flux: FluxSamples | None = None

    @property
    def flux(self) -> FluxSamples:
        if self._flux is None:
            self._flux = normal_derivative(self)
        return self._flux

    def q_samples(self) -> list[tuple[np.ndarray, float, float]]:
        """(boundary point, q, surface weight) triples."""
        f = self.flux
        return list(zip(f.points, f.q, f.weights))


@dataclass(frozen=True)
class HarnackConstants:
    """Extremes of the normalized flux kernel q |boundary| / |volume|."""

    c1: float
    c2: float
    argmin_point: np.ndarray
    argmax_point: np.ndarray
    flux_identity_error: float   # |sum(q w) - volume| / volume


@dataclass(frozen=True)
class HarnackCheck:
    """One sandwich verification for a nonnegative harmonic field."""

    volume_mean: float
    surface_mean: float
    c1_surface: float
    c2_surface: float
    holds: bool


def _assemble(domain: DiscretizedDomain) -> sparse.csr_matrix:
    """Negative Laplacian with Shortley-Weller legs; Dirichlet cut points."""
    m = domain.interior_count
    n = domain.dim
    h2 = domain.h**2
    rows, cols, vals = [], [], []
    diag = np.zeros(m)
    arange = np.arange(m)
    for axis in range(n):
        tp = domain.legs[:, 2 * axis]       # + direction
        tm = domain.legs[:, 2 * axis + 1]   # - direction
        diag += 2.0 / (h2 * tp * tm)
        for d, t in ((0, tp), (1, tm)):
            nb = domain.neighbors[:, 2 * axis + d]
            has = nb >= 0
            rows.append(arange[has])
            cols.append(nb[has])
            vals.append(-2.0 / (h2 * t[has] * (tp[has] + tm[has])))
    rows.append(arange)
    cols.append(arange)
    vals.append(diag)
    return sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(m, m),
    )


def solve_torsion(domain: DiscretizedDomain, tol: float = 1e-10,
                  maxiter: int = 20000) -> TorsionSolution:
    """Solve the torsion problem on a discretized domain.

    Raises ConvergenceError if the Krylov iteration fails to reach the
    relative residual tolerance within maxiter iterations.
    """
    if domain.interior_count < 10:
        raise DomainError("degenerate domain: fewer than 10 interior nodes")
    A = _assemble(domain)
    b = np.ones(domain.interior_count)
    inv_diag = 1.0 / A.diagonal()
    precond = LinearOperator(A.shape, matvec=lambda x: inv_diag * x)
    v, info = bicgstab(A, b, rtol=tol, atol=0.0, maxiter=maxiter, M=precond)
    residual = float(np.linalg.norm(A @ v - b) / np.linalg.norm(b))
    if info != 0 or residual > tol * 10:
        raise ConvergenceError(
            f"torsion solve did not converge (info={info}, "
            f"residual={residual:.3e}, maxiter={maxiter})"
        )
    return TorsionSolution(domain=domain, v=v, residual_norm=residual)


def normal_derivative(sol: TorsionSolution) -> FluxSamples:
    """Boundary flux by one-sided differences along each cut's grid line.

    Each cut point lies on a grid line at distance theta h from its anchor
    interior node.  A quadratic through (cut, 0), the anchor, and the next
    collinear interior node gives the directional derivative at the wall;
    since v vanishes on the boundary the full gradient is normal, so the
    flux follows by dividing by the normal's component along the line.
    Falls back to a first-order difference where the second node is missing.
    """
    dom = sol.domain
    h = dom.h
    M = len(dom.boundary_points)
    q = np.zeros(M)
    first_order = np.zeros(M, dtype=bool)
    tangent = np.zeros(M, dtype=bool)
    for j in range(M):
        anchor = dom.boundary_anchor[j]
        axis = dom.boundary_axis[j]
        sign = dom.boundary_sign[j]
        theta = dom.boundary_theta[j]
        v1 = sol.v[anchor]
        a = theta * h
        nu_line = sign * dom.boundary_normals[j, axis]
        if abs(nu_line) < 0.1:
            # Near-tangent crossing (the boundary runs almost parallel to
            # this grid line, e.g. at the poles of an inner boundary): the
            # line stencil carries no normal information.
            tangent[j] = True
            continue
        # Next interior node along the line, away from the wall.
        opp = 2 * axis + (1 if sign > 0 else 0)
        p2 = dom.neighbors[anchor, opp]
        if p2 >= 0:
            v2 = sol.v[p2]
            inward = (v1 * (1.0 + theta) / theta
                      - v2 * theta / (1.0 + theta)) / h
        else:
            inward = v1 / a
            first_order[j] = True
        q[j] = inward / nu_line
    if np.any(tangent):
        # A tangent crossing always has a transversal twin cut at (nearly)
        # the same boundary location; borrow the nearest good sample.
        good = ~tangent
        if not np.any(good):
            raise MeanfieldError("no transversal boundary cuts available")
        from scipy.spatial import cKDTree

        tree = cKDTree(dom.boundary_points[good])
        _, nearest = tree.query(dom.boundary_points[tangent], k=1)
        q[tangent] = q[np.flatnonzero(good)[nearest]]
        first_order[tangent] = True
    return FluxSamples(
        points=dom.boundary_points,
        normals=dom.boundary_normals,
        q=q,
        weights=dom.boundary_weights,
        first_order=first_order,
    )


def harnack_constants(sol: TorsionSolution) -> HarnackConstants:
    """Normalized kernel extremes c1 = min q |bdry|/|vol|, c2 = max.

    Validates the flux identity (integral of q over the boundary equals the
    volume) to 2 percent; a larger defect signals discretization failure.
    """
    flux = sol.flux
    dom = sol.domain
    total = float(np.dot(flux.q, flux.weights))
    err = abs(total - dom.volume) / dom.volume
    if err > 0.02:
        raise MeanfieldError(
            f"flux identity violated: integral {total:.6g} vs volume "
            f"{dom.volume:.6g} ({100 * err:.2f}%)"
        )
    scale = dom.surface / dom.volume
    i_min = int(np.argmin(flux.q))
    i_max = int(np.argmax(flux.q))
    return HarnackConstants(
        c1=float(flux.q[i_min] * scale),
        c2=float(flux.q[i_max] * scale),
        argmin_point=flux.points[i_min],
        argmax_point=flux.points[i_max],
        flux_identity_error=err,
    )


def serrin_deficit(sol: TorsionSolution) -> float:
    """Quadratic boundary-flux deficit; zero exactly for balls.

    Computed as the weighted variance of q over the boundary samples: the
    squared-mean term uses the flux identity (the surface integral of q
    equals the volume), which keeps the Cauchy-Schwarz sign exact at the
    discrete level.  Nonnegative up to roundoff; near zero flags a
    ball-like domain.
    """
    flux = sol.flux
    surface = sol.domain.surface
    mean_q = float(np.dot(flux.q, flux.weights)) / surface
    mean_q2 = float(np.dot(flux.q**2, flux.weights)) / surface
    return mean_q2 - mean_q**2


def harnack_verify(sol: TorsionSolution, field: ScalarField,
                   margin: float = 0.02) -> HarnackCheck:
    """Check the two-sided sandwich for one nonnegative harmonic field.

    Volume mean by coverage-weighted grid sum, surface mean by weighted
    boundary sum; the tolerance is ``margin`` times the field range.
    """
    dom = sol.domain
    boundary_vals = field(dom.boundary_points)
    if boundary_vals.min() < 0:
        raise MeanfieldError(
            f"field is negative on a boundary sample "
            f"(min {boundary_vals.min():.6g})"
        )
    interior_vals = field(dom.interior_points)
    volume_mean = dom.volume_mean(interior_vals)
    surface_mean = dom.surface_mean(boundary_vals)
    consts = harnack_constants(sol)
    span = max(
        float(max(interior_vals.max(), boundary_vals.max())
              - min(interior_vals.min(), boundary_vals.min())),
        1e-30,
    )
    eps = margin * span
    holds = (consts.c1 * surface_mean - eps
             <= volume_mean
             <= consts.c2 * surface_mean + eps)
    return HarnackCheck(
        volume_mean=volume_mean,
        surface_mean=surface_mean,
        c1_surface=consts.c1 * surface_mean,
        c2_surface=consts.c2 * surface_mean,
        holds=bool(holds),
    )


def exact_ball_solution(center, radius: float) -> ScalarField:
    """Analytic torsion solution (R^2 - |x - c|^2) / (2n) on a ball.

    Oracle for interval and disk solves; valid in any dimension.
    """
    center = np.atleast_1d(np.asarray(center, dtype=float))
    n = len(center)
    return ScaledField(
        RadialPower(center, 1), -1.0 / (2.0 * n), radius**2 / (2.0 * n)
    )


def dump_solution_grid(sol: TorsionSolution, path) -> None:
    """Write v on the full grid (zero outside the interior), text format."""
    from .gridfile import GridData, write_grid

    dom = sol.domain
    values = np.zeros(dom.shape)
    values[tuple(dom.interior_idx.T)] = sol.v
    hi = dom.origin + dom.h * (np.asarray(dom.shape) - 1)
    write_grid(path, GridData(lo=dom.origin.copy(), hi=hi, values=values))


def dump_flux_csv(sol: TorsionSolution, path) -> None:
    """Write boundary flux samples as CSV (x[,y],nx[,ny],q,weight)."""
    flux = sol.flux
    n = sol.domain.dim
    coords = ["x", "y", "z"][:n]
    header = coords + ["n" + c for c in coords] + ["q", "weight"]
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for j in range(len(flux.q)):
            row = (list(flux.points[j]) + list(flux.normals[j])
                   + [flux.q[j], flux.weights[j]])
            fh.write(",".join(f"{x:.17g}" for x in row) + "\n")
