"""Plain-text grid file format shared by signed-distance grids and grid fields.

Layout: line 1 is the header ``n nx [ny [nz]] xmin xmax [ymin ymax [zmin zmax]]``,
followed by the samples in row-major (C) order with the last axis varying
fastest, one row per line.  Decimal separator is ``.``, line endings LF.
Sample ``[i, j, k]`` corresponds to the point
``(linspace(xmin, xmax, nx)[i], linspace(ymin, ymax, ny)[j], ...)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FieldError


@dataclass(frozen=True)
class GridData:
    """Samples of a scalar quantity on a uniform tensor grid."""

    lo: np.ndarray          # lower corner, shape (n,)
    hi: np.ndarray          # upper corner, shape (n,)
    values: np.ndarray      # shape (nx,), (nx, ny) or (nx, ny, nz)

    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    def axes(self) -> list[np.ndarray]:
        return [
            np.linspace(self.lo[k], self.hi[k], self.shape[k])
            for k in range(self.dim)
        ]

    def interpolate(self, points: np.ndarray) -> np.ndarray:
        """Continuous multilinear interpolation at ``points`` (m, n)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.dim:
            raise FieldError(
                f"points have dimension {pts.shape[1]}, grid has {self.dim}"
            )
        eps = 1e-12 * np.maximum(1.0, np.abs(self.hi - self.lo))
        if np.any(pts < self.lo - eps) or np.any(pts > self.hi + eps):
            raise FieldError("evaluation point outside the grid bounding box")

        out = np.zeros(len(pts))
        # Cell index and local coordinate per axis.
        idx = []
        frac = []
        for k in range(self.dim):
            nk = self.shape[k]
            span = (self.hi[k] - self.lo[k]) / (nk - 1)
            t = (pts[:, k] - self.lo[k]) / span
            i = np.clip(np.floor(t).astype(int), 0, nk - 2)
            idx.append(i)
            frac.append(np.clip(t - i, 0.0, 1.0))
        # Accumulate over the 2^n cell corners.
        for corner in range(1 << self.dim):
            w = np.ones(len(pts))
            sel = []
            for k in range(self.dim):
                if corner >> k & 1:
                    w = w * frac[k]
                    sel.append(idx[k] + 1)
                else:
                    w = w * (1.0 - frac[k])
                    sel.append(idx[k])
            out += w * self.values[tuple(sel)]
        return out


def read_grid(path) -> GridData:
    """Parse a grid file; validates header, sample count and finiteness."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if not header:
            raise FieldError(f"{path}: empty grid file")
        try:
            n = int(header[0])
        except ValueError:
            raise FieldError(f"{path}: malformed header (dimension)") from None
        if n not in (1, 2, 3):
            raise FieldError(f"{path}: unsupported dimension {n}")
        if len(header) != 1 + n + 2 * n:
            raise FieldError(
                f"{path}: header needs {1 + 3 * n} entries for n={n}, "
                f"got {len(header)}"
            )
        try:
            shape = tuple(int(tok) for tok in header[1 : 1 + n])
            bounds = [float(tok) for tok in header[1 + n :]]
        except ValueError:
            raise FieldError(f"{path}: malformed header") from None
        if any(s < 2 for s in shape):
            raise FieldError(f"{path}: each axis needs at least 2 samples")
        lo = np.array(bounds[0::2])
        hi = np.array(bounds[1::2])
        if np.any(hi <= lo):
            raise FieldError(f"{path}: bounds must be strictly ordered")

        flat = []
        for line in fh:
            flat.extend(float(tok) for tok in line.split())
    expected = int(np.prod(shape))
    if len(flat) != expected:
        raise FieldError(
            f"{path}: expected {expected} samples, got {len(flat)}"
        )
    values = np.asarray(flat, dtype=float)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise FieldError(f"{path}: non-finite value at index {bad[0]}")
    return GridData(lo=lo, hi=hi, values=values.reshape(shape))


def write_grid(path, grid: GridData) -> None:
    """Write ``grid`` in the text format; one row per line, 17 digits."""
    vals = grid.values
    rows = vals.reshape(-1, vals.shape[-1]) if vals.ndim > 1 else vals[None, :]
    header = [str(grid.dim)]
    header += [str(s) for s in grid.shape]
    for k in range(grid.dim):
        header += [f"{grid.lo[k]:.17g}", f"{grid.hi[k]:.17g}"]
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(" ".join(header) + "\n")
        for row in rows:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")
