"""Command-line front end: reproducible reports over INI-style configs.

Commands: means, classify, beardon, torsion, harnack, blowup, powers.
Reports embed the fully resolved config and are byte-identical across runs
of the same config (wall time goes to the console, never into files).
Exit codes: 0 success (pass/fail verdicts live in the report), 2 config
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys
import tempfile
import time

import numpy as np

from . import __version__
from .classify import (BallSampler, beardon_threshold, field_resolution,
                       kappa_one, test_beardon, test_harmonic,
                       test_subharmonic)
from .constructions import power_family, verify_blowup
from .errors import ConfigError, MeanfieldError
from .fields import (Affine, Constant, ExpHarmonic, Monomial, ScalarField,
                     ScaledField, harmonic_poly, load_grid_field, one_d_tent,
                     RadialPower)
from .geometry import (AnnulusDomain, BallSpec, DiskDomain, DomainSpec,
                       IntervalDomain, RectangleDomain, discretize,
                       load_sdf_grid, signed_distance)
from .means import QuadratureSpec, mean_pair
from .torsion import (dump_flux_csv, dump_solution_grid, harnack_constants,
                      harnack_verify, serrin_deficit, solve_torsion)

_COMMANDS = ("means", "classify", "beardon", "torsion", "harnack", "blowup",
             "powers")

_DEFAULTS = {
    "domain": {"variant": "disk", "center": "0, 0", "radius": "1",
               "a": "0", "b": "1", "lo": "0, 0", "hi": "1, 1",
               "r_in": "0.5", "r_out": "1", "file": "", "h": "1/64"},
    "field": {"name": "harmonic_poly", "id": "re2", "value": "1",
              "center": "0, 0", "p": "1", "alpha": "2, 0", "a0": "0",
              "grad": "1, 0", "k": "3", "file": "", "scale": "1",
              "offset": "0"},
    "quadrature": {"angular": "32", "radial": "16"},
    "sampler": {"spacing": "0.2", "rmax": "auto",
                "ratio": "0.70710678118654752", "radii": "6", "rmin": "auto"},
    "tolerance": {"classify": "auto", "solver": "1e-10", "kappa": "1e-3"},
    "means": {"kappa": ""},
    "beardon": {"kappa": "auto", "ball_center": "auto", "ball_radius": "auto"},
    "torsion": {"maxiter": "20000"},
    "blowup": {"ks": "10, 20, 40", "delta": "k^-2", "probe_factor": "4"},
    "powers": {"p": "1, 2, 3, 4", "n": "2", "radii": "0.5, 1"},
}


def _fnum(text: str) -> float:
    """Float parser that also accepts simple fractions like 1/128."""
    text = text.strip()
    try:
        if "/" in text:
            num, den = text.split("/")
            return float(num) / float(den)
        return float(text)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"cannot parse number {text!r}") from None


def _fvec(text: str) -> np.ndarray:
    return np.array([_fnum(tok) for tok in text.replace(",", " ").split()])


def _fint(text: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise ConfigError(f"cannot parse integer {text!r}") from None


class RunConfig:
    """Fully resolved configuration: defaults overlaid by the config file."""

    def __init__(self, path: str | None, h_override: str | None = None):
        self.values = {s: dict(kv) for s, kv in _DEFAULTS.items()}
        if path is not None:
            if not os.path.exists(path):
                raise ConfigError(f"config file not found: {path}")
            parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
            try:
                parser.read(path)
            except configparser.Error as exc:
                raise ConfigError(f"malformed config: {exc}") from None
            for section in parser.sections():
                if section not in self.values:
                    raise ConfigError(f"unknown config section [{section}]")
                for key, val in parser.items(section):
                    if key not in self.values[section]:
                        raise ConfigError(
                            f"unknown key {key!r} in section [{section}]"
                        )
                    self.values[section][key] = val.strip()
        if h_override:
            self.values["domain"]["h"] = h_override

    def get(self, section: str, key: str) -> str:
        return self.values[section][key]

    def echo(self) -> list[str]:
        lines = []
        for section in sorted(self.values):
            for key in sorted(self.values[section]):
                lines.append(f"{section}.{key} = {self.values[section][key]}")
        return lines


def build_domain(cfg: RunConfig) -> DomainSpec:
    variant = cfg.get("domain", "variant")
    if variant == "interval":
        return IntervalDomain(_fnum(cfg.get("domain", "a")),
                              _fnum(cfg.get("domain", "b")))
    if variant == "rectangle":
        return RectangleDomain(_fvec(cfg.get("domain", "lo")),
                               _fvec(cfg.get("domain", "hi")))
    if variant == "disk":
        return DiskDomain(_fvec(cfg.get("domain", "center")),
                          _fnum(cfg.get("domain", "radius")))
    if variant == "annulus":
        return AnnulusDomain(_fvec(cfg.get("domain", "center")),
                             _fnum(cfg.get("domain", "r_in")),
                             _fnum(cfg.get("domain", "r_out")))
    if variant == "sdf_grid":
        path = cfg.get("domain", "file")
        if not path:
            raise ConfigError("sdf_grid variant needs domain.file")
        if not os.path.exists(path):
            raise ConfigError(f"sdf_grid file not found: {path}")
        return load_sdf_grid(path)
    raise ConfigError(f"unknown domain variant {variant!r}")


def build_field(cfg: RunConfig, dim: int) -> ScalarField:
    name = cfg.get("field", "name")
    if name == "constant":
        base = Constant(_fnum(cfg.get("field", "value")), dim)
    elif name == "affine":
        base = Affine(_fnum(cfg.get("field", "a0")),
                      _fvec(cfg.get("field", "grad")))
    elif name == "monomial":
        base = Monomial(_fvec(cfg.get("field", "alpha")).astype(int))
    elif name == "harmonic_poly":
        base = harmonic_poly(cfg.get("field", "id"))
    elif name == "radial_power":
        base = RadialPower(_fvec(cfg.get("field", "center")),
                           _fint(cfg.get("field", "p")))
    elif name == "exp_cos":
        base = ExpHarmonic("cos")
    elif name == "exp_sin":
        base = ExpHarmonic("sin")
    elif name == "tent":
        base = one_d_tent(_fnum(cfg.get("field", "k")))
    elif name == "grid":
        path = cfg.get("field", "file")
        if not path:
            raise ConfigError("grid field needs field.file")
        if not os.path.exists(path):
            raise ConfigError(f"grid field file not found: {path}")
        base = load_grid_field(path)
    else:
        raise ConfigError(f"unknown field name {name!r}")
    if base.dim != dim:
        raise ConfigError(
            f"field dimension {base.dim} does not match domain dimension {dim}"
        )
    scale = _fnum(cfg.get("field", "scale"))
    offset = _fnum(cfg.get("field", "offset"))
    if scale != 1.0 or offset != 0.0:
        return ScaledField(base, scale, offset)
    return base


def build_quadrature(cfg: RunConfig) -> QuadratureSpec:
    return QuadratureSpec(angular=_fint(cfg.get("quadrature", "angular")),
                          radial=_fint(cfg.get("quadrature", "radial")))


def build_sampler(cfg: RunConfig, field: ScalarField) -> BallSampler:
    rmax_raw = cfg.get("sampler", "rmax")
    rmin_raw = cfg.get("sampler", "rmin")
    rmin = (4.0 * field_resolution(field) if rmin_raw == "auto"
            else _fnum(rmin_raw))
    return BallSampler(
        spacing=_fnum(cfg.get("sampler", "spacing")),
        r_max=None if rmax_raw == "auto" else _fnum(rmax_raw),
        ratio=_fnum(cfg.get("sampler", "ratio")),
        num_radii=_fint(cfg.get("sampler", "radii")),
        r_min=rmin,
    )


def _classify_tol(cfg: RunConfig) -> float | None:
    raw = cfg.get("tolerance", "classify")
    return None if raw == "auto" else _fnum(raw)


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    if isinstance(x, np.ndarray):
        return "(" + ", ".join(f"{v:.17g}" for v in x) + ")"
    return str(x)


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(x) for x in row) for row in rows]
    _atomic_write(path, "\n".join(lines) + "\n")


def _report_ball(ball: BallSpec) -> str:
    return f"center={_fmt(ball.center)} radius={_fmt(ball.radius)}"


def _report_classification(rep) -> list[str]:
    lines = [
        f"{rep.test}.verdict = {rep.verdict}",
        f"{rep.test}.worst_margin = {_fmt(rep.worst_margin)}",
        f"{rep.test}.witness = {_report_ball(rep.witness)}",
        f"{rep.test}.balls_tested = {rep.balls_tested}",
        f"{rep.test}.tolerance = {_fmt(rep.tolerance)}",
    ]
    if rep.kappa is not None:
        lines.append(f"{rep.test}.kappa = {_fmt(rep.kappa)}")
    return lines


def cmd_means(cfg: RunConfig, out_dir: str) -> list[str]:
    spec = build_domain(cfg)
    field = build_field(cfg, spec.dim)
    quad = build_quadrature(cfg)
    sampler = build_sampler(cfg, field)
    kappa_raw = cfg.get("means", "kappa")
    kappa = _fnum(kappa_raw) if kappa_raw else None
    balls = sampler.balls(spec)
    rows = []
    for b in balls:
        pair = mean_pair(field, b, quad, kappa=kappa)
        row = list(b.center) + [b.radius, pair.ball_mean, pair.sphere_mean]
        if kappa is not None:
            row.append(pair.sphere_mean_at_kappa_r)
        rows.append(row)
    coords = ["cx", "cy", "cz"][: spec.dim]
    header = coords + ["radius", "ball_mean", "sphere_mean"]
    if kappa is not None:
        header.append("sphere_mean_at_kappa_r")
    _write_csv(os.path.join(out_dir, "means.csv"), header, rows)
    gaps = [abs(r[len(coords) + 1] - r[len(coords) + 2]) for r in rows]
    return [
        f"balls = {len(balls)}",
        f"max_abs_gap = {_fmt(max(gaps))}",
        f"csv = means.csv",
    ]


def cmd_classify(cfg: RunConfig, out_dir: str) -> list[str]:
    spec = build_domain(cfg)
    field = build_field(cfg, spec.dim)
    quad = build_quadrature(cfg)
    sampler = build_sampler(cfg, field)
    tol = _classify_tol(cfg)
    rep_h = test_harmonic(field, spec, sampler, quad, tol)
    rep_s = test_subharmonic(field, spec, sampler, quad, tol)
    return _report_classification(rep_h) + _report_classification(rep_s)


def cmd_beardon(cfg: RunConfig, out_dir: str) -> list[str]:
    spec = build_domain(cfg)
    field = build_field(cfg, spec.dim)
    quad = build_quadrature(cfg)
    sampler = build_sampler(cfg, field)
    kappa_raw = cfg.get("beardon", "kappa")
    kappa = kappa_one(spec.dim) if kappa_raw == "auto" else _fnum(kappa_raw)
    rep = test_beardon(field, spec, sampler, quad, kappa, _classify_tol(cfg))
    lines = _report_classification(rep)

    center_raw = cfg.get("beardon", "ball_center")
    lo, hi = spec.bbox()
    center = (0.5 * (lo + hi) if center_raw == "auto" else _fvec(center_raw))
    sd = signed_distance(spec, center)
    if sd >= 0:
        raise ConfigError("beardon.ball_center lies outside the domain")
    radius_raw = cfg.get("beardon", "ball_radius")
    radius = -0.95 * sd if radius_raw == "auto" else _fnum(radius_raw)
    kstar = beardon_threshold(field, BallSpec(center, radius), quad,
                              _fnum(cfg.get("tolerance", "kappa")))
    lines += [
        f"threshold.ball = {_report_ball(BallSpec(center, radius))}",
        f"threshold.kappa_star = {_fmt(kstar)}",
        f"threshold.degenerate = {_fmt(kstar >= 1.0)}",
    ]
    return lines


def _solve_from_config(cfg: RunConfig):
    spec = build_domain(cfg)
    grid = discretize(spec, _fnum(cfg.get("domain", "h")))
    sol = solve_torsion(grid, tol=_fnum(cfg.get("tolerance", "solver")),
                        maxiter=_fint(cfg.get("torsion", "maxiter")))
    return spec, grid, sol


def cmd_torsion(cfg: RunConfig, out_dir: str) -> list[str]:
    spec, grid, sol = _solve_from_config(cfg)
    consts = harnack_constants(sol)
    deficit = serrin_deficit(sol)
    dump_solution_grid(sol, os.path.join(out_dir, "torsion_v.grid"))
    dump_flux_csv(sol, os.path.join(out_dir, "torsion_q.csv"))
    vmax = float(np.max(sol.v))
    return [
        f"interior_nodes = {grid.interior_count}",
        f"boundary_nodes = {len(grid.boundary_points)}",
        f"volume = {_fmt(grid.volume)}",
        f"surface = {_fmt(grid.surface)}",
        f"residual = {_fmt(sol.residual_norm)}",
        f"v_max = {_fmt(vmax)}",
        f"c1 = {_fmt(consts.c1)}",
        f"c2 = {_fmt(consts.c2)}",
        f"c1_point = {_fmt(consts.argmin_point)}",
        f"c2_point = {_fmt(consts.argmax_point)}",
        f"flux_identity_error = {_fmt(consts.flux_identity_error)}",
        f"serrin_deficit = {_fmt(deficit)}",
        "files = torsion_v.grid, torsion_q.csv",
    ]


def _harnack_suite(spec: DomainSpec, grid) -> list[tuple[str, ScalarField]]:
    """Nonnegative harmonic fields on the domain closure."""
    n = spec.dim
    bases: list[tuple[str, ScalarField]] = [("one", Constant(1.0, n))]
    for axis in range(n):
        g = np.zeros(n)
        g[axis] = 1.0
        bases.append((f"linear_{'xyz'[axis]}", Affine(0.0, g)))
    if n == 2:
        bases.append(("saddle", harmonic_poly("re2")))
        bases.append(("cubic", harmonic_poly("im3")))
        bases.append(("exp_cos", ExpHarmonic("cos")))
    out = []
    for name, base in bases:
        boundary_min = float(np.min(base(grid.boundary_points)))
        shift = max(0.0, -boundary_min) + 0.1
        out.append((name, ScaledField(base, 1.0, shift)))
    return out


def cmd_harnack(cfg: RunConfig, out_dir: str) -> list[str]:
    spec, grid, sol = _solve_from_config(cfg)
    consts = harnack_constants(sol)
    lines = [f"c1 = {_fmt(consts.c1)}", f"c2 = {_fmt(consts.c2)}"]
    rows = []
    for name, field in _harnack_suite(spec, grid):
        check = harnack_verify(sol, field)
        rows.append([name, check.volume_mean, check.surface_mean,
                     check.c1_surface, check.c2_surface, check.holds])
        lines.append(f"{name}.holds = {_fmt(check.holds)}")
    _write_csv(
        os.path.join(out_dir, "harnack.csv"),
        ["field", "volume_mean", "surface_mean", "c1_surface", "c2_surface",
         "holds"],
        rows,
    )
    lines.append("csv = harnack.csv")
    return lines


def cmd_blowup(cfg: RunConfig, out_dir: str) -> list[str]:
    spec = build_domain(cfg)
    ks = [int(v) for v in _fvec(cfg.get("blowup", "ks"))]
    delta_raw = cfg.get("blowup", "delta")
    if delta_raw == "k^-2":
        delta_fn = None
    else:
        deltas = {k: d for k, d in zip(ks, _fvec(delta_raw))}
        if len(deltas) != len(ks):
            raise ConfigError("blowup.delta list must match blowup.ks")
        delta_fn = lambda k: deltas[k]  # noqa: E731
    grid = None
    if not isinstance(spec, IntervalDomain):
        grid = discretize(spec, _fnum(cfg.get("domain", "h")))
    rows = verify_blowup(spec, ks, delta_fn, grid,
                         probe_factor=_fint(cfg.get("blowup", "probe_factor")))
    _write_csv(
        os.path.join(out_dir, "blowup.csv"),
        ["k", "delta_k", "surface_mean", "volume_mean", "anchors"],
        [[r.k, r.delta_k, r.surface_mean, r.volume_mean, r.anchors]
         for r in rows],
    )
    lines = [f"rows = {len(rows)}", "csv = blowup.csv"]
    for r in rows:
        lines.append(
            f"k={r.k}: surface_mean = {_fmt(r.surface_mean)}, "
            f"volume_mean = {_fmt(r.volume_mean)}, anchors = {r.anchors}"
        )
    return lines


def cmd_powers(cfg: RunConfig, out_dir: str) -> list[str]:
    ps = [int(v) for v in _fvec(cfg.get("powers", "p"))]
    n = _fint(cfg.get("powers", "n"))
    radii = list(_fvec(cfg.get("powers", "radii")))
    rows = []
    lines = []
    for p in ps:
        _, record = power_family(p, n)
        lines.append(f"p={p}: kappa_min = {_fmt(record.kappa_min)}")
        for r in radii:
            rows.append([p, n, record.kappa_min, r,
                         record.ball_mean(r), record.sphere_mean(r)])
    _write_csv(
        os.path.join(out_dir, "powers.csv"),
        ["p", "n", "kappa_min", "r", "ball_mean", "sphere_mean"],
        rows,
    )
    lines.append("csv = powers.csv")
    return lines


_HANDLERS = {
    "means": cmd_means,
    "classify": cmd_classify,
    "beardon": cmd_beardon,
    "torsion": cmd_torsion,
    "harnack": cmd_harnack,
    "blowup": cmd_blowup,
    "powers": cmd_powers,
}


def run(command: str, config_path: str | None, out_dir: str,
        h_override: str | None = None, quiet: bool = False) -> int:
    """Execute one command; returns the process exit status."""
    started = time.perf_counter()
    try:
        if command not in _COMMANDS:
            raise ConfigError(
                f"unknown command {command!r}; choose from {_COMMANDS}"
            )
        cfg = RunConfig(config_path, h_override)
        os.makedirs(out_dir, exist_ok=True)
        result_lines = _HANDLERS[command](cfg, out_dir)
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 2
    except MeanfieldError as exc:
        print(f"error: numeric: {exc}", file=sys.stderr)
        return 3

    report = ["# meanfield report", f"command = {command}",
              f"version = {__version__}", "", "[config]"]
    report += cfg.echo()
    report += ["", "[results]"]
    report += result_lines
    text = "\n".join(report) + "\n"
    _atomic_write(os.path.join(out_dir, "report.txt"), text)
    if not quiet:
        sys.stdout.write(text)
        elapsed = time.perf_counter() - started
        print(f"wall_time_s = {elapsed:.3f}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="meanfield",
        description="Ball/sphere means, harmonic and subharmonic "
                    "classification, torsion-based Harnack constants.",
    )
    parser.add_argument("command", choices=_COMMANDS)
    parser.add_argument("--config", default=None, help="INI config path")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--h", default=None, dest="h_override",
                        help="override domain.h (accepts fractions)")
    parser.add_argument("--quiet", action="store_true")
    args = parser.parse_args(argv)
    return run(args.command, args.config, args.out, args.h_override,
               args.quiet)


if __name__ == "__main__":
    sys.exit(main())
