"""Command-line surface: evaluate fields, spectra, transforms, orbits, checks.

Every command resolves its full parameter set, computes, writes
`manifest.json` (sorted keys, UTF-8) and only then its data files, so the
manifest always describes what produced the data.  Re-running any command
with --from-manifest reproduces the data files byte for byte.

Exit codes: 0 success, 1 verification or solver failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import ClassicalState, canonical_momenta, conserved_pair, integrate_orbit
from .errors import DivergenceError, DomainError, SolverError
from .mqtransform import (
    DeltaLine,
    PlaneWave,
    RegulatorSchedule,
    delta_prefactor,
    plane_prefactor,
    transform_delta,
    transform_numeric,
    transform_planewave,
)
from .operators import spectrum
from .physcore import GaugeChoice, PhysicalParams, QuantumNumbers, make_grid
from .verify import report_dict, run_suite
from .wavefunctions import (
    NonFreeCoefficients,
    eval_landau,
    eval_nonfree,
    eval_nonfree_term,
    oscillator_center_in_grid,
    sample_field,
)

DEFAULT_GRID = "-10:10:257"


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _parse_axis(text: str):
    try:
        lo, hi, n = text.split(":")
        return float(lo), float(hi), int(n)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"expected MIN:MAX:NPTS, got {text!r}") from exc


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a complex number, got {text!r}") from exc


def _parse_epsilons(text: str):
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}") from exc


def add_common(parser: argparse.ArgumentParser, with_grid=True):
    parser.add_argument("--hbar", type=float, default=1.0)
    parser.add_argument("--mass", type=float, default=1.0)
    parser.add_argument("--charge", type=float, default=1.0)
    parser.add_argument("--cspeed", type=float, default=1.0)
    parser.add_argument("--B", type=float, default=1.0, help="magnetic field strength")
    parser.add_argument("--gauge", choices=["landau-x", "landau-y"], default="landau-x")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=Path, default=Path("."), help="output directory")
    parser.add_argument("--json", action="store_true", help="print the manifest to stdout")
    parser.add_argument("--from-manifest", type=Path, default=None,
                        help="re-run with the parameter set stored in a manifest")
    if with_grid:
        parser.add_argument("--grid", type=_parse_axis, default=None,
                            help=f"square grid MIN:MAX:NPTS (default {DEFAULT_GRID})")
        parser.add_argument("--gridx", type=_parse_axis, default=None)
        parser.add_argument("--gridy", type=_parse_axis, default=None)


def _grid_params(args) -> dict:
    base = args.grid or _parse_axis(DEFAULT_GRID)
    gx = args.gridx or base
    gy = args.gridy or base
    return {"x_min": gx[0], "x_max": gx[1], "nx": gx[2],
            "y_min": gy[0], "y_max": gy[1], "ny": gy[2]}


def _common_params(args) -> dict:
    return {
        "hbar": args.hbar, "mass": args.mass, "charge": args.charge,
        "cspeed": args.cspeed, "B": args.B, "gauge": args.gauge, "seed": args.seed,
    }


def _physical(p: dict) -> PhysicalParams:
    return PhysicalParams(p["hbar"], p["mass"], p["charge"], p["cspeed"], p["B"])


def _gauge(p: dict) -> GaugeChoice:
    return GaugeChoice(p["gauge"])


def _grid(p: dict):
    g = p["grid"]
    return make_grid((g["x_min"], g["x_max"], g["y_min"], g["y_max"]), g["nx"], g["ny"])


def _derived(params: PhysicalParams) -> dict:
    return {"omega_c": params.omega_c, "beta": params.beta, "mag_length": params.mag_length}


def _load_manifest_params(path: Path) -> dict:
    with open(path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    return manifest["parameters"]


def _write_manifest(outdir: Path, manifest: dict, emit_json: bool) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    text = json.dumps(manifest, indent=2, sort_keys=True, ensure_ascii=False)
    (outdir / "manifest.json").write_text(text + "\n", encoding="utf-8")
    if emit_json:
        print(text)


def _write_field_csv(path: Path, grid, values: np.ndarray) -> None:
    xs, ys = grid.xs(), grid.ys()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,y,re,im,abs2\n")
        for i in range(grid.nx):
            x = xs[i]
            col = values[i]
            for j in range(grid.ny):
                v = col[j]
                fh.write(f"{_fmt(x)},{_fmt(ys[j])},{_fmt(v.real)},{_fmt(v.imag)},"
                         f"{_fmt(abs(v) ** 2)}\n")


def _write_density_png(path: Path, panels) -> None:
    """8-bit grayscale |psi|^2, panels side by side, y increasing upward."""
    from PIL import Image

    dens = [np.abs(p) ** 2 for p in panels]
    peak = max(float(d.max()) for d in dens) or 1.0
    images = [np.flipud((255.0 * d / peak).round().astype(np.uint8).T) for d in dens]
    sep = np.full((images[0].shape[0], 2), 255, dtype=np.uint8)
    stacked = images[0]
    for img in images[1:]:
        stacked = np.hstack([stacked, sep, img])
    Image.fromarray(stacked, mode="L").save(path)


def run_eval(p: dict, outdir: Path, emit_json: bool) -> int:
    params = _physical(p)
    gauge = _gauge(p)
    grid = _grid(p)
    qn = QuantumNumbers(p["n"], p["k"], p["kprime"])
    coeffs = NonFreeCoefficients(complex(*p["coeff_plane"]), complex(*p["coeff_delta"]))

    warnings_list = []
    if not oscillator_center_in_grid(params, gauge, qn, grid, "plane"):
        warnings_list.append("plane-term oscillator center k/beta lies outside the grid; "
                             "residual checks on this field measure a boundary tail")
    if p["nonfree"] and not oscillator_center_in_grid(params, gauge, qn, grid, "delta"):
        warnings_list.append("strip-term center k'/beta lies outside the grid; "
                             "residual checks on this field measure a boundary tail")

    t0 = time.perf_counter()
    if p["nonfree"]:
        field = sample_field(lambda X, Y: eval_nonfree(params, gauge, qn, coeffs, X, Y), grid)
        panels = [
            coeffs.c_plane * eval_landau(params, gauge, qn.n, qn.k, *grid.meshgrid()),
            coeffs.c_delta * eval_nonfree_term(params, gauge, qn.n, qn.kprime, *grid.meshgrid()),
            field.values,
        ]
    else:
        field = sample_field(lambda X, Y: eval_landau(params, gauge, qn.n, qn.k, X, Y), grid)
        panels = [field.values]
    duration = time.perf_counter() - t0

    outputs = ["field.csv"] + (["density.png"] if p["heatmap"] else [])
    manifest = {
        "command": "eval", "tool_version": __version__, "parameters": p,
        "derived": _derived(params), "warnings": warnings_list,
        "duration_s": duration, "outputs": outputs,
    }
    _write_manifest(outdir, manifest, emit_json)
    _write_field_csv(outdir / "field.csv", grid, field.values)
    if p["heatmap"]:
        _write_density_png(outdir / "density.png", panels)
    return 0


def run_spectrum(p: dict, outdir: Path, emit_json: bool) -> int:
    params = _physical(p)
    gauge = _gauge(p)
    grid = _grid(p)
    t0 = time.perf_counter()
    try:
        import warnings as _warnings

        with _warnings.catch_warnings(record=True) as caught:
            _warnings.simplefilter("always")
            result = spectrum(params, gauge, grid, p["neigs"], seed=p["seed"],
                              order=p["order"], tol=p["tol"], cluster_tol=p["cluster_tol"])
    except SolverError as exc:
        print(f"spectrum solver failed: {exc}", file=sys.stderr)
        return 1
    duration = time.perf_counter() - t0

    manifest = {
        "command": "spectrum", "tool_version": __version__, "parameters": p,
        "derived": _derived(params),
        "warnings": list(result.warnings) + [str(w.message) for w in caught],
        "duration_s": duration, "outputs": ["spectrum.csv"],
        "clusters": [{"mean": m, "multiplicity": c} for m, c in result.clusters()],
    }
    _write_manifest(outdir, manifest, emit_json)
    with open(outdir / "spectrum.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("index,eigenvalue,cluster_id,residual\n")
        for i, (ev, cid, res) in enumerate(
                zip(result.eigenvalues, result.cluster_ids, result.residual_norms)):
            fh.write(f"{i},{_fmt(ev)},{cid},{_fmt(res)}\n")
    return 0


def run_transform(p: dict, outdir: Path, emit_json: bool) -> int:
    params = _physical(p)
    ell = params.mag_length
    n = p["n"]
    sched = RegulatorSchedule(tuple(p["epsilons"]), p["half_width"], p["nodes_per_unit"])
    xs = np.linspace(-2 * ell, 2 * ell, p["probes"])
    X, Y = np.meshgrid(xs, xs, indexing="ij")

    branches = []
    if p["branch"] in ("planewave", "both"):
        branches.append("planewave")
    if p["branch"] in ("delta", "both"):
        branches.append("delta")

    t0 = time.perf_counter()
    rows = []
    try:
        for branch in branches:
            if branch == "planewave":
                num, err = transform_numeric(params, PlaneWave(n, p["k"]), X, Y, sched)
                ana = plane_prefactor(params) * transform_planewave(params, n, p["k"], X, Y)
            else:
                num, err = transform_numeric(params, DeltaLine(n, p["kprime"]), X, Y, sched)
                ana = transform_delta(params, n, p["kprime"], X, Y)
            for i in range(p["probes"]):
                for j in range(p["probes"]):
                    rows.append((branch, X[i, j], Y[i, j], num[i, j], ana[i, j], err[i, j]))
    except DivergenceError as exc:
        print(f"transform extrapolation diverged: {exc}", file=sys.stderr)
        return 1
    duration = time.perf_counter() - t0

    cn = delta_prefactor(params, n)
    manifest = {
        "command": "transform", "tool_version": __version__, "parameters": p,
        "derived": {**_derived(params),
                    "plane_prefactor": plane_prefactor(params),
                    "delta_prefactor": {"n": n, "re": cn.real, "im": cn.imag,
                                        "modulus": abs(cn)}},
        "warnings": [], "duration_s": duration, "outputs": ["transform.csv"],
    }
    _write_manifest(outdir, manifest, emit_json)
    with open(outdir / "transform.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("branch,x,y,re_numeric,im_numeric,re_analytic,im_analytic,"
                 "abs_diff,error_estimate\n")
        for branch, x, y, num, ana, err in rows:
            fh.write(f"{branch},{_fmt(x)},{_fmt(y)},{_fmt(num.real)},{_fmt(num.imag)},"
                     f"{_fmt(ana.real)},{_fmt(ana.imag)},{_fmt(abs(num - ana))},"
                     f"{_fmt(err)}\n")
    return 0


def run_orbit(p: dict, outdir: Path, emit_json: bool) -> int:
    params = _physical(p)
    gauge = _gauge(p)
    s0 = ClassicalState(p["x0"], p["y0"], p["vx0"], p["vy0"])
    t0 = time.perf_counter()
    traj = integrate_orbit(params, s0, p["dt"], p["steps"])
    duration = time.perf_counter() - t0

    manifest = {
        "command": "orbit", "tool_version": __version__, "parameters": p,
        "derived": {**_derived(params), "period": 2.0 * math.pi / params.omega_c},
        "warnings": [], "duration_s": duration, "outputs": ["orbit.csv"],
    }
    _write_manifest(outdir, manifest, emit_json)
    with open(outdir / "orbit.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,x,y,vx,vy,c1,c2,px,py\n")
        for s in traj:
            pair = conserved_pair(params, s)
            mom = canonical_momenta(params, gauge, s)
            fh.write(",".join(_fmt(v) for v in (
                s.t, s.x, s.y, s.vx, s.vy, pair.c1, pair.c2, mom.px, mom.py)) + "\n")
    return 0


def run_verify(p: dict, outdir: Path, emit_json: bool) -> int:
    params = _physical(p)
    t0 = time.perf_counter()
    checks = run_suite(params, h=p["h"], expect_order=p["expect_order"],
                       break_gauge=p["break_gauge"])
    duration = time.perf_counter() - t0
    report = report_dict(checks)

    manifest = {
        "command": "verify", "tool_version": __version__, "parameters": p,
        "derived": _derived(params), "warnings": [],
        "duration_s": duration, "outputs": ["verify_report.json"],
    }
    _write_manifest(outdir, manifest, emit_json)
    (outdir / "verify_report.json").write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    for c in checks:
        bound = f"[{c.threshold:g}, {c.upper:g}]" if c.comparator == "range" else (
            f"{c.comparator} {c.threshold:g}")
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.observed:.3e} ({bound})")
    print(f"{report['n_checks'] - report['n_failed']}/{report['n_checks']} checks passed")
    return 0 if report["passed"] else 1


def run_params(p: dict, outdir: Path | None, emit_json: bool) -> int:
    params = _physical(p)
    manifest = {
        "command": "params", "tool_version": __version__, "parameters": p,
        "derived": _derived(params), "warnings": [], "duration_s": 0.0, "outputs": [],
    }
    text = json.dumps(manifest, indent=2, sort_keys=True)
    print(text)
    if outdir is not None:
        _write_manifest(outdir, manifest, emit_json=False)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="landaukit",
        description="Landau-level fields, operators, transform, and dynamics toolkit",
    )
    parser.add_argument("--version", action="version", version=f"landaukit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="sample a wavefunction onto a grid")
    add_common(p_eval)
    p_eval.add_argument("--n", type=int, required=True, help="oscillator level")
    p_eval.add_argument("--k", type=float, default=0.0)
    p_eval.add_argument("--kprime", type=float, default=0.0)
    p_eval.add_argument("--nonfree", action="store_true",
                        help="evaluate the two-term wavefunction instead of the free one")
    p_eval.add_argument("--coeff-plane", type=_parse_complex, default=1 + 0j)
    p_eval.add_argument("--coeff-delta", type=_parse_complex, default=1 + 0j)
    p_eval.add_argument("--no-heatmap", dest="heatmap", action="store_false")

    p_spec = sub.add_parser("spectrum", help="lowest eigenvalues of the hard-wall Hamiltonian")
    add_common(p_spec)
    p_spec.add_argument("--neigs", type=int, default=12)
    p_spec.add_argument("--tol", type=float, default=1e-9)
    p_spec.add_argument("--cluster-tol", type=float, default=1e-3)
    p_spec.add_argument("--order", type=int, choices=[2, 4], default=4)

    p_tr = sub.add_parser("transform", help="numeric vs analytic transform comparison")
    add_common(p_tr, with_grid=False)
    p_tr.add_argument("--branch", choices=["planewave", "delta", "both"], default="both")
    p_tr.add_argument("--n", type=int, default=0)
    p_tr.add_argument("--k", type=float, default=0.0)
    p_tr.add_argument("--kprime", type=float, default=0.0)
    p_tr.add_argument("--probes", type=int, default=5, help="probe grid is probes x probes")
    p_tr.add_argument("--epsilons", type=_parse_epsilons, default=(0.2, 0.14, 0.1, 0.07))
    p_tr.add_argument("--half-width", type=float, default=None)
    p_tr.add_argument("--nodes-per-unit", type=int, default=50)

    p_orb = sub.add_parser("orbit", help="integrate a classical cyclotron orbit")
    add_common(p_orb, with_grid=False)
    p_orb.add_argument("--x0", type=float, default=1.0)
    p_orb.add_argument("--y0", type=float, default=0.0)
    p_orb.add_argument("--vx0", type=float, default=0.0)
    p_orb.add_argument("--vy0", type=float, default=1.0)
    p_orb.add_argument("--dt", type=float, default=None,
                       help="time step (default: period / 1000)")
    p_orb.add_argument("--steps", type=int, default=1000)

    p_ver = sub.add_parser("verify", help="run the invariant suite")
    add_common(p_ver, with_grid=False)
    p_ver.add_argument("--h", type=float, default=0.04,
                       help="coarse spacing of the convergence block (compares h vs h/2)")
    p_ver.add_argument("--expect-order", type=int, default=None, choices=[2, 4])
    p_ver.add_argument("--break-gauge", action="store_true",
                       help="fault injection: flip one Hamiltonian stencil sign")

    p_par = sub.add_parser("params", help="print derived physical constants")
    add_common(p_par, with_grid=False)
    return parser


def _collect(args) -> dict:
    p = _common_params(args)
    cmd = args.command
    if cmd == "eval":
        p.update(grid=_grid_params(args), n=args.n, k=args.k, kprime=args.kprime,
                 nonfree=args.nonfree,
                 coeff_plane=[args.coeff_plane.real, args.coeff_plane.imag],
                 coeff_delta=[args.coeff_delta.real, args.coeff_delta.imag],
                 heatmap=args.heatmap)
    elif cmd == "spectrum":
        p.update(grid=_grid_params(args), neigs=args.neigs, tol=args.tol,
                 cluster_tol=args.cluster_tol, order=args.order)
    elif cmd == "transform":
        p.update(branch=args.branch, n=args.n, k=args.k, kprime=args.kprime,
                 probes=args.probes, epsilons=list(args.epsilons),
                 half_width=args.half_width, nodes_per_unit=args.nodes_per_unit)
    elif cmd == "orbit":
        params = PhysicalParams(args.hbar, args.mass, args.charge, args.cspeed, args.B)
        dt = args.dt if args.dt is not None else 2.0 * math.pi / params.omega_c / 1000.0
        p.update(x0=args.x0, y0=args.y0, vx0=args.vx0, vy0=args.vy0,
                 dt=dt, steps=args.steps)
    elif cmd == "verify":
        p.update(h=args.h, expect_order=args.expect_order, break_gauge=args.break_gauge)
    return p


_RUNNERS = {
    "eval": run_eval,
    "spectrum": run_spectrum,
    "transform": run_transform,
    "orbit": run_orbit,
    "verify": run_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.from_manifest is not None:
            p = _load_manifest_params(args.from_manifest)
        else:
            p = _collect(args)
        if args.command == "params":
            outdir = args.out if args.out != Path(".") else None
            return run_params(p, outdir, args.json)
        return _RUNNERS[args.command](p, args.out, args.json)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
