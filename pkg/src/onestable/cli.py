"""Command-line interface.

Subcommands: sample | density | generator | resolve | verify | probe.
Every run validates its configuration before touching the filesystem, then
writes its artifacts plus a manifest.json capturing argv, parameters,
library versions, seeds, input/output hashes, backend and elapsed time, so
any result can be reproduced from the manifest alone.

Exit codes: 0 success, 1 configuration/validation error, 2 numerical
failure (coarse grid, degenerate measure, contraction refusal, ...),
3 statistical-test failure in verify.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from ._kernels import BACKEND
from .density import (
    auto_grid,
    density_grid,
    density_point,
    derivative_scaling_probe,
)
from .drifts import drift_from_spec
from .errors import (
    BoundarySupportError,
    ContractionFailure,
    DegenerateMeasure,
    DimensionError,
    EmptyBatch,
    EmptyMeasure,
    EvaluationError,
    GridError,
    GridTooCoarse,
    InvalidDirection,
    MaxIterExceeded,
    OneStableError,
    UnsupportedDimension,
    UnsupportedScheme,
)
from .generator import QuadSpec, apply_L_batch, gaussian_bump, poly_window, tail_bound, trig
from .grid import GridField, centered_spec
from .mcverify import (
    SimConfig,
    character_check,
    krylov_ratio_probe,
    martingale_residual,
    resolvent_mc,
    weak_uniqueness_probe,
)
from .resolvent import deviation_integral, multiplier_sup, neumann_solve
from .rng import derive_seed
from .sampler import sample_decomposition, sample_exact
from .spectral import (
    cylindrical,
    isotropic,
    load_measure,
    nondegeneracy_kappa,
    sphere_mean_abs_cos,
)

_VALIDATION_ERRORS = (
    ValueError,
    OSError,
    KeyError,
    DimensionError,
    InvalidDirection,
    EmptyMeasure,
    EmptyBatch,
    UnsupportedScheme,
    UnsupportedDimension,
)
_NUMERICAL_ERRORS = (
    GridTooCoarse,
    DegenerateMeasure,
    ContractionFailure,
    MaxIterExceeded,
    BoundarySupportError,
    EvaluationError,
    GridError,
)

def _iso_unit(d):
    # total mass chosen so the exponent is exactly |lam|
    return isotropic(d, 1.0 / sphere_mean_abs_cos(d))


_BUILTIN_MEASURES = {
    "cauchy1": lambda: cylindrical(1),
    "cyl2": lambda: cylindrical(2),
    "cyl3": lambda: cylindrical(3),
    "iso2": lambda: _iso_unit(2),
    "iso3": lambda: _iso_unit(3),
}

_DRIFT_ALIASES = {
    "tanh01": "tanh:amp=0.1,scale=1",
    "sin02": "sin:amp=0.2",
}


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems with exit code 1, not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliError(message)


class CliError(ValueError):
    pass


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _write_columns(path, cols, header=None):
    arr = np.column_stack([np.asarray(c, dtype=float) for c in cols])
    with open(path, "w") as fh:
        if header:
            fh.write(f"# {header}\n")
        for row in arr:
            fh.write(" ".join(f"{v:.12g}" for v in row) + "\n")


def _vector(text, dimension=None, name="vector"):
    try:
        parts = [float(p) for p in str(text).split(",")]
    except ValueError as exc:
        raise CliError(f"bad {name} {text!r}: expected comma-separated floats") from exc
    if dimension is not None:
        if len(parts) == 1:
            parts = parts * dimension
        if len(parts) != dimension:
            raise CliError(f"{name} needs {dimension} components, got {len(parts)}")
    return np.asarray(parts)


def _load_measure_arg(text):
    path = Path(text)
    if path.exists():
        mu, changed = load_measure(path)
        return mu, str(path), changed
    if text in _BUILTIN_MEASURES:
        return _BUILTIN_MEASURES[text](), None, False
    raise CliError(
        f"measure {text!r} is neither a file nor a builtin "
        f"({', '.join(sorted(_BUILTIN_MEASURES))})"
    )


def _drift_arg(text, dimension):
    return drift_from_spec(_DRIFT_ALIASES.get(text, text), dimension)


def _phi_arg(text, dimension):
    """Test-function micro-format, e.g. bump:center=0/0,sigma=1,amp=1."""
    name, _, rest = str(text).partition(":")
    kv = {}
    for item in rest.split(","):
        if not item.strip():
            continue
        key, sep, val = item.partition("=")
        if not sep:
            raise CliError(f"bad test-function parameter {item!r}")
        kv[key.strip()] = val.strip()

    def vec(key, default):
        raw = kv.pop(key, default)
        parts = [float(p) for p in str(raw).split("/")]
        if len(parts) == 1:
            parts = parts * dimension
        if len(parts) != dimension:
            raise CliError(f"{key} needs {dimension} components")
        return np.asarray(parts)

    def num(key, default):
        return float(kv.pop(key, default))

    name = name.strip().lower()
    if name == "bump":
        fn = gaussian_bump(vec("center", "0"), num("sigma", 1.0), num("amp", 1.0))
    elif name == "trig":
        fn = trig(vec("omega", "1"), num("amp", 1.0), num("phase", 0.0))
    elif name == "poly":
        coeffs = [float(p) for p in str(kv.pop("coeffs", "0/1/0/0")).split("/")]
        if len(coeffs) != 4:
            raise CliError("coeffs needs p0/p1/p2/p3")
        fn = poly_window(
            vec("center", "0"), num("sigma", 1.0), vec("axis", "1"), coeffs,
            num("amp", 1.0),
        )
    else:
        raise CliError(f"unknown test function {name!r} (bump, trig, poly)")
    if kv:
        raise CliError(f"unused test-function parameters: {sorted(kv)}")
    return fn


class _Run:
    """Collects artifacts and writes them (plus the manifest) at the end."""

    def __init__(self, args):
        self.args = args
        self.t0 = time.time()
        self.outdir = Path(args.out)
        self.inputs = {}
        self.report = {}
        self.plot_files = {}
        self.binary_writers = []

    def add_input(self, label, path):
        if path is not None:
            self.inputs[label] = {"path": str(path), "sha256": _sha256(path)}

    def add_plot(self, name, cols, header):
        if getattr(self.args, "emit_plot_data", False):
            self.plot_files[name] = (cols, header)

    def finish(self, exit_code=0, report_name="report.json"):
        self.outdir.mkdir(parents=True, exist_ok=True)
        written = []
        for writer in self.binary_writers:
            written.extend(writer(self.outdir))
        report_path = self.outdir / report_name
        _write_json(report_path, self.report)
        written.append(report_path)
        for name, (cols, header) in self.plot_files.items():
            p = self.outdir / name
            _write_columns(p, cols, header)
            written.append(p)
        manifest = {
            "argv": sys.argv[1:],
            "command": self.args.command,
            "package": {"name": "onestable", "version": __version__},
            "versions": {
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": __import__("scipy").__version__,
            },
            "backend": BACKEND,
            "seed": getattr(self.args, "seed", None),
            "sub_seeds": self.report.get("sub_seeds", {}),
            "threads": getattr(self.args, "threads", 0),
            "inputs": self.inputs,
            "outputs": {p.name: _sha256(p) for p in written},
            "elapsed_s": round(time.time() - self.t0, 3),
            "exit_code": exit_code,
        }
        _write_json(self.outdir / "manifest.json", manifest)
        return exit_code


def _add_common(parser):
    parser.add_argument("--out", default="onestable-out", help="output directory")
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--threads", type=int, default=0,
                        help="advisory worker cap; results do not depend on it")
    parser.add_argument("--emit-plot-data", action="store_true",
                        help="also write gnuplot-ready two-column files")


def build_parser():
    top = _Parser(prog="onestable", description=__doc__.splitlines()[0])
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", parents=[], help="draw increments of Z_t")
    p.add_argument("--measure", required=True)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--scheme", choices=["exact", "decomposition"], default="exact")
    _add_common(p)

    p = sub.add_parser("density", help="density of Z_t on a grid or at a point")
    p.add_argument("--measure", required=True)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--point", default=None, help="evaluate at x1,x2 instead of a grid")
    p.add_argument("--extent", type=float, default=None, help="grid side length")
    p.add_argument("--spacing", type=float, default=None)
    p.add_argument("--fine", type=float, default=1.0)
    _add_common(p)

    p = sub.add_parser("generator", help="apply the generator to a test function")
    p.add_argument("--measure", required=True)
    p.add_argument("--phi", required=True, help="bump:...|trig:...|poly:...")
    p.add_argument("--points", required=True, help="x1,y1;x2,y2;...")
    p.add_argument("--drift", default=None, help="include <b, grad phi>")
    p.add_argument("--rho-min", type=float, default=1e-4)
    p.add_argument("--rho-max", type=float, default=1e4)
    p.add_argument("--n-rho", type=int, default=2048)
    _add_common(p)

    p = sub.add_parser("resolve", help="solve lam*u - Lu - b.Du = f")
    p.add_argument("--measure", required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--drift", default="zero")
    p.add_argument("--f", default="bump:center=0,sigma=1,amp=1")
    p.add_argument("--extent", type=float, default=None)
    p.add_argument("--spacing", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--p", type=float, default=2.0)
    _add_common(p)

    p = sub.add_parser("verify", help="statistical checks against the theory")
    p.add_argument("check", choices=["martingale", "semigroup", "uniqueness", "resolvent"])
    p.add_argument("--measure", required=True)
    p.add_argument("--drift", default="zero")
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--h", type=float, default=0.01)
    p.add_argument("--x0", default="0")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--phi", default=None)
    p.add_argument("--checkpoints", default="0.5,1")
    p.add_argument("--n-omegas", type=int, default=10)
    p.add_argument("--scheme-a", choices=["exact", "decomposition"], default="exact")
    p.add_argument("--scheme-b", choices=["exact", "decomposition"], default="exact")
    p.add_argument("--h-b", type=float, default=None)
    p.add_argument("--drift-b", default=None,
                   help="different drift for leg B (negative control)")
    _add_common(p)

    p = sub.add_parser("probe", help="numerical measurements (no pass/fail)")
    p.add_argument("what", choices=["kappa", "multiplier", "krylov", "deviation", "scaling"])
    p.add_argument("--measure", required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--lambdas", default=None, help="comma list for multiplier probe")
    p.add_argument("--b0", default="0")
    p.add_argument("--drift", default="zero")
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--widths", default="0.4,0.2,0.1,0.05")
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--h", type=float, default=0.01)
    p.add_argument("--x0", default="0")
    p.add_argument("--gammas", default="0.001,0.01,0.1,1.0")
    p.add_argument("--K", type=float, default=4.0)
    p.add_argument("--t-values", default="0.5,1,2")
    p.add_argument("--extent", type=float, default=None)
    p.add_argument("--spacing", type=float, default=None)
    _add_common(p)
    return top


# -- subcommand handlers ------------------------------------------------------


def _cmd_sample(args, run):
    mu, path, changed = _load_measure_arg(args.measure)
    run.add_input("measure", path)
    sampler = sample_exact if args.scheme == "exact" else sample_decomposition
    batch = sampler(mu, args.t, args.n, args.seed)
    run.report = {
        "scheme": args.scheme,
        "t": args.t,
        "n": args.n,
        "seed": args.seed,
        "measure_hash": mu.hash(),
        "symmetrized_on_load": changed,
        "sub_seeds": {"sampler": derive_seed(args.seed, args.scheme)},
        "meta": {k: v for k, v in batch.meta.items()},
    }

    def write(outdir):
        csv = outdir / "samples.csv"
        batch.to_csv(csv)
        return [csv, Path(str(csv) + ".json")]

    run.binary_writers.append(write)
    first = np.sort(batch.samples[:, 0])
    run.add_plot(
        "samples_ecdf.dat",
        [first, (np.arange(args.n) + 0.5) / args.n],
        "x  empirical_cdf(first coordinate)",
    )
    return run.finish(0)


def _cmd_density(args, run):
    mu, path, _ = _load_measure_arg(args.measure)
    run.add_input("measure", path)
    if args.point is not None:
        x = _vector(args.point, mu.dimension, "point")
        value = density_point(mu, args.t, x)
        run.report = {"mode": "point", "t": args.t, "point": x.tolist(), "value": value}
        return run.finish(0)
    if args.extent is not None and args.spacing is not None:
        spec = centered_spec(args.extent, args.spacing, mu.dimension)
    else:
        spec = auto_grid(mu, args.t, fine=args.fine)
    fld = density_grid(mu, args.t, spec=spec)
    run.report = {
        "mode": "grid",
        "t": args.t,
        "grid": spec.as_dict(),
        "mass_on_grid": float(np.sum(fld.values) * spec.cell_volume),
        "meta": fld.meta,
    }

    def write(outdir):
        prefix = outdir / "density"
        fld.to_binary(prefix)
        return [Path(f"{prefix}.f64"), Path(f"{prefix}.json")]

    run.binary_writers.append(write)
    if mu.dimension == 1:
        run.add_plot("density.dat", [spec.axes()[0], fld.values], "x  p(x)")
    return run.finish(0)


def _cmd_generator(args, run):
    mu, path, _ = _load_measure_arg(args.measure)
    run.add_input("measure", path)
    phi = _phi_arg(args.phi, mu.dimension)
    pts = np.array(
        [_vector(chunk, mu.dimension, "point") for chunk in args.points.split(";")]
    )
    quad = QuadSpec(rho_min=args.rho_min, rho_max=args.rho_max, n_rho=args.n_rho)
    if args.drift:
        from .generator import apply_full_batch

        drift = _drift_arg(args.drift, mu.dimension)
        values = apply_full_batch(phi, pts, mu, drift, quad)
    else:
        values = apply_L_batch(phi, pts, mu, quad)
    run.report = {
        "phi": args.phi,
        "drift": args.drift,
        "points": pts.tolist(),
        "values": values.tolist(),
        "tail_bound": tail_bound(phi, mu, quad),
        "quad": {"rho_min": quad.rho_min, "rho_max": quad.rho_max, "n_rho": quad.n_rho},
    }
    return run.finish(0)


def _solution_grid(args, mu, lam):
    extent = getattr(args, "extent", None)
    spacing = getattr(args, "spacing", None)
    if extent is not None and spacing is not None:
        return centered_spec(extent, spacing, mu.dimension)
    if mu.dimension == 1:
        return centered_spec(400.0, 0.05, 1)
    return centered_spec(160.0, 0.16, mu.dimension)


def _cmd_resolve(args, run):
    mu, path, _ = _load_measure_arg(args.measure)
    run.add_input("measure", path)
    drift = _drift_arg(args.drift, mu.dimension)
    phi = _phi_arg(args.f, mu.dimension)
    spec = _solution_grid(args, mu, args.lam)
    f = GridField(spec=spec, values=phi.evaluate(spec.points()).reshape(spec.shape))
    sol = neumann_solve(f, args.lam, drift, mu, tol=args.tol,
                        max_iter=args.max_iter, p=args.p)
    run.report = {**sol.report(), "drift": drift.as_dict(), "f": args.f}

    def write(outdir):
        prefix = outdir / "solution"
        sol.u.to_binary(prefix)
        return [Path(f"{prefix}.f64"), Path(f"{prefix}.json")]

    run.binary_writers.append(write)
    if mu.dimension == 1:
        run.add_plot("solution.dat", [spec.axes()[0], sol.u.values], "x  u(x)")
    run.add_plot(
        "residuals.dat",
        [np.arange(1, len(sol.partial_sums_residuals) + 1), sol.partial_sums_residuals],
        "term  residual",
    )
    return run.finish(0)


def _cmd_verify(args, run):
    mu, path, _ = _load_measure_arg(args.measure)
    run.add_input("measure", path)
    drift = _drift_arg(args.drift, mu.dimension)
    x0 = _vector(args.x0, mu.dimension, "x0")
    passed = True

    if args.check == "martingale":
        phi = _phi_arg(args.phi or "bump:center=0,sigma=1,amp=1", mu.dimension)
        checkpoints = [float(v) for v in args.checkpoints.split(",")]
        cfg = SimConfig(mu=mu, drift=drift, x0=x0, T=max(checkpoints),
                        h=args.h, n=args.paths, seed=args.seed)
        rep = martingale_residual(cfg, phi, checkpoints)
        rep_half = martingale_residual(
            cfg.replace(h=args.h / 2, seed=derive_seed(args.seed, "half")),
            phi, checkpoints,
        )
        rows = []
        for a, b in zip(rep.rows, rep_half.rows):
            bias = 2.0 * abs(a.mean - b.mean)
            budget = 3.0 * a.stderr + bias
            ok = abs(a.mean) <= budget
            passed &= ok
            rows.append({
                "t": a.t, "mean": a.mean, "stderr": a.stderr,
                "mean_half_step": b.mean, "bias_measured": bias,
                "budget": budget, "passed": ok,
            })
        run.report = {"check": "martingale", "rows": rows, "meta": rep.meta,
                      "passed": passed}
        run.add_plot("martingale.dat", [[r["t"] for r in rows],
                                        [r["mean"] for r in rows]], "t  mean_Mt")

    elif args.check == "semigroup":
        if drift.bound != 0.0:
            raise CliError("semigroup check requires zero drift")
        from .rng import substream

        omegas = substream(args.seed, "omegas").normal(size=(args.n_omegas, mu.dimension))
        rows = character_check(mu, x0, args.t, omegas, args.paths, args.seed)
        for r in rows:
            r["passed"] = abs(r["z"]) <= 3.0
            passed &= r["passed"]
        run.report = {"check": "semigroup", "t": args.t, "rows": rows, "passed": passed}

    elif args.check == "uniqueness":
        cfg_a = SimConfig(mu=mu, drift=drift, x0=x0, T=args.t, h=args.h,
                          n=args.paths, seed=derive_seed(args.seed, "A"),
                          scheme=args.scheme_a)
        drift_b = _drift_arg(args.drift_b, mu.dimension) if args.drift_b else drift
        cfg_b = SimConfig(mu=mu, drift=drift_b, x0=x0, T=args.t,
                          h=args.h_b if args.h_b else args.h,
                          n=args.paths, seed=derive_seed(args.seed, "B"),
                          scheme=args.scheme_b)
        rep = weak_uniqueness_probe(cfg_a, cfg_b, args.t)
        passed = rep.passed
        run.report = {"check": "uniqueness", **rep.as_dict()}

    else:  # resolvent
        phi = _phi_arg(args.phi or "bump:center=0,sigma=1,amp=1", mu.dimension)
        horizon = max(10.0 / args.lam, 10.0)
        steps = math.ceil(horizon / args.h)
        cfg = SimConfig(mu=mu, drift=drift, x0=x0, T=steps * args.h, h=args.h,
                        n=args.paths, seed=args.seed)
        est = resolvent_mc(cfg, phi, args.lam)
        est_half = resolvent_mc(
            cfg.replace(h=args.h / 2, seed=derive_seed(args.seed, "half")),
            phi, args.lam,
        )
        spec = _solution_grid(args, mu, args.lam)
        f = GridField(spec=spec,
                      values=phi.evaluate(spec.points()).reshape(spec.shape))
        sol = neumann_solve(f, args.lam, drift, mu)
        u0 = float(sol.u.interp(x0[None, :])[0])
        bias = 2.0 * abs(est.estimate - est_half.estimate)
        budget = 3.0 * est.stderr + est.tail_bound + bias
        passed = abs(est.estimate - u0) <= budget
        run.report = {
            "check": "resolvent", "lambda": args.lam,
            "mc_estimate": est.estimate, "mc_stderr": est.stderr,
            "tail_bound": est.tail_bound, "bias_measured": bias,
            "solver_value": u0, "difference": est.estimate - u0,
            "budget": budget, "passed": passed,
            "solver": sol.report(),
        }

    run.report["sub_seeds"] = {"verify": derive_seed(args.seed, args.check)}
    return run.finish(0 if passed else 3)


def _cmd_probe(args, run):
    mu, path, _ = _load_measure_arg(args.measure)
    run.add_input("measure", path)

    if args.what == "kappa":
        rep = nondegeneracy_kappa(mu)
        run.report = {
            "probe": "kappa",
            "kappa": rep.kappa,
            "min_ratio": rep.min_ratio,
            "max_ratio": rep.max_ratio,
            "grid_points": rep.grid_points,
        }

    elif args.what == "multiplier":
        b0 = _vector(args.b0, mu.dimension, "b0")
        lams = [float(v) for v in (args.lambdas or str(args.lam)).split(",")]
        spec = (
            centered_spec(args.extent, args.spacing, mu.dimension)
            if args.extent and args.spacing
            else auto_grid(mu, 1.0)
        )
        kappa = nondegeneracy_kappa(mu).kappa
        rows = []
        for lam in lams:
            rep = multiplier_sup(mu, lam, b0, spec)
            rows.append({
                "lambda": lam,
                "sup_gradient_ratio": rep.sup_gradient_ratio,
                "sup_multiplier": rep.sup_multiplier,
                "kappa": kappa,
                "within_kappa": rep.sup_gradient_ratio <= kappa * (1 + 1e-12),
            })
        run.report = {"probe": "multiplier", "grid": spec.as_dict(), "rows": rows}

    elif args.what == "krylov":
        drift = _drift_arg(args.drift, mu.dimension)
        x0 = _vector(args.x0, mu.dimension, "x0")
        p = args.p if args.p is not None else 2.0 * mu.dimension
        widths = [float(v) for v in args.widths.split(",")]
        horizon = max(10.0 / args.lam, 10.0)
        steps = math.ceil(horizon / args.h)
        cfg = SimConfig(mu=mu, drift=drift, x0=x0, T=steps * args.h, h=args.h,
                        n=args.paths, seed=args.seed)
        rep = krylov_ratio_probe(cfg, args.lam, p, widths)
        contrast = krylov_ratio_probe(cfg, args.lam, 0.75 * mu.dimension, widths)
        run.report = {
            "probe": "krylov",
            "asserted_p": rep.as_dict(),
            "contrast_low_p": contrast.as_dict(),
        }
        run.add_plot("krylov.dat", [widths, [r["ratio"] for r in rep.rows]],
                     "width  ratio")

    elif args.what == "deviation":
        b0 = _vector(args.b0, mu.dimension, "b0")
        gammas = [float(v) for v in args.gammas.split(",")]
        x = np.zeros(mu.dimension)
        rows = []
        for g in gammas:
            xi = x.copy()
            xi[0] += g
            val = deviation_integral(x, xi, args.lam, args.K, b0, mu)
            rows.append({"gamma": g, "value": val})
        run.report = {"probe": "deviation", "lambda": args.lam, "K": args.K,
                      "rows": rows}
        run.add_plot("deviation.dat", [[r["gamma"] for r in rows],
                                       [r["value"] for r in rows]], "gamma  value")

    else:  # scaling
        t_values = [float(v) for v in args.t_values.split(",")]
        reports = {}
        for order in (0, 1, 2):
            rep = derivative_scaling_probe(mu, t_values, order)
            reports[str(order)] = {
                "t_values": t_values,
                "max_over_min": rep.max_over_min,
                "flagged": rep.flagged,
            }
        run.report = {"probe": "scaling", "orders": reports}

    return run.finish(0)


_HANDLERS = {
    "sample": _cmd_sample,
    "density": _cmd_density,
    "generator": _cmd_generator,
    "resolve": _cmd_resolve,
    "verify": _cmd_verify,
    "probe": _cmd_probe,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        run = _Run(args)
        return _HANDLERS[args.command](args, run)
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
