"""Command-line pipelines: calibrate, density, price, simulate, report.

Every command is a pure function of its input files and ``--seed``; outputs
carry SHA-256 hashes of their inputs.  Exit codes: 0 ok, 1 domain error,
2 usage or I/O error.  Errors are printed to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
import warnings
from pathlib import Path

from . import __version__
from .calibration import (
    MODEL_KINDS,
    TermStructure,
    fit_term_structure,
    param_table_rows,
    slice_at,
)
from .errors import (
    BarrierProdError,
    ConfigurationError,
    DomainError,
    InsufficientDataError,
    ParseError,
    ValidationError,
)
from .market_data import ChainConfig, load_chain
from .models import params_to_dict
from .montecarlo import DynamicsSpec, RunConfig, delta_and_bound, epsilon_terms, simulate
from .products import BarrierStyle, ProductSpec, atm_vol, price, pricing_inputs, validate_separation

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2

MC_TABLE_COLUMNS = ("barrier_level", "hits", "ended_below", "ended_above", "delta")


class UsageError(BarrierProdError):
    """Bad combination of command-line options."""


# --------------------------------------------------------------------------- io helpers


def file_hash(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _read_json(path: str | Path) -> dict:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"no such file: {p}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{p}: invalid JSON ({exc})") from None


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, allow_nan=True) + "\n")


def _csv_text(rows: list[dict], columns=None) -> str:
    columns = list(columns or (rows[0].keys() if rows else []))
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    return buf.getvalue()


def _provenance(args, inputs: dict[str, str | None]) -> dict:
    return {
        "version": __version__,
        "command": args.command,
        "seed": args.seed,
        "inputs": {k: {"path": str(v), "sha256": file_hash(v)} for k, v in inputs.items() if v},
    }


def _emit(args, doc: dict, rows: list[dict] | None = None) -> None:
    """Summary on stdout in the requested format."""
    if args.format == "csv" and rows is not None:
        sys.stdout.write(_csv_text(rows))
    else:
        sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _load_params(path) -> TermStructure:
    doc = _read_json(path)
    try:
        return TermStructure.from_dict(doc)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"{path}: not a parameter file ({exc})") from None


def _maturity(args) -> float:
    if (args.days is None) == (args.T is None):
        raise UsageError("give exactly one of --days or --T")
    return args.days / 365.0 if args.days is not None else args.T


# --------------------------------------------------------------------------- commands


def cmd_calibrate(args) -> int:
    cfg = ChainConfig(spot=args.spot, discount=args.discount)
    surface = load_chain(args.chain, cfg)
    ts = fit_term_structure(surface, args.model, seed=args.seed)
    out = _out_dir(args)
    doc = ts.to_dict()
    doc["provenance"] = _provenance(args, {"chain": args.chain})
    _write_json(out / "params.json", doc)
    rows = param_table_rows(ts)
    (out / "fit_report.csv").write_text(_csv_text(rows))
    for fit, days in zip(ts.fits, ts.maturity_days):
        if not fit.converged:
            print(f"warning: {days}d fit did not converge", file=sys.stderr)
    _emit(args, {"params": str(out / "params.json"), "report": str(out / "fit_report.csv"),
                 "converged": all(f.converged for f in ts.fits)}, rows)
    return EXIT_OK


def cmd_density(args) -> int:
    ts = _load_params(args.params)
    T = _maturity(args)
    market = slice_at(ts, T, extrapolate=args.extrapolate)
    dens = market.density(n=args.points, lo=args.lo, hi=args.hi)
    out = _out_dir(args)
    rows = [{"strike": float(k), "pdf": float(p), "cdf": float(c)} for k, p, c in zip(dens.grid, dens.pdf, dens.cdf)]
    summary = {
        "T": T,
        "forward": market.F,
        "model": params_to_dict(market.model),
        "integral": dens.integral(),
        "mean": dens.mean(),
        "grid": [float(dens.grid[0]), float(dens.grid[-1]), int(dens.grid.size)],
        "provenance": _provenance(args, {"params": args.params}),
    }
    (out / "density.csv").write_text(_csv_text(rows, ("strike", "pdf", "cdf")))
    _write_json(out / "density.json", {**summary, "density": rows})
    _emit(args, summary, rows)
    return EXIT_OK


def _delta_from_mc(path, barrier_frac: float) -> float:
    doc = _read_json(path)
    for row in doc.get("barriers", []):
        if math.isclose(row["barrier_level"], barrier_frac, rel_tol=0, abs_tol=1e-9):
            return float(row["delta"])
    levels = [r["barrier_level"] for r in doc.get("barriers", [])]
    raise UsageError(f"{path} has no barrier level {barrier_frac:.6g} (levels {levels})")


def price_product(ts: TermStructure, spec: ProductSpec, delta: float = 0.0, eps: float = 0.0,
                  *, extrapolate: bool = False) -> dict:
    """Library composition behind ``price``: slice, inputs, price, separation check."""
    market = slice_at(ts, spec.T, extrapolate=extrapolate)
    inputs = pricing_inputs(spec, market, delta=delta, eps=eps)
    american = spec.barrier_style is BarrierStyle.AMERICAN
    sigma = atm_vol(market)
    report = price(spec, inputs, sigma if american else None)
    chk = validate_separation(spec, sigma)
    doc = report.to_dict()
    doc["product"] = spec.to_dict()
    doc["model"] = params_to_dict(market.model)
    doc["market"] = {"F": market.F, "D": market.D, "V": market.V, "T": market.T}
    doc["separation"] = {"ok": chk.ok, "lhs": chk.lhs, "rhs": chk.rhs, "message": chk.message}
    return doc


def cmd_price(args) -> int:
    ts = _load_params(args.params)
    spec = ProductSpec.from_dict(_read_json(args.product))
    american = spec.barrier_style is BarrierStyle.AMERICAN
    if args.delta is not None and args.mc is not None:
        raise UsageError("give at most one of --delta and --mc")
    delta = 0.0
    if args.mc is not None:
        delta = _delta_from_mc(args.mc, spec.B / spec.S0)
    elif args.delta is not None:
        delta = args.delta
    if not american and delta:
        raise UsageError("delta only applies to American barriers")
    eps = 0.0
    if args.eps_dynamics is not None:
        if not american:
            raise UsageError("--eps-dynamics only applies to American barriers")
        dyn = DynamicsSpec.from_dict(_read_json(args.eps_dynamics))
        est = epsilon_terms(dyn, RunConfig(n_paths=args.eps_paths, seed=args.seed), spec)
        eps = est["eps"]
    doc = price_product(ts, spec, delta, eps, extrapolate=args.extrapolate)
    doc["delta_source"] = "mc" if args.mc else ("flag" if args.delta is not None else "default")
    doc["provenance"] = _provenance(args, {"params": args.params, "product": args.product, "mc": args.mc,
                                           "eps_dynamics": args.eps_dynamics})
    out = _out_dir(args)
    _write_json(out / "price.json", doc)
    for w in doc["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    rows = [{"term": k, "value": v} for k, v in doc["terms"].items()] + [{"term": "price", "value": doc["price"]}]
    _emit(args, doc, rows)
    return EXIT_OK


def _parse_levels(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"--barriers must be comma-separated numbers, got {text!r}") from None


def cmd_simulate(args) -> int:
    doc = _read_json(args.dynamics)
    if args.steps_per_year is not None:
        doc = {**doc, "steps_per_year": args.steps_per_year}
    if args.scheme is not None:
        doc = {**doc, "scheme": args.scheme}
    dyn = DynamicsSpec.from_dict(doc)
    cfg = RunConfig(
        n_paths=args.paths,
        seed=args.seed,
        barriers=_parse_levels(args.barriers),
        antithetic=args.antithetic,
        brownian_bridge=args.bridge,
        workers=args.workers,
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        result = simulate(dyn, cfg)
    out_doc = result.to_dict()
    for row, st in zip(out_doc["barriers"], result.stats):
        if st.ended_below > 0:
            s = delta_and_bound(st)
            row.update(ci_low=s.ci_low, ci_high=s.ci_high, price_impact_bound=s.price_impact_bound)
    out_doc["provenance"] = _provenance(args, {"dynamics": args.dynamics})
    out = _out_dir(args)
    mc_path = out / args.out
    _write_json(mc_path, out_doc)
    rows = result.table_rows()
    mc_path.with_suffix(".csv").write_text(_csv_text(rows, MC_TABLE_COLUMNS + ("std_err",)))
    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)
    _emit(args, out_doc, rows)
    return EXIT_OK


def cmd_report(args) -> int:
    """Parameter table plus interpolation coefficients; optional delta summary from an MC run."""
    ts = _load_params(args.params)
    out = _out_dir(args)
    rows = param_table_rows(ts)
    doc = {"model": ts.kind, "parameters": rows, "interpolation": ts.coefficients()}
    inputs = {"params": args.params, "mc": args.mc}
    if args.mc:
        mc = _read_json(args.mc)
        doc["delta"] = [
            {k: r.get(k) for k in ("barrier_level", "delta", "std_err", "ci_low", "ci_high", "price_impact_bound")}
            for r in mc.get("barriers", [])
        ]
    doc["provenance"] = _provenance(args, inputs)
    (out / "param_table.csv").write_text(_csv_text(rows))
    _write_json(out / "report.json", doc)
    _emit(args, doc, rows)
    return EXIT_OK


# --------------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for every random choice (default 0)")
    common.add_argument("--out-dir", default=".", help="directory for output files (default: cwd)")
    common.add_argument("--format", choices=("json", "csv"), default="json", help="stdout summary format")

    p = argparse.ArgumentParser(prog="barrierprod", description=__doc__.splitlines()[0], parents=[common])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("calibrate", parents=[common], help="fit a model to every maturity of a chain")
    c.add_argument("--chain", required=True, help="option chain CSV")
    c.add_argument("--model", choices=MODEL_KINDS, default="sln")
    c.add_argument("--spot", type=float, default=None, help="forward for rows that leave it empty")
    c.add_argument("--discount", type=float, default=1.0, help="discount for rows that leave it empty")
    c.set_defaults(func=cmd_calibrate)

    d = sub.add_parser("density", parents=[common], help="terminal density at one maturity")
    d.add_argument("--params", required=True)
    d.add_argument("--days", type=int)
    d.add_argument("--T", type=float, help="maturity in years")
    d.add_argument("--points", type=int, default=2001)
    d.add_argument("--lo", type=float, default=0.05, help="grid start as a fraction of F")
    d.add_argument("--hi", type=float, default=3.0, help="grid end as a fraction of F")
    d.add_argument("--extrapolate", action="store_true")
    d.set_defaults(func=cmd_density)

    pr = sub.add_parser("price", parents=[common], help="price a bonus certificate or reverse convertible")
    pr.add_argument("--params", required=True)
    pr.add_argument("--product", required=True, help="product JSON")
    pr.add_argument("--delta", type=float, help="delta for American barriers")
    pr.add_argument("--mc", help="mc.json to read delta from at the product's barrier level")
    pr.add_argument("--eps-dynamics", help="dynamics JSON: estimate the breach-and-recover term by simulation")
    pr.add_argument("--eps-paths", type=int, default=200_000)
    pr.add_argument("--extrapolate", action="store_true")
    pr.set_defaults(func=cmd_price)

    s = sub.add_parser("simulate", parents=[common], help="barrier-hit statistics and delta")
    s.add_argument("--dynamics", required=True, help="dynamics JSON")
    s.add_argument("--paths", type=int, default=1_000_000)
    s.add_argument("--barriers", default="0.60,0.65,0.70,0.75,0.80,0.90")
    s.add_argument("--out", default="mc.json", help="file name inside --out-dir; the CSV table sits next to it")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--steps-per-year", type=int)
    s.add_argument("--scheme", choices=("log", "euler"))
    s.add_argument("--antithetic", action=argparse.BooleanOptionalAction, default=True)
    s.add_argument("--bridge", action=argparse.BooleanOptionalAction, default=True,
                   help="Brownian-bridge crossing correction between monitoring dates")
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("report", parents=[common], help="parameter table and interpolation coefficients")
    r.add_argument("--params", required=True)
    r.add_argument("--mc", help="optional mc.json for a delta summary")
    r.set_defaults(func=cmd_report)
    return p


def _fail(code: int, exc: BaseException, path=None) -> int:
    doc = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    if path is not None:
        doc["path"] = str(path)
    print(json.dumps(doc), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        return _fail(EXIT_USAGE, exc, exc.filename or str(exc).split(": ", 1)[-1])
    except (OSError, ParseError, ValidationError, ConfigurationError, UsageError) as exc:
        return _fail(EXIT_USAGE, exc)
    except (DomainError, InsufficientDataError, BarrierProdError) as exc:
        return _fail(EXIT_DOMAIN, exc)


if __name__ == "__main__":
    sys.exit(main())
