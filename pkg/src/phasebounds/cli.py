"""Command-line front end.

Subcommands ``asymmetry``, ``bounds``, ``simulate`` and ``scan``. Specs for
states and generators use ``kind:arg1,arg2`` on the command line or
``@path.json`` for a JSON object ``{"kind": ..., ...}``.

Exit codes: 0 success, 2 bad flags or spec, 3 dimension mismatch,
4 unknown preset, 5 too few trials for the requested MI bins.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__, spectra, states
from .asymmetry import g_asymmetry, generator_entropy, generator_variance, vn_entropy
from .bounds import SCHEME_BOUNDS, UNIFORM, bound_report, scheme_bound, wrapped_gaussian
from .errors import (
    DimensionMismatch,
    InsufficientSamples,
    PhaseBoundsError,
    SpecParseError,
    UnknownPreset,
)
from .estimator import FITS, POLICIES, canonical_sample, scaling_scan, simulate
from .schemes import PRESETS, preset
from .spectra import summarize

SCHEMA_VERSION = 1
SIG_DIGITS = 9
LN2 = math.log(2.0)

EXIT_OK, EXIT_USAGE, EXIT_DIM, EXIT_PRESET, EXIT_SAMPLES = 0, 2, 3, 4, 5

CSV_HELP = "per-trial CSV columns: trial, phi, phi_hat, wrapped_error, n_outcomes (radians)"


# ---------------------------------------------------------------- spec parsing


def _load_spec(text: str | dict, what: str) -> dict:
    """Turn ``kind:a,b`` or ``@file.json`` (or an already parsed dict) into a dict."""
    if isinstance(text, dict):
        spec = dict(text)
    elif text.startswith("@"):
        try:
            with open(text[1:]) as fh:
                spec = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise SpecParseError(f"cannot read {what} spec {text!r}: {exc}", key=text) from exc
    else:
        kind, _, rest = text.partition(":")
        spec = {"kind": kind.strip(), "args": [a.strip() for a in rest.split(",")] if rest else []}
    if not isinstance(spec, dict) or "kind" not in spec:
        raise SpecParseError(f"{what} spec needs a 'kind'", key="kind")
    return spec


def _arg(spec: dict, index: int, name: str, conv=int, default=None):
    """Positional ``args[index]`` or named ``spec[name]``."""
    args = spec.get("args", [])
    if name in spec:
        raw = spec[name]
    elif index < len(args):
        raw = args[index]
    elif default is not None:
        return default
    else:
        raise SpecParseError(f"{spec['kind']} spec is missing {name!r}", key=name)
    try:
        return conv(raw)
    except (TypeError, ValueError) as exc:
        raise SpecParseError(f"bad value {raw!r} for {name!r}", key=name) from exc


def parse_generator(text: str | dict) -> spectra.SpectralGenerator:
    spec = _load_spec(text, "generator")
    kind = spec["kind"]
    if kind == "jz":
        return spectra.jz(_arg(spec, 0, "n"))
    if kind == "jz_pow":
        return spectra.jz_pow(_arg(spec, 0, "n"), _arg(spec, 1, "q"))
    if kind == "n_jz":
        return spectra.n_jz(_arg(spec, 0, "n"))
    if kind == "roy_h":
        return spectra.roy_h(_arg(spec, 0, "n"))
    if kind == "roy_a":
        return spectra.roy_a(_arg(spec, 0, "n"))
    if kind == "multipass":
        return spectra.multipass(_arg(spec, 0, "K"))
    if kind == "qubit":
        return spectra.qubit(_arg(spec, 0, "gap", float), _arg(spec, 1, "low", float, 0.0))
    if kind == "number_fn":
        cutoff = _arg(spec, 0, "cutoff")
        if "values" in spec:
            return spectra.number_function(cutoff, [float(v) for v in spec["values"]])
        f = _arg(spec, 1, "f", str, "identity")
        if f not in spectra.NUMBER_FUNCTIONS:
            raise SpecParseError(f"unknown number function {f!r}", key="f")
        return spectra.number_function(cutoff, f)
    if kind == "sum":
        parts = spec.get("parts")
        if not parts:
            raise SpecParseError("sum spec needs a nonempty 'parts' list", key="parts")
        return spectra.composite_sum([parse_generator(p) for p in parts])
    raise SpecParseError(f"unknown generator kind {kind!r}", key="kind")


def parse_state(text: str | dict, generator: spectra.SpectralGenerator | None = None):
    """Parse a state spec; ``minmax`` without its own generator uses ``generator``."""
    spec = _load_spec(text, "state")
    kind = spec["kind"]
    if kind == "ghz":
        return states.ghz(_arg(spec, 0, "n"))
    if kind == "plus_product":
        return states.plus_product(_arg(spec, 0, "K"))
    if kind == "coherent":
        return states.coherent_number_state(_arg(spec, 0, "mean", float))
    if kind == "basis":
        return states.basis_state(_arg(spec, 0, "dim"), _arg(spec, 1, "index"))
    if kind == "maxmixed":
        return states.maximally_mixed(_arg(spec, 0, "dim"))
    if kind == "minmax":
        if "generator" in spec:
            generator = parse_generator(spec["generator"])
        if generator is None:
            raise SpecParseError("minmax state needs a generator", key="generator")
        return states.minmax_superposition(generator)
    if kind == "tensor":
        parts = spec.get("states")
        if not parts:
            raise SpecParseError("tensor spec needs a nonempty 'states' list", key="states")
        return states.tensor([parse_state(p, generator) for p in parts])
    if kind == "mixture":
        parts, weights = spec.get("states"), spec.get("weights")
        if not parts:
            raise SpecParseError("mixture spec needs a nonempty 'states' list", key="states")
        if weights is None or len(weights) != len(parts):
            raise SpecParseError("mixture needs one weight per state", key="weights")
        return states.mix(weights, [parse_state(p, generator) for p in parts])
    raise SpecParseError(f"unknown state kind {kind!r}", key="kind")


def parse_prior(text: str):
    if text == "uniform":
        return UNIFORM
    kind, _, rest = text.partition(":")
    if kind in ("gauss", "gaussian"):
        try:
            sigma = float(rest)
        except ValueError as exc:
            raise SpecParseError(f"bad prior width {rest!r}", key="prior") from exc
        return wrapped_gaussian(sigma)
    raise SpecParseError(f"unknown prior {text!r}", key="prior")


def parse_range(text: str) -> list[int]:
    a, sep, b = text.partition("..")
    try:
        lo, hi = int(a), int(b)
    except ValueError as exc:
        raise SpecParseError(f"K range must look like a..b, got {text!r}", key="K-range") from exc
    if not sep or hi < lo:
        raise SpecParseError(f"K range must look like a..b with a <= b, got {text!r}", key="K-range")
    return list(range(lo, hi + 1))


# ---------------------------------------------------------------- output


def _round(x):
    """Round floats to 9 significant digits, recursing through containers."""
    if isinstance(x, dict):
        return {str(k): _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    if isinstance(x, np.ndarray):
        return _round(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if not math.isfinite(x) else float(f"{x:.{SIG_DIGITS}g}")
    return x


def dumps(doc: dict) -> str:
    return json.dumps(_round(doc), indent=2)


def _entropy_scale(args) -> float:
    return 1.0 / LN2 if getattr(args, "bits", False) else 1.0


def _envelope(command: str, args, result: dict) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("func",)}
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "version": __version__,
        "units": {"entropy": "bits" if args.bits else "nats", "angle": "rad"},
        "config": cfg,
        "result": result,
    }


def _emit(args, command: str, result: dict, text_lines: list[str] | None = None) -> None:
    if getattr(args, "out", "json") == "text" and text_lines is not None:
        print("\n".join(text_lines))
    else:
        print(dumps(_envelope(command, args, result)))


# ---------------------------------------------------------------- commands


def cmd_asymmetry(args) -> int:
    g = parse_generator(args.generator)
    rho = parse_state(args.state, g)
    if rho.dim != g.dim:
        raise DimensionMismatch(f"state dimension {rho.dim} does not match generator dimension {g.dim}")
    k = _entropy_scale(args)
    summary = summarize(g)
    result = {
        "asymmetry": g_asymmetry(rho, g) * k,
        "generator_entropy": generator_entropy(rho, g) * k,
        "state_entropy": vn_entropy(rho) * k,
        "generator_rms": generator_variance(rho, g),
        "distinct_eigenvalues": summary.distinct_count,
        "dim": g.dim,
        "generator": g.description,
        "state": rho.label,
    }
    unit = "bits" if args.bits else "nats"
    lines = [
        f"A_G        = {result['asymmetry']:.6f} {unit}",
        f"H(G|rho)   = {result['generator_entropy']:.6f} {unit}",
        f"S(rho)     = {result['state_entropy']:.6f} {unit}",
        f"dG         = {result['generator_rms']:.6f}",
        f"distinct   = {result['distinct_eigenvalues']}",
    ]
    _emit(args, "asymmetry", result, lines)
    return EXIT_OK


def _scale_entropies(d: dict, keys, k: float) -> dict:
    for key in keys:
        if d.get(key) is not None:
            d[key] = d[key] * k
    return d


def cmd_bounds(args) -> int:
    prior = parse_prior(args.prior)
    k = _entropy_scale(args)
    result = {"prior": prior.describe()}
    lines = []
    if args.preset is None and args.state is None:
        raise SpecParseError("bounds needs --preset or --state/--generator", key="preset")
    if args.preset is not None:
        if args.preset not in SCHEME_BOUNDS:
            raise UnknownPreset(f"unknown preset {args.preset!r}; expected one of {', '.join(SCHEME_BOUNDS)}")
        sb = scheme_bound(
            args.preset, prior, K=args.K, M=args.M, q=args.q, n=args.n, modes=args.modes, mean_photons=args.meanN
        )
        d = sb.to_dict()
        _scale_entropies(d, ("asymmetry_cap", "exact_asymmetry"), k)
        _scale_entropies(d["extra"], ("mi_cap", "mi_cap_tight"), k)
        result["scheme"] = d
        lines.append(f"{args.preset}: error_lower = {sb.value:.9g} rad  [{sb.formula}]")
        lines.append(f"asymmetry cap = {d['asymmetry_cap']:.9g}, cap bound = {sb.cap_bound:.9g}")
    if args.state is not None:
        if args.generator is None:
            raise SpecParseError("--state needs --generator", key="generator")
        g = parse_generator(args.generator)
        rho = parse_state(args.state, g)
        if rho.dim != g.dim:
            raise DimensionMismatch(f"state dimension {rho.dim} does not match generator dimension {g.dim}")
        rep = bound_report(rho, g, prior).to_dict()
        for key in ("mi_upper_asymmetry", "mi_upper_entropy", "prior_entropy"):
            rep[key]["value"] *= k
        result["state"] = rep
        lines.append(f"state: error_lower = {rep['error_lower']['value']:.9g} rad, "
                     f"local_precision_lower = {rep['local_precision_lower']['value']:.9g} rad")
    _emit(args, "bounds", result, lines)
    return EXIT_OK


def _report_dict(rep, k: float) -> dict:
    d = rep.to_dict()
    _scale_entropies(d, ("mutual_information", "mutual_information_se"), k)
    _scale_entropies(d["bounds"], ("composite_asymmetry", "cap_asymmetry"), k)
    return d


def cmd_simulate(args) -> int:
    prior = parse_prior(args.prior)
    if args.preset not in PRESETS:
        raise UnknownPreset(f"unknown preset {args.preset!r}; expected one of {', '.join(PRESETS)}")
    mi_bins = "auto" if args.mi_bins is None else (None if args.mi_bins == 0 else args.mi_bins)
    if args.canonical:
        if args.preset != "linear_multipass" or args.M != 1:
            raise SpecParseError("--canonical applies to linear_multipass with M=1", key="canonical")
        rep = canonical_sample(args.K, prior, args.trials, args.seed, mi_bins=mi_bins)
    else:
        spec = preset(args.preset, K=args.K, M=args.M, q=args.q)
        if args.smallest_gap_first:
            spec = type(spec)(spec.components, spec.preset, False, spec.K, spec.M, spec.q, spec.notes)
        rep = simulate(
            spec, prior, args.trials, args.seed, policy=args.policy, grid=args.grid,
            estimate=args.estimate, mi_bins=mi_bins, threads=args.threads,
        )
    if args.csv:
        rep.records.to_csv(args.csv)
    d = _report_dict(rep, _entropy_scale(args))
    lines = [
        f"epsilon   = {rep.epsilon:.6g} +- {rep.epsilon_se:.2g} rad",
        f"V_H       = {rep.holevo_variance:.6g}",
        f"bound     = {rep.bounds.get('scheme_bound', rep.bounds['error_lower']):.6g} rad",
    ]
    _emit(args, "simulate", d, lines)
    return EXIT_OK


def cmd_scan(args) -> int:
    prior = parse_prior(args.prior)
    if args.preset not in PRESETS:
        raise UnknownPreset(f"unknown preset {args.preset!r}; expected one of {', '.join(PRESETS)}")
    ks = parse_range(args.K_range)
    rep = scaling_scan(
        args.preset, ks, M=args.M, trials=args.trials, seed=args.seed, fit=args.fit, q=args.q,
        prior=prior, policy=args.policy, canonical=args.canonical, threads=args.threads,
    )
    d = rep.to_dict()
    d["fit"] = {"kind": d.pop("fit_kind"), "slope": d.pop("slope"), "intercept": d.pop("intercept"),
                "residuals": d.pop("residuals"), "r_squared": d.pop("r_squared")}
    lines = [f"{'K':>3} {'n':>6} {'epsilon':>12} {'se':>10} {'bound':>12}"]
    for r in rep.rows:
        bound = f"{r['bound']:12.4e}" if r["bound"] is not None else f"{'-':>12}"
        lines.append(f"{r['K']:>3} {r['n']:>6} {r['epsilon']:12.4e} {r['epsilon_se']:10.2e} {bound}")
    lines.append(f"fit {rep.fit_kind}: slope {rep.slope:.4f}, intercept {rep.intercept:.4f}, R^2 {rep.r_squared:.4f}")
    _emit(args, "scan", d, lines)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phasebounds", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--bits", action="store_true", help="report entropies in bits instead of nats")

    p = sub.add_parser("asymmetry", parents=[common], help="G-asymmetry and generator statistics of a state")
    p.add_argument("--state", required=True, help="ghz:n, plus_product:K, coherent:mean, basis:dim,i, maxmixed:dim, minmax, or @file.json")
    p.add_argument("--generator", required=True, help="jz:n, jz_pow:n,q, n_jz:n, roy_h:n, roy_a:n, multipass:K, qubit:gap, number_fn:cutoff,f, or @file.json")
    p.add_argument("--out", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_asymmetry)

    p = sub.add_parser("bounds", parents=[common], help="closed-form error bounds")
    p.add_argument("--preset", help=", ".join(SCHEME_BOUNDS))
    p.add_argument("--K", type=_positive_int)
    p.add_argument("--M", type=_positive_int, default=1)
    p.add_argument("--q", type=_positive_int)
    p.add_argument("--n", type=_positive_int, help="qubit count for qubit_universal")
    p.add_argument("--modes", type=_positive_int, help="mode count for optical_universal")
    p.add_argument("--meanN", type=float, help="mean photon number for optical_universal")
    p.add_argument("--state", help="state spec; reports the state's bounds (needs --generator)")
    p.add_argument("--generator")
    p.add_argument("--prior", default="uniform", help="uniform or gauss:<sigma>")
    p.add_argument("--out", choices=("json", "text"), default="json")
    p.set_defaults(func=cmd_bounds)

    threads_default = os.cpu_count() or 1
    sim = argparse.ArgumentParser(add_help=False, parents=[common])
    sim.add_argument("--preset", required=True, help=", ".join(PRESETS))
    sim.add_argument("--M", type=_positive_int, default=1)
    sim.add_argument("--q", type=_positive_int)
    sim.add_argument("--trials", type=_positive_int, default=1000)
    sim.add_argument("--seed", type=_u64, default=0)
    sim.add_argument("--policy", choices=POLICIES, default="adaptive")
    sim.add_argument("--prior", default="uniform", help="uniform or gauss:<sigma>")
    sim.add_argument("--canonical", action="store_true", help="exact canonical measurement (linear_multipass, M=1)")
    sim.add_argument("--threads", type=_positive_int, default=threads_default,
                     help="worker threads (output does not depend on this)")
    sim.add_argument("--out", choices=("json", "text"), default="json")

    p = sub.add_parser("simulate", parents=[sim], help="Monte Carlo run of one scheme", epilog=CSV_HELP)
    p.add_argument("--K", type=_positive_int, default=1)
    p.add_argument("--grid", type=_positive_int, help="posterior grid size (power of two >= 1024)")
    p.add_argument("--estimate", choices=("mean", "map"), default="mean")
    p.add_argument("--mi-bins", type=int, help="histogram bins for mutual information (0 disables)")
    p.add_argument("--smallest-gap-first", action="store_true")
    p.add_argument("--csv", help="write per-trial records to this path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("scan", parents=[sim], help="scaling scan over K with a fitted law")
    p.add_argument("--K-range", required=True, help="a..b (inclusive)")
    p.add_argument("--fit", choices=FITS, default="power")
    p.set_defaults(func=cmd_scan)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except SpecParseError as exc:
        print(f"error: {exc} (key: {exc.key})", file=sys.stderr)
        return EXIT_USAGE
    except DimensionMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIM
    except UnknownPreset as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRESET
    except InsufficientSamples as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SAMPLES
    except PhaseBoundsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
