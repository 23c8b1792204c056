"""Command-line front end: bounds tables, code construction, Monte Carlo runs,
and the oracle verification suite.

Subcommands: bounds | pack | simulate | verify | heterodyne.  Every output
table carries the artifact version, a hash of the effective configuration,
and the seed, so reruns with identical arguments are byte-identical.
Exit codes: 0 success, 1 validation error, 2 oracle/acceptance failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys

import numpy as np

from . import __version__, fockspace, geometry, montecarlo, photonstats, scheme
from .photonstats import ChannelModel, DetectorSpec

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_ORACLE = 2


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _write_table(rows, fieldnames, meta, out, fmt):
    if fmt == "json":
        doc = {
            "meta": meta,
            "rows": [
                {name: (float(_fmt(r[name])) if isinstance(r[name], float) else r[name])
                 for name in fieldnames}
                for r in rows
            ],
        }
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        lines = [f"# bosonid {meta['version']}"]
        lines.append(f"# config_hash={meta['config_hash']}")
        if "seed" in meta:
            lines.append(f"# seed={meta['seed']}")
        lines.append(",".join(fieldnames))
        for r in rows:
            lines.append(",".join(_fmt(r[name]) for name in fieldnames))
        text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _meta(args, config: dict) -> dict:
    meta = {"version": __version__, "config_hash": _config_hash(config)}
    if getattr(args, "seed", None) is not None:
        meta["seed"] = args.seed
    return meta


def _parse_k_list(text: str) -> list[int]:
    ks = [int(tok) for tok in text.split(",") if tok.strip()]
    if not ks or any(k < 1 for k in ks):
        raise ValueError(f"invalid --k list {text!r}")
    return ks


def cmd_bounds(args) -> int:
    ks = _parse_k_list(args.k)
    channel = ChannelModel(args.noise)
    if (args.rho is None) == (args.gamma is None):
        raise ValueError("exactly one of --rho / --gamma is required")
    rows = []
    for k in ks:
        delta_k = args.delta_k if args.delta_k is not None else 1.0 / k
        rho = args.rho if args.rho is not None else math.sqrt(args.gamma * math.log(k))
        log_lower = scheme.achievable_users_log(k, args.energy, rho)
        log_upper = scheme.converse_users_log(k, args.energy, delta_k, channel)
        if channel.n_thermal > 0:
            report = scheme.analytic_error_bounds(k, args.delta, rho, channel)
            l1, l2 = report.lambda1_log, report.lambda2_log
        else:
            # Lambda diverges at N = 0; the second-kind exponent is still defined.
            l1 = math.nan
            l2 = -4 * rho**2 * photonstats.theta_exponent(args.delta, channel)
        rows.append(
            {
                "k": k,
                "E": args.energy,
                "N": args.noise,
                "delta": args.delta,
                "delta_k": delta_k,
                "rho": rho,
                "logM_lower": log_lower,
                "logM_upper": log_upper,
                "lambda1_log": l1,
                "lambda2_log": l2,
            }
        )
    fields = ["k", "E", "N", "delta", "delta_k", "rho", "logM_lower", "logM_upper",
              "lambda1_log", "lambda2_log"]
    config = {key: getattr(args, key) for key in
              ("k", "energy", "noise", "delta", "delta_k", "rho", "gamma", "format")}
    _write_table(rows, fields, _meta(args, config), args.out, args.format)
    return EXIT_OK


def cmd_pack(args) -> int:
    rng = np.random.default_rng(args.seed)
    code = scheme.build_code(args.k, args.energy, args.rho, rng)
    if args.out:
        scheme.save_signature_set(args.out, code)
    print(f"M={len(code)}")
    print(f"min_distance={_fmt(code.min_distance)}")
    print(f"energy_max={_fmt(float(code.energies().max()))}")
    return EXIT_OK


def _load_or_build_code(args) -> scheme.SignatureSet:
    if args.code:
        return scheme.load_signature_set(args.code)
    if args.rho is None:
        raise ValueError("--rho is required when no --code file is given")
    rng = np.random.default_rng(args.seed)
    return scheme.build_code(args.k, args.energy, args.rho, rng)


def cmd_simulate(args) -> int:
    channel = ChannelModel(args.noise)
    code = _load_or_build_code(args)
    detector = DetectorSpec.make(args.delta, code.k, channel)
    est1 = montecarlo.estimate_lambda1(code, channel, detector, args.trials, args.seed)
    est2 = montecarlo.estimate_lambda2(
        code, channel, detector, args.trials, args.seed, pair_strategy=args.pair_strategy
    )
    exact1 = montecarlo.exact_lambda1(channel, detector)
    delta_vec = montecarlo.worst_pair_delta(code)
    exact2 = montecarlo.exact_lambda2(delta_vec, channel, detector)
    theta = photonstats.theta_exponent(args.delta, channel)
    bound2_log = -code.min_distance**2 * theta
    if channel.n_thermal > 0:
        bound1_log = -code.k * photonstats.lambda_exponent(args.delta, channel)
    else:
        bound1_log = math.nan
    rows = []
    for name, est, exact, bound_log in (
        ("lambda1", est1, exact1, bound1_log),
        ("lambda2", est2, exact2, bound2_log),
    ):
        low, high = montecarlo.wilson_interval(est.successes, est.trials)
        rows.append(
            {
                "quantity": name,
                "point": est.point,
                "stderr": est.stderr,
                "wilson_low": low,
                "wilson_high": high,
                "exact": exact,
                "bound_log": bound_log,
                "trials": est.trials,
            }
        )
    fields = ["quantity", "point", "stderr", "wilson_low", "wilson_high",
              "exact", "bound_log", "trials"]
    config = {key: getattr(args, key) for key in
              ("k", "energy", "noise", "delta", "rho", "trials", "pair_strategy",
               "code", "format")}
    _write_table(rows, fields, _meta(args, config), args.out, args.format)
    return EXIT_OK


def cmd_heterodyne(args) -> int:
    rng = np.random.default_rng(args.seed)
    if args.code:
        code = scheme.load_signature_set(args.code)
    else:
        code = scheme.build_code(args.k, args.energy, args.rho, rng)
    sigma2 = args.noise + 1  # shot noise plus thermal extension
    tau = args.tau if args.tau is not None else code.k * sigma2 * (1 + args.delta)
    spec = montecarlo.HeterodyneSpec(noise_variance=sigma2, threshold=tau)
    sim = montecarlo.heterodyne_simulate(code, spec, args.trials, args.seed)
    ana = montecarlo.heterodyne_analytic(code.k, spec, code.min_distance)
    rows = []
    for name, est, exact in (
        ("lambda1", sim["lambda1"], ana["lambda1"]),
        ("lambda2", sim["lambda2_worst"], ana["lambda2"]),
    ):
        low, high = montecarlo.wilson_interval(est.successes, est.trials)
        rows.append(
            {
                "quantity": name,
                "point": est.point,
                "stderr": est.stderr,
                "wilson_low": low,
                "wilson_high": high,
                "analytic": exact,
                "trials": est.trials,
            }
        )
    fields = ["quantity", "point", "stderr", "wilson_low", "wilson_high",
              "analytic", "trials"]
    config = {key: getattr(args, key) for key in
              ("k", "energy", "noise", "delta", "rho", "tau", "trials", "code", "format")}
    _write_table(rows, fields, _meta(args, config), args.out, args.format)
    return EXIT_OK


def _verify_checks():
    """(name, max_deviation, tolerance) triples for the oracle suite."""
    checks = []

    # Chernoff optimization reproduces the closed-form upper-tail exponent.
    dev = 0.0
    for d in (0.1, 0.5, 1.0, 2.0):
        for n in (0.2, 0.5, 1.0, 2.0):
            ch = ChannelModel(n)
            dev = max(dev, abs(photonstats.chernoff_upper_exponent(d, ch)
                               - photonstats.lambda_exponent(d, ch)))
    checks.append(("chernoff_equals_lambda", dev, 1e-9))

    # pmf matches the Fock-space diagonal.
    dev = 0.0
    for alpha, n in ((1.0, 0.5), (0.7 + 0.4j, 1.0), (1.4j, 0.3)):
        ch = ChannelModel(n)
        rho = fockspace.displaced_thermal_density(alpha, ch, 60)
        diag = np.diag(rho.entries).real
        pmf = photonstats.photon_pmf_array(20, abs(alpha) ** 2, ch)
        dev = max(dev, float(np.max(np.abs(diag[:21] - pmf))))
    checks.append(("pmf_matches_fock_diagonal", dev, 1e-9))

    # Closed-form coherent overlap matches <beta| S_N(alpha) |beta>.
    dev = 0.0
    for alpha, beta, n in ((0.5, 1.5, 1.0), (1.0 + 0.5j, -0.2 + 0.1j, 0.5)):
        ch = ChannelModel(n)
        rho = fockspace.displaced_thermal_density(alpha, ch, 60)
        vec = fockspace.coherent_state_vector(beta, 60)
        numeric = float((vec.conj() @ rho.entries @ vec).real)
        exact = fockspace.overlap_closed_form([alpha], [beta], ch).exact
        dev = max(dev, abs(numeric - exact))
    checks.append(("overlap_closed_form", dev, 1e-8))

    # Uhlmann fidelity matches exp(-d^2 / (2N+1)).
    dev = 0.0
    for alpha, beta, n in ((0.0, 1.0, 0.5), (0.5, -0.8 + 0.6j, 1.0)):
        ch = ChannelModel(n)
        num = fockspace.fidelity_numeric(
            fockspace.displaced_thermal_density(alpha, ch, 60),
            fockspace.displaced_thermal_density(beta, ch, 60),
        )
        dev = max(dev, abs(num - fockspace.fidelity_displaced_thermal([alpha], [beta], ch)))
    checks.append(("fidelity_closed_form", dev, 1e-4))

    # Fuchs-van de Graaf chain: (1 - sqrt(F))^2 <= T^2 <= 1 - F.
    dev = 0.0
    for alpha, beta, n in ((0.0, 1.2, 1.0), (0.5j, -0.5, 0.3)):
        ch = ChannelModel(n)
        r1 = fockspace.displaced_thermal_density(alpha, ch, 60)
        r2 = fockspace.displaced_thermal_density(beta, ch, 60)
        f = fockspace.fidelity_numeric(r1, r2)
        t = fockspace.trace_distance_numeric(r1, r2)
        dev = max(dev, (1 - math.sqrt(f)) ** 2 - t**2, t**2 - (1 - f))
    checks.append(("fuchs_van_de_graaf_chain", dev, 1e-6))

    return checks


def cmd_verify(args) -> int:
    failures = 0
    for name, dev, tol in _verify_checks():
        ok = dev <= tol
        failures += 0 if ok else 1
        print(f"{'PASS' if ok else 'FAIL'} {name} max_dev={dev:.3e} tol={tol:.0e}")
    return EXIT_OK if failures == 0 else EXIT_ORACLE


def _add_shared(parser, *, trials=False, rho_group=False, tau=False, code=False):
    parser.add_argument("--k", type=str, default="4",
                        help="block length, or comma-separated list for sweeps")
    parser.add_argument("--energy", "-E", type=float, default=4.0,
                        help="per-mode energy budget E")
    parser.add_argument("--noise", "-N", type=float, default=1.0,
                        help="mean thermal photon number N")
    parser.add_argument("--delta", type=float, default=1.0,
                        help="detector threshold slack")
    parser.add_argument("--seed", type=int, default=1234)
    parser.add_argument("--out", type=str, default=None, help="output file path")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    if rho_group:
        parser.add_argument("--rho", type=float, default=None, help="separation radius")
        parser.add_argument("--gamma", type=float, default=None,
                            help="use rho^2 = gamma ln k instead of --rho")
    if trials:
        parser.add_argument("--trials", type=int, default=100_000)
    if tau:
        parser.add_argument("--tau", type=float, default=None,
                            help="heterodyne acceptance radius squared "
                                 "(default k sigma^2 (1 + delta))")
    if code:
        parser.add_argument("--code", type=str, default=None,
                            help="load a serialized signature set instead of building one")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bosonid",
        description="Deterministic multi-user identification over noisy bosonic "
                    "channels: bounds, codes, and Monte Carlo verification.",
    )
    parser.add_argument("--version", action="version", version=f"bosonid {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="tabulate achievability/converse bounds")
    _add_shared(p, rho_group=True)
    p.add_argument("--delta-k", type=float, default=None, dest="delta_k",
                   help="converse error level (default 1/k; must be < 1/4)")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("pack", help="build and serialize a signature set")
    _add_shared(p, rho_group=True)
    p.set_defaults(func=cmd_pack)

    p = sub.add_parser("simulate", help="Monte Carlo detector error estimates")
    _add_shared(p, trials=True, rho_group=True, code=True)
    p.add_argument("--pair-strategy", choices=("worst_pair", "all_pairs_sampled"),
                   default="worst_pair", dest="pair_strategy")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("heterodyne", help="heterodyne ball-test baseline")
    _add_shared(p, trials=True, rho_group=True, tau=True, code=True)
    p.set_defaults(func=cmd_heterodyne)

    p = sub.add_parser("verify", help="run the exact-oracle verification suite")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "k") and args.func in (cmd_pack, cmd_simulate, cmd_heterodyne):
        try:
            ks = _parse_k_list(args.k)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
        if len(ks) != 1:
            print("error: this command takes a single --k value", file=sys.stderr)
            return EXIT_VALIDATION
        args.k = ks[0]
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    raise SystemExit(main())
