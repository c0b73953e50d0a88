"""Command-line surface: moments, cdf, test1, test2, power, roc.

Every command prints one JSON envelope to stdout (command echo, version,
seed, result); timing goes to stderr so identical invocations produce
byte-identical stdout.  Exit codes: 0 success, 2 usage or parse errors,
3 internal invariant violations.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np
from gmpy2 import mpq

from . import __version__
from .moments import (
    StatisticSpec,
    WeightVector,
    continuous_moments,
    discrete_moments,
)
from .power import (
    AlternativeSpec,
    ArrivalDist,
    TestConfig,
    estimate_power,
    normal_sampler,
    one_sample_roc_study,
    roc_curve,
    two_sample_power_study,
    uniform_sampler,
)
from .reconstruct import InvalidMomentsError, reconstruct_cdf
from .stattest import NullCdfSpec, one_sample_test, two_sample_test


class CliError(Exception):
    """Usage or input error; reported on stderr with exit code 2."""


def _fmt(q: mpq) -> str:
    return str(q)


def _parse_weights(text: str) -> WeightVector:
    try:
        return WeightVector.of(w.strip() for w in text.split(","))
    except Exception as exc:
        raise CliError(f"bad --weights {text!r}: {exc}") from None


def _read_samples(path: str) -> np.ndarray:
    values = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                for token in line.split():
                    try:
                        values.append(float(token))
                    except ValueError:
                        raise CliError(
                            f"{path}:{lineno}: cannot parse {token!r} as a decimal"
                        ) from None
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from None
    return np.array(values, dtype=float)


def _spec_from_args(args) -> StatisticSpec:
    weights = _parse_weights(args.weights)
    try:
        if args.mode == "discrete":
            if args.n is None:
                raise CliError("discrete mode requires --n")
            return StatisticSpec.discrete(args.n, args.k, args.p, weights)
        return StatisticSpec.continuous(args.k, args.p, weights)
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _moment_sequence(args):
    spec = _spec_from_args(args)
    try:
        if spec.mode == "discrete":
            return discrete_moments(spec, args.num_moments)
        return continuous_moments(spec, args.num_moments)
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _emit(args, result: dict, seed=None) -> None:
    envelope = {
        "command": [args.command, *args.echo],
        "version": __version__,
        "seed": seed,
        "result": result,
    }
    sys.stdout.write(json.dumps(envelope, indent=2, sort_keys=True) + "\n")


def _parse_alt(text: str) -> AlternativeSpec | None:
    if text in ("none", "null"):
        return None
    name, _, arg = text.partition(":")
    try:
        if name == "scale":
            return AlternativeSpec.scale(float(arg))
        if name in ("loc", "location"):
            return AlternativeSpec.location(float(arg))
        if name in ("locscale", "location-scale"):
            mu, sigma = (float(v) for v in arg.split(","))
            return AlternativeSpec.location_scale(mu, sigma)
        if name == "erlang":
            return AlternativeSpec.arrivals(ArrivalDist.erlang(int(arg)))
        if name == "hyperexp":
            probs_text, rates_text = arg.split(";")
            probs = [float(v) for v in probs_text.split(",")]
            rates = [float(v) for v in rates_text.split(",")]
            return AlternativeSpec.arrivals(ArrivalDist.hyperexp(probs, rates))
        if name == "spiked":
            shape, pp, r1, r2 = arg.split(",")
            minus = ArrivalDist.erlang(int(shape))
            plus = ArrivalDist.hyperexp([float(pp), 1.0 - float(pp)], [float(r1), float(r2)])
            return AlternativeSpec.spiked(minus, plus)
    except (ValueError, TypeError) as exc:
        raise CliError(f"bad --alt {text!r}: {exc}") from None
    raise CliError(f"unknown alternative family {name!r}")


def cmd_moments(args) -> None:
    ms = _moment_sequence(args)
    raws = [ms.raw(m) for m in range(len(ms))]
    if args.format == "csv":
        sys.stdout.write("m,raw,normalized,decimal\n")
        for m in range(len(ms)):
            sys.stdout.write(f"{m},{_fmt(raws[m])},{_fmt(ms[m])},{float(ms[m])!r}\n")
        return
    result = {
        "scale": _fmt(ms.scale),
        "raw": [_fmt(r) for r in raws],
        "normalized": [_fmt(v) for v in ms.values],
        "decimal": [float(v) for v in ms.values],
    }
    _emit(args, result)


def cmd_cdf(args) -> None:
    if (args.at is None) == (args.quantile is None):
        raise CliError("pass exactly one of --at or --quantile")
    args.num_moments = args.M
    ms = _moment_sequence(args)
    try:
        est = reconstruct_cdf(ms, args.M)
    except InvalidMomentsError:
        raise
    result = {"M": est.M, "error_bound": est.error_bound, "kind": est.kind}
    if args.at is not None:
        result["at"] = args.at
        result["cdf"] = est.cdf(args.at)
    else:
        if not 0 < args.quantile < 1:
            raise CliError("--quantile must lie strictly between 0 and 1")
        result["q"] = args.quantile
        result["side"] = args.side
        result["quantile"] = est.quantile(args.quantile, args.side)
    _emit(args, result)


def cmd_test2(args) -> None:
    x = _read_samples(args.x)
    y = _read_samples(args.y)
    if x.size == 0:
        raise CliError(f"{args.x}: first sample is empty")
    weights = _parse_weights(args.weights) if args.weights else None
    try:
        res = two_sample_test(
            x, y, args.p, weights, side=args.side, method=args.method,
            M=args.M, alpha=args.alpha, seed=args.seed,
        )
    except ValueError as exc:
        raise CliError(str(exc)) from None
    _emit(args, res.to_dict(), seed=args.seed)


def cmd_test1(args) -> None:
    z = _read_samples(args.sample)
    if z.size == 0:
        raise CliError(f"{args.sample}: sample is empty")
    try:
        null_cdf = NullCdfSpec.parse(args.null)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    weights = _parse_weights(args.weights) if args.weights else None
    try:
        res = one_sample_test(
            z, null_cdf, args.p, weights, side=args.side, M=args.M, alpha=args.alpha
        )
    except ValueError as exc:
        raise CliError(str(exc)) from None
    _emit(args, res.to_dict())


def _study_weights(args, k: int):
    return _parse_weights(args.weights) if args.weights else WeightVector.uniform(k)


def cmd_power(args) -> None:
    alt = _parse_alt(args.alt)
    baselines = [b for b in args.baselines.split(",") if b] if args.baselines else []
    if args.kind == "two-sample":
        study = two_sample_power_study(
            args.p, _study_weights(args, args.k), args.k, args.n, alt,
            args.replicates, alpha=args.alpha, seed=args.seed,
            baselines=baselines, method=args.method, M=args.M,
        )
        result = {
            "kind": args.kind,
            "alpha": study["alpha"],
            "replicates": study["replicates"],
            "powers": study["powers"],
        }
    else:
        if alt is None:
            cfg = TestConfig("one-sample", args.p, _study_weights(args, args.k), method=args.method, M=args.M)
            est = estimate_power(cfg, uniform_sampler(), None, args.k, 0,
                                 args.replicates, alpha=args.alpha, seed=args.seed)
            result = {
                "kind": args.kind,
                "alpha": est.alpha,
                "replicates": est.replicates,
                "powers": {"spacing": est.power},
            }
        else:
            study = one_sample_roc_study(
                args.p, _study_weights(args, args.k), args.k, alt,
                args.replicates, [args.alpha], seed=args.seed,
                baselines=baselines or ("chi2",), M=args.M,
            )
            result = {
                "kind": args.kind,
                "alpha": args.alpha,
                "replicates": study["replicates"],
                "powers": {name: curve[0][1] for name, curve in study["curves"].items()},
            }
    _emit(args, result, seed=args.seed)


def cmd_roc(args) -> None:
    alt = _parse_alt(args.alt)
    alphas = [float(a) for a in args.alphas.split(",")]
    if args.kind == "two-sample":
        cfg = TestConfig("two-sample", args.p, _study_weights(args, args.k),
                         method=args.method, M=args.M)
        rows = roc_curve(cfg, normal_sampler(), alt, args.replicates, alphas,
                         args.k, args.n, seed=args.seed)
        curves = {"spacing": [(a, pw) for a, pw, _ in rows]}
    else:
        if alt is None:
            raise CliError("one-sample roc requires --alt")
        baselines = [b for b in args.baselines.split(",") if b] if args.baselines else ["chi2"]
        study = one_sample_roc_study(
            args.p, _study_weights(args, args.k), args.k, alt,
            args.replicates, alphas, seed=args.seed, baselines=baselines, M=args.M,
        )
        curves = study["curves"]
    if args.format == "csv":
        sys.stdout.write("test,alpha,power,se\n")
        for name, rows in sorted(curves.items()):
            for a, pw in rows:
                se = (pw * (1 - pw) / args.replicates) ** 0.5
                sys.stdout.write(f"{name},{a!r},{pw!r},{se!r}\n")
        return
    _emit(args, {"kind": args.kind, "replicates": args.replicates,
                 "curves": {k: [[a, p] for a, p in v] for k, v in curves.items()}},
          seed=args.seed)


def _add_spec_flags(sub, need_mode=True) -> None:
    if need_mode:
        sub.add_argument("--mode", choices=["discrete", "continuous"], required=True)
        sub.add_argument("--n", type=int, default=None)
    sub.add_argument("--k", type=int, required=True)
    sub.add_argument("--p", type=int, default=2)
    sub.add_argument(
        "--weights", required=True,
        help="comma-separated exact weights; fractions and decimals are parsed exactly, e.g. 1,1/2,0.3",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spacings",
        description="Exact moments, reconstructed CDFs, and spacing-statistic tests.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    m = subs.add_parser("moments", help="exact moment listing")
    _add_spec_flags(m)
    m.add_argument("--num-moments", type=int, required=True)
    m.add_argument("--format", choices=["json", "csv"], default="json")
    m.set_defaults(func=cmd_moments)

    c = subs.add_parser("cdf", help="reconstructed CDF value or quantile")
    _add_spec_flags(c)
    c.add_argument("--M", type=int, required=True, help="moment count for reconstruction")
    c.add_argument("--at", type=float, default=None)
    c.add_argument("--quantile", type=float, default=None)
    c.add_argument("--side", choices=["lower", "upper"], default="lower")
    c.set_defaults(func=cmd_cdf)

    t2 = subs.add_parser("test2", help="two-sample spacing test")
    t2.add_argument("--x", required=True, help="file of whitespace-separated decimals")
    t2.add_argument("--y", required=True)
    t2.add_argument("--p", type=int, default=2)
    t2.add_argument("--weights", default=None)
    t2.add_argument("--side", choices=["left", "right", "two-sided"], default="two-sided")
    t2.add_argument("--method", choices=["auto", "oracle-pmf", "exact-moments", "clt"], default="auto")
    t2.add_argument("--M", type=int, default=None)
    t2.add_argument("--alpha", type=float, default=0.05)
    t2.add_argument("--seed", type=int, default=0)
    t2.set_defaults(func=cmd_test2)

    t1 = subs.add_parser("test1", help="one-sample spacing test")
    t1.add_argument("--sample", required=True)
    t1.add_argument("--null", required=True, help="uniform | normal:mu,sigma | exp:lambda")
    t1.add_argument("--p", type=int, default=2)
    t1.add_argument("--weights", default=None)
    t1.add_argument("--side", choices=["left", "right", "two-sided"], default="two-sided")
    t1.add_argument("--M", type=int, default=None)
    t1.add_argument("--alpha", type=float, default=0.05)
    t1.set_defaults(func=cmd_test1)

    pw = subs.add_parser("power", help="seeded power experiment")
    pw.add_argument("--kind", choices=["two-sample", "one-sample"], default="two-sample")
    pw.add_argument("--alt", required=True,
                    help="none | scale:s | loc:m | locscale:m,s | erlang:shape | "
                         "hyperexp:p1,p2;r1,r2 | spiked:shape,p,r1,r2")
    pw.add_argument("--k", type=int, required=True)
    pw.add_argument("--n", type=int, default=0)
    pw.add_argument("--p", type=int, default=2)
    pw.add_argument("--weights", default=None)
    pw.add_argument("--alpha", type=float, default=0.05)
    pw.add_argument("--replicates", type=int, default=1000)
    pw.add_argument("--seed", type=int, default=0)
    pw.add_argument("--baselines", default="")
    pw.add_argument("--method", default="auto")
    pw.add_argument("--M", type=int, default=None)
    pw.set_defaults(func=cmd_power)

    rc = subs.add_parser("roc", help="seeded ROC curves")
    rc.add_argument("--kind", choices=["two-sample", "one-sample"], default="one-sample")
    rc.add_argument("--alt", required=True)
    rc.add_argument("--k", type=int, required=True)
    rc.add_argument("--n", type=int, default=0)
    rc.add_argument("--p", type=int, default=2)
    rc.add_argument("--weights", default=None)
    rc.add_argument("--alphas", default="0.01,0.02,0.05,0.1,0.2,0.5")
    rc.add_argument("--replicates", type=int, default=1000)
    rc.add_argument("--seed", type=int, default=0)
    rc.add_argument("--baselines", default="")
    rc.add_argument("--method", default="auto")
    rc.add_argument("--M", type=int, default=None)
    rc.add_argument("--format", choices=["json", "csv"], default="json")
    rc.set_defaults(func=cmd_roc)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.echo = argv[1:] if argv and argv[0] == args.command else argv
    start = time.monotonic()
    try:
        args.func(args)
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except InvalidMomentsError as exc:
        sys.stderr.write(f"internal invariant violation: {exc}\n")
        return 3
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    finally:
        sys.stderr.write(f"elapsed_s={time.monotonic() - start:.3f}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
