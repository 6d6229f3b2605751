"""Command-line entry point: ``bcp <command> [flags]``.

Exit codes: 0 success, 1 failed ``verify`` invariant, 2 usage or domain error.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analytic, counting, cyclotomic, equidist, expsums, verify
from .analytic import DyadicBox, Gamma, ScaleContext
from .arith import primes_in_range
from .cache import cached_primes, resolve_cache_dir
from .errors import BCPError, VerificationError
from .output import emit_records

COMMANDS = ("analytic", "theta", "hcount", "boxes", "expsum", "discrepancy", "verify", "primes")


@dataclass(frozen=True)
class RunConfig:
    command: str
    x: float
    gamma: float
    eta: float
    workers: int
    output_format: str
    cache_dir: Path | None
    seed: int
    timing: bool = True


@dataclass(frozen=True)
class AnalyticRecord:
    gamma: float
    eta: float
    c_gamma: float
    h_exponent: float
    kappa_zero: float
    gamma_zero: float
    cond1_exponent: float
    cond2_exponent: float
    rho_threshold: float


@dataclass(frozen=True)
class ThetaRecord:
    p: int
    q: int
    inv_q_mod_p: int
    inv_p_mod_q: int
    theta_carlitz: int
    theta_direct: int | None
    agree: bool | None


@dataclass(frozen=True)
class BoxDiscrepancy:
    box: DyadicBox
    N: int
    d_star: float
    a_parameter: int
    et_bound: float
    within_bound: bool


@dataclass(frozen=True)
class PrimesRecord:
    limit: int
    count: int
    largest: int


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _u64(s: str) -> int:
    v = int(s)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 unsigned bits, got {v}")
    return v


def _real(s: str) -> float:
    v = float(s)
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be finite, got {s}")
    return v


def _int_like(s: str) -> int:
    v = float(s)
    if v != int(v):
        raise argparse.ArgumentTypeError(f"must be an integer, got {s}")
    return int(v)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--gamma", type=_real, default=0.45)
    common.add_argument("--eta", type=_real, default=1e-3)
    common.add_argument("--workers", type=_positive_int, default=1)
    common.add_argument("--format", dest="output_format", choices=("csv", "json"), default="csv")
    common.add_argument("--cache-dir", default=None)
    common.add_argument("--seed", type=_u64, default=0)
    common.add_argument("--no-timing", dest="timing", action="store_false",
                        help="write elapsed = 0 so output is byte-reproducible")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="bcp", description="Binary cyclotomic polynomial experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("analytic", parents=[common], help="closed-form constants for one gamma")

    p = sub.add_parser("theta", parents=[common], help="theta(pq) by both routes")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)

    p = sub.add_parser("hcount", parents=[common], help="exact H_gamma(x) against the main term")
    p.add_argument("--x", type=_real, nargs="+", required=True)

    for name, text in (("boxes", "per-box R and R_gamma"), ("discrepancy", "per-box discrepancy")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--x", type=_real, required=True)
        p.add_argument("--threshold-exponent", type=_real, default=100.0)
        p.add_argument("--min-count", type=int, default=0, help="skip boxes with fewer pairs")
    p.add_argument("--A", type=_positive_int, default=None, help="frequency cutoff; default P - 1")

    p = sub.add_parser("expsum", parents=[common], help="exponential sum bound reports")
    p.add_argument("--lemma", choices=("kc", "irving", "dfi", "bilinear"), required=True)
    p.add_argument("--x", type=_real, default=None)
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--y", type=_real, default=None)
    p.add_argument("--z", type=_real, default=None)
    p.add_argument("--P", type=_real, default=None)
    p.add_argument("--Q", type=_real, default=None)
    p.add_argument("--a", type=_int_like, default=1)

    sub.add_parser("verify", parents=[common], help="run every invariant check")

    p = sub.add_parser("primes", parents=[common], help="sieve (or load cached) primes")
    p.add_argument("--limit", type=_int_like, required=True)
    return parser


def _config(args) -> RunConfig:
    x = args.x[-1] if isinstance(getattr(args, "x", None), list) else getattr(args, "x", None)
    return RunConfig(
        command=args.command,
        x=float(x) if x is not None else math.nan,
        gamma=args.gamma,
        eta=args.eta,
        workers=args.workers,
        output_format=args.output_format,
        cache_dir=resolve_cache_dir(args.cache_dir),
        seed=args.seed,
        timing=args.timing,
    )


def _need(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise _Usage(f"{args.command} --lemma {args.lemma} requires {', '.join(missing)}")


class _Usage(Exception):
    pass


def _warn_thresholds(ctx: ScaleContext, exponent: float) -> None:
    t = analytic.small_threshold(ctx, exponent)
    if t < 1:
        print(
            f"warning: small-P threshold x^(1/3) L^-{exponent:g} = {t:.3g} is below 1 at x = {ctx.x:g};"
            " no box is classified Small",
            file=sys.stderr,
        )


def cmd_analytic(args, cfg: RunConfig):
    g = Gamma(cfg.gamma, cfg.eta)
    return [AnalyticRecord(
        gamma=g.value, eta=g.eta, c_gamma=analytic.c_gamma(g), h_exponent=float(analytic.h_exponent(g)),
        kappa_zero=analytic.kappa_zero(g), gamma_zero=analytic.gamma_zero(),
        cond1_exponent=float(analytic.cond1_exponent(g)), cond2_exponent=float(analytic.cond2_exponent(g)),
        rho_threshold=analytic.rho_threshold(g),
    )]


def cmd_theta(args, cfg: RunConfig):
    pair = cyclotomic.theta_carlitz(args.p, args.q)
    direct = cyclotomic.theta_direct(pair.p * pair.q) if pair.p * pair.q <= cyclotomic.ORACLE_LIMIT else None
    agree = None if direct is None else direct == pair.theta
    return [ThetaRecord(pair.p, pair.q, pair.inv_q_mod_p, pair.inv_p_mod_q, pair.theta, direct, agree)]


def cmd_hcount(args, cfg: RunConfig):
    g = Gamma(cfg.gamma, cfg.eta)
    return counting.convergence_table(args.x, g, cfg.workers, cfg.timing)


def cmd_boxes(args, cfg: RunConfig):
    ctx, g = ScaleContext.at(cfg.x), Gamma(cfg.gamma, cfg.eta)
    _warn_thresholds(ctx, args.threshold_exponent)
    rows = equidist.box_sweep(ctx, g, cfg.workers, args.threshold_exponent)
    return [r for r in rows if r.r_count >= args.min_count]


def cmd_discrepancy(args, cfg: RunConfig):
    ctx, g = ScaleContext.at(cfg.x), Gamma(cfg.gamma, cfg.eta)
    _warn_thresholds(ctx, args.threshold_exponent)
    out = []
    for row in equidist.box_sweep(ctx, g, cfg.workers, args.threshold_exponent):
        if row.r_count == 0 or row.r_count < args.min_count:
            continue
        seq = equidist.inverse_fractions(row.box, ctx)
        rep = equidist.discrepancy_report(seq.points, args.A or equidist.default_a(row.box))
        out.append(BoxDiscrepancy(row.box, rep.N, rep.d_star, rep.a_parameter, rep.et_bound,
                                  rep.d_star <= rep.et_bound))
    return out


def _coefficients(rng: np.random.Generator, n: int) -> np.ndarray:
    return np.exp(2j * math.pi * rng.random(n))


def cmd_expsum(args, cfg: RunConfig):
    if args.lemma == "kc":
        _need(args, "p", "y", "z")
        return [expsums.kc_bound_report(args.p, args.y, args.z)]
    if args.lemma in ("irving", "dfi"):
        _need(args, "x", "P", "Q")
        ctx = ScaleContext.at(args.x)
        windows = expsums.default_windows(args.P, args.Q, ctx)
        if args.lemma == "irving":
            return [expsums.irving_average_report(args.P, args.Q, windows, cfg.workers)]
        return [expsums.dfi_average_report(args.P, args.Q, windows, args.a, cfg.workers)]
    _need(args, "P", "Q")
    # coefficients are random unit complex numbers drawn from --seed
    rng = np.random.default_rng(cfg.seed)
    ps = primes_in_range(math.floor(args.P) + 1, math.floor(2 * args.P))
    qs = primes_in_range(math.floor(args.Q) + 1, math.floor(2 * args.Q))
    if len(ps) == 0 or len(qs) == 0:
        raise _Usage(f"no primes in (P, 2P] or (Q, 2Q] for P={args.P}, Q={args.Q}")
    _, rep = expsums.bilinear_report(_coefficients(rng, len(ps)), _coefficients(rng, len(qs)),
                                     args.a, ps, qs, args.P, args.Q)
    return [rep]


def cmd_primes(args, cfg: RunConfig):
    table = cached_primes(args.limit, cfg.cache_dir)
    largest = int(table.primes[-1]) if len(table.primes) else 0
    return [PrimesRecord(table.limit, len(table.primes), largest)]


def cmd_verify(args, cfg: RunConfig):
    def report(res):
        print(f"ok  {res.module}.{res.invariant}: {res.witness}", flush=True)

    verify.run_all(report)
    return None


HANDLERS = {
    "analytic": (cmd_analytic, AnalyticRecord),
    "theta": (cmd_theta, ThetaRecord),
    "hcount": (cmd_hcount, counting.CountRecord),
    "boxes": (cmd_boxes, equidist.BoxCheck),
    "discrepancy": (cmd_discrepancy, BoxDiscrepancy),
    "expsum": (cmd_expsum, expsums.BoundReport),
    "primes": (cmd_primes, PrimesRecord),
    "verify": (cmd_verify, None),
}


def _write(data: bytes) -> None:
    out = getattr(sys.stdout, "buffer", None)
    if out is not None:
        sys.stdout.flush()
        out.write(data)
        out.flush()
    else:
        sys.stdout.write(data.decode())


def parse_and_dispatch(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = _config(args)
        handler, record_type = HANDLERS[args.command]
        records = handler(args, cfg)
    except VerificationError as exc:
        print(f"verify failed: module={exc.module} invariant={exc.invariant} witness={exc.witness}",
              file=sys.stderr)
        return 1
    except (BCPError, _Usage, ValueError) as exc:
        print(f"bcp {args.command}: error: {exc}", file=sys.stderr)
        return 2
    if records is not None:
        _write(emit_records(records, cfg.output_format, record_type))
    return 0


def main() -> None:
    sys.exit(parse_and_dispatch())
