"""Command-line front end: ``moeforge <subcommand> [options]``."""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .bump import build_bump, bump_supnorms
from .certifier import (
    DEFAULT_MARGIN,
    DEFAULT_TARGET,
    ExtendedCount,
    certify,
    explain_lines,
    minimal_n,
    scan_min_k,
)
from .errors import MatrixFileError, MoeforgeError
from .freelimits import entropy, t_norm_two_level, x_star
from .matops import ChannelParams, haar_unitary, read_matrix
from .montecarlo import (
    NetSpec,
    TrialReport,
    bell_summary,
    bell_trials,
    empirical_t_norm,
    min_entropy_search,
    net_cover_check,
)

SEED_ENV = "MOEFORGE_SEED"


class UsageError(Exception):
    pass


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _count(text: str) -> ExtendedCount:
    try:
        return ExtendedCount.parse(text)
    except MoeforgeError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _params(args) -> ChannelParams:
    k = args.k
    if getattr(args, "kn", None) is not None:
        if args.kn % k:
            raise UsageError(f"--kn {args.kn} is not a multiple of --k {k}")
        n = args.kn // k
    elif args.n is not None:
        n = args.n
    else:
        raise UsageError("one of --n or --kn is required")
    if args.d is not None:
        return ChannelParams(k, n, args.t, args.d)
    return ChannelParams.from_ratio(k, n, args.t)


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from exc
    return 0


def _param_dict(p: ChannelParams) -> dict:
    return {"k": p.k, "n": p.n, "t": [p.t.numerator, p.t.denominator], "d": p.d}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument(
        "--format", choices=("json", "csv", "text"), default=None,
        help="output format (default json; text for bump and explain)",
    )
    common.add_argument("--deterministic", action="store_true", help="omit the timestamp field")
    common.add_argument("--threads", type=int, default=1, help="worker threads for trials")
    common.add_argument("--seed", type=int, default=None, help=f"master seed (fallback ${SEED_ENV})")

    parser = argparse.ArgumentParser(prog="moeforge", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def channel_opts(p, kn=False):
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--t", type=_fraction, required=True)
        p.add_argument("--n", type=int)
        if kn:
            p.add_argument("--kn", type=int)
        p.add_argument("--d", type=int, help="input dimension (default floor(t*k*n))")

    def cert_opts(p, with_n=True):
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--t", type=_fraction, required=True)
        if with_n:
            p.add_argument("--n", type=_count, required=True)
            p.add_argument("--eps", type=float)
        p.add_argument("--target", type=float, default=DEFAULT_TARGET)
        p.add_argument("--margin", type=float, default=DEFAULT_MARGIN)

    p = sub.add_parser("certify", parents=[common], help="certify a (k, t, n) tuple")
    cert_opts(p)
    p.add_argument("--strict", action="store_true", help="exit 1 when the certificate is invalid")

    p = sub.add_parser("minimal-n", parents=[common], help="smallest certifiable n")
    cert_opts(p, with_n=False)

    p = sub.add_parser("scan", parents=[common], help="violation gap over a range of k")
    p.add_argument("--t", type=_fraction, required=True)
    p.add_argument("--k-min", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)

    p = sub.add_parser("simulate-norm", parents=[common], help="empirical compressed norms")
    channel_opts(p, kn=True)
    p.add_argument("--A", "--matrix", dest="matrix", required=True, help="JSON matrix file")
    p.add_argument("--trials", type=int, default=200)

    p = sub.add_parser("simulate-bell", parents=[common], help="Bell-state output spectra")
    channel_opts(p, kn=True)
    p.add_argument("--trials", type=int, default=20)

    p = sub.add_parser("simulate-moe", parents=[common], help="minimum output entropy search")
    channel_opts(p, kn=True)
    p.add_argument("--restarts", type=int, default=50)
    p.add_argument("--max-iters", type=int, default=200)

    p = sub.add_parser("net-check", parents=[common], help="epsilon-net covering check")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--nonnegative-grid", action="store_true", help="use the nonnegative half-integer grid (does not cover)")

    p = sub.add_parser("bump", parents=[common], help="exact C^6 bump function")
    p.add_argument("--json", action="store_true", help="emit exact coefficients as JSON")

    p = sub.add_parser("explain", parents=[common], help="print the certificate inequality chain")
    cert_opts(p)
    return parser


def _cmd_certify(args):
    cert = certify(args.k, args.t, args.n, args.target, eps=args.eps, margin=args.margin)
    code = 1 if args.strict and not cert.valid else 0
    return cert.to_dict(), None, code


def _cmd_minimal_n(args):
    n, cert = minimal_n(args.k, args.t, args.target, margin=args.margin)
    return {
        "k": args.k,
        "t": [args.t.numerator, args.t.denominator],
        "target": args.target,
        "n": n.to_dict(),
        "rule": "eps maximizes the smallest validity slack, capped by the entropy-loss margin",
        "certificate": cert.to_dict(),
    }, None, 0


def _cmd_scan(args):
    res = scan_min_k(args.t, args.k_min, args.k_max, workers=args.threads)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "phi1", "s_limit", "hw_half", "delta"])
    for r in res.rows:
        w.writerow([r.k, repr(r.phi1), repr(r.s_limit), repr(r.hw_half), repr(r.delta)])
    return res.to_dict(), buf.getvalue(), 0


def _cmd_simulate_norm(args):
    p = _params(args)
    a = read_matrix(args.matrix)
    if a.shape != (p.k, p.k):
        raise MatrixFileError("dim", f"expected {p.k}, got {a.shape[0]}")
    seed = _seed(args)
    rep = empirical_t_norm(p, a, args.trials, seed, workers=args.threads)
    out = {**_param_dict(p), **rep.to_dict()}
    w = np.linalg.eigvalsh(a)
    levels = np.unique(np.round(w, 12))
    if len(levels) <= 2 and levels[0] >= -1e-12:
        lo, hi = float(max(levels[0], 0.0)), float(levels[-1])
        u = float(np.sum(np.abs(w - hi) <= 1e-12)) / p.k
        out["limit_two_level"] = t_norm_two_level(lo, hi, u, p.t)
    return out, rep.to_csv(), 0


def _cmd_simulate_bell(args):
    p = _params(args)
    seed = _seed(args)
    res = bell_trials(p, args.trials, seed, workers=args.threads)
    summary = bell_summary(p, res, seed)
    csv_text = TrialReport.from_values([r.lambda_max for r in res], seed).to_csv()
    return summary, csv_text, 0


def _cmd_simulate_moe(args):
    p = _params(args)
    seed = _seed(args)
    u = haar_unitary(p.kn, seed)
    best, _, runs = min_entropy_search(
        u, p, args.restarts, args.max_iters, master_seed=seed, workers=args.threads
    )
    rep = TrialReport.from_values(runs, seed)
    out = {**_param_dict(p), "best_entropy": best, "restarts": rep.to_dict()}
    if p.k >= 2:
        out["limit_min_entropy"] = entropy(x_star(p.k, p.t))
    return out, rep.to_csv(), 0


def _cmd_net_check(args):
    spec = NetSpec(args.k, args.eps, signed=not args.nonnegative_grid)
    gap, size = net_cover_check(spec, args.trials, _seed(args))
    bound = args.eps / (3 * args.k)
    return {
        "k": args.k,
        "eps": args.eps,
        "u": spec.u,
        "signed": spec.signed,
        "grid_half_width": spec.grid_half_width,
        "trials": args.trials,
        "max_gap": gap,
        "bound": bound,
        "covered": gap <= bound,
        "net_size_bound": size.to_dict(),
    }, None, 0


def _cmd_bump(args):
    h, g = build_bump()
    sup = bump_supnorms(g)
    out = {
        "h_at_1": f"{h(Fraction(1)).numerator}/{h(Fraction(1)).denominator}",
        "supnorms": {str(j): v for j, v in sup.items()},
        "claimed": {str(j): 2 ** (j * (j + 1) // 2) for j in sup},
        "g": g.to_dict(),
    }
    lines = ["h(1) = " + out["h_at_1"]]
    lines += [f"||g^({j})||_inf = {v:.12g}  (2^{j * (j + 1) // 2} = {2 ** (j * (j + 1) // 2)})"
              for j, v in sup.items()]
    return out, "\n".join(lines) + "\n", 0


def _cmd_explain(args):
    cert = certify(args.k, args.t, args.n, args.target, eps=args.eps, margin=args.margin)
    return cert.to_dict(), "\n".join(explain_lines(cert)) + "\n", 0


COMMANDS = {
    "certify": _cmd_certify,
    "minimal-n": _cmd_minimal_n,
    "scan": _cmd_scan,
    "simulate-norm": _cmd_simulate_norm,
    "simulate-bell": _cmd_simulate_bell,
    "simulate-moe": _cmd_simulate_moe,
    "net-check": _cmd_net_check,
    "bump": _cmd_bump,
    "explain": _cmd_explain,
}
# commands whose text rendering is the default
TEXT_DEFAULT = {"bump", "explain"}


def _render(args, obj, text) -> str:
    fmt = args.format
    if fmt is None:
        fmt = "text" if args.command in TEXT_DEFAULT and not getattr(args, "json", False) else "json"
    if fmt == "csv" and args.command in TEXT_DEFAULT or fmt == "text" and args.command not in TEXT_DEFAULT:
        raise UsageError(f"--format {fmt} is not supported by {args.command}")
    if fmt == "csv":
        if text is None:
            raise UsageError(f"--format csv is not supported by {args.command}")
        return text
    if fmt == "text":
        return text
    payload = {"command": args.command, **obj}
    if not args.deterministic:
        payload["generated_at"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    return json.dumps(payload, indent=2, allow_nan=False, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        obj, text, code = COMMANDS[args.command](args)
        rendered = _render(args, obj, text)
    except MatrixFileError as exc:
        print(f"moeforge: matrix file error in field {exc.field}: {exc}", file=sys.stderr)
        return 2
    except (UsageError, MoeforgeError) as exc:
        print(f"moeforge: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(rendered)
    else:
        sys.stdout.write(rendered)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
