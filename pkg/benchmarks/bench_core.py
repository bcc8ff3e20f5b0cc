"""Wall-clock timings of the hot paths.

    python3 benchmarks/bench_core.py [--repeat N]
"""
import argparse
import time
from fractions import Fraction

import numpy as np

from moeforge.bump import build_bump, bump_supnorms
from moeforge.certifier import ExtendedCount, certify, minimal_n, scan_min_k
from moeforge.matops import ChannelParams, haar_unitary
from moeforge.montecarlo import bell_trials, empirical_t_norm, min_entropy_search


def _bump():
    build_bump.cache_clear()
    bump_supnorms(build_bump()[1])


CASES = {
    "certify(500, 1/2, 1e46)": lambda: certify(500, Fraction(1, 2), ExtendedCount.parse("1e46")),
    "minimal_n(500, 1/2)": lambda: minimal_n(500, Fraction(1, 2)),
    "scan_min_k(1/10, 150..250)": lambda: scan_min_k(Fraction(1, 10), 150, 250),
    "empirical_t_norm kn=256 x200": lambda: empirical_t_norm(
        ChannelParams.from_ratio(2, 128, Fraction(1, 4)), np.diag([1.0, 0.0]), 200, 0
    ),
    "bell_trials (3,30,1/3) x100": lambda: bell_trials(ChannelParams(3, 30, Fraction(1, 3), 30), 100, 0),
    "min_entropy_search k=3 n=10 x10": lambda: min_entropy_search(
        haar_unitary(30, 0), ChannelParams(3, 10, Fraction(1, 3), 10), 10, 100
    ),
    "build_bump + sup norms": _bump,
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    for name, fn in CASES.items():
        best = min(_time(fn) for _ in range(args.repeat))
        print(f"{name:36s} {best * 1e3:10.1f} ms")


def _time(fn):
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


if __name__ == "__main__":
    main()
