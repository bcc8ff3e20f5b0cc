"""End-to-end acceptance criteria, one test each.

Run ``pytest tests/test_acceptance.py -v``; a PASS/FAIL line per criterion is
printed in the terminal summary.
"""
import json
import math
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from moeforge.bump import build_bump, bump_eval, bump_supnorms
from moeforge.certifier import ExtendedCount, certify, integral_step, minimal_n, scan_min_k
from moeforge.cli import run
from moeforge.freelimits import entropy, gamma_star
from moeforge.matops import (
    ChannelParams,
    density_project,
    haar_unitary,
    random_density,
    random_hermitian,
)
from moeforge.montecarlo import (
    NetSpec,
    apply_channel_pure,
    attainment_gap,
    bell_trials,
    compressed_norm,
    compression,
    duality_check,
    empirical_t_norm,
    net_cover_check,
)

pytestmark = pytest.mark.acceptance

ROOT = Path(__file__).resolve().parents[1]
TENTH = Fraction(1, 10)
# 50-digit decimal evaluation of the free-compression edge at u = 1/2, t = 1/4
PHI_HALF_QUARTER = 0.93301270189221932


def test_criterion_01_certified_tuples(report):
    tuples = [
        (184, TENTH, "1e53"),
        (185, TENTH, "1e52"),
        (200, TENTH, "1e48"),
        (500, TENTH, "1e47"),
        (500, Fraction(1, 2), "1e46"),
    ]
    bad, slowest = [], 0.0
    for k, t, n in tuples:
        t0 = time.perf_counter()
        cert = certify(k, t, ExtendedCount.parse(n))
        slowest = max(slowest, time.perf_counter() - t0)
        ok = cert.valid and cert.log_prob_bound is not None and cert.log_prob_bound <= -1e20
        if not ok:
            bad.append(f"({k},{t},{n}): {','.join(cert.reasons)}")
    ok = not bad and slowest < 1.0
    report(1, ok, f"{len(tuples) - len(bad)}/5 tuples valid, slowest {slowest:.3f}s"
           + (f"; invalid {bad}" if bad else ""))


def test_criterion_02_minimal_k_scan(report):
    t0 = time.perf_counter()
    res = scan_min_k(TENTH, 150, 250)
    elapsed = time.perf_counter() - t0
    d183 = next(r.delta for r in res.rows if r.k == 183)
    ok = res.least_violating_k == 184 and d183 <= 0 and elapsed < 5.0
    report(2, ok, f"least k = {res.least_violating_k}, delta(183) = {d183:.3e}, {elapsed:.3f}s")


def test_criterion_03_minimal_n(report):
    parts, ok = [], True
    for k, t, bound in [(184, TENTH, "1e53"), (500, Fraction(1, 2), "1e46")]:
        n, cert = minimal_n(k, t, 1e20)
        step = integral_step(k, t)
        again = certify(k, t, n, 1e20).valid
        below = certify(k, t, ExtendedCount.from_int(n.exact - step), 1e20).valid
        within = n <= ExtendedCount.parse(bound)
        ok &= within and again and not below
        parts.append(f"minimal_n({k},{t}) = {n} (<= {bound}: {within}, recert {again}, step below {below})")
    report(3, ok, "; ".join(parts))


def test_criterion_04_norm_convergence(report):
    a = np.diag([1.0, 0.0])
    t0 = time.perf_counter()
    reps = {}
    for kn in (64, 128, 256):
        p = ChannelParams.from_ratio(2, kn // 2, Fraction(1, 4))
        reps[kn] = empirical_t_norm(p, a, 200, master_seed=2024)
    elapsed = time.perf_counter() - t0
    err128 = abs(reps[128].mean - PHI_HALF_QUARTER)
    err256 = abs(reps[256].mean - PHI_HALF_QUARTER)
    sds = [reps[kn].stddev for kn in (64, 128, 256)]
    ok = err128 <= 0.08 and err256 <= 0.05 and sds[0] > sds[1] > sds[2] and elapsed < 60
    report(4, ok, f"|mean-limit| = {err128:.4f} (kn=128), {err256:.4f} (kn=256); "
           f"stddev {sds[0]:.4f} > {sds[1]:.4f} > {sds[2]:.4f}; {elapsed:.1f}s")


def test_criterion_05_bell(report):
    p = ChannelParams(3, 30, Fraction(1, 3), 30)
    t0 = time.perf_counter()
    res = bell_trials(p, 100, master_seed=99)
    bound = p.d / p.kn
    n_ok = sum(r.lambda_max >= bound - 1e-10 for r in res)
    l1 = float(np.mean([r.l1_to(gamma_star(3, 1 / 3)) for r in res[:20]]))
    elapsed = time.perf_counter() - t0
    ok = n_ok == 100 and l1 <= 0.1 and elapsed < 30
    report(5, ok, f"lambda_max >= d/kn on {n_ok}/100 seeds; mean L1 to limit {l1:.4f} over 20; {elapsed:.1f}s")


def test_criterion_06_duality(report):
    p = ChannelParams(3, 20, Fraction(1, 3), 20)
    worst = max(duality_check(haar_unitary(60, s), p, 100, 100, master_seed=s) for s in range(5))
    rng = np.random.default_rng(6)
    gaps, exact = [], 0.0
    for s in range(5):
        u, a = haar_unitary(60, 100 + s), random_density(3, rng)
        gaps.append(attainment_gap(u, p, a, 500, master_seed=s))
        # the top eigenvector of the compression attains the norm exactly
        _, vecs = np.linalg.eigh(compression(u, p, a))
        out = apply_channel_pure(u, p, vecs[:, -1])
        exact = max(exact, abs(compressed_norm(u, p, a) - np.trace(out @ a).real))
    ok = worst <= 1e-10 and max(gaps) <= 0.1
    report(6, ok, f"max duality violation {worst:.3e}; sampled attainment gap max {max(gaps):.3f} "
           f"(500 pure states, kn=60, d=20); eigenvector attainment gap {exact:.1e}")


def test_criterion_07_entropy_lipschitz(report):
    rng = np.random.default_rng(7)
    checked, worst = 0, -math.inf
    while checked < 1000:
        k = int(rng.integers(2, 7))
        a = random_density(k, rng)
        if rng.random() < 0.3:
            w = haar_unitary(k, int(rng.integers(2**32)))[:, :1]
            a = w @ w.conj().T
        b = density_project(a + 10 ** rng.uniform(-8, -0.3) * random_hermitian(k, rng))
        eps = float(np.linalg.norm(a - b))
        if not 0 < eps <= math.exp(-1):
            continue
        ha = entropy(np.clip(np.linalg.eigvalsh(a), 0, None))
        hb = entropy(np.clip(np.linalg.eigvalsh(b), 0, None))
        worst = max(worst, abs(ha - hb) - 3 * k * eps * abs(math.log(eps)))
        checked += 1
    report(7, worst <= 1e-9, f"1000 pairs, max(|dH| - 3k eps|ln eps|) = {worst:.3e}")


def test_criterion_08_bump(report):
    t0 = time.perf_counter()
    build_bump.cache_clear()
    h, g = build_bump()
    sup = bump_supnorms(g)
    elapsed = time.perf_counter() - t0
    one, zero = Fraction(1), Fraction(0)
    exact_h1 = h(one) - Fraction(1, 2**21) == 0
    ends = all(g.derivative(j)(one) == 0 and g.derivative(j)(zero) == 0 for j in range(1, 7))
    ends &= g(zero) == 0 and g(one) == 1 and bump_eval(g, one, 6) == 0
    smooth = all(r == 0 for r in g.continuity_residues(6))
    s6 = abs(sup[6] / 2**21 - 1) <= 1e-9
    s5 = abs(sup[5] / 2**15 - 1) <= 1e-9
    low = all(sup[j] <= 2 ** (j * (j + 1) // 2) * (1 + 1e-6) for j in range(1, 5))
    ok = exact_h1 and ends and smooth and s6 and s5 and low and elapsed < 10
    norms = ", ".join(f"{j}:{sup[j]:.10g}" for j in range(1, 7))
    report(8, ok, f"h(1) = 2^-21 exact {exact_h1}, C^6 {smooth}, ends {ends}, sup norms {{{norms}}}, {elapsed:.2f}s")


def test_criterion_09_net(report):
    gap, _ = net_cover_check(NetSpec(2, 0.3), 500, master_seed=9)
    literal, _ = net_cover_check(NetSpec(2, 0.3, signed=False), 500, master_seed=9)
    report(9, gap <= 0.3 / 6, f"signed grid max gap {gap:.4f} <= {0.3 / 6:.4f}; "
           f"nonnegative grid max gap {literal:.4f} (recorded only)")


def test_criterion_10_determinism(report, capsys):
    diag = str(ROOT / "data" / "diag10.json")
    commands = [
        ["simulate-norm", "--k", "2", "--t", "1/4", "--kn", "128", "--A", diag, "--trials", "40"],
        ["simulate-bell", "--k", "3", "--t", "1/3", "--n", "30", "--trials", "12"],
        ["simulate-moe", "--k", "3", "--t", "1/3", "--n", "10", "--restarts", "8", "--max-iters", "30"],
        ["net-check", "--k", "2", "--eps", "0.3", "--trials", "200"],
        ["scan", "--t", "1/10", "--k-min", "150", "--k-max", "250"],
    ]
    differing = []
    for argv in commands:
        outs = set()
        for fmt in ("json", "csv") if argv[0] != "net-check" else ("json",):
            for w in ("1", "2", "8"):
                code = run(argv + ["--seed", "17", "--deterministic", "--threads", w, "--format", fmt])
                out = capsys.readouterr().out
                assert code == 0
                outs.add((fmt, out))
        if len(outs) != (2 if argv[0] != "net-check" else 1):
            differing.append(argv[0])
    report(10, not differing, f"{len(commands)} seeded/threaded subcommands byte-identical over 1, 2, 8 workers"
           + (f"; differing: {differing}" if differing else ""))
