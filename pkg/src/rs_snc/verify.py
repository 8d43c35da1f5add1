"""Self-check suites behind the CLI `verify` subcommand.

Each check returns (ok, detail) where detail carries the measured deviation,
so a failing run tells you how far off it was, not just that it failed.
"""

from __future__ import annotations

import math
import random
import time
from math import comb

from .analytic import (
    avg_packet_latency,
    bc_latency_dist,
    binom_cdf,
    binom_pmf,
    comparable_long_bc_success,
    snc_latency_dist,
    snc_success_exact,
    snc_success_lower_bound,
)
from .codec import CodeParams, GeneratorSet, build_generators, is_mdp
from .gf import GF
from .modes import (
    ModeConfig,
    mode3_success_closed_form,
    mode_avg_code_length,
    mode_avg_latency,
    mode_latency_dist,
    mode_success,
)
from .sim import (
    replay_trial_with_decoder,
    seed_schedule,
    sim_mode,
    sim_snc_first_block,
    sim_snc_latency,
)

EPS_GRID = [x / 100 for x in range(10, 31, 4)]
WIDE_GRID = [0.05, 0.2, 0.35, 0.5, 0.65, 0.8, 0.95]


def check_field_axioms() -> tuple[bool, str]:
    f = GF(16)
    for a in range(16):
        for b in range(16):
            if f.mul(a, b) != f.mul(b, a) or f.add(a, b) != f.add(b, a):
                return False, f"commutativity broke at ({a}, {b})"
            for c in range(16):
                if f.mul(a, f.add(b, c)) != f.add(f.mul(a, b), f.mul(a, c)):
                    return False, f"distributivity broke at ({a}, {b}, {c})"
    for q in (16, 256):
        fq = GF(q)
        bad = [a for a in range(1, q) if fq.mul(a, fq.inv(a)) != 1]
        if bad:
            return False, f"inverse broke in GF({q}) at {bad[:3]}"
    return True, "GF(16) axioms exhaustive, GF(16)/GF(256) inverses exhaustive"


def check_vandermonde_identity() -> tuple[bool, str]:
    for n in range(1, 21):
        for d in range(2 * n + 1):
            lhs = sum(comb(n, i) * comb(n, d - i) for i in range(max(0, d - n), min(n, d) + 1))
            if lhs != comb(2 * n, d):
                return False, f"failed at n={n}, delta={d}: {lhs} != {comb(2*n, d)}"
    return True, "exact over all n <= 20, delta <= 2n"


def check_binomial_conventions() -> tuple[bool, str]:
    cases = [
        (binom_cdf(-1, 5, 0.3), 0.0),
        (binom_cdf(5, 5, 0.3), 1.0),
        (binom_pmf(0, 7, 0.0), 1.0),
        (binom_pmf(7, 7, 1.0), 1.0),
        (binom_pmf(-1, 4, 0.5), 0.0),
        (binom_pmf(5, 4, 0.5), 0.0),
    ]
    dev = max(abs(a - b) for a, b in cases)
    return dev == 0.0, f"edge conventions max deviation {dev:g}"


def check_delta0_collapse() -> tuple[bool, str]:
    worst = 0.0
    for k in (1, 4, 8):
        m1 = ModeConfig("M1", k, 0, 3)
        m2 = ModeConfig("M2", k, 0, 3)
        m3 = ModeConfig("M3", k, 0, 3)
        for eps in WIDE_GRID:
            vals = [
                abs(mode_success(m2, eps) - mode_success(m1, eps)),
                abs(mode_success(m3, eps) - mode_success(m1, eps)),
                abs(mode_avg_code_length(m2, eps) - mode_avg_code_length(m1, eps)),
                abs(mode_avg_code_length(m3, eps) - mode_avg_code_length(m1, eps)),
                abs(mode_avg_latency(m2, eps) - mode_avg_latency(m1, eps)),
                abs(mode_avg_latency(m3, eps) - mode_avg_latency(m1, eps)),
            ]
            worst = max(worst, max(vals))
    return worst <= 1e-12, f"max |M2/M3 - M1| at delta=0: {worst:.3e}"


def check_m3_closed_form() -> tuple[bool, str]:
    worst = 0.0
    for k in (1, 2, 4, 8, 16, 32):
        for d in range(9):
            cfg = ModeConfig("M3", k, d, 0)
            for eps in WIDE_GRID:
                a = mode_success(cfg, eps)
                b = mode3_success_closed_form(cfg, eps)
                worst = max(worst, abs(a - b) / max(abs(a), 1e-300))
    return worst <= 1e-9, f"max relative gap direct vs closed: {worst:.3e}"


def check_latency_normalization() -> tuple[bool, str]:
    worst = 0.0
    for params in (CodeParams(3, 2, 1, 16), CodeParams(12, 8, 2), CodeParams(18, 12, 2)):
        for eps in WIDE_GRID:
            for p in (1, params.k):
                worst = max(worst, abs(snc_latency_dist(params, eps, p).total() - 1.0))
    for mode, d in (("M1", 0), ("M2", 2), ("M3", 2), ("M3", 5)):
        for k in (1, 2, 8):
            cfg = ModeConfig(mode, k, min(d, 8), 4)
            for eps in WIDE_GRID:
                for p in range(1, k + 1):
                    worst = max(worst, abs(mode_latency_dist(cfg, eps, p).total() - 1.0))
    return worst <= 1e-12, f"max |pmf sum - 1|: {worst:.3e}"


def check_bound_tightness_l1() -> tuple[bool, str]:
    worst = 0.0
    for params in (CodeParams(12, 8, 1), CodeParams(3, 2, 1, 16)):
        for eps in EPS_GRID:
            gap = abs(
                snc_success_exact(params, eps).total
                - snc_success_lower_bound(params, eps)
            )
            worst = max(worst, gap)
    return worst <= 1e-12, f"max |exact - bound| at L=1: {worst:.3e}"


def check_bound_validity() -> tuple[bool, str]:
    worst = -1.0
    strict = 0.0
    for params in (CodeParams(3, 2, 2, 16), CodeParams(4, 2, 2, 16), CodeParams(12, 8, 2)):
        for eps in EPS_GRID:
            exact = snc_success_exact(params, eps).total
            bound = snc_success_lower_bound(params, eps)
            worst = max(worst, bound - exact)
            strict = max(strict, exact - bound)
    ok = worst <= 1e-12 and strict > 0.0
    return ok, f"max bound-exact excess {worst:.3e}, largest strict gap {strict:.3e}"


def check_success_ordering() -> tuple[bool, str]:
    worst = -1.0
    for params in (CodeParams(12, 8, 1), CodeParams(12, 8, 2), CodeParams(18, 12, 2)):
        for eps in EPS_GRID:
            exact = snc_success_exact(params, eps).total
            long_bc = comparable_long_bc_success(params, eps)
            short_bc = binom_cdf(params.n - params.k, params.n, eps)
            worst = max(worst, long_bc - exact, short_bc - long_bc)
    return worst <= 1e-12, f"max ordering violation: {worst:.3e}"


def check_latency_ordering() -> tuple[bool, str]:
    worst = -1.0
    for params in (CodeParams(12, 8, 1), CodeParams(12, 8, 2)):
        n, k, L = params.n, params.k, params.L
        for eps in EPS_GRID:
            ps = range(1, k + 1)
            snc = avg_packet_latency([snc_latency_dist(params, eps, p) for p in ps])
            short = avg_packet_latency([bc_latency_dist(n, k, eps, p) for p in ps])
            long_ps = range(1, (L + 1) * k + 1)
            long = avg_packet_latency(
                [bc_latency_dist((L + 1) * n, (L + 1) * k, eps, p) for p in long_ps]
            )
            worst = max(worst, short - snc, snc - long)
    return worst <= 1e-12, f"max latency-bracket violation: {worst:.3e}"


def check_mdp_small() -> tuple[bool, str]:
    gens = build_generators(CodeParams(3, 2, 1, 16))
    res = is_mdp(gens)
    return res.ok, f"(3,2,1) seed {gens.point_seed}, {res.patterns_checked} decodable patterns"


def check_mdp_exhaustive() -> tuple[bool, str]:
    details = []
    for n, k, L in ((3, 2, 1), (3, 2, 2)):
        gens = build_generators(CodeParams(n, k, L, 16))
        res = is_mdp(gens)
        if not res.ok:
            return False, f"({n},{k},{L}) failed at pattern {res.counterexample.masks}"
        details.append(f"({n},{k},{L}): seed {gens.point_seed}, {res.patterns_checked} patterns")
    return True, "; ".join(details)


def check_decoder_oracle_agreement() -> tuple[bool, str]:
    disagreements = 0
    total = 0
    for n, k, L in ((3, 2, 1), (3, 2, 2)):
        params = CodeParams(n, k, L, 16)
        gens = build_generators(params)
        npos = params.window_positions
        for bits in range(1 << npos):
            masks = [
                [bool((bits >> (j * n + i)) & 1) for i in range(n)]
                for j in range(L + 1)
            ]
            out = replay_trial_with_decoder(gens, masks, random.Random(bits))
            total += 1
            if out.decoded != (out.window_used is not None):
                disagreements += 1
    return disagreements == 0, f"{disagreements} disagreements over {total} patterns"


def check_tamper_detection() -> tuple[bool, str]:
    params = CodeParams(3, 2, 1, 16)
    good = build_generators(params)
    tampered = GeneratorSet(
        params, [good.parity[0], good.parity[0]], [good.points[0], good.points[0]], -1
    )
    res = is_mdp(tampered)
    if res.ok:
        return False, "duplicated parity slice was not rejected"
    if res.counterexample is None:
        return False, "rejection carried no counterexample pattern"
    return True, f"counterexample counts {res.counterexample.counts}"


def check_sim_vs_analytic() -> tuple[bool, str]:
    trials = 100_000
    worst = 0.0
    for params, eps in ((CodeParams(3, 2, 1, 16), 0.1), (CodeParams(12, 8, 1), 0.2)):
        rep = sim_snc_first_block(params, eps, trials, seed=20240517, decode_check=300)
        if rep.extras["decode_disagreements"]:
            return False, f"decoder disagreed on {rep.extras['decode_disagreements']} trials"
        target = 1.0 - snc_success_exact(params, eps).total
        worst = max(worst, abs(rep.error_rate - target) / max(rep.error_rate_stderr, 1e-15))
    params = CodeParams(12, 8, 1)
    rep = sim_snc_latency(params, 0.2, trials, seed=20240518)
    target = avg_packet_latency(
        [snc_latency_dist(params, 0.2, p) for p in range(1, 9)]
    )
    worst = max(worst, abs(rep.avg_latency - target) / rep.avg_latency_stderr)
    carrier = CodeParams(12, 8, 0)
    for mode, d in (("M1", 0), ("M2", 2), ("M3", 2)):
        cfg = ModeConfig(mode, 8, d, 8)
        rep = sim_mode(carrier, cfg, 0.2, trials, seed=20240519)
        for got, se, want in (
            (rep.error_rate, rep.error_rate_stderr, 1.0 - mode_success(cfg, 0.2)),
            (rep.avg_code_length, rep.avg_code_length_stderr, mode_avg_code_length(cfg, 0.2)),
            (rep.avg_latency, rep.avg_latency_stderr, mode_avg_latency(cfg, 0.2)),
        ):
            worst = max(worst, abs(got - want) / max(se, 1e-15))
    return worst <= 4.0, f"max sim deviation {worst:.2f} stderr at {trials} trials"


def check_seed_schedule() -> tuple[bool, str]:
    a = seed_schedule(11, 3).random(4)
    b = seed_schedule(11, 3).random(4)
    c = seed_schedule(11, 4).random(4)
    if list(a) != list(b):
        return False, "same (seed, index) produced different streams"
    if list(a) == list(c):
        return False, "distinct indices produced identical streams"
    mean = sum(seed_schedule(99, i).random() for i in range(2000)) / 2000
    dev = abs(mean - 0.5) / (1.0 / math.sqrt(12 * 2000))
    return dev <= 4.0, f"first-draw mean {mean:.4f} ({dev:.2f} sigma from uniform)"


QUICK_CHECKS = [
    ("field_axioms", check_field_axioms),
    ("vandermonde_identity", check_vandermonde_identity),
    ("binomial_conventions", check_binomial_conventions),
    ("delta0_collapse", check_delta0_collapse),
    ("m3_closed_form", check_m3_closed_form),
    ("latency_normalization", check_latency_normalization),
    ("bound_tightness_L1", check_bound_tightness_l1),
    ("bound_validity_L2", check_bound_validity),
    ("success_ordering", check_success_ordering),
    ("latency_ordering", check_latency_ordering),
    ("mdp_3_2_1", check_mdp_small),
    ("seed_schedule", check_seed_schedule),
]

EXHAUSTIVE_CHECKS = QUICK_CHECKS + [
    ("mdp_exhaustive", check_mdp_exhaustive),
    ("decoder_oracle_agreement", check_decoder_oracle_agreement),
    ("tamper_detection", check_tamper_detection),
    ("sim_vs_analytic_100k", check_sim_vs_analytic),
]


def run_checks(level: str = "quick", out=print) -> bool:
    checks = QUICK_CHECKS if level == "quick" else EXHAUSTIVE_CHECKS
    all_ok = True
    for name, fn in checks:
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        elapsed = time.perf_counter() - t0
        out(f"{'PASS' if ok else 'FAIL'} {name}: {detail} [{elapsed:.2f}s]")
        all_ok &= ok
    return all_ok
