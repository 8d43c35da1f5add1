"""Closed-form reliability and latency expressions for sliding RS codes.

Everything here is exact evaluation of finite sums; no sampling, no
asymptotics.  The channel is i.i.d. Bernoulli packet erasure with
probability epsilon, so per-block loss counts are binomial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .codec import CodeParams

# Exact window enumeration is O((L+1) * ((L+1)n)^2) via the cumulative-count
# recursion below, but keep the documented envelope anyway.
MAX_EXACT_L = 4
MAX_EXACT_N = 30


def _check_epsilon(epsilon: float) -> None:
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"erasure probability must be in [0, 1], got {epsilon}")


def binom_pmf(r: int, n: int, epsilon: float) -> float:
    """P(X = r) for X ~ Binomial(n, epsilon).

    Out-of-range r returns 0 by convention (empty event).  Computed in the
    log domain so it stays finite for n up to ~10^4.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    _check_epsilon(epsilon)
    if r < 0 or r > n:
        return 0.0
    if epsilon == 0.0:
        return 1.0 if r == 0 else 0.0
    if epsilon == 1.0:
        return 1.0 if r == n else 0.0
    lc = math.lgamma(n + 1) - math.lgamma(r + 1) - math.lgamma(n - r + 1)
    return math.exp(lc + r * math.log(epsilon) + (n - r) * math.log1p(-epsilon))


def binom_cdf(m: int, n: int, epsilon: float) -> float:
    """P(X <= m) for X ~ Binomial(n, epsilon).

    m < 0 returns 0 and m >= n returns 1, the empty/full-sum conventions the
    bound expressions below rely on.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    _check_epsilon(epsilon)
    if m < 0:
        return 0.0
    if m >= n:
        return 1.0
    return math.fsum(binom_pmf(r, n, epsilon) for r in range(m + 1))


@dataclass(frozen=True)
class WindowSuccessTerms:
    """Per-window-length increments of the first-block success probability.

    terms[l] is the probability that the target block first becomes
    decodable using exactly l+1 window blocks; total is their sum, the
    overall first-block success probability.
    """

    terms: tuple[float, ...]

    @property
    def total(self) -> float:
        return math.fsum(self.terms)


def snc_success_exact(params: CodeParams, epsilon: float) -> WindowSuccessTerms:
    """Exact first-block success probability of the (n, k, L) sliding code.

    The window of length l+1 succeeds when cumulative erasures stay within
    (l+1)(n-k); the term for l collects exactly the paths that failed every
    shorter window.  Evaluated by a recursion over (window block, cumulative
    erasure count), which is the nested sum reorganised around partial sums.
    """
    _check_epsilon(epsilon)
    n, k, L = params.n, params.k, params.L
    if L > MAX_EXACT_L or n > MAX_EXACT_N:
        raise ValueError(
            f"exact enumeration limited to L <= {MAX_EXACT_L}, n <= {MAX_EXACT_N}"
        )
    pmf = [binom_pmf(d, n, epsilon) for d in range(n + 1)]
    size = (L + 1) * n + 1
    alive = [0.0] * size  # mass of paths that failed all windows so far, by count
    alive[0] = 1.0
    terms = []
    for l in range(L + 1):
        cap = (l + 1) * (n - k)
        stepped = [0.0] * size
        for c, w in enumerate(alive):
            if w == 0.0:
                continue
            base = c
            for d, pd in enumerate(pmf):
                stepped[base + d] += w * pd
        terms.append(math.fsum(stepped[: cap + 1]))
        for c in range(min(cap + 1, size)):
            stepped[c] = 0.0
        alive = stepped
    return WindowSuccessTerms(tuple(terms))


def snc_success_lower_bound(params: CodeParams, epsilon: float) -> float:
    """Concise lower bound on the first-block success probability.

    F(n-k; n, eps) plus, for each way the first block alone can fail, the
    probability that the remaining L blocks keep total erasures within the
    full-window budget.  Tight (equal to the exact value) at L <= 1.
    """
    _check_epsilon(epsilon)
    n, k, L = params.n, params.k, params.L
    head = binom_cdf(n - k, n, epsilon)
    tail = math.fsum(
        binom_pmf(d0, n, epsilon)
        * binom_cdf((L + 1) * (n - k) - d0, L * n, epsilon)
        for d0 in range(n - k + 1, n + 1)
    )
    return head + tail


def comparable_long_bc_success(params: CodeParams, epsilon: float) -> float:
    """Block success probability of the ((L+1)n, (L+1)k) RS block code,
    the fair fixed-length comparison point for the sliding code."""
    _check_epsilon(epsilon)
    n, k, L = params.n, params.k, params.L
    return binom_cdf((L + 1) * (n - k), (L + 1) * n, epsilon)


@dataclass
class LatencyDistribution:
    """Finite pmf over integer packet latencies, in packet slots."""

    mass: dict[int, float]

    @property
    def mean(self) -> float:
        return math.fsum(d * w for d, w in self.mass.items())

    def total(self) -> float:
        return math.fsum(self.mass.values())


def _add_mass(mass: dict[int, float], d: int, w: float) -> None:
    if w != 0.0:
        mass[d] = mass.get(d, 0.0) + w


def snc_latency_dist(
    params: CodeParams, epsilon: float, p: int
) -> LatencyDistribution:
    """Latency pmf of the p-th data packet under the sliding code.

    Latency 0 when the packet arrives (systematic code); otherwise the
    packet waits for the end of the window that first decodes its block,
    d = (l+1)n - p.  The last support point (L+1)n - p carries the residual
    mass, which lumps decode-at-the-largest-window together with
    never-decoded events; callers reading tail probabilities should know the
    final point includes outage.
    """
    if not 1 <= p <= params.k:
        raise ValueError(f"packet index must be in [1, {params.k}], got {p}")
    _check_epsilon(epsilon)
    n, L = params.n, params.L
    terms = snc_success_exact(params, epsilon).terms
    mass: dict[int, float] = {}
    _add_mass(mass, 0, 1.0 - epsilon)
    for l in range(L):
        _add_mass(mass, (l + 1) * n - p, epsilon * terms[l])
    residual = epsilon * (1.0 - math.fsum(terms[:L]))
    _add_mass(mass, (L + 1) * n - p, residual)
    return LatencyDistribution(mass)


def bc_latency_dist(
    n_bc: int, k_bc: int, epsilon: float, p: int
) -> LatencyDistribution:
    """Latency pmf of the p-th data packet under an (n_bc, k_bc) block code:
    0 when received, n_bc - p when recovered at the end of the block."""
    if not 1 <= p <= k_bc:
        raise ValueError(f"packet index must be in [1, {k_bc}], got {p}")
    _check_epsilon(epsilon)
    mass: dict[int, float] = {}
    _add_mass(mass, 0, 1.0 - epsilon)
    _add_mass(mass, n_bc - p, epsilon)
    return LatencyDistribution(mass)


def avg_packet_latency(dists: list[LatencyDistribution]) -> float:
    """Average of per-packet mean latencies over the data positions of one
    block (the per-block average latency figure of merit)."""
    if not dists:
        raise ValueError("need at least one per-packet distribution")
    return math.fsum(d.mean for d in dists) / len(dists)
