"""Closed forms for the three retransmission schemes, single-block analysis.

All three schemes protect one block of k data packets with fresh MDS parity
packets and allow exactly one retransmission round after feedback:

  M1: send the k data packets; whatever count r is reported missing,
      retransmit r parity packets.
  M2: like M1 but retransmit r + delta parity packets (delta spare).
  M3: send k + delta packets up front (delta parity included); retransmit
      only the shortfall r - delta when r > delta.

Latency bookkeeping: a lost packet is charged to the slot where the batch
that repairs it ends, counted from the packet's own transmission slot, with
the feedback gap n_re in between.  The latency pmfs condition on losses
among the other k-1 data packets; for M3 this ignores first-round parity
losses, a deliberate simplification that the simulator quantifies (see
rs_snc.sim).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .analytic import LatencyDistribution, _add_mass, _check_epsilon, binom_cdf, binom_pmf

MODES = ("M1", "M2", "M3")
MAX_RETRANSMISSIONS = 1  # every scheme gets exactly one feedback round


@dataclass(frozen=True)
class ModeConfig:
    """Retransmission scheme selector.

    delta is the spare redundancy (0 for M1 by definition); n_re the
    feedback round-trip in packet slots.
    """

    mode: str
    k: int
    delta: int = 0
    n_re: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.delta < 0:
            raise ValueError(f"delta must be >= 0, got {self.delta}")
        if self.mode == "M1" and self.delta != 0:
            raise ValueError("M1 sends no spare redundancy; delta must be 0")
        if self.n_re < 0:
            raise ValueError(f"n_re must be >= 0, got {self.n_re}")


def mode_success(cfg: ModeConfig, epsilon: float) -> float:
    """Per-block decoding success probability after the retransmission round.

    M3 is evaluated in its direct-sum form; the algebraically collapsed
    version is exposed separately as mode3_success_closed_form for
    cross-checking.
    """
    _check_epsilon(epsilon)
    k, d = cfg.k, cfg.delta
    if cfg.mode == "M1":
        return (1.0 - epsilon * epsilon) ** k
    if cfg.mode == "M2":
        return math.fsum(
            binom_pmf(r, k, epsilon) * binom_cdf(d, r + d, epsilon)
            for r in range(k + 1)
        )
    direct = math.fsum(binom_pmf(r, k + d, epsilon) for r in range(d + 1))
    repaired = math.fsum(
        (1.0 - epsilon) ** (r - d) * binom_pmf(r, k + d, epsilon)
        for r in range(d + 1, k + d + 1)
    )
    return direct + repaired


def mode3_success_closed_form(cfg: ModeConfig, epsilon: float) -> float:
    """M3 success probability with the second sum collapsed through the
    substitution eps_hat = 1/(1+eps)."""
    if cfg.mode != "M3":
        raise ValueError("closed form applies to M3 only")
    _check_epsilon(epsilon)
    k, d = cfg.k, cfg.delta
    ehat = 1.0 / (1.0 + epsilon)
    return binom_cdf(d, k + d, epsilon) + (1.0 - epsilon) ** k * (
        1.0 + epsilon
    ) ** (k + d) * binom_cdf(k - 1, k + d, ehat)


def mode_avg_code_length(cfg: ModeConfig, epsilon: float) -> float:
    """Expected packets transmitted per block, retransmission included."""
    _check_epsilon(epsilon)
    k, d = cfg.k, cfg.delta
    if cfg.mode == "M1":
        return k + epsilon * k
    if cfg.mode == "M2":
        return k + d + epsilon * k - d * (1.0 - epsilon) ** k
    spare = math.fsum(
        (d - r) * binom_pmf(r, k + d, epsilon) for r in range(d + 1)
    )
    return spare + k + epsilon * (k + d)


def mode_latency_dist(cfg: ModeConfig, epsilon: float, p: int) -> LatencyDistribution:
    """Latency pmf of the p-th data packet under the scheme.

    Mass 1-eps at 0 (packet received), the rest split over the loss counts
    r among the other k-1 data packets.  For M3, r < delta means the spare
    parity already covers the loss at the end of the first batch; larger r
    waits for the retransmission.
    """
    if not 1 <= p <= cfg.k:
        raise ValueError(f"packet index must be in [1, {cfg.k}], got {p}")
    _check_epsilon(epsilon)
    k, d, n_re = cfg.k, cfg.delta, cfg.n_re
    mass: dict[int, float] = {}
    _add_mass(mass, 0, 1.0 - epsilon)
    for r in range(k):
        w = epsilon * binom_pmf(r, k - 1, epsilon)
        if cfg.mode == "M1":
            _add_mass(mass, k + r + 1 + n_re - p, w)
        elif cfg.mode == "M2":
            _add_mass(mass, k + d + r + 1 + n_re - p, w)
        elif r < d:
            _add_mass(mass, k + d - p, w)
        else:
            _add_mass(mass, k + r + 1 + n_re - p - d, w)
    return LatencyDistribution(mass)


def mode_avg_latency(cfg: ModeConfig, epsilon: float) -> float:
    """Mean latency averaged over the block's k data positions."""
    _check_epsilon(epsilon)
    return math.fsum(
        mode_latency_dist(cfg, epsilon, p).mean for p in range(1, cfg.k + 1)
    ) / cfg.k
