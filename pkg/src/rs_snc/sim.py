"""Monte Carlo engines for the erasure channel, sliding code, and
retransmission schemes.

Success classification uses the erasure-count rule (the same event algebra
the closed forms integrate), so simulated curves estimate exactly the
analytic targets; the algebraic decoder runs on subsampled trials as an
independent cross-check, never as the statistics driver.

Reproducibility: trials are processed in fixed-size batches, batch b drawing
from seed_schedule(master_seed, b).  Results are merged in batch order, so a
report depends only on (config, master_seed, trials), not on how many
workers ran the batches.

Latency conventions (documented here because the closed forms bake them in):

* Sliding code: a lost packet is charged to the end of the window that
  first decodes its block, (l+1)n - p; trials where no window suffices are
  charged the largest-window point (L+1)n - p.  The closed-form pmf treats
  the packet's own loss indicator and the window classification as
  independent, so the headline estimator samples those two ingredients from
  independent draws; the coupled estimator (same draw for both) is reported
  in extras as latency_coupled_*.

* Modes at L = 0: a lost packet is charged to the end of the batch that
  repairs its block (first batch for M3 when spares suffice, otherwise the
  retransmission batch), whether or not that batch survived the channel,
  mirroring the residual-mass convention above.  For M3 the closed form
  counts only data-packet losses when sizing the repair batch; the headline
  estimator follows that accounting, and the full protocol accounting
  (first-round parity losses included, retransmission after the k + delta
  slot batch) is reported in extras as latency_protocol_*.

* Modes at L >= 1 (composition the closed forms do not cover): a block
  failing its own retransmission round contributes its residual deficit
  (data packets still unrecoverable after the round) to window decoding
  over the next blocks' residuals, with the (l+1)(n-k) budget of the
  nominal (n, k, L) code, starting at window l = 1.  Lost packets of such
  blocks are charged on the nominal window grid, (l+1)n - p, or
  (L+1)n - p when rescue fails.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .codec import CodeParams, GeneratorSet, build_generators, decodable_by_count, encode_block, window_decode
from .modes import ModeConfig

BATCH_TRIALS = 1 << 15


def seed_schedule(master_seed: int, index: int) -> np.random.Generator:
    """Independent-quality stream for (master_seed, index), injectively."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))
    )


def erase(count: int, epsilon: float, rng: np.random.Generator) -> np.ndarray:
    """One i.i.d. Bernoulli(epsilon) erasure mask; True marks a lost packet."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"erasure probability must be in [0, 1], got {epsilon}")
    return rng.random(count) < epsilon


@dataclass
class TrialOutcome:
    """Per-trial record used by the decoder cross-check path."""

    decoded: bool
    window_used: int | None
    packets_sent: int
    latencies: list[int]


@dataclass
class SimReport:
    """Point estimates with standard errors plus the inputs that made them."""

    trials: int
    seed: int
    config: dict
    error_rate: float | None = None
    error_rate_stderr: float | None = None
    avg_code_length: float | None = None
    avg_code_length_stderr: float | None = None
    avg_latency: float | None = None
    avg_latency_stderr: float | None = None
    extras: dict = field(default_factory=dict)


def _batch_sizes(trials: int) -> list[int]:
    full, rem = divmod(trials, BATCH_TRIALS)
    return [BATCH_TRIALS] * full + ([rem] if rem else [])


def _run_batches(worker, payload: tuple, trials: int, seed: int, jobs: int) -> dict:
    sizes = _batch_sizes(trials)
    args = [(payload, seed, b, size) for b, size in enumerate(sizes)]
    if jobs <= 1:
        parts = [worker(a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(worker, args))
    merged = parts[0]
    for part in parts[1:]:
        for key, val in part.items():
            merged[key] = merged[key] + val
    return merged


def _rate_stderr(successes: float, trials: int) -> float:
    p = successes / trials
    return math.sqrt(max(p * (1.0 - p), 0.0) / trials)


def _mean_stderr(total: float, sumsq: float, trials: int) -> tuple[float, float]:
    mean = total / trials
    var = max(sumsq - trials * mean * mean, 0.0) / max(trials - 1, 1)
    return mean, math.sqrt(var / trials)


def _classify_windows(counts: np.ndarray, params: CodeParams) -> np.ndarray:
    """Vectorised decodable_by_count: first window index satisfying the
    cumulative budget, -1 when none does.  counts has shape (B, L+1)."""
    cum = np.cumsum(counts, axis=1)
    budgets = (np.arange(1, params.L + 2)) * (params.n - params.k)
    ok = cum <= budgets
    found = ok.any(axis=1)
    return np.where(found, ok.argmax(axis=1), -1)


# --- sliding-code simulations -------------------------------------------------


def _snc_masks(params: CodeParams, epsilon: float, rng, size: int) -> np.ndarray:
    return rng.random((size, params.L + 1, params.n)) < epsilon


def _decode_crosscheck(
    gens: GeneratorSet, masks, seed: int
) -> tuple[int, int, tuple[str, ...]]:
    """Replay trials through the algebraic decoder; count verdicts that
    disagree with the count rule.

    Returns (checked, disagreements, first_bad_pattern) where the pattern is
    a tuple of per-block strings ('X' = erased), empty when all agreed.
    Disagreements are possible for generator sets too large for exhaustive
    verification; they mark patterns where the count budget is met but the
    drawn parity columns happen to be dependent.
    """
    checked = disagreements = 0
    first_bad: tuple[str, ...] = ()
    for i, mask in enumerate(masks):
        rows = [list(map(bool, row)) for row in mask]
        outcome = replay_trial_with_decoder(gens, rows, random.Random(seed + 7919 * i))
        checked += 1
        if outcome.decoded != (outcome.window_used is not None):
            disagreements += 1
            if not first_bad:
                first_bad = tuple(
                    "".join("X" if x else "." for x in row) for row in rows
                )
    return checked, disagreements, first_bad


def replay_trial_with_decoder(
    gens: GeneratorSet, masks: list[list[bool]], data_rng: random.Random
) -> TrialOutcome:
    """Run one erasure pattern through both classifiers.

    Encodes random source data for the window (plus random known prior
    blocks), applies the masks, and reports the count-rule verdict in
    window_used and the algebraic-decoder verdict in decoded.  When the
    count rule fails, every window length is attempted so a decoder that
    quietly outperforms the rule would be caught too.
    """
    p = gens.params
    counts = [sum(row) for row in masks]
    l_star = decodable_by_count(counts, p)
    source = [[data_rng.randrange(p.q) for _ in range(p.k)] for _ in range(p.L + 1)]
    prior = [[data_rng.randrange(p.q) for _ in range(p.k)] for _ in range(p.L)]
    received: list[list[int | None]] = []
    for j in range(p.L + 1):
        hist = [
            source[j - lag] if j - lag >= 0 else prior[lag - j - 1]
            for lag in range(p.L + 1)
        ]
        coded = encode_block(hist, gens)
        received.append([None if masks[j][i] else coded[i] for i in range(p.n)])
    if l_star is not None:
        decoded = window_decode(received[: l_star + 1], gens, prior) == source[0]
    else:
        decoded = any(
            window_decode(received[: w + 1], gens, prior) == source[0]
            for w in range(p.L + 1)
        )
    lat = []
    for pkt in range(1, p.k + 1):
        if not masks[0][pkt - 1]:
            lat.append(0)
        else:
            w = l_star if l_star is not None else p.L
            lat.append((w + 1) * p.n - pkt)
    return TrialOutcome(decoded, l_star, p.n, lat)


def _snc_error_batch(args) -> dict:
    (params, epsilon, gens, decode_check), seed, b, size = args
    rng = seed_schedule(seed, b)
    masks = _snc_masks(params, epsilon, rng, size)
    l_star = _classify_windows(masks.sum(axis=2), params)
    hist = np.bincount(np.where(l_star < 0, params.L + 1, l_star), minlength=params.L + 2)
    out = {"successes": float((l_star >= 0).sum()), "window_hist": hist.astype(np.int64)}
    if b == 0 and decode_check:
        checked, bad, first_bad = _decode_crosscheck(gens, masks[:decode_check], seed)
        out["decode_checked"] = checked
        out["decode_disagreements"] = bad
        out["decode_first_disagreement"] = first_bad
    else:
        out["decode_checked"] = 0
        out["decode_disagreements"] = 0
        out["decode_first_disagreement"] = ()
    return out


def sim_snc_first_block(
    params: CodeParams,
    epsilon: float,
    trials: int,
    seed: int,
    jobs: int = 1,
    decode_check: int = 0,
) -> SimReport:
    """Estimate the first-block error probability of the sliding code.

    Each trial draws erasure masks for the L+1 window blocks and classifies
    them with the count rule (previous blocks assumed decoded).  With
    decode_check > 0, that many trials from the first batch are replayed
    through the algebraic decoder and verdict disagreements are reported in
    extras.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    gens = build_generators(params) if decode_check else None
    tallies = _run_batches(
        _snc_error_batch, (params, epsilon, gens, decode_check), trials, seed, jobs
    )
    succ = tallies["successes"]
    report = SimReport(
        trials=trials,
        seed=seed,
        config={"params": params.__dict__, "epsilon": epsilon},
        error_rate=(trials - succ) / trials,
        error_rate_stderr=_rate_stderr(succ, trials),
        avg_code_length=float(params.n),
        avg_code_length_stderr=0.0,
        extras={
            "window_hist": tallies["window_hist"].tolist(),
            "decode_checked": int(tallies["decode_checked"]),
            "decode_disagreements": int(tallies["decode_disagreements"]),
            "decode_first_disagreement": list(tallies["decode_first_disagreement"]),
        },
    )
    return report


def _snc_latency_batch(args) -> dict:
    (params, epsilon), seed, b, size = args
    n, k, L = params.n, params.k, params.L
    rng = seed_schedule(seed, b)
    masks = _snc_masks(params, epsilon, rng, size)
    survival_loss = rng.random((size, k)) < epsilon  # independent per-packet draw
    l_star = _classify_windows(masks.sum(axis=2), params)
    end_slot = np.where(l_star >= 0, (l_star + 1) * n, (L + 1) * n)
    pvec = np.arange(1, k + 1)
    dval = end_slot[:, None] - pvec[None, :]
    head = np.where(survival_loss, dval, 0)
    coupled = np.where(masks[:, 0, :k], dval, 0)
    head_avg = head.mean(axis=1)
    coupled_avg = coupled.mean(axis=1)
    return {
        "successes": float((l_star >= 0).sum()),
        "lat_sum": float(head_avg.sum()),
        "lat_sumsq": float((head_avg**2).sum()),
        "lat_p_sum": head.sum(axis=0).astype(np.float64),
        "lat_p_sumsq": (head.astype(np.float64) ** 2).sum(axis=0),
        "coupled_sum": float(coupled_avg.sum()),
        "coupled_sumsq": float((coupled_avg**2).sum()),
    }


def sim_snc_latency(
    params: CodeParams, epsilon: float, trials: int, seed: int, jobs: int = 1
) -> SimReport:
    """Estimate per-packet and block-average latency of the sliding code.

    Headline figures sample the product-form convention (see module
    docstring); extras carry the coupled estimator and per-packet means.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    t = _run_batches(_snc_latency_batch, (params, epsilon), trials, seed, jobs)
    mean, se = _mean_stderr(t["lat_sum"], t["lat_sumsq"], trials)
    cmean, cse = _mean_stderr(t["coupled_sum"], t["coupled_sumsq"], trials)
    per_p = {}
    for i in range(params.k):
        pm, pse = _mean_stderr(float(t["lat_p_sum"][i]), float(t["lat_p_sumsq"][i]), trials)
        per_p[i + 1] = (pm, pse)
    return SimReport(
        trials=trials,
        seed=seed,
        config={"params": params.__dict__, "epsilon": epsilon},
        error_rate=(trials - t["successes"]) / trials,
        error_rate_stderr=_rate_stderr(t["successes"], trials),
        avg_code_length=float(params.n),
        avg_code_length_stderr=0.0,
        avg_latency=mean,
        avg_latency_stderr=se,
        extras={
            "per_packet_latency": per_p,
            "latency_coupled_mean": cmean,
            "latency_coupled_stderr": cse,
        },
    )


# --- retransmission-scheme simulation -----------------------------------------


def _mode_block_round(cfg: ModeConfig, epsilon: float, rng, size: int):
    """One block's first transmission plus retransmission round.

    Returns (success, sent, deficit, data_lost, r_data, r_tot) arrays.
    Draw order per block is fixed: first-transmission mask, then the
    retransmission loss count.
    """
    k, d = cfg.k, cfg.delta
    if cfg.mode == "M3":
        first = rng.random((size, k + d)) < epsilon
        data_lost = first[:, :k]
        r_tot = first.sum(axis=1)
        direct = r_tot <= d
        retx = np.where(direct, 0, r_tot - d)
        y = rng.binomial(retx, epsilon)
        success = direct | (y == 0)
        sent = (k + d) + retx
        deficit = np.where(direct, 0, y)
    else:
        first = rng.random((size, k)) < epsilon
        data_lost = first
        r_tot = first.sum(axis=1)
        if cfg.mode == "M1":
            retx = r_tot
            y = rng.binomial(retx, epsilon)
            success = y == 0
            deficit = y
        else:
            retx = np.where(r_tot > 0, r_tot + d, 0)
            y = rng.binomial(retx, epsilon)
            success = (r_tot == 0) | (y <= d)
            deficit = np.where(r_tot > 0, np.maximum(y - d, 0), 0)
        sent = k + retx
    return success, sent, deficit, data_lost, data_lost.sum(axis=1), r_tot


def _mode_formula_latency(cfg: ModeConfig, data_lost, r_data) -> np.ndarray:
    """Per-packet latency matrix under the closed forms' accounting."""
    k, d, n_re = cfg.k, cfg.delta, cfg.n_re
    pvec = np.arange(1, k + 1)
    if cfg.mode == "M1":
        dval = (k + n_re + r_data)[:, None] - pvec[None, :]
    elif cfg.mode == "M2":
        dval = (k + d + n_re + r_data)[:, None] - pvec[None, :]
    else:
        # r_data counts the lost packet itself, so the spare-covers branch
        # r_others < delta reads r_data <= delta here
        end = np.where(r_data <= d, k + d, k + n_re + r_data - d)
        dval = end[:, None] - pvec[None, :]
    return np.where(data_lost, dval, 0)


def _mode_batch(args) -> dict:
    (params, cfg, epsilon), seed, b, size = args
    n, k, L = params.n, params.k, params.L
    rng = seed_schedule(seed, b)
    success0, sent0, deficit0, data_lost, r_data, r_tot = _mode_block_round(
        cfg, epsilon, rng, size
    )
    deficits = [deficit0]
    for _ in range(L):
        res = _mode_block_round(cfg, epsilon, rng, size)
        deficits.append(res[2])
    if L > 0:
        cum = np.cumsum(np.stack(deficits, axis=1), axis=1)
        budgets = np.arange(1, L + 2) * (n - k)
        rescue_ok = cum[:, 1:] <= budgets[1:]
        rescued = rescue_ok.any(axis=1)
        l_rescue = np.where(rescued, rescue_ok.argmax(axis=1) + 1, L + 1)
        success = success0 | rescued
    else:
        success = success0
        l_rescue = None

    lat = _mode_formula_latency(cfg, data_lost, r_data).astype(np.float64)
    if L > 0:
        window_end = np.where(l_rescue <= L, (l_rescue + 1) * n, (L + 1) * n)
        pvec = np.arange(1, k + 1)
        window_d = window_end[:, None] - pvec[None, :]
        lat = np.where(
            success0[:, None], lat, np.where(data_lost, window_d, 0.0)
        )
    lat_avg = lat.mean(axis=1)

    out = {
        "successes": float(success.sum()),
        "sent_sum": float(sent0.sum()),
        "sent_sumsq": float((sent0.astype(np.float64) ** 2).sum()),
        "lat_sum": float(lat_avg.sum()),
        "lat_sumsq": float((lat_avg**2).sum()),
    }
    if cfg.mode == "M3" and L == 0:
        kd = k + cfg.delta
        end = np.where(r_tot <= cfg.delta, kd, kd + cfg.n_re + (r_tot - cfg.delta))
        proto = np.where(data_lost, end[:, None] - np.arange(1, k + 1)[None, :], 0)
        pavg = proto.mean(axis=1)
        out["proto_sum"] = float(pavg.sum())
        out["proto_sumsq"] = float((pavg**2).sum())
    return out


def sim_mode(
    params: CodeParams,
    cfg: ModeConfig,
    epsilon: float,
    trials: int,
    seed: int,
    jobs: int = 1,
) -> SimReport:
    """Simulate one retransmission scheme over i.i.d. block episodes.

    Success and code length always follow the full protocol (loss-prone
    retransmissions included).  Latency follows the conventions in the
    module docstring; for M3 at L = 0 the full-protocol latency accounting
    is also reported so the closed form's simplification is quantified
    rather than hidden.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if params.k != cfg.k:
        raise ValueError(f"params.k = {params.k} and cfg.k = {cfg.k} must match")
    t = _run_batches(_mode_batch, (params, cfg, epsilon), trials, seed, jobs)
    succ = t["successes"]
    len_mean, len_se = _mean_stderr(t["sent_sum"], t["sent_sumsq"], trials)
    lat_mean, lat_se = _mean_stderr(t["lat_sum"], t["lat_sumsq"], trials)
    extras = {
        "composition": "mode retransmission first, residual-count window decoding"
        if params.L > 0
        else "single block, no window composition",
    }
    if "proto_sum" in t:
        pm, pse = _mean_stderr(t["proto_sum"], t["proto_sumsq"], trials)
        extras["latency_protocol_mean"] = pm
        extras["latency_protocol_stderr"] = pse
        extras["latency_protocol_offset"] = pm - lat_mean
    return SimReport(
        trials=trials,
        seed=seed,
        config={
            "params": params.__dict__,
            "mode": cfg.__dict__,
            "epsilon": epsilon,
        },
        error_rate=(trials - succ) / trials,
        error_rate_stderr=_rate_stderr(succ, trials),
        avg_code_length=len_mean,
        avg_code_length_stderr=len_se,
        avg_latency=lat_mean,
        avg_latency_stderr=lat_se,
        extras=extras,
    )
