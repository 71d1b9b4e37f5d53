"""Initial-access strategies: sweep orders, position-assisted search, trial counting."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .beamforming import Codebook, LinkBudget, beamformer_for_angle, gain_to_snr_db
from .channel import ArrayGeometry, ChannelMatrix, pathloss_los
from .codebook_design import AngularPdf, QuadrantGrid, pcb_codebook
from .scenario import TWO_PI, Pose, relative_bearing

SUCCESS_MODES = ("argmax_equivalence", "snr_threshold")

# S-SSB timing at FR2 numerology mu=3: 0.125 ms slots, 64-block bursts, 160 ms period
DEFAULT_SLOT_MS = 0.125
DEFAULT_BURST_BLOCKS = 64
DEFAULT_PERIOD_MS = 160.0


@dataclass(frozen=True)
class SuccessRule:
    """When a probed beam counts as aligned.

    `argmax_equivalence` succeeds when the trial's Tx beam (with its best Rx
    beam) reaches the maximum gain achievable over the whole Tx codebook;
    `snr_threshold` succeeds at SNR >= gamma_th_db.
    """

    mode: str = "argmax_equivalence"
    gamma_th_db: float = 0.0

    def __post_init__(self):
        if self.mode not in SUCCESS_MODES:
            raise ValueError(f"unknown success mode {self.mode!r}")


@dataclass(frozen=True, eq=False)
class LinkContext:
    """Everything one strategy run needs for a single prepared link."""

    channel: ChannelMatrix
    tx_codebook: Codebook
    rx_codebook: Codebook
    geom: ArrayGeometry
    budget: LinkBudget
    tx_pose: Pose
    rx_pose: Pose
    noisy_tx_pos: tuple[float, float]
    noisy_rx_pos: tuple[float, float]

    def __post_init__(self):
        if self.channel.n_antennas != self.geom.n_antennas:
            raise ValueError("channel dimensions disagree with the array geometry")


@dataclass(frozen=True)
class IAResult:
    """Outcome of one initial-access run: trial count and the chosen beam pair."""

    trials: int
    success: bool
    chosen_tx_index: int
    chosen_rx_index: int
    final_snr_db: float
    trace: tuple[tuple[int, float], ...]

    def __post_init__(self):
        if self.trials != len(self.trace):
            raise ValueError("trials must equal the number of trace entries")


def _gain_table(ctx: LinkContext, tx_codebook: Codebook | None = None):
    """Per-Tx-beam best receive index and gain, brute-forced over the Rx codebook."""
    tx = tx_codebook if tx_codebook is not None else ctx.tx_codebook
    gains = np.abs(ctx.rx_codebook.weight_matrix.conj().T @ ctx.channel.entries @ tx.weight_matrix)
    best_rx = gains.argmax(axis=0)
    return best_rx, gains[best_rx, np.arange(gains.shape[1])]


def _run_sweep(ctx: LinkContext, rule: SuccessRule, order, tx_codebook: Codebook | None = None) -> IAResult:
    best_rx, gain = _gain_table(ctx, tx_codebook)
    n = ctx.channel.n_antennas
    if rule.mode == "argmax_equivalence":
        target = gain.max()
        passes = gain >= target
    else:
        passes = np.array([gain_to_snr_db(g, n, ctx.budget) >= rule.gamma_th_db for g in gain])
    trace = []
    for k in order:
        trace.append((int(k), float(gain[k])))
        if passes[k]:
            return IAResult(
                len(trace), True, int(k), int(best_rx[k]),
                gain_to_snr_db(float(gain[k]), n, ctx.budget), tuple(trace),
            )
    k_best = int(np.argmax(gain))
    return IAResult(
        len(trace), False, k_best, int(best_rx[k_best]),
        gain_to_snr_db(float(gain[k_best]), n, ctx.budget), tuple(trace),
    )


def run_exhaustive(ctx: LinkContext, rule: SuccessRule = SuccessRule()) -> IAResult:
    """Sweep Tx beams in codebook order 0, 1, 2, ... until the rule is met."""
    return _run_sweep(ctx, rule, range(ctx.tx_codebook.depth))


def nearest_beam_index(codebook: Codebook, angle: float) -> int:
    """Codebook index with smallest circular distance to angle; ties to lowest index."""
    angles = np.asarray(codebook.angles)
    dist = np.abs((angles - angle + math.pi) % TWO_PI - math.pi)
    return int(np.argmin(dist))


def _noisy_bearing(ctx: LinkContext) -> float:
    observer = Pose(ctx.noisy_tx_pos[0], ctx.noisy_tx_pos[1], ctx.tx_pose.heading)
    return relative_bearing(observer, ctx.noisy_rx_pos)


def _jump_order(start: int, depth: int) -> list[int]:
    order = [start]
    seen = {start}
    for step in range(1, depth):
        for k in ((start + step) % depth, (start - step) % depth):
            if k not in seen:
                seen.add(k)
                order.append(k)
            if len(order) == depth:
                return order
    return order


def run_gps_jump(ctx: LinkContext, rule: SuccessRule = SuccessRule()) -> IAResult:
    """Left-right jumping search around the position-derived start beam."""
    start = nearest_beam_index(ctx.tx_codebook, _noisy_bearing(ctx))
    return _run_sweep(ctx, rule, _jump_order(start, ctx.tx_codebook.depth))


def run_gps_lms(
    ctx: LinkContext,
    tolerance: float = 0.5,
    max_trials: int = 64,
    step_size: float = 0.05,
    g_max: float | None = None,
) -> IAResult:
    """Adaptive position-assisted search: gradient-sign updates on a continuous
    beam angle, stopping once the normalized gain error drops to `tolerance`.

    `g_max` defaults to the aligned rank-1 gain expected at the noisy
    inter-vehicle distance; pass the oracle sigma_1 for genie diagnostics.
    The accepted beam snaps to the nearest codebook angle.
    """
    if max_trials < 1:
        raise ValueError(f"max_trials must be >= 1, got {max_trials}")
    n = ctx.channel.n_antennas
    if g_max is None:
        d_hat = max(
            math.hypot(
                ctx.noisy_rx_pos[0] - ctx.noisy_tx_pos[0],
                ctx.noisy_rx_pos[1] - ctx.noisy_tx_pos[1],
            ),
            1e-6,
        )
        g_max = n * 10.0 ** (-pathloss_los(d_hat, ctx.geom.freq_ghz) / 20.0)

    rx_weights = ctx.rx_codebook.weight_matrix.conj().T
    theta = _noisy_bearing(ctx)
    eta = abs(step_size)
    prev_eps = None
    trace = []
    theta_k, rx_k, gain_k = theta, 0, 0.0
    for k in range(max_trials):
        f = beamformer_for_angle(ctx.geom, theta)
        gains = np.abs(rx_weights @ (ctx.channel.entries @ f.weights))
        rx_k = int(np.argmax(gains))
        gain_k = float(gains[rx_k])
        theta_k = theta
        trace.append((nearest_beam_index(ctx.tx_codebook, theta), gain_k))
        b = gain_k / g_max
        eps = 1.0 - b
        if eps <= tolerance:
            return _snap_result(ctx, theta_k, len(trace), True, tuple(trace))
        if prev_eps is not None:
            eta = eta if (prev_eps - eps) >= 0.0 else -eta
        theta = theta + eta * eps * b
        prev_eps = eps
    return _snap_result(ctx, theta_k, len(trace), False, tuple(trace))


def _snap_result(ctx: LinkContext, theta: float, trials: int, success: bool, trace) -> IAResult:
    k = nearest_beam_index(ctx.tx_codebook, theta)
    f = ctx.tx_codebook.beamformers[k]
    gains = np.abs(ctx.rx_codebook.weight_matrix.conj().T @ (ctx.channel.entries @ f.weights))
    rx = int(np.argmax(gains))
    snr = gain_to_snr_db(float(gains[rx]), ctx.channel.n_antennas, ctx.budget)
    return IAResult(trials, success, k, rx, snr, trace)


def run_pcb(
    ctx: LinkContext,
    pdf_source: QuadrantGrid | AngularPdf,
    rule: SuccessRule = SuccessRule(),
) -> IAResult:
    """Exhaustive sweep with the Tx codebook reordered by angular probability.

    A QuadrantGrid is queried at the (noisy) Tx position and already holds
    heading-relative angles; a bare AngularPdf is taken as map/north-frame and
    rotated into the transmitter's heading frame first. Raises
    MissingQuadrantError when no trained PDF covers the position.
    """
    if isinstance(pdf_source, QuadrantGrid):
        pdf = pdf_source.pdf_at(ctx.noisy_tx_pos)
    else:
        pdf = pdf_source.rotated(-ctx.tx_pose.heading)
    reordered = pcb_codebook(pdf, ctx.geom, ctx.tx_codebook.depth)
    return _run_sweep(ctx, rule, range(reordered.depth), tx_codebook=reordered)


def trials_to_latency(
    trials: int,
    n_ssb_per_burst: int = DEFAULT_BURST_BLOCKS,
    slot_duration_ms: float = DEFAULT_SLOT_MS,
    period_ms: float = DEFAULT_PERIOD_MS,
) -> float:
    """Wall-clock milliseconds until the winning S-SSB slot ends."""
    if n_ssb_per_burst < 1:
        raise ValueError(f"n_ssb_per_burst must be >= 1, got {n_ssb_per_burst}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    bursts, within = divmod(trials - 1, n_ssb_per_burst)
    return bursts * period_ms + within * slot_duration_ms + slot_duration_ms
