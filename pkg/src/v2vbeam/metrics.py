"""Campaign aggregation: trial-count ECDFs, SNR loss, and SE loss against the SVD oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .beamforming import (
    LinkBudget,
    beamformer_for_angle,
    codebook_depth,
    gain_to_snr_db,
    spectral_efficiency,
    svd_oracle,
    uniform_codebook,
)
from .channel import ArrayGeometry, ChannelMatrix
from .codebook_design import AngularPdf, lloyd_max

QUANTIZER_NAMES = ("uniform", "lloyd")


@dataclass(frozen=True, eq=False)
class Ecdf:
    """Empirical CDF: unique sorted support with cumulative probabilities ending at 1."""

    values: np.ndarray
    probs: np.ndarray

    def quantile(self, q: float) -> float:
        """Smallest support value whose cumulative probability reaches q."""
        if not 0.0 < q <= 1.0:
            raise ValueError(f"q must be in (0, 1], got {q}")
        return float(self.values[np.searchsorted(self.probs, q)])

    def prob_at_or_below(self, x: float) -> float:
        idx = np.searchsorted(self.values, x, side="right")
        return 0.0 if idx == 0 else float(self.probs[idx - 1])


def ecdf(samples) -> Ecdf:
    """Standard empirical CDF of a nonempty sample list."""
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise ValueError("cannot build an ECDF from zero samples")
    values, counts = np.unique(samples, return_counts=True)
    probs = np.cumsum(counts) / samples.size
    return Ecdf(values, probs)


def snr_loss_db(optimal_db, quantized_db) -> float:
    """Mean dB-domain SNR gap between the oracle and the quantized selection."""
    optimal_db = np.asarray(optimal_db, dtype=float)
    quantized_db = np.asarray(quantized_db, dtype=float)
    if optimal_db.shape != quantized_db.shape:
        raise ValueError("optimal and quantized SNR lists differ in length")
    if optimal_db.size == 0:
        raise ValueError("empty SNR lists")
    return float(np.mean(optimal_db - quantized_db))


def se_loss_bps_hz(optimal_db, quantized_db) -> float:
    """Mean Shannon spectral-efficiency gap, computed in the linear domain."""
    optimal_db = np.asarray(optimal_db, dtype=float)
    quantized_db = np.asarray(quantized_db, dtype=float)
    if optimal_db.shape != quantized_db.shape:
        raise ValueError("optimal and quantized SNR lists differ in length")
    if optimal_db.size == 0:
        raise ValueError("empty SNR lists")
    se_opt = [spectral_efficiency(v) for v in optimal_db]
    se_q = [spectral_efficiency(v) for v in quantized_db]
    return float(np.mean(np.asarray(se_opt) - np.asarray(se_q)))


@dataclass(frozen=True, eq=False)
class LinkSample:
    """One admitted (link, timestep) term: the channel plus its direct-path angles."""

    channel: ChannelMatrix
    aod_az: float
    aoa_az: float
    t_index: int = 0
    tx_id: str = ""
    rx_id: str = ""


@dataclass(frozen=True)
class LossReport:
    """Average losses of one (quantization level, quantizer) cell of the sweep."""

    quantization_level_deg: float
    quantizer: str
    snr_loss_db: float
    se_loss_bps_hz: float
    n_links: int
    n_timesteps: int


def _pair_gain_db(H: ChannelMatrix, weight_matrix: np.ndarray, budget: LinkBudget) -> float:
    gains = np.abs(weight_matrix.conj().T @ H.entries @ weight_matrix)
    return gain_to_snr_db(float(gains.max()), H.n_antennas, budget)


def quantization_sweep(
    links,
    levels_deg=(0.0, 5.0, 10.0, 15.0, 20.0),
    quantizers=QUANTIZER_NAMES,
    geom: ArrayGeometry | None = None,
    budget: LinkBudget | None = None,
    gamma_th_db: float = 0.0,
    pdf: AngularPdf | None = None,
    pdf_bins: int = 64,
) -> list[LossReport]:
    """Loss-versus-oracle sweep over quantization levels and quantizer types.

    Links whose oracle SNR falls below gamma_th_db are excluded everywhere.
    Level 0 means continuous (unquantized) beams pointed at the direct-path
    angles and yields a single row with quantizer "none". The Lloyd quantizer
    is designed on `pdf`, defaulting to the histogram of the admitted links'
    own departure/arrival angles.
    """
    geom = geom if geom is not None else ArrayGeometry()
    budget = budget if budget is not None else LinkBudget()
    links = list(links)
    if not links:
        raise ValueError("quantization sweep needs a nonempty campaign")

    admitted = []
    optimal_db = []
    for link in links:
        _, _, sigma1 = svd_oracle(link.channel)
        snr_opt = gain_to_snr_db(sigma1, link.channel.n_antennas, budget)
        if snr_opt >= gamma_th_db:
            admitted.append(link)
            optimal_db.append(snr_opt)
    if not admitted:
        raise ValueError("no link clears the SNR admission threshold")
    optimal_db = np.asarray(optimal_db)
    n_links = len(admitted)
    n_timesteps = len({link.t_index for link in admitted})

    if pdf is None:
        pooled = [link.aod_az for link in admitted] + [link.aoa_az for link in admitted]
        pdf = AngularPdf.from_angles(pooled, n_bins=pdf_bins)

    reports = []
    for level in levels_deg:
        if level == 0:
            quantized = np.array(
                [
                    gain_to_snr_db(
                        float(
                            abs(
                                np.vdot(
                                    beamformer_for_angle(geom, link.aoa_az).weights,
                                    link.channel.entries @ beamformer_for_angle(geom, link.aod_az).weights,
                                )
                            )
                        ),
                        link.channel.n_antennas,
                        budget,
                    )
                    for link in admitted
                ]
            )
            reports.append(
                LossReport(
                    0.0,
                    "none",
                    snr_loss_db(optimal_db, quantized),
                    se_loss_bps_hz(optimal_db, quantized),
                    n_links,
                    n_timesteps,
                )
            )
            continue
        depth = codebook_depth(math.radians(level))
        for name in quantizers:
            if name == "uniform":
                cb = uniform_codebook(depth, geom)
            elif name == "lloyd":
                cb = lloyd_max(pdf, depth, geom=geom)
            else:
                raise ValueError(f"unknown quantizer {name!r}")
            W = cb.weight_matrix
            quantized = np.array([_pair_gain_db(link.channel, W, budget) for link in admitted])
            reports.append(
                LossReport(
                    float(level),
                    name,
                    snr_loss_db(optimal_db, quantized),
                    se_loss_bps_hz(optimal_db, quantized),
                    n_links,
                    n_timesteps,
                )
            )
    return reports
