"""Beamformers, codebooks, link SNR, and the SVD upper bound."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .channel import ArrayGeometry, ChannelMatrix, steering_vector
from .scenario import TWO_PI

SNR_FLOOR_DB = float("-inf")  # sentinel for a zero beamformed response


@dataclass(frozen=True, eq=False)
class Beamformer:
    """Unit-norm complex antenna weights."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.complex128)
        object.__setattr__(self, "weights", w)
        norm = np.linalg.norm(w)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"beamformer norm must be 1, got {norm}")


@dataclass(frozen=True, eq=False)
class Codebook:
    """Ordered azimuth beams; the angle order IS the sweep/test order."""

    angles: tuple[float, ...]
    beamformers: tuple[Beamformer, ...]

    def __post_init__(self):
        if len(self.angles) != len(self.beamformers) or len(self.angles) < 1:
            raise ValueError("codebook needs matching, nonempty angle and beamformer lists")
        object.__setattr__(self, "angles", tuple(a % TWO_PI for a in self.angles))

    @property
    def depth(self) -> int:
        return len(self.angles)

    @cached_property
    def weight_matrix(self) -> np.ndarray:
        """Antenna-by-beam matrix of weights, columns in test order."""
        return np.column_stack([bf.weights for bf in self.beamformers])


@dataclass(frozen=True)
class LinkBudget:
    """Transmit and noise power bookkeeping, both in dBm."""

    signal_power_dbm: float = 43.0
    noise_power_dbm: float = -85.5
    bandwidth_mhz: float = 400.0

    def __post_init__(self):
        if self.bandwidth_mhz <= 0:
            raise ValueError(f"bandwidth must be > 0, got {self.bandwidth_mhz}")


def beamformer_for_angle(geom: ArrayGeometry, az: float, el: float = 0.0) -> Beamformer:
    """Steering vector scaled to unit norm."""
    return Beamformer(steering_vector(geom, az, el) / math.sqrt(geom.n_antennas))


def gain_to_snr_db(gain: float, n_antennas: int, budget: LinkBudget = LinkBudget()) -> float:
    """SNR in dB from a beamformed response magnitude |w^H H f|."""
    if gain <= 0.0:
        return SNR_FLOOR_DB
    return (
        20.0 * math.log10(gain)
        + budget.signal_power_dbm
        - budget.noise_power_dbm
        - 10.0 * math.log10(n_antennas)
    )


def snr_db(w: Beamformer, H: ChannelMatrix, f: Beamformer, budget: LinkBudget = LinkBudget()) -> float:
    """Post-beamforming SNR of the link, in dB."""
    n = H.n_antennas
    if w.weights.shape != (n,) or f.weights.shape != (n,):
        raise ValueError("beamformer and channel dimensions disagree")
    gain = abs(np.vdot(w.weights, H.entries @ f.weights))
    return gain_to_snr_db(gain, n, budget)


def best_rx_beam(H: ChannelMatrix, f: Beamformer, rx_codebook: Codebook) -> tuple[int, float]:
    """Receive beam maximizing |w^H H f|; ties go to the lowest index."""
    y = H.entries @ f.weights
    gains = np.abs(rx_codebook.weight_matrix.conj().T @ y)
    idx = int(np.argmax(gains))
    return idx, float(gains[idx])


def svd_oracle(H: ChannelMatrix) -> tuple[Beamformer, Beamformer, float]:
    """Optimal (f, w) from the leading singular triplet, plus sigma_1."""
    if not np.any(H.entries):
        raise ValueError("channel matrix is zero; no dominant direction")
    U, s, Vh = np.linalg.svd(H.entries)
    w_opt = Beamformer(U[:, 0])
    f_opt = Beamformer(Vh[0].conj())
    return f_opt, w_opt, float(s[0])


def uniform_codebook(n_beams: int, geom: ArrayGeometry | None = None) -> Codebook:
    """Evenly spaced azimuth beams starting at 0, in ascending sweep order."""
    if n_beams < 1:
        raise ValueError(f"n_beams must be >= 1, got {n_beams}")
    geom = geom if geom is not None else ArrayGeometry()
    angles = tuple(k * TWO_PI / n_beams for k in range(n_beams))
    return Codebook(angles, tuple(beamformer_for_angle(geom, a) for a in angles))


def codebook_depth(theta_q: float) -> int:
    """Number of beams covering 2pi at angular quantization step theta_q (radians)."""
    if not 0.0 < theta_q <= TWO_PI:
        raise ValueError(f"theta_q must be in (0, 2pi], got {theta_q}")
    # tiny slack so exact divisors are not bumped up by float rounding
    return int(math.ceil(TWO_PI / theta_q - 1e-9))


def spectral_efficiency(snr_db_value: float) -> float:
    """Shannon spectral efficiency in bits/s/Hz for an SNR in dB."""
    return math.log2(1.0 + 10.0 ** (snr_db_value / 10.0))


def save_codebook(codebook: Codebook, path) -> None:
    """Persist beam test order as CSV rows `order,angle_deg`."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["order", "angle_deg"])
        for i, angle in enumerate(codebook.angles):
            writer.writerow([i, repr(math.degrees(angle))])


def load_codebook(path, geom: ArrayGeometry | None = None) -> Codebook:
    geom = geom if geom is not None else ArrayGeometry()
    angles = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip() for c in header] != ["order", "angle_deg"]:
            raise ValueError(f"{path}: expected header order,angle_deg")
        rows = sorted((int(r[0]), float(r[1])) for r in reader if r)
    angles = tuple(math.radians(deg) for _, deg in rows)
    return Codebook(angles, tuple(beamformer_for_angle(geom, a) for a in angles))
