"""Geometric mmWave MIMO channel: cylindrical-array responses, path enumeration, assembly."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .scenario import (
    Pose,
    ScenarioMap,
    TWO_PI,
    open_segment_blocked,
    relative_bearing,
    segment_intersection_params,
)

SPEED_OF_LIGHT = 299_792_458.0
DEFAULT_FREQ_GHZ = 28.0
# rooftop antenna: typical vehicle height plus the 0.1 m mount offset
DEFAULT_ANTENNA_HEIGHT = 1.5 + 0.1

PATH_KINDS = ("los", "reflected")


def wavelength_for(freq_ghz: float) -> float:
    """Carrier wavelength in meters for a frequency in GHz."""
    if freq_ghz <= 0:
        raise ValueError(f"frequency must be > 0, got {freq_ghz}")
    return SPEED_OF_LIGHT / (freq_ghz * 1e9)


@dataclass(frozen=True)
class ArrayGeometry:
    """Cylindrical array: n_rings stacked circular rings of n_per_ring elements.

    Defaults give the 4x16 = 64 element rooftop array at 28 GHz with
    half-wavelength ring spacing; the ring radius defaults so that adjacent
    in-ring elements are also half a wavelength apart.
    """

    n_rings: int = 4
    n_per_ring: int = 16
    wavelength: float = SPEED_OF_LIGHT / 28e9
    ring_spacing: float | None = None
    radius: float | None = None

    def __post_init__(self):
        if self.n_rings < 1 or self.n_per_ring < 1:
            raise ValueError("array needs at least one ring and one element per ring")
        if self.wavelength <= 0:
            raise ValueError(f"wavelength must be > 0, got {self.wavelength}")
        if self.ring_spacing is None:
            object.__setattr__(self, "ring_spacing", self.wavelength / 2.0)
        if self.radius is None:
            object.__setattr__(
                self, "radius", self.ring_spacing / (2.0 * math.sin(math.pi / self.n_per_ring))
            )
        if self.ring_spacing <= 0 or self.radius <= 0:
            raise ValueError("ring_spacing and radius must be > 0")

    @classmethod
    def from_frequency(cls, freq_ghz: float = DEFAULT_FREQ_GHZ, n_rings: int = 4, n_per_ring: int = 16):
        return cls(n_rings=n_rings, n_per_ring=n_per_ring, wavelength=wavelength_for(freq_ghz))

    @property
    def n_antennas(self) -> int:
        return self.n_rings * self.n_per_ring

    @property
    def freq_ghz(self) -> float:
        return SPEED_OF_LIGHT / self.wavelength / 1e9


@dataclass(frozen=True)
class PathComponent:
    """One propagation path: departure/arrival azimuths and elevations, complex amplitude."""

    aod_az: float
    aod_el: float
    aoa_az: float
    aoa_el: float
    amplitude: complex
    kind: str
    length: float

    def __post_init__(self):
        if abs(self.amplitude) <= 0:
            raise ValueError("path amplitude must be nonzero")
        for el in (self.aod_el, self.aoa_el):
            if not -math.pi / 2 <= el <= math.pi / 2:
                raise ValueError(f"elevation {el} outside [-pi/2, pi/2]")
        if self.kind not in PATH_KINDS:
            raise ValueError(f"unknown path kind {self.kind!r}")


@dataclass(frozen=True, eq=False)
class ChannelMatrix:
    """Dense complex MIMO matrix for one link, with the paths it was built from."""

    entries: np.ndarray
    paths: tuple[PathComponent, ...]

    @property
    def n_antennas(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class PropagationConfig:
    """Propagation knobs: carrier, per-bounce reflection loss, blockage height."""

    carrier_freq_ghz: float = DEFAULT_FREQ_GHZ
    reflection_loss_db: float = 6.0
    include_reflections: bool = True
    antenna_height: float = DEFAULT_ANTENNA_HEIGHT

    def __post_init__(self):
        if self.carrier_freq_ghz <= 0:
            raise ValueError(f"carrier frequency must be > 0, got {self.carrier_freq_ghz}")
        if self.reflection_loss_db < 0:
            raise ValueError(f"reflection loss must be >= 0, got {self.reflection_loss_db}")

    @property
    def wavelength(self) -> float:
        return wavelength_for(self.carrier_freq_ghz)


# ---------- array responses ----------

def element_azimuth(geom: ArrayGeometry, m: int) -> float:
    """Angular position of element m (1-based) around a ring."""
    return (2 * m - 1) * math.pi / geom.n_per_ring


def element_response(geom: ArrayGeometry, m: int, n: int, az: float, el: float) -> complex:
    """Unit-modulus phase response of element m (1..n_per_ring) in ring n (1..n_rings)."""
    if not 1 <= m <= geom.n_per_ring:
        raise IndexError(f"element index m={m} outside 1..{geom.n_per_ring}")
    if not 1 <= n <= geom.n_rings:
        raise IndexError(f"ring index n={n} outside 1..{geom.n_rings}")
    k = TWO_PI / geom.wavelength
    ring_phase = k * geom.radius * math.cos(el) * math.cos(az - element_azimuth(geom, m))
    vertical_phase = k * geom.ring_spacing * (n - 1) * math.sin(el)
    return cmath.exp(1j * ring_phase) * cmath.exp(1j * vertical_phase)


def steering_vector(geom: ArrayGeometry, az: float, el: float = 0.0) -> np.ndarray:
    """Stacked element responses, ring-major (ring index outer, element index inner)."""
    m = np.arange(1, geom.n_per_ring + 1)
    theta_m = (2 * m - 1) * np.pi / geom.n_per_ring
    k = TWO_PI / geom.wavelength
    ring = np.exp(1j * k * geom.radius * math.cos(el) * np.cos(az - theta_m))
    vertical = np.exp(1j * k * geom.ring_spacing * np.arange(geom.n_rings) * math.sin(el))
    return (vertical[:, None] * ring[None, :]).reshape(-1)


# ---------- path loss and blockage ----------

def pathloss_los(distance: float, freq_ghz: float) -> float:
    """Line-of-sight path loss in dB (distance in meters, frequency in GHz)."""
    if distance <= 0:
        raise ValueError(f"distance must be > 0, got {distance}")
    if freq_ghz <= 0:
        raise ValueError(f"frequency must be > 0, got {freq_ghz}")
    return 32.4 + 20.0 * math.log10(distance) + 20.0 * math.log10(freq_ghz)


def los_blocked(
    smap: ScenarioMap,
    p_tx: tuple[float, float],
    p_rx: tuple[float, float],
    antenna_height: float = DEFAULT_ANTENNA_HEIGHT,
) -> bool:
    """True iff the open tx-rx segment crosses a wall of an obstacle taller than the antennas."""
    if p_tx == p_rx:
        raise ValueError("tx and rx positions coincide; blockage test undefined")
    for obs in smap.obstacles:
        if obs.height <= antenna_height:
            continue
        for q1, q2 in obs.edges():
            if open_segment_blocked(p_tx, p_rx, q1, q2):
                return True
    return False


def _blocked_excluding(smap, p1, p2, antenna_height, skip_wall) -> bool:
    for obs in smap.obstacles:
        if obs.height <= antenna_height:
            continue
        for wall in obs.edges():
            if wall == skip_wall:
                continue
            if open_segment_blocked(p1, p2, wall[0], wall[1]):
                return True
    return False


def _mirror_across(point, wall):
    (x1, y1), (x2, y2) = wall
    dx, dy = x2 - x1, y2 - y1
    den = dx * dx + dy * dy
    if den == 0.0:
        return None
    t = ((point[0] - x1) * dx + (point[1] - y1) * dy) / den
    foot = (x1 + t * dx, y1 + t * dy)
    return (2.0 * foot[0] - point[0], 2.0 * foot[1] - point[1])


def _reflection_point(p_tx, p_rx, wall):
    """Image-method bounce point on the wall segment, or None if not reflective."""
    (x1, y1), (x2, y2) = wall
    side_tx = (x2 - x1) * (p_tx[1] - y1) - (y2 - y1) * (p_tx[0] - x1)
    side_rx = (x2 - x1) * (p_rx[1] - y1) - (y2 - y1) * (p_rx[0] - x1)
    if side_tx * side_rx <= 0.0:
        return None  # on the wall line or on opposite sides: no single-bounce path
    mirror = _mirror_across(p_tx, wall)
    if mirror is None:
        return None
    params = segment_intersection_params(mirror, p_rx, wall[0], wall[1])
    if params is None:
        return None
    t, s = params
    if not (0.0 < t < 1.0 and 0.0 <= s <= 1.0):
        return None
    return (wall[0][0] + s * (wall[1][0] - wall[0][0]), wall[0][1] + s * (wall[1][1] - wall[0][1]))


def _path_amplitude(length, pathloss_db, wavelength):
    magnitude = 10.0 ** (-pathloss_db / 20.0)
    phase = (-TWO_PI * length / wavelength) % TWO_PI
    return magnitude * cmath.exp(1j * phase)


def enumerate_paths(
    smap: ScenarioMap,
    tx: Pose,
    rx: Pose,
    cfg: PropagationConfig = PropagationConfig(),
) -> list[PathComponent]:
    """LoS plus single-bounce image-method reflections with geometric blockage.

    Azimuths are heading-relative bearings at each end; elevations are 0
    (equal antenna heights). Returns an empty list when every path is blocked.
    """
    p_t, p_r = tx.position, rx.position
    if p_t == p_r:
        raise ValueError("tx and rx positions coincide")
    lam = cfg.wavelength
    paths = []
    if not los_blocked(smap, p_t, p_r, cfg.antenna_height):
        length = math.hypot(p_r[0] - p_t[0], p_r[1] - p_t[1])
        amp = _path_amplitude(length, pathloss_los(length, cfg.carrier_freq_ghz), lam)
        paths.append(
            PathComponent(relative_bearing(tx, p_r), 0.0, relative_bearing(rx, p_t), 0.0, amp, "los", length)
        )
    if cfg.include_reflections:
        for obs in smap.obstacles:
            if obs.height <= cfg.antenna_height:
                continue
            for wall in obs.edges():
                q = _reflection_point(p_t, p_r, wall)
                if q is None or q == p_t or q == p_r:
                    continue
                if _blocked_excluding(smap, p_t, q, cfg.antenna_height, wall):
                    continue
                if _blocked_excluding(smap, q, p_r, cfg.antenna_height, wall):
                    continue
                length = math.hypot(q[0] - p_t[0], q[1] - p_t[1]) + math.hypot(p_r[0] - q[0], p_r[1] - q[1])
                loss = pathloss_los(length, cfg.carrier_freq_ghz) + cfg.reflection_loss_db
                amp = _path_amplitude(length, loss, lam)
                paths.append(
                    PathComponent(relative_bearing(tx, q), 0.0, relative_bearing(rx, q), 0.0, amp, "reflected", length)
                )
    return paths


def assemble_channel(paths, geom: ArrayGeometry = ArrayGeometry()) -> ChannelMatrix:
    """Sum of per-path rank-1 terms: amplitude times a_rx a_tx^H."""
    paths = tuple(paths)
    if not paths:
        raise ValueError("cannot assemble a channel from zero paths")
    n = geom.n_antennas
    entries = np.zeros((n, n), dtype=np.complex128)
    for p in paths:
        a_rx = steering_vector(geom, p.aoa_az, p.aoa_el)
        a_tx = steering_vector(geom, p.aod_az, p.aod_el)
        entries += p.amplitude * np.outer(a_rx, a_tx.conj())
    return ChannelMatrix(entries, paths)
