"""World geometry, vehicle traces, synthetic scenarios, and the noisy-position model."""

from __future__ import annotations

import csv
import math
import zlib
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi
DEFAULT_TIMESTEP = 0.1  # seconds
URBAN_MAX_SPEED = 50.0 / 3.6  # m/s
HIGHWAY_MAX_SPEED = 130.0 / 3.6  # m/s

OBSTACLE_KINDS = ("building", "foliage", "vehicle")

TRACE_HEADER = ["t", "vehicle_id", "x", "y", "heading_deg", "speed"]


class TraceFormatError(ValueError):
    """A trace CSV row (or the header) could not be parsed."""


class MapFormatError(ValueError):
    """An obstacle line in a map file could not be parsed."""


@dataclass(frozen=True)
class Pose:
    """Planar vehicle state.

    Positions are meters in a local east (x) / north (y) frame; heading is
    radians clockwise from north, normalized to [0, 2pi).
    """

    x: float
    y: float
    heading: float = 0.0
    speed: float = 0.0

    def __post_init__(self):
        if self.speed < 0:
            raise ValueError(f"speed must be >= 0, got {self.speed}")
        object.__setattr__(self, "heading", self.heading % TWO_PI)

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class VehicleTrace:
    """One vehicle's sampled poses, indexed by strictly increasing timestep."""

    vehicle_id: str
    samples: tuple[tuple[int, Pose], ...]
    timestep: float = DEFAULT_TIMESTEP

    def __post_init__(self):
        if self.timestep <= 0:
            raise ValueError(f"timestep must be > 0, got {self.timestep}")
        indices = [k for k, _ in self.samples]
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError(f"vehicle {self.vehicle_id}: timestep indices not strictly increasing")

    def pose_at(self, t_index: int) -> Pose | None:
        for k, pose in self.samples:
            if k == t_index:
                return pose
        return None

    @property
    def timestep_indices(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.samples)


@dataclass(frozen=True)
class Obstacle:
    """A footprint polygon (>= 3 vertices, simple) extruded to a height."""

    footprint: tuple[tuple[float, float], ...]
    height: float
    kind: str = "building"

    def __post_init__(self):
        if len(self.footprint) < 3:
            raise ValueError("obstacle footprint needs at least 3 vertices")
        if self.height <= 0:
            raise ValueError(f"obstacle height must be > 0, got {self.height}")
        if self.kind not in OBSTACLE_KINDS:
            raise ValueError(f"unknown obstacle kind {self.kind!r}")
        if not _polygon_is_simple(self.footprint):
            raise ValueError("obstacle footprint is self-intersecting")

    def edges(self) -> list[tuple[tuple[float, float], tuple[float, float]]]:
        n = len(self.footprint)
        return [(self.footprint[i], self.footprint[(i + 1) % n]) for i in range(n)]


@dataclass(frozen=True)
class ScenarioMap:
    """All obstacles of a scene; wall segments and bounds are derived views."""

    obstacles: tuple[Obstacle, ...] = ()

    @property
    def wall_segments(self) -> list[tuple[tuple[float, float], tuple[float, float]]]:
        segments = []
        for obs in self.obstacles:
            segments.extend(obs.edges())
        return segments

    @property
    def bounds(self) -> tuple[float, float, float, float] | None:
        xs = [v[0] for obs in self.obstacles for v in obs.footprint]
        ys = [v[1] for obs in self.obstacles for v in obs.footprint]
        if not xs:
            return None
        return (min(xs), min(ys), max(xs), max(ys))


class PositionNoiseModel:
    """Per-axis Gaussian position error, reproducible from (seed, query sequence).

    `sample` draws fresh noise from a sequential stream; `measured` derives the
    draw from (seed, vehicle, timestep) so that Tx and Rx sides of a link see
    one consistent noisy position per vehicle per timestep, independent of
    query order.
    """

    def __init__(self, sigma_p: float, seed: int = 0):
        if sigma_p < 0:
            raise ValueError(f"sigma_p must be >= 0, got {sigma_p}")
        self.sigma_p = float(sigma_p)
        self.seed = int(seed)
        self._rng = np.random.default_rng(self.seed)
        self._cache: dict[tuple[str, int], tuple[float, float]] = {}

    def sample(self, true_pos: tuple[float, float]) -> tuple[float, float]:
        if self.sigma_p == 0.0:
            return (float(true_pos[0]), float(true_pos[1]))
        ex, ey = self._rng.normal(0.0, self.sigma_p, size=2)
        return (true_pos[0] + ex, true_pos[1] + ey)

    def measured(self, vehicle_id: str, t_index: int, true_pos: tuple[float, float]) -> tuple[float, float]:
        key = (str(vehicle_id), int(t_index))
        if key not in self._cache:
            if self.sigma_p == 0.0:
                noisy = (float(true_pos[0]), float(true_pos[1]))
            else:
                rng = np.random.default_rng(
                    [self.seed, zlib.crc32(key[0].encode("utf-8")), key[1]]
                )
                ex, ey = rng.normal(0.0, self.sigma_p, size=2)
                noisy = (true_pos[0] + ex, true_pos[1] + ey)
            self._cache[key] = noisy
        return self._cache[key]

    def split(self, worker_index: int) -> "PositionNoiseModel":
        """Derived-seed copy for a parallel worker."""
        return PositionNoiseModel(self.sigma_p, seed=hash((self.seed, worker_index)) & 0x7FFFFFFF)


# ---------- bearings ----------

def global_bearing(origin: tuple[float, float], target: tuple[float, float]) -> float:
    """Clockwise-from-north angle of the origin->target ray, in [0, 2pi)."""
    dx = target[0] - origin[0]
    dy = target[1] - origin[1]
    if dx == 0.0 and dy == 0.0:
        raise ValueError("target coincides with origin; bearing undefined")
    return math.atan2(dx, dy) % TWO_PI


def relative_bearing(observer: Pose, target: tuple[float, float]) -> float:
    """Clockwise angle from the observer's heading to the ray toward target, in [0, 2pi)."""
    return (global_bearing(observer.position, target) - observer.heading) % TWO_PI


# ---------- planar segment predicates ----------

def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def segment_intersection_params(p1, p2, q1, q2):
    """Solve p1 + t*(p2-p1) == q1 + s*(q2-q1); returns (t, s) or None if parallel."""
    d1x, d1y = p2[0] - p1[0], p2[1] - p1[1]
    d2x, d2y = q2[0] - q1[0], q2[1] - q1[1]
    denom = _cross(d1x, d1y, d2x, d2y)
    if denom == 0.0:
        return None
    rx, ry = q1[0] - p1[0], q1[1] - p1[1]
    t = _cross(rx, ry, d2x, d2y) / denom
    s = _cross(rx, ry, d1x, d1y) / denom
    return t, s


def open_segment_blocked(p1, p2, q1, q2) -> bool:
    """True iff the closed segment q1-q2 touches the open interior of p1-p2.

    Contacts exactly at p1 or p2 do not count; a collinear wall counts only
    when the overlap has positive length inside the open segment.
    """
    params = segment_intersection_params(p1, p2, q1, q2)
    if params is None:
        d1x, d1y = p2[0] - p1[0], p2[1] - p1[1]
        if _cross(q1[0] - p1[0], q1[1] - p1[1], d1x, d1y) != 0.0:
            return False  # parallel but not collinear
        den = d1x * d1x + d1y * d1y
        tq1 = ((q1[0] - p1[0]) * d1x + (q1[1] - p1[1]) * d1y) / den
        tq2 = ((q2[0] - p1[0]) * d1x + (q2[1] - p1[1]) * d1y) / den
        lo, hi = min(tq1, tq2), max(tq1, tq2)
        return max(lo, 0.0) < min(hi, 1.0)
    t, s = params
    return 0.0 < t < 1.0 and 0.0 <= s <= 1.0


def _segments_touch_closed(p1, p2, q1, q2) -> bool:
    params = segment_intersection_params(p1, p2, q1, q2)
    if params is None:
        d1x, d1y = p2[0] - p1[0], p2[1] - p1[1]
        if _cross(q1[0] - p1[0], q1[1] - p1[1], d1x, d1y) != 0.0:
            return False
        den = d1x * d1x + d1y * d1y
        if den == 0.0:
            return p1 == q1 or p1 == q2
        tq1 = ((q1[0] - p1[0]) * d1x + (q1[1] - p1[1]) * d1y) / den
        tq2 = ((q2[0] - p1[0]) * d1x + (q2[1] - p1[1]) * d1y) / den
        lo, hi = min(tq1, tq2), max(tq1, tq2)
        return max(lo, 0.0) <= min(hi, 1.0)
    t, s = params
    return 0.0 <= t <= 1.0 and 0.0 <= s <= 1.0


def _polygon_is_simple(vertices) -> bool:
    n = len(vertices)
    for i in range(n):
        a1, a2 = vertices[i], vertices[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue  # shared-vertex neighbours
            b1, b2 = vertices[j], vertices[(j + 1) % n]
            if _segments_touch_closed(a1, a2, b1, b2):
                return False
    return True


# ---------- trace and map file I/O ----------

def load_traces(path, timestep: float = DEFAULT_TIMESTEP) -> list[VehicleTrace]:
    """Read trace-CSV rows ``t,vehicle_id,x,y,heading_deg,speed`` into traces.

    Headings are converted to radians and normalized; one trace per distinct
    vehicle id, sorted by id. Lines starting with '#' are skipped.
    """
    rows_by_vehicle: dict[str, list[tuple[int, Pose]]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip() for c in header] != TRACE_HEADER:
            raise TraceFormatError(f"{path}: missing or malformed header (expected {','.join(TRACE_HEADER)})")
        for lineno, row in enumerate(reader, start=2):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                t = float(row[0])
                vid = row[1].strip()
                x, y = float(row[2]), float(row[3])
                heading = math.radians(float(row[4]))
                speed = float(row[5])
            except (ValueError, IndexError) as exc:
                raise TraceFormatError(f"{path}: row {lineno}: {exc}") from exc
            k = round(t / timestep)
            rows_by_vehicle.setdefault(vid, []).append((k, Pose(x, y, heading, speed)))
    traces = []
    for vid in sorted(rows_by_vehicle):
        samples = rows_by_vehicle[vid]
        for (a, _), (b, _) in zip(samples, samples[1:]):
            if b <= a:
                raise TraceFormatError(f"{path}: vehicle {vid}: non-monotone timestamps")
        traces.append(VehicleTrace(vid, tuple(samples), timestep))
    return traces


def save_traces(traces, path) -> None:
    """Write traces in the trace-CSV format, rows ordered by (t, vehicle_id)."""
    rows = []
    for tr in traces:
        for k, pose in tr.samples:
            rows.append((k, tr.vehicle_id, pose, tr.timestep))
    rows.sort(key=lambda r: (r[0], r[1]))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_HEADER)
        for k, vid, pose, ts in rows:
            writer.writerow(
                [repr(k * ts), vid, repr(pose.x), repr(pose.y), repr(math.degrees(pose.heading)), repr(pose.speed)]
            )


def load_map(path) -> ScenarioMap:
    """Read obstacle lines ``kind;height;x1,y1 x2,y2 ...`` into a ScenarioMap."""
    obstacles = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split(";")
            if len(parts) != 3:
                raise MapFormatError(f"{path}: line {lineno}: expected kind;height;vertices")
            try:
                kind = parts[0].strip()
                height = float(parts[1])
                vertices = tuple(
                    (float(tok.split(",")[0]), float(tok.split(",")[1])) for tok in parts[2].split()
                )
            except (ValueError, IndexError) as exc:
                raise MapFormatError(f"{path}: line {lineno}: {exc}") from exc
            obstacles.append(Obstacle(vertices, height, kind))
    return ScenarioMap(tuple(obstacles))


def save_map(smap: ScenarioMap, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for obs in smap.obstacles:
            verts = " ".join(f"{x!r},{y!r}" for x, y in obs.footprint)
            fh.write(f"{obs.kind};{obs.height!r};{verts}\n")


# ---------- link enumeration ----------

def enumerate_link_pairs(traces, t_index: int, max_range: float) -> list[tuple[str, str]]:
    """Unordered id pairs present at t_index within max_range, in lexicographic order."""
    if max_range <= 0:
        raise ValueError(f"max_range must be > 0, got {max_range}")
    present = sorted(
        (tr.vehicle_id, tr.pose_at(t_index)) for tr in traces if tr.pose_at(t_index) is not None
    )
    pairs = []
    for i in range(len(present)):
        for j in range(i + 1, len(present)):
            (va, pa), (vb, pb) = present[i], present[j]
            if math.hypot(pa.x - pb.x, pa.y - pb.y) <= max_range:
                pairs.append((va, vb))
    return pairs


# ---------- synthetic scenario generators ----------

@dataclass(frozen=True)
class SyntheticParams:
    """Knobs for the synthetic scenario generators.

    `vehicles_per_arm` counts vehicles per crossroad arm, per highway
    direction, or in total on a roundabout ring. `max_speed` is m/s and
    defaults per kind (urban 50 km/h, highway 130 km/h).
    """

    extent: float = 200.0
    vehicles_per_arm: int = 2
    max_speed: float | None = None
    n_timesteps: int = 20
    timestep: float = DEFAULT_TIMESTEP
    street_width: float = 12.0
    building_height: float = 10.0
    n_lanes: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.extent <= 0:
            raise ValueError(f"extent must be > 0, got {self.extent}")
        if self.vehicles_per_arm < 0 or self.n_timesteps < 1 or self.n_lanes < 1:
            raise ValueError("vehicle/timestep/lane counts must be positive")
        if self.timestep <= 0 or self.street_width <= 0 or self.building_height <= 0:
            raise ValueError("timestep, street_width and building_height must be > 0")
        if self.max_speed is not None and self.max_speed <= 0:
            raise ValueError(f"max_speed must be > 0, got {self.max_speed}")


def generate_synthetic_scenario(kind: str, params: SyntheticParams = SyntheticParams()):
    """Build (ScenarioMap, traces) for a crossroad, roundabout, or highway archetype."""
    if kind == "crossroad":
        return _crossroad(params)
    if kind == "roundabout":
        return _roundabout(params)
    if kind == "highway":
        return _highway(params)
    raise ValueError(f"unknown scenario kind {kind!r}")


def _linear_trace(vid, start, direction, heading, speed, params) -> VehicleTrace:
    samples = []
    for k in range(params.n_timesteps):
        t = k * params.timestep
        pose = Pose(start[0] + direction[0] * speed * t, start[1] + direction[1] * speed * t, heading, speed)
        samples.append((k, pose))
    return VehicleTrace(vid, tuple(samples), params.timestep)


def _crossroad(params: SyntheticParams):
    w = params.street_width
    e = params.extent
    vmax = params.max_speed if params.max_speed is not None else URBAN_MAX_SPEED
    rng = np.random.default_rng(params.seed)
    half = w / 2.0
    blocks = []
    for sx in (1.0, -1.0):
        for sy in (1.0, -1.0):
            x0, x1 = sorted((sx * half, sx * e))
            y0, y1 = sorted((sy * half, sy * e))
            blocks.append(Obstacle(((x0, y0), (x1, y0), (x1, y1), (x0, y1)), params.building_height))
    smap = ScenarioMap(tuple(blocks))

    lane = w / 4.0
    # (heading, lane position axis, movement direction), right-hand traffic
    arms = [
        (0.0, (lane, None), (0.0, 1.0)),          # northbound on x=+lane
        (math.pi, (-lane, None), (0.0, -1.0)),    # southbound on x=-lane
        (math.pi / 2.0, (None, -lane), (1.0, 0.0)),   # eastbound on y=-lane
        (3.0 * math.pi / 2.0, (None, lane), (-1.0, 0.0)),  # westbound on y=+lane
    ]
    traces = []
    vid = 0
    for heading, (lx, ly), direction in arms:
        for i in range(params.vehicles_per_arm):
            offset = -e + (i + float(rng.uniform(0.1, 0.9))) * (2.0 * e / max(params.vehicles_per_arm, 1))
            start = (lx, offset) if lx is not None else (offset, ly)
            speed = float(rng.uniform(0.5, 1.0)) * vmax
            traces.append(_linear_trace(f"v{vid:03d}", start, direction, heading, speed, params))
            vid += 1
    return smap, traces


def _roundabout(params: SyntheticParams):
    radius = params.extent / 3.0
    vmax = params.max_speed if params.max_speed is not None else URBAN_MAX_SPEED
    rng = np.random.default_rng(params.seed)
    block_d = params.extent * 0.55
    size = params.extent * 0.12
    blocks = []
    for ang in (math.pi / 4, 3 * math.pi / 4, 5 * math.pi / 4, 7 * math.pi / 4):
        cx, cy = block_d * math.cos(ang), block_d * math.sin(ang)
        blocks.append(
            Obstacle(
                ((cx - size, cy - size), (cx + size, cy - size), (cx + size, cy + size), (cx - size, cy + size)),
                params.building_height,
            )
        )
    smap = ScenarioMap(tuple(blocks))

    traces = []
    for i in range(params.vehicles_per_arm):
        a0 = i * TWO_PI / max(params.vehicles_per_arm, 1) + float(rng.uniform(0.0, 0.3))
        speed = float(rng.uniform(0.5, 1.0)) * vmax
        omega = speed / radius  # counterclockwise
        samples = []
        for k in range(params.n_timesteps):
            a = a0 + omega * k * params.timestep
            x, y = radius * math.cos(a), radius * math.sin(a)
            heading = math.atan2(-math.sin(a), math.cos(a)) % TWO_PI  # tangent, clockwise-from-north
            samples.append((k, Pose(x, y, heading, speed)))
        traces.append(VehicleTrace(f"v{i:03d}", tuple(samples), params.timestep))
    return smap, traces


def _highway(params: SyntheticParams):
    vmax = params.max_speed if params.max_speed is not None else HIGHWAY_MAX_SPEED
    rng = np.random.default_rng(params.seed)
    lane_w = 4.0
    traces = []
    vid = 0
    for heading, direction, side in ((math.pi / 2.0, (1.0, 0.0), -1.0), (3.0 * math.pi / 2.0, (-1.0, 0.0), 1.0)):
        for i in range(params.vehicles_per_arm):
            lane = i % params.n_lanes
            y = side * (lane_w / 2.0 + lane * lane_w)
            x0 = -params.extent + (i + float(rng.uniform(0.1, 0.9))) * (2.0 * params.extent / max(params.vehicles_per_arm, 1))
            speed = float(rng.uniform(0.6, 1.0)) * vmax
            traces.append(_linear_trace(f"v{vid:03d}", (x0, y), direction, heading, speed, params))
            vid += 1
    return ScenarioMap(()), traces
