"""Probabilistic codebooks: trained quadrant PDFs, map Hough extraction, Lloyd-Max quantization."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .beamforming import Codebook, uniform_codebook
from .channel import ArrayGeometry
from .scenario import TWO_PI, ScenarioMap


class DegeneratePdfError(ValueError):
    """The angular distribution carries no usable structure (or no mass)."""


class MissingQuadrantError(KeyError):
    """No trained angular PDF exists for the queried position."""


def circular_grid_edges(n_bins: int) -> np.ndarray:
    """Edges of n bins centered on the beam-angle grid k*2pi/n."""
    width = TWO_PI / n_bins
    return np.arange(n_bins + 1) * width - width / 2.0


@dataclass(frozen=True, eq=False)
class AngularPdf:
    """Discrete probability mass over contiguous angle bins (radians).

    Bin edges are ascending and span at most a full circle; masses are
    nonnegative and sum to one.
    """

    bin_edges: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.bin_edges, dtype=float)
        masses = np.asarray(self.masses, dtype=float)
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "masses", masses)
        if edges.ndim != 1 or masses.ndim != 1 or len(edges) != len(masses) + 1 or len(masses) < 1:
            raise ValueError("need n+1 ascending edges for n >= 1 masses")
        if np.any(np.diff(edges) <= 0):
            raise ValueError("bin edges must be strictly ascending")
        if edges[-1] - edges[0] > TWO_PI + 1e-9:
            raise ValueError("bins span more than a full circle")
        if np.any(masses < -1e-12):
            raise ValueError("masses must be nonnegative")
        if abs(masses.sum() - 1.0) > 1e-9:
            raise ValueError(f"masses must sum to 1, got {masses.sum()}")

    @property
    def n_bins(self) -> int:
        return len(self.masses)

    @property
    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    @property
    def bin_width(self) -> float:
        widths = np.diff(self.bin_edges)
        if not np.allclose(widths, widths[0], rtol=0, atol=1e-12):
            raise ValueError("bin grid is not uniform")
        return float(widths[0])

    @classmethod
    def uniform(cls, n_bins: int) -> "AngularPdf":
        return cls(circular_grid_edges(n_bins), np.full(n_bins, 1.0 / n_bins))

    @classmethod
    def from_masses(cls, masses) -> "AngularPdf":
        """Normalize raw nonnegative weights onto the centered [0, 2pi) grid."""
        masses = np.asarray(masses, dtype=float)
        total = masses.sum()
        if total <= 0:
            raise DegeneratePdfError("all masses are zero")
        return cls(circular_grid_edges(len(masses)), masses / total)

    @classmethod
    def from_angles(cls, angles, n_bins: int = 64) -> "AngularPdf":
        """Histogram of angles on the centered [0, 2pi) grid."""
        angles = np.asarray(angles, dtype=float) % TWO_PI
        if angles.size == 0:
            raise DegeneratePdfError("no angles to histogram")
        width = TWO_PI / n_bins
        idx = np.rint(angles / width).astype(int) % n_bins
        counts = np.bincount(idx, minlength=n_bins).astype(float)
        return cls.from_masses(counts)

    def mass_between(self, lo: float, hi: float) -> float:
        """Probability mass on the circular arc [lo, hi), hi - lo <= 2pi."""
        if hi <= lo:
            raise ValueError("need hi > lo")
        total = 0.0
        e0, e1 = self.bin_edges[:-1], self.bin_edges[1:]
        widths = e1 - e0
        for shift in (-TWO_PI, 0.0, TWO_PI):
            a = np.maximum(e0 + shift, lo)
            b = np.minimum(e1 + shift, hi)
            overlap = np.clip(b - a, 0.0, None)
            total += float(np.sum(self.masses * overlap / widths))
        return total

    def rotated(self, delta: float) -> "AngularPdf":
        """Shift all mass by delta, redeposited on a same-size centered circle grid."""
        n = self.n_bins
        width = TWO_PI / n
        out = np.zeros(n)
        centers = (self.bin_centers + delta) % TWO_PI
        idx = np.rint(centers / width).astype(int) % n
        np.add.at(out, idx, self.masses)
        return AngularPdf(circular_grid_edges(n), out / out.sum())


# ---------- trained quadrant PDFs ----------

@dataclass
class QuadrantGrid:
    """Spatial cells, each accumulating a histogram of relative departure angles."""

    origin: tuple[float, float] = (0.0, 0.0)
    cell_size: float = 50.0
    n_bins: int = 64
    cells: dict[tuple[int, int], np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.cell_size <= 0:
            raise ValueError(f"cell_size must be > 0, got {self.cell_size}")
        if self.n_bins < 1:
            raise ValueError(f"n_bins must be >= 1, got {self.n_bins}")

    def cell_index(self, pos: tuple[float, float]) -> tuple[int, int]:
        return (
            int(math.floor((pos[0] - self.origin[0]) / self.cell_size)),
            int(math.floor((pos[1] - self.origin[1]) / self.cell_size)),
        )

    def update(self, pos: tuple[float, float], angle: float) -> None:
        idx = self.cell_index(pos)
        if idx not in self.cells:
            self.cells[idx] = np.zeros(self.n_bins, dtype=np.int64)
        width = TWO_PI / self.n_bins
        b = int(np.rint((angle % TWO_PI) / width)) % self.n_bins
        self.cells[idx][b] += 1

    def observation_count(self, pos: tuple[float, float]) -> int:
        counts = self.cells.get(self.cell_index(pos))
        return int(counts.sum()) if counts is not None else 0

    def pdf_at(self, pos: tuple[float, float]) -> AngularPdf:
        idx = self.cell_index(pos)
        counts = self.cells.get(idx)
        if counts is None or counts.sum() == 0:
            raise MissingQuadrantError(f"no trained PDF for cell {idx}")
        return AngularPdf.from_masses(counts.astype(float))

    def merge(self, other: "QuadrantGrid") -> "QuadrantGrid":
        """Sum per-bin counts with another grid trained on the same spec."""
        if (other.origin, other.cell_size, other.n_bins) != (self.origin, self.cell_size, self.n_bins):
            raise ValueError("grids have different origin/cell_size/bin layout")
        merged = QuadrantGrid(self.origin, self.cell_size, self.n_bins, {k: v.copy() for k, v in self.cells.items()})
        for k, v in other.cells.items():
            if k in merged.cells:
                merged.cells[k] = merged.cells[k] + v
            else:
                merged.cells[k] = v.copy()
        return merged


def train_pcb(
    observations,
    origin: tuple[float, float] = (0.0, 0.0),
    cell_size: float = 50.0,
    bin_width: float = TWO_PI / 64,
) -> QuadrantGrid:
    """Accumulate (position, relative angle) observations into per-cell histograms."""
    n_bins = max(1, round(TWO_PI / bin_width))
    grid = QuadrantGrid(origin, cell_size, n_bins)
    for pos, angle in observations:
        grid.update(pos, angle)
    return grid


def save_quadrant_grid(grid: QuadrantGrid, path) -> None:
    """Persist as CSV `cell_i,cell_j,bin_index,mass,count` with a grid-spec comment."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# origin={grid.origin[0]!r},{grid.origin[1]!r} cell_size={grid.cell_size!r} n_bins={grid.n_bins}\n")
        writer = csv.writer(fh)
        writer.writerow(["cell_i", "cell_j", "bin_index", "mass", "count"])
        for (i, j) in sorted(grid.cells):
            counts = grid.cells[(i, j)]
            total = counts.sum()
            for b in range(grid.n_bins):
                if counts[b] == 0:
                    continue
                writer.writerow([i, j, b, repr(counts[b] / total), int(counts[b])])


def load_quadrant_grid(path) -> QuadrantGrid:
    with open(path, encoding="utf-8") as fh:
        spec_line = fh.readline().strip()
        if not spec_line.startswith("#"):
            raise ValueError(f"{path}: missing grid-spec comment line")
        fields = dict(tok.split("=") for tok in spec_line.lstrip("# ").split())
        ox, oy = (float(v) for v in fields["origin"].split(","))
        grid = QuadrantGrid((ox, oy), float(fields["cell_size"]), int(fields["n_bins"]))
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip() for c in header] != ["cell_i", "cell_j", "bin_index", "mass", "count"]:
            raise ValueError(f"{path}: malformed header")
        for row in reader:
            if not row:
                continue
            i, j, b, count = int(row[0]), int(row[1]), int(row[2]), int(row[4])
            if (i, j) not in grid.cells:
                grid.cells[(i, j)] = np.zeros(grid.n_bins, dtype=np.int64)
            grid.cells[(i, j)][b] += count
    return grid


def pcb_codebook(pdf: AngularPdf, geom: ArrayGeometry, depth: int) -> Codebook:
    """Uniform beam grid reordered by descending PDF mass around each beam.

    The beam-angle set is exactly the uniform codebook's; only the test order
    changes. Ties (to 1e-12) resolve toward ascending angle.
    """
    base = uniform_codebook(depth, geom)
    half = math.pi / depth
    mass = np.round([pdf.mass_between(a - half, a + half) for a in base.angles], 12)
    order = sorted(range(depth), key=lambda k: (-mass[k], base.angles[k]))
    return Codebook(
        tuple(base.angles[k] for k in order),
        tuple(base.beamformers[k] for k in order),
    )


# ---------- raster maps and the Hough pipeline ----------

@dataclass(frozen=True, eq=False)
class RasterImage:
    """Grayscale raster of the environment; row 0 is the northern edge.

    `north_offset` is the map rotation relative to true north (radians),
    carried through to the extracted angular PDF.
    """

    values: np.ndarray
    pixel_size: float = 1.0
    north_offset: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 2:
            raise ValueError("raster values must be a 2-D array")
        object.__setattr__(self, "values", v.astype(np.uint8))
        if self.pixel_size <= 0:
            raise ValueError(f"pixel_size must be > 0, got {self.pixel_size}")

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True, eq=False)
class HoughAccumulator:
    """Vote counts over (rho, theta) line-parameter cells."""

    counts: np.ndarray  # (n_rho, n_theta)
    rho_res: float
    theta_res_deg: float

    @property
    def thetas_deg(self) -> np.ndarray:
        return -90.0 + self.theta_res_deg * np.arange(self.counts.shape[1])

    @property
    def rhos(self) -> np.ndarray:
        max_idx = (self.counts.shape[0] - 1) // 2
        return self.rho_res * (np.arange(self.counts.shape[0]) - max_idx)

    @property
    def total_votes(self) -> int:
        return int(self.counts.sum())


def prewitt_edges(img: RasterImage, threshold: float = 0.5) -> RasterImage:
    """Binary edge raster: 3x3 Prewitt gradient magnitude thresholded at a
    fraction of its maximum. Border pixels stay unset."""
    if img.width < 3 or img.height < 3:
        raise ValueError("image must be at least 3x3 for the Prewitt filter")
    a = img.values.astype(float)
    col_sum = a[:-2, :] + a[1:-1, :] + a[2:, :]  # (h-2, w)
    gx = col_sum[:, 2:] - col_sum[:, :-2]
    row_sum = a[:, :-2] + a[:, 1:-1] + a[:, 2:]  # (h, w-2)
    gy = row_sum[2:, :] - row_sum[:-2, :]
    mag = np.hypot(gx, gy)
    out = np.zeros_like(img.values)
    peak = mag.max()
    if peak > 0:
        interior = (mag >= threshold * peak) & (mag > 0)
        out[1:-1, 1:-1][interior] = 255
    return RasterImage(out, img.pixel_size, img.north_offset)


def hough_transform(edges: RasterImage, theta_res_deg: float = 1.0, rho_res: float = 1.0) -> HoughAccumulator:
    """Vote each set pixel into every theta bin at rho = x cos(theta) + y sin(theta)."""
    n_theta = 180.0 / theta_res_deg
    if abs(n_theta - round(n_theta)) > 1e-9:
        raise ValueError(f"theta_res_deg={theta_res_deg} must divide 180")
    n_theta = int(round(n_theta))
    if rho_res <= 0:
        raise ValueError(f"rho_res must be > 0, got {rho_res}")
    thetas = np.deg2rad(-90.0 + theta_res_deg * np.arange(n_theta))
    ys, xs = np.nonzero(edges.values)
    diag = math.hypot(edges.width - 1, edges.height - 1)
    max_idx = int(math.ceil(diag / rho_res)) if diag > 0 else 1
    counts = np.zeros((2 * max_idx + 1, n_theta), dtype=np.int64)
    for t, theta in enumerate(thetas):
        rho = xs * math.cos(theta) + ys * math.sin(theta)
        idx = np.rint(rho / rho_res).astype(int) + max_idx
        counts[:, t] = np.bincount(idx, minlength=counts.shape[0])
    return HoughAccumulator(counts, float(rho_res), float(theta_res_deg))


def hough_angle_pdf(acc: HoughAccumulator) -> AngularPdf:
    """Per-theta score: column max over rho minus the smallest column max,
    normalized to a PDF over the half circle."""
    if acc.total_votes == 0:
        raise ValueError("accumulator holds no votes")
    col_max = acc.counts.max(axis=0).astype(float)
    scores = col_max - col_max.min()
    if not scores.any():
        raise DegeneratePdfError("all Hough column maxima are equal; angular PDF is degenerate")
    masses = scores / scores.sum()
    centers = np.deg2rad(acc.thetas_deg)
    width = math.radians(acc.theta_res_deg)
    edges = np.concatenate([centers - width / 2.0, [centers[-1] + width / 2.0]])
    return AngularPdf(edges, masses)


def extend_and_rotate(pdf: AngularPdf, north_offset: float = 0.0) -> AngularPdf:
    """Mirror a half-circle line-orientation PDF onto [0, 2pi) and rotate it to north.

    Each bin's mass splits evenly between theta and theta + pi, then all
    angles shift by north_offset and land on the nearest full-circle bin.
    """
    width = pdf.bin_width
    n_out = int(round(TWO_PI / width))
    out = np.zeros(n_out)
    for center, mass in zip(pdf.bin_centers, pdf.masses):
        for ang in (center, center + math.pi):
            a = (ang + north_offset) % TWO_PI
            idx = int(np.rint(a / width)) % n_out
            out[idx] += mass / 2.0
    return AngularPdf(circular_grid_edges(n_out), out / out.sum())


def rasterize_map(smap: ScenarioMap, pixel_size: float = 1.0, padding: float = 5.0,
                  north_offset: float = 0.0, background: int = 255, fill: int = 40) -> RasterImage:
    """Draw obstacle footprints as filled dark shapes on a light raster.

    Row 0 corresponds to the northern (max y) edge so that a street running
    north-south appears as a vertical line of pixels.
    """
    if pixel_size <= 0:
        raise ValueError(f"pixel_size must be > 0, got {pixel_size}")
    bounds = smap.bounds
    if bounds is None:
        raise ValueError("cannot rasterize an empty map")
    xmin, ymin, xmax, ymax = bounds
    xmin -= padding
    ymin -= padding
    xmax += padding
    ymax += padding
    width = max(3, int(math.ceil((xmax - xmin) / pixel_size)))
    height = max(3, int(math.ceil((ymax - ymin) / pixel_size)))
    cols = xmin + (np.arange(width) + 0.5) * pixel_size
    rows = ymax - (np.arange(height) + 0.5) * pixel_size
    X, Y = np.meshgrid(cols, rows)
    img = np.full((height, width), background, dtype=np.uint8)
    for obs in smap.obstacles:
        img[_polygon_mask(obs.footprint, X, Y)] = fill
    return RasterImage(img, pixel_size, north_offset)


def _polygon_mask(vertices, X, Y):
    inside = np.zeros(X.shape, dtype=bool)
    n = len(vertices)
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        if y1 == y2:
            continue
        crosses = (y1 > Y) != (y2 > Y)
        x_at = (x2 - x1) * (Y - y1) / (y2 - y1) + x1
        inside ^= crosses & (X < x_at)
    return inside


def save_pgm(img: RasterImage, path, sidecar=None) -> None:
    """Write a binary P5 graymap, optionally with a pixel-size/rotation sidecar."""
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.width} {img.height}\n255\n".encode("ascii"))
        fh.write(img.values.tobytes())
    if sidecar is not None:
        with open(sidecar, "w", encoding="utf-8") as fh:
            fh.write(f"pixel_size = {img.pixel_size!r}\n")
            fh.write(f"north_offset_deg = {math.degrees(img.north_offset)!r}\n")


def load_pgm(path, sidecar=None) -> RasterImage:
    with open(path, "rb") as fh:
        data = fh.read()
    tokens = []
    i = 0
    while len(tokens) < 4:
        while i < len(data) and data[i : i + 1].isspace():
            i += 1
        if data[i : i + 1] == b"#":
            while i < len(data) and data[i : i + 1] != b"\n":
                i += 1
            continue
        start = i
        while i < len(data) and not data[i : i + 1].isspace():
            i += 1
        tokens.append(data[start:i])
    if tokens[0] != b"P5":
        raise ValueError(f"{path}: not a binary P5 graymap")
    width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    if maxval != 255:
        raise ValueError(f"{path}: only maxval 255 supported")
    i += 1  # single whitespace after maxval
    pixels = np.frombuffer(data[i : i + width * height], dtype=np.uint8)
    if pixels.size != width * height:
        raise ValueError(f"{path}: truncated pixel data")
    pixel_size, north_offset = 1.0, 0.0
    if sidecar is not None:
        pixel_size, north_offset = _read_sidecar(sidecar)
    return RasterImage(pixels.reshape(height, width).copy(), pixel_size, north_offset)


def _read_sidecar(path) -> tuple[float, float]:
    pixel_size, north_offset_deg = 1.0, 0.0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            stripped = line.strip()
            if not stripped or stripped.startswith("#") or "=" not in stripped:
                continue
            key, value = (tok.strip() for tok in stripped.split("=", 1))
            if key == "pixel_size":
                pixel_size = float(value)
            elif key == "north_offset_deg":
                north_offset_deg = float(value)
    return pixel_size, math.radians(north_offset_deg)


def save_angular_pdf(pdf: AngularPdf, path) -> None:
    """Persist a full-circle PDF as CSV rows `angle_deg,mass` (bin centers)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["angle_deg", "mass"])
        for center, mass in zip(pdf.bin_centers, pdf.masses):
            writer.writerow([repr(math.degrees(center % TWO_PI)), repr(float(mass))])


def load_angular_pdf(path) -> AngularPdf:
    """Read an `angle_deg,mass` CSV back onto the centered circle grid."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip() for c in header] != ["angle_deg", "mass"]:
            raise ValueError(f"{path}: expected header angle_deg,mass")
        for row in reader:
            if row:
                rows.append((float(row[0]), float(row[1])))
    if not rows:
        raise DegeneratePdfError(f"{path}: empty PDF file")
    n = len(rows)
    width_deg = 360.0 / n
    out = np.zeros(n)
    for angle_deg, mass in rows:
        out[int(np.rint(angle_deg / width_deg)) % n] += mass
    return AngularPdf.from_masses(out)


# ---------- Lloyd-Max quantization ----------

_CHART_SHIFTS = (-TWO_PI, 0.0, TWO_PI, 2.0 * TWO_PI)


def _voronoi_arcs(codebook: np.ndarray):
    """Start angle and length of each codeword's circular nearest-neighbor arc.

    `codebook` must be sorted ascending in [0, 2pi); arc j contains codeword j.
    """
    k = len(codebook)
    if k == 1:
        return np.array([codebook[0] - math.pi]), np.array([TWO_PI])
    mids = 0.5 * (codebook[:-1] + codebook[1:])
    wrap_mid = 0.5 * (codebook[-1] + codebook[0] + TWO_PI)
    starts = np.concatenate([[wrap_mid - TWO_PI], mids])
    lengths = np.diff(np.concatenate([starts, [wrap_mid]]))
    return starts, lengths


def _arc_sweep(pdf: AngularPdf, codebook: np.ndarray):
    """One Lloyd pass over the circular Voronoi arcs of a sorted codebook.

    The PDF is treated as a piecewise-constant density (each bin a uniform
    slab). Returns (updated codewords, per-arc mass, exact distortion of the
    INPUT codebook under its own arcs). Empty arcs keep their codeword.
    """
    seg_lo = pdf.bin_edges[:-1]
    seg_hi = pdf.bin_edges[1:]
    density = pdf.masses / (seg_hi - seg_lo)
    starts, lengths = _voronoi_arcs(codebook)
    updated = codebook.copy()
    cell_mass = np.zeros(len(codebook))
    distortion = 0.0
    for j, (s, arc_len) in enumerate(zip(starts, lengths)):
        c_off = codebook[j] - s  # codeword position inside its arc chart
        mass = moment = second = 0.0
        for shift in _CHART_SHIFTS:
            lo = np.maximum(seg_lo + shift - s, 0.0)
            hi = np.minimum(seg_hi + shift - s, arc_len)
            length = np.clip(hi - lo, 0.0, None)
            mid = 0.5 * (lo + hi)
            piece = density * length
            mass += piece.sum()
            moment += (piece * mid).sum()
            second += (piece * ((mid - c_off) ** 2 + length**2 / 12.0)).sum()
        cell_mass[j] = mass
        if mass > 0.0:
            updated[j] = (s + moment / mass) % TWO_PI
        distortion += second
    return updated, cell_mass, float(distortion)


def lloyd_max_quantize(
    pdf: AngularPdf,
    depth: int,
    tolerance: float = 1e-6,
    max_iter: int = 500,
) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """Minimum-MSE quantization of the angular PDF on the circle.

    Codewords start on the uniform beam grid and alternate circular
    nearest-neighbor (Voronoi arc) partitions with conditional-mean updates;
    each full iteration cannot increase the distortion, so the result never
    quantizes worse than the uniform grid it starts from. Stops once the
    distortion change drops below `tolerance`. Returns (angles, cell masses,
    per-iteration distortions) with angles ordered by descending cell mass.
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    n_support = int(np.count_nonzero(pdf.masses))
    if n_support == 0:
        raise DegeneratePdfError("PDF carries no mass")
    if n_support < depth:
        warnings.warn(f"only {n_support} bins carry mass; reducing depth from {depth}")
        depth = n_support

    cb = np.sort(np.arange(depth) * TWO_PI / depth)
    distortions: list[float] = []
    prev = None
    for _ in range(max_iter):
        updated, _, _ = _arc_sweep(pdf, cb)
        cb = np.sort(updated % TWO_PI)
        _, cell_mass, d = _arc_sweep(pdf, cb)
        distortions.append(d)
        if prev is not None and prev - d < tolerance:
            break
        prev = d

    _, cell_mass, _ = _arc_sweep(pdf, cb)
    keys = sorted(range(depth), key=lambda j: (-np.round(cell_mass[j], 12), cb[j]))
    return cb[keys], cell_mass[keys], distortions


def lloyd_max(
    pdf: AngularPdf,
    depth: int,
    tolerance: float = 1e-6,
    max_iter: int = 500,
    geom: ArrayGeometry | None = None,
) -> Codebook:
    """Lloyd-Max quantized codebook, test order sorted by descending cell mass."""
    from .beamforming import beamformer_for_angle

    geom = geom if geom is not None else ArrayGeometry()
    angles, _, _ = lloyd_max_quantize(pdf, depth, tolerance, max_iter)
    return Codebook(tuple(angles), tuple(beamformer_for_angle(geom, a) for a in angles))


def quantization_mse(pdf: AngularPdf, angles) -> float:
    """Mean squared circular-angle error snapping pdf mass to the nearest angle.

    Uses the same piecewise-constant density semantics as the Lloyd iteration.
    """
    angles = np.sort(np.asarray(angles, dtype=float) % TWO_PI)
    _, _, distortion = _arc_sweep(pdf, angles)
    return distortion
