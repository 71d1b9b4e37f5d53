"""Campaign CLI: scenario synthesis, PCB training, map extraction, strategy races, metrics."""

from __future__ import annotations

import argparse
import configparser
import csv
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .beamforming import LinkBudget, uniform_codebook
from .channel import (
    ArrayGeometry,
    PropagationConfig,
    assemble_channel,
    enumerate_paths,
    los_blocked,
    wavelength_for,
)
from .codebook_design import (
    DegeneratePdfError,
    MissingQuadrantError,
    extend_and_rotate,
    hough_angle_pdf,
    hough_transform,
    load_angular_pdf,
    load_pgm,
    load_quadrant_grid,
    prewitt_edges,
    rasterize_map,
    save_angular_pdf,
    save_pgm,
    save_quadrant_grid,
    train_pcb,
)
from .ia import (
    IAResult,
    LinkContext,
    SuccessRule,
    run_exhaustive,
    run_gps_jump,
    run_gps_lms,
    run_pcb,
    trials_to_latency,
)
from .metrics import LinkSample, ecdf, quantization_sweep
from .scenario import (
    PositionNoiseModel,
    SyntheticParams,
    enumerate_link_pairs,
    generate_synthetic_scenario,
    load_map,
    load_traces,
    save_map,
    save_traces,
)

STRATEGY_NAMES = ("exhaustive", "gps_jump", "gps_lms", "pcb_trained", "pcb_map")

IA_RESULT_HEADER = ["t", "tx_id", "rx_id", "strategy", "trials", "success", "final_snr_db", "latency_ms"]


class ConfigError(ValueError):
    """The campaign configuration is missing or inconsistent."""


@dataclass
class CampaignConfig:
    """Flat campaign configuration; serialized as an INI file with sections."""

    # campaign
    seed: int = 0
    out_dir: str = "out"
    max_range_m: float = 200.0
    timestep_s: float = 0.1
    # scenario
    source: str = "synthetic"
    kind: str = "crossroad"
    extent_m: float = 200.0
    vehicles_per_arm: int = 2
    max_speed_kmh: float = 0.0  # 0 means per-kind default
    n_timesteps: int = 20
    street_width_m: float = 12.0
    sigma_p_m: float = 0.0
    traces_file: str = ""
    map_file: str = ""
    # propagation
    carrier_freq_ghz: float = 28.0
    reflection_loss_db: float = 6.0
    include_reflections: bool = True
    require_los: bool = True
    antenna_height_m: float = 1.6
    # array
    n_rings: int = 4
    n_per_ring: int = 16
    # budget
    eirp_dbm: float = 43.0
    noise_dbm: float = -85.5
    bandwidth_mhz: float = 400.0
    # ia
    strategies: str = "exhaustive,gps_jump"
    n_beams: int = 64
    success_rule: str = "argmax_equivalence"
    gamma_th_db: float = 0.0
    lms_tolerance: float = 0.5
    lms_max_trials: int = 64
    pcb_grid_file: str = ""
    pcb_pdf_file: str = ""
    # pcb training
    cell_size_m: float = 50.0
    bin_width_deg: float = 5.625

    _SECTIONS = {
        "campaign": ("seed", "out_dir", "max_range_m", "timestep_s"),
        "scenario": (
            "source", "kind", "extent_m", "vehicles_per_arm", "max_speed_kmh",
            "n_timesteps", "street_width_m", "sigma_p_m", "traces_file", "map_file",
        ),
        "propagation": (
            "carrier_freq_ghz", "reflection_loss_db", "include_reflections",
            "require_los", "antenna_height_m",
        ),
        "array": ("n_rings", "n_per_ring"),
        "budget": ("eirp_dbm", "noise_dbm", "bandwidth_mhz"),
        "ia": (
            "strategies", "n_beams", "success_rule", "gamma_th_db",
            "lms_tolerance", "lms_max_trials", "pcb_grid_file", "pcb_pdf_file",
        ),
        "pcb": ("cell_size_m", "bin_width_deg"),
    }

    @classmethod
    def from_file(cls, path) -> "CampaignConfig":
        parser = configparser.ConfigParser()
        read = parser.read(path)
        if not read:
            raise ConfigError(f"cannot read config file {path}")
        types = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for section, keys in cls._SECTIONS.items():
            if not parser.has_section(section):
                continue
            for key in keys:
                if not parser.has_option(section, key):
                    continue
                raw = parser.get(section, key)
                kind = types[key]
                if kind == "int":
                    kwargs[key] = parser.getint(section, key)
                elif kind == "float":
                    kwargs[key] = parser.getfloat(section, key)
                elif kind == "bool":
                    kwargs[key] = parser.getboolean(section, key)
                else:
                    kwargs[key] = raw.strip()
        if "seed" not in kwargs:
            raise ConfigError(f"{path}: [campaign] seed is mandatory")
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    def to_file(self, path) -> None:
        parser = configparser.ConfigParser()
        for section, keys in self._SECTIONS.items():
            parser.add_section(section)
            for key in keys:
                value = getattr(self, key)
                parser.set(section, key, repr(value) if isinstance(value, float) else str(value))
        with open(path, "w", encoding="utf-8") as fh:
            parser.write(fh)

    def validate(self) -> None:
        if self.source not in ("synthetic", "files"):
            raise ConfigError(f"unknown scenario source {self.source!r}")
        if self.source == "files":
            if not self.traces_file:
                raise ConfigError("scenario source 'files' needs traces_file")
            if not Path(self.traces_file).exists():
                raise ConfigError(f"traces_file {self.traces_file} does not exist")
            if self.map_file and not Path(self.map_file).exists():
                raise ConfigError(f"map_file {self.map_file} does not exist")
        for name in self.strategy_list():
            if name not in STRATEGY_NAMES:
                raise ConfigError(f"unknown strategy {name!r}")
        if self.success_rule not in ("argmax_equivalence", "snr_threshold"):
            raise ConfigError(f"unknown success rule {self.success_rule!r}")

    def strategy_list(self) -> list[str]:
        return [tok.strip() for tok in self.strategies.split(",") if tok.strip()]


# ---------- campaign assembly ----------

def _build_world(cfg: CampaignConfig):
    if cfg.source == "files":
        traces = load_traces(cfg.traces_file, timestep=cfg.timestep_s)
        smap = load_map(cfg.map_file) if cfg.map_file else None
        if smap is None:
            from .scenario import ScenarioMap

            smap = ScenarioMap(())
        return smap, traces
    params = SyntheticParams(
        extent=cfg.extent_m,
        vehicles_per_arm=cfg.vehicles_per_arm,
        max_speed=(cfg.max_speed_kmh / 3.6) if cfg.max_speed_kmh > 0 else None,
        n_timesteps=cfg.n_timesteps,
        timestep=cfg.timestep_s,
        street_width=cfg.street_width_m,
        seed=cfg.seed,
    )
    return generate_synthetic_scenario(cfg.kind, params)


def _campaign_pieces(cfg: CampaignConfig):
    smap, traces = _build_world(cfg)
    geom = ArrayGeometry(
        n_rings=cfg.n_rings,
        n_per_ring=cfg.n_per_ring,
        wavelength=wavelength_for(cfg.carrier_freq_ghz),
    )
    budget = LinkBudget(cfg.eirp_dbm, cfg.noise_dbm, cfg.bandwidth_mhz)
    prop = PropagationConfig(
        carrier_freq_ghz=cfg.carrier_freq_ghz,
        reflection_loss_db=cfg.reflection_loss_db,
        include_reflections=cfg.include_reflections,
        antenna_height=cfg.antenna_height_m,
    )
    noise = PositionNoiseModel(cfg.sigma_p_m, seed=cfg.seed)
    return smap, traces, geom, budget, prop, noise


@dataclass(frozen=True, eq=False)
class LinkRecord:
    """One admitted (timestep, pair) link with its prepared context."""

    t_index: int
    tx_id: str
    rx_id: str
    ctx: LinkContext


def _campaign_links(cfg: CampaignConfig):
    """Admitted links in deterministic (t, tx, rx) order, one channel each."""
    smap, traces, geom, budget, prop, noise = _campaign_pieces(cfg)
    by_id = {tr.vehicle_id: tr for tr in traces}
    tx_cb = uniform_codebook(cfg.n_beams, geom)
    rx_cb = tx_cb
    all_t = sorted({k for tr in traces for k in tr.timestep_indices})
    records = []
    for t in all_t:
        for a, b in enumerate_link_pairs(traces, t, cfg.max_range_m):
            tx_pose = by_id[a].pose_at(t)
            rx_pose = by_id[b].pose_at(t)
            if tx_pose.position == rx_pose.position:
                continue
            if cfg.require_los and los_blocked(smap, tx_pose.position, rx_pose.position, prop.antenna_height):
                continue
            paths = enumerate_paths(smap, tx_pose, rx_pose, prop)
            if not paths:
                continue
            ctx = LinkContext(
                channel=assemble_channel(paths, geom),
                tx_codebook=tx_cb,
                rx_codebook=rx_cb,
                geom=geom,
                budget=budget,
                tx_pose=tx_pose,
                rx_pose=rx_pose,
                noisy_tx_pos=noise.measured(a, t, tx_pose.position),
                noisy_rx_pos=noise.measured(b, t, rx_pose.position),
            )
            records.append(LinkRecord(t, a, b, ctx))
    return records, geom, budget


# ---------- subcommands ----------

def _fmt(x: float) -> str:
    return f"{x:.6f}"


def cmd_simulate(cfg: CampaignConfig, out_dir, threads: int = 1) -> int:
    """Race the configured strategies on identical channel realizations per link."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    strategies = cfg.strategy_list()
    rule = SuccessRule(cfg.success_rule, cfg.gamma_th_db)

    grid = None
    map_pdf = None
    if "pcb_trained" in strategies:
        if not cfg.pcb_grid_file:
            raise ConfigError("strategy pcb_trained needs pcb_grid_file")
        grid = load_quadrant_grid(cfg.pcb_grid_file)
    if "pcb_map" in strategies:
        if not cfg.pcb_pdf_file:
            raise ConfigError("strategy pcb_map needs pcb_pdf_file")
        map_pdf = load_angular_pdf(cfg.pcb_pdf_file)

    records, _, _ = _campaign_links(cfg)

    def run_one(record: LinkRecord) -> dict[str, IAResult]:
        results = {}
        for name in strategies:
            if name == "exhaustive":
                results[name] = run_exhaustive(record.ctx, rule)
            elif name == "gps_jump":
                results[name] = run_gps_jump(record.ctx, rule)
            elif name == "gps_lms":
                results[name] = run_gps_lms(
                    record.ctx, tolerance=cfg.lms_tolerance, max_trials=cfg.lms_max_trials
                )
            elif name == "pcb_trained":
                try:
                    results[name] = run_pcb(record.ctx, grid, rule)
                except MissingQuadrantError:
                    print(
                        f"warning: no trained PDF at t={record.t_index} "
                        f"({record.tx_id}->{record.rx_id}); falling back to uniform order",
                        file=sys.stderr,
                    )
                    results[name] = run_exhaustive(record.ctx, rule)
            elif name == "pcb_map":
                results[name] = run_pcb(record.ctx, map_pdf, rule)
        return results

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            all_results = list(pool.map(run_one, records))
    else:
        all_results = [run_one(r) for r in records]

    with open(out / "ia_results.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(IA_RESULT_HEADER)
        for record, results in zip(records, all_results):
            t = record.t_index * cfg.timestep_s
            for name in strategies:
                r = results[name]
                writer.writerow(
                    [
                        _fmt(t), record.tx_id, record.rx_id, name, r.trials,
                        int(r.success), _fmt(r.final_snr_db), _fmt(trials_to_latency(r.trials)),
                    ]
                )

    for name in strategies:
        trials = [res[name].trials for res in all_results if res[name].success]
        with open(out / f"ecdf_{name}.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["trials", "cum_prob"])
            if trials:
                curve = ecdf(trials)
                for v, p in zip(curve.values, curve.probs):
                    writer.writerow([int(v), _fmt(p)])

    with open(out / "summary.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["strategy", "n_links", "n_success", "failure_fraction", "mean_trials_success"])
        for name in strategies:
            n = len(all_results)
            wins = [res[name].trials for res in all_results if res[name].success]
            fail = (n - len(wins)) / n if n else 0.0
            mean_trials = sum(wins) / len(wins) if wins else float("nan")
            writer.writerow([name, n, len(wins), _fmt(fail), _fmt(mean_trials)])

    if not records:
        print("warning: no admitted link pairs; results are empty", file=sys.stderr)
    return 0


def cmd_train_pcb(cfg: CampaignConfig, out_path) -> int:
    """Record the argmax beam angle per admitted link and persist the quadrant grid."""
    records, _, _ = _campaign_links(cfg)
    tx_cb = None
    observations = []
    for record in records:
        ctx = record.ctx
        tx_cb = ctx.tx_codebook
        gains = np.abs(
            ctx.rx_codebook.weight_matrix.conj().T @ ctx.channel.entries @ tx_cb.weight_matrix
        )
        best_tx = int(gains.max(axis=0).argmax())
        observations.append((ctx.noisy_tx_pos, tx_cb.angles[best_tx]))
    grid = train_pcb(
        observations,
        origin=(0.0, 0.0),
        cell_size=cfg.cell_size_m,
        bin_width=math.radians(cfg.bin_width_deg),
    )
    save_quadrant_grid(grid, out_path)
    if not observations:
        print("warning: no successful links; trained grid is empty", file=sys.stderr)
    return 0


def cmd_map_pcb(
    raster_path,
    out_path,
    sidecar=None,
    prewitt_threshold: float = 0.5,
    theta_res_deg: float = 1.0,
    rho_res: float = 1.0,
) -> int:
    """Raster -> Prewitt edges -> Hough -> angular PDF -> full-circle PDF file."""
    img = load_pgm(raster_path, sidecar=sidecar)
    edges = prewitt_edges(img, threshold=prewitt_threshold)
    acc = hough_transform(edges, theta_res_deg=theta_res_deg, rho_res=rho_res)
    pdf = extend_and_rotate(hough_angle_pdf(acc), north_offset=img.north_offset)
    save_angular_pdf(pdf, out_path)
    return 0


def cmd_quantize(cfg: CampaignConfig, out_path, levels_deg, quantizers, pdf_path=None) -> int:
    """Run the quantization-loss sweep over the campaign and write loss_report.csv."""
    records, geom, budget = _campaign_links(cfg)
    links = []
    for record in records:
        paths = record.ctx.channel.paths
        direct = next((p for p in paths if p.kind == "los"), None)
        if direct is None:
            direct = max(paths, key=lambda p: abs(p.amplitude))
        links.append(
            LinkSample(record.ctx.channel, direct.aod_az, direct.aoa_az, record.t_index, record.tx_id, record.rx_id)
        )
    pdf = load_angular_pdf(pdf_path) if pdf_path else None
    reports = quantization_sweep(
        links,
        levels_deg=levels_deg,
        quantizers=quantizers,
        geom=geom,
        budget=budget,
        gamma_th_db=cfg.gamma_th_db,
        pdf=pdf,
    )
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["level_deg", "quantizer", "snr_loss_db", "se_loss_bps_hz", "n_links"])
        for r in reports:
            writer.writerow([_fmt(r.quantization_level_deg), r.quantizer, _fmt(r.snr_loss_db), _fmt(r.se_loss_bps_hz), r.n_links])
    return 0


def cmd_synth(cfg: CampaignConfig, traces_path, map_path, raster_path=None, pixel_size: float = 1.0) -> int:
    """Generate the configured synthetic scenario and write its trace/map files."""
    smap, traces = _build_world(cfg)
    save_traces(traces, traces_path)
    save_map(smap, map_path)
    if raster_path is not None:
        img = rasterize_map(smap, pixel_size=pixel_size)
        save_pgm(img, raster_path, sidecar=str(raster_path) + ".txt")
    return 0


# ---------- argument parsing ----------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="v2vbeam", description=__doc__)
    parser.add_argument("--config", help="campaign INI file")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--out", help="override the output directory/file")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for link fan-out")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("simulate", help="run the configured IA strategy race")

    p_train = sub.add_parser("train-pcb", help="train the quadrant angular PDFs from the campaign")
    p_train.add_argument("--grid-out", default="trained_grid.csv")

    p_map = sub.add_parser("map-pcb", help="extract an angular PDF from a raster map")
    p_map.add_argument("--raster", required=True)
    p_map.add_argument("--sidecar", default=None)
    p_map.add_argument("--pdf-out", default="map_pdf.csv")
    p_map.add_argument("--prewitt-threshold", type=float, default=0.5)
    p_map.add_argument("--theta-res-deg", type=float, default=1.0)
    p_map.add_argument("--rho-res", type=float, default=1.0)

    p_quant = sub.add_parser("quantize", help="quantization loss sweep against the SVD oracle")
    p_quant.add_argument("--levels", default="0,5,10,15,20", help="comma list of degrees; 0 = continuous")
    p_quant.add_argument("--quantizers", default="uniform,lloyd")
    p_quant.add_argument("--pdf", default=None, help="angular PDF CSV for the Lloyd design")
    p_quant.add_argument("--report-out", default="loss_report.csv")

    p_synth = sub.add_parser("synth", help="write the synthetic scenario to trace/map files")
    p_synth.add_argument("--traces-out", default="traces.csv")
    p_synth.add_argument("--map-out", default="map.txt")
    p_synth.add_argument("--raster-out", default=None)
    p_synth.add_argument("--pixel-size", type=float, default=1.0)

    return parser


def _load_config(args) -> CampaignConfig:
    if not args.config:
        raise ConfigError("--config is required for this subcommand")
    cfg = CampaignConfig.from_file(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            cfg = _load_config(args)
            return cmd_simulate(cfg, args.out or cfg.out_dir, threads=args.threads)
        if args.command == "train-pcb":
            cfg = _load_config(args)
            return cmd_train_pcb(cfg, args.out or args.grid_out)
        if args.command == "map-pcb":
            return cmd_map_pcb(
                args.raster,
                args.out or args.pdf_out,
                sidecar=args.sidecar,
                prewitt_threshold=args.prewitt_threshold,
                theta_res_deg=args.theta_res_deg,
                rho_res=args.rho_res,
            )
        if args.command == "quantize":
            cfg = _load_config(args)
            levels = [float(tok) for tok in args.levels.split(",") if tok.strip()]
            quantizers = [tok.strip() for tok in args.quantizers.split(",") if tok.strip()]
            return cmd_quantize(cfg, args.out or args.report_out, levels, quantizers, pdf_path=args.pdf)
        if args.command == "synth":
            cfg = _load_config(args)
            return cmd_synth(
                cfg,
                args.traces_out,
                args.map_out,
                raster_path=args.raster_out,
                pixel_size=args.pixel_size,
            )
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DegeneratePdfError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
