"""Desk-scale mmWave V2V initial-access simulator.

Synthesizes geometric MIMO channels between moving vehicles, builds beam
codebooks (uniform, trained probabilistic, map-derived probabilistic,
Lloyd-Max quantized), races beam-selection strategies, and measures
trials-to-alignment and quantization losses.
"""

from .beamforming import (
    Beamformer,
    Codebook,
    LinkBudget,
    beamformer_for_angle,
    best_rx_beam,
    codebook_depth,
    gain_to_snr_db,
    snr_db,
    spectral_efficiency,
    svd_oracle,
    uniform_codebook,
)
from .channel import (
    ArrayGeometry,
    ChannelMatrix,
    PathComponent,
    PropagationConfig,
    assemble_channel,
    element_response,
    enumerate_paths,
    los_blocked,
    pathloss_los,
    steering_vector,
)
from .codebook_design import (
    AngularPdf,
    DegeneratePdfError,
    HoughAccumulator,
    MissingQuadrantError,
    QuadrantGrid,
    RasterImage,
    extend_and_rotate,
    hough_angle_pdf,
    hough_transform,
    lloyd_max,
    lloyd_max_quantize,
    pcb_codebook,
    prewitt_edges,
    quantization_mse,
    rasterize_map,
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
from .metrics import Ecdf, LinkSample, LossReport, ecdf, quantization_sweep, se_loss_bps_hz, snr_loss_db
from .scenario import (
    Obstacle,
    Pose,
    PositionNoiseModel,
    ScenarioMap,
    SyntheticParams,
    VehicleTrace,
    enumerate_link_pairs,
    generate_synthetic_scenario,
    load_map,
    load_traces,
    relative_bearing,
    save_map,
    save_traces,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
