"""Shared builders for the test suite."""

import numpy as np

from v2vbeam import (
    ArrayGeometry,
    ChannelMatrix,
    LinkBudget,
    LinkContext,
    PathComponent,
    Pose,
    assemble_channel,
    uniform_codebook,
)

GEOM = ArrayGeometry()
BUDGET = LinkBudget()
CODEBOOK64 = uniform_codebook(64, GEOM)


def rank1_channel(aod, aoa, amplitude=1.0, geom=GEOM, length=10.0) -> ChannelMatrix:
    path = PathComponent(aod, 0.0, aoa, 0.0, amplitude, "los", length)
    return assemble_channel([path], geom)


def multipath_channel(rng, n_paths, geom=GEOM) -> ChannelMatrix:
    paths = []
    for _ in range(n_paths):
        amp = rng.normal() + 1j * rng.normal()
        if amp == 0:
            amp = 1.0
        paths.append(
            PathComponent(
                rng.uniform(0, 2 * np.pi), 0.0, rng.uniform(0, 2 * np.pi), 0.0,
                complex(amp), "reflected", float(rng.uniform(5, 200)),
            )
        )
    return assemble_channel(paths, geom)


def make_ctx(
    channel,
    tx_pose=None,
    rx_pose=None,
    noisy_tx=None,
    noisy_rx=None,
    geom=GEOM,
    codebook=CODEBOOK64,
) -> LinkContext:
    tx_pose = tx_pose if tx_pose is not None else Pose(0.0, 0.0, 0.0)
    rx_pose = rx_pose if rx_pose is not None else Pose(0.0, 50.0, 0.0)
    return LinkContext(
        channel=channel,
        tx_codebook=codebook,
        rx_codebook=codebook,
        geom=geom,
        budget=BUDGET,
        tx_pose=tx_pose,
        rx_pose=rx_pose,
        noisy_tx_pos=noisy_tx if noisy_tx is not None else tx_pose.position,
        noisy_rx_pos=noisy_rx if noisy_rx is not None else rx_pose.position,
    )


def ctx_for_bearing(bearing, amplitude=1e-3, distance=50.0, noisy_bearing=None, codebook=CODEBOOK64):
    """Rank-1 LoS link whose departure bearing (tx heading north) is `bearing`.

    `noisy_bearing` optionally fakes the position-derived start direction.
    """
    tx = Pose(0.0, 0.0, 0.0)
    rx_xy = (distance * np.sin(bearing), distance * np.cos(bearing))
    rx = Pose(rx_xy[0], rx_xy[1], 0.0)
    H = rank1_channel(bearing, 0.0, amplitude, length=distance)
    if noisy_bearing is None:
        noisy_rx = rx_xy
    else:
        noisy_rx = (distance * np.sin(noisy_bearing), distance * np.cos(noisy_bearing))
    return make_ctx(H, tx_pose=tx, rx_pose=rx, noisy_tx=(0.0, 0.0), noisy_rx=noisy_rx, codebook=codebook)
