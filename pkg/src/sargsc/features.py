"""Sliding-window texture features over an intensity channel.

Every output pixel summarizes the window centered on it: sample mean,
fitted heavy-tailed parameters, entropy of the fitted law (pipeline
orientation, see information module), Hellinger distance to the
equal-mean pure-speckle Gamma law, and the complexity product.  Windows
are independent, so any partition of the output rows can run in
parallel without changing a single byte of the result.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._kernels import CODE_FAILED, impl
from .errors import DataError
from .estimation import SolverConfig
from .specfun import QuadratureConfig

__all__ = [
    "CHANNEL_IDS",
    "IntensityChannel",
    "WindowSpec",
    "FeatureMaps",
    "extract_features",
    "vector_gsc",
]

CHANNEL_IDS = ("HH", "HV", "VV")


@dataclass(frozen=True)
class IntensityChannel:
    """One polarization channel of nonnegative multilook intensities."""

    values: np.ndarray
    channel_id: str = "HH"
    looks: float = 4.0

    def __post_init__(self):
        arr = np.ascontiguousarray(self.values, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise DataError("channel values must form a nonempty 2-D grid")
        if not np.all(np.isfinite(arr)):
            raise DataError("channel values must be finite")
        if np.any(arr < 0.0):
            raise DataError("channel values must be nonnegative")
        object.__setattr__(self, "values", arr)
        if self.channel_id not in CHANNEL_IDS:
            raise DataError(f"channel_id must be one of {CHANNEL_IDS}")
        if not (math.isfinite(self.looks) and self.looks > 0.0):
            raise DataError("looks must be finite and positive")

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class WindowSpec:
    """Square sliding window: odd side, boundary policy, stride.

    reflect mirrors the borders so the output grid matches the input;
    valid keeps only fully interior windows and shrinks the output by
    side - 1 per axis.
    """

    side: int = 7
    boundary: str = "reflect"
    stride: int = 1

    def __post_init__(self):
        if self.side < 3 or self.side % 2 == 0:
            raise ValueError("window side must be odd and at least 3")
        if self.boundary not in ("reflect", "valid"):
            raise ValueError("boundary must be 'reflect' or 'valid'")
        if self.stride < 1:
            raise ValueError("stride must be at least 1")


@dataclass(frozen=True)
class FeatureMaps:
    """Per-window feature grids aligned with each other.

    fit_status codes: 0 converged, 1 textureless-limit, 2 failed; failed
    windows carry NaN in every grid except mean.
    """

    mean: np.ndarray
    alpha: np.ndarray
    gamma: np.ndarray
    entropy: np.ndarray
    distance: np.ndarray
    complexity: np.ndarray
    fit_status: np.ndarray

    def grids(self):
        """(name, grid) pairs in canonical order, fit_status last."""
        return (
            ("mean", self.mean),
            ("alpha", self.alpha),
            ("gamma", self.gamma),
            ("entropy", self.entropy),
            ("distance", self.distance),
            ("complexity", self.complexity),
            ("status", self.fit_status),
        )


def extract_features(
    ch: IntensityChannel,
    window: WindowSpec | None = None,
    solver: SolverConfig | None = None,
    quadrature: QuadratureConfig | None = None,
    threads: int = 0,
) -> FeatureMaps:
    """Compute the per-window feature maps of a channel.

    threads = 0 sizes the worker pool from the CPU count; any thread
    count produces bit-identical maps because every window is a pure
    function of the input.  Per-window failures are recorded in
    fit_status and NaN sentinels, never raised.
    """
    w = window if window is not None else WindowSpec()
    sc = solver if solver is not None else SolverConfig()
    qc = quadrature if quadrature is not None else QuadratureConfig()
    side = w.side
    h, wdt = ch.values.shape
    if w.boundary == "valid":
        if side > min(h, wdt):
            raise DataError(
                f"window side {side} exceeds the {h}x{wdt} channel for "
                "boundary 'valid'"
            )
        padded = ch.values
    else:
        pad = side // 2
        if pad > min(h, wdt) - 1:
            raise DataError(
                f"window side {side} too large to reflect a {h}x{wdt} channel"
            )
        padded = np.pad(ch.values, pad, mode="reflect")
    padded = np.ascontiguousarray(padded, dtype=np.float64)
    out_h = (padded.shape[0] - side) // w.stride + 1
    out_w = (padded.shape[1] - side) // w.stride + 1

    grids = [np.empty((out_h, out_w), dtype=np.float64) for _ in range(6)]
    status = np.empty((out_h, out_w), dtype=np.uint8)
    args = (
        padded,
        side,
        w.stride,
        ch.looks,
    )
    tail = (
        out_w,
        sc.tol,
        sc.max_iter,
        sc.texture_cap,
        sc.step_max,
        qc.rel_tol,
        qc.abs_tol,
        qc.max_subdivisions,
        *grids,
        status,
    )

    nthreads = threads if threads > 0 else (os.cpu_count() or 1)
    nthreads = min(nthreads, out_h)
    if nthreads <= 1:
        impl.window_block(*args, 0, out_h, *tail)
    else:
        bounds = np.linspace(0, out_h, nthreads + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            futures = [
                pool.submit(impl.window_block, *args, int(r0), int(r1), *tail)
                for r0, r1 in zip(bounds[:-1], bounds[1:])
                if r1 > r0
            ]
            for fut in futures:
                fut.result()

    return FeatureMaps(
        mean=grids[0],
        alpha=grids[1],
        gamma=grids[2],
        entropy=grids[3],
        distance=grids[4],
        complexity=grids[5],
        fit_status=status,
    )


def vector_gsc(maps) -> np.ndarray:
    """Stack the complexity grids of three channels into one 3-band array.

    Band order follows the argument order (HH, HV, VV by convention).
    """
    maps = tuple(maps)
    if len(maps) != 3:
        raise DataError(f"expected three feature maps, got {len(maps)}")
    shape = maps[0].complexity.shape
    for m in maps[1:]:
        if m.complexity.shape != shape:
            raise DataError(
                f"feature map dimensions differ: {m.complexity.shape} vs {shape}"
            )
    return np.stack([m.complexity for m in maps], axis=0)
