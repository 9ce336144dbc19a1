"""Synthetic three-class scenes for exercising the pipeline at desk scale.

A phantom is an exact tiling of a scene by rectangles, each carrying a
Gamma or heavy-tailed law.  Rendering draws every region from its own
(seed, region-index) stream, so regions are independent and the scene
is reproducible pixel for pixel regardless of render order.

The default scene mirrors a three-class layout: sea, forest and urban
tiles of 101x101 pixels side by side, with per-channel power factors
for the HH, HV and VV channels.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .distributions import G0Params, GammaParams, sample_g0, sample_gamma
from .errors import DataError
from .features import CHANNEL_IDS, IntensityChannel

__all__ = [
    "Region",
    "ScenePhantom",
    "render_phantom",
    "default_scene",
    "load_scene",
    "SEA",
    "FOREST",
    "URBAN",
]

# Three-class parameter triples at four looks (texture from most to
# least negative alpha: sea, forest, urban).
SEA = G0Params(alpha=-11.870, gamma=0.320, looks=4.0)
FOREST = G0Params(alpha=-2.717, gamma=0.179, looks=4.0)
URBAN = G0Params(alpha=-2.051, gamma=0.182, looks=4.0)

# Cross-polarization attenuation for the default three-channel scene.
CHANNEL_POWER = {"HH": 1.0, "HV": 0.3, "VV": 0.8}


@dataclass(frozen=True)
class Region:
    """A rectangle (x0, y0, width, height) and the law of its pixels."""

    rect: tuple
    model: object

    def __post_init__(self):
        if len(self.rect) != 4 or any(int(v) != v for v in self.rect):
            raise DataError("rect must be (x0, y0, width, height) integers")
        x0, y0, w, h = (int(v) for v in self.rect)
        if x0 < 0 or y0 < 0 or w < 1 or h < 1:
            raise DataError(f"bad rectangle {self.rect}")
        object.__setattr__(self, "rect", (x0, y0, w, h))
        if not isinstance(self.model, (GammaParams, G0Params)):
            raise DataError("region model must be GammaParams or G0Params")


@dataclass(frozen=True)
class ScenePhantom:
    """Scene geometry plus the seed that makes rendering deterministic."""

    width: int
    height: int
    regions: tuple
    looks: float = 4.0
    seed: int = 0
    channel_id: str = "HH"

    def __post_init__(self):
        object.__setattr__(self, "regions", tuple(self.regions))
        if self.width < 1 or self.height < 1:
            raise DataError("scene dimensions must be positive")
        if self.channel_id not in CHANNEL_IDS:
            raise DataError(f"channel_id must be one of {CHANNEL_IDS}")
        cover = np.full((self.height, self.width), -1, dtype=np.int32)
        for idx, reg in enumerate(self.regions):
            if not isinstance(reg, Region):
                raise DataError("regions must be Region instances")
            x0, y0, w, h = reg.rect
            if x0 + w > self.width or y0 + h > self.height:
                raise DataError(
                    f"region {idx} rectangle {reg.rect} leaves the "
                    f"{self.width}x{self.height} scene"
                )
            tile = cover[y0 : y0 + h, x0 : x0 + w]
            if np.any(tile >= 0):
                other = int(tile[tile >= 0][0])
                raise DataError(
                    f"regions {other} and {idx} overlap: rectangles "
                    f"{self.regions[other].rect} and {reg.rect}"
                )
            tile[:] = idx
            if reg.model.looks != self.looks:
                raise DataError(
                    f"region {idx} has looks {reg.model.looks}, scene has "
                    f"{self.looks}"
                )
        if np.any(cover < 0):
            ys, xs = np.nonzero(cover < 0)
            raise DataError(
                f"{len(ys)} pixels uncovered, first at (x={xs[0]}, y={ys[0]})"
            )


def render_phantom(p: ScenePhantom) -> IntensityChannel:
    """Draw every region from its own (seed, region-index) stream."""
    values = np.empty((p.height, p.width), dtype=np.float64)
    for idx, reg in enumerate(p.regions):
        x0, y0, w, h = reg.rect
        n = w * h
        if isinstance(reg.model, GammaParams):
            draws = sample_gamma(reg.model, n, p.seed, stream=idx)
        else:
            draws = sample_g0(reg.model, n, p.seed, stream=idx)
        values[y0 : y0 + h, x0 : x0 + w] = draws.reshape(h, w)
    return IntensityChannel(values=values, channel_id=p.channel_id, looks=p.looks)


def _scaled(model, power: float):
    """Scale a law by a power factor: intensities scale linearly, so the
    scale parameter does too while shape parameters stay put."""
    if isinstance(model, GammaParams):
        return GammaParams(sigma2=model.sigma2 * power, looks=model.looks)
    return G0Params(alpha=model.alpha, gamma=model.gamma * power, looks=model.looks)


def default_scene(seed: int = 0, looks: float = 4.0, tile: int = 101) -> dict:
    """Three 101x101 class tiles side by side, one phantom per channel.

    Channel k renders with seed + k (region streams never collide across
    channels because the stream key is the (seed, region-index) pair).
    """
    models = [G0Params(m.alpha, m.gamma, looks) for m in (SEA, FOREST, URBAN)]
    scene = {}
    for k, cid in enumerate(CHANNEL_IDS):
        power = CHANNEL_POWER[cid]
        regions = [
            Region(rect=(i * tile, 0, tile, tile), model=_scaled(m, power))
            for i, m in enumerate(models)
        ]
        scene[cid] = ScenePhantom(
            width=3 * tile,
            height=tile,
            regions=tuple(regions),
            looks=looks,
            seed=seed + k,
            channel_id=cid,
        )
    return scene


def _model_from_spec(node, looks: float):
    kind = node.get("kind")
    if kind == "gamma":
        return GammaParams(sigma2=float(node["sigma2"]), looks=looks)
    if kind == "g0":
        return G0Params(
            alpha=float(node["alpha"]), gamma=float(node["gamma"]), looks=looks
        )
    raise DataError(f"unknown model kind {kind!r} (want 'gamma' or 'g0')")


def load_scene(path, seed: int | None = None, looks: float | None = None) -> dict:
    """Load a phantom specification from JSON.

    Layout: {"width", "height", "looks", "seed", "channels": [{"name",
    "regions": [{"rect": [x0, y0, w, h], "model": {"kind": "g0"|"gamma",
    ...params}}]}]}.  seed/looks arguments override the file.
    """
    try:
        spec = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc})") from None
    try:
        width = int(spec["width"])
        height = int(spec["height"])
        fl = float(spec.get("looks", 4.0)) if looks is None else float(looks)
        fs = int(spec.get("seed", 0)) if seed is None else int(seed)
        scene = {}
        for k, chan in enumerate(spec["channels"]):
            name = chan["name"]
            regions = tuple(
                Region(
                    rect=tuple(node["rect"]),
                    model=_model_from_spec(node["model"], fl),
                )
                for node in chan["regions"]
            )
            scene[name] = ScenePhantom(
                width=width,
                height=height,
                regions=regions,
                looks=fl,
                seed=fs + k,
                channel_id=name,
            )
    except (KeyError, TypeError) as exc:
        raise DataError(f"{path}: malformed phantom spec ({exc!r})") from None
    if not scene:
        raise DataError(f"{path}: phantom spec lists no channels")
    return scene
