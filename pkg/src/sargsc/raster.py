"""Raster file IO, rank equalization, and false-color output.

The raster format is deliberately minimal so golden tests stay
bit-exact: a UTF-8 text header (key: value lines, # comments allowed)
beside a raw little-endian band-sequential payload.  Header keys:
width, height, bands, dtype (float32|float64), byteorder (always
little), looks, bands-names (comma separated, one per band).

NaN samples are the sentinel for failed per-window fits; equalize maps
them to level 0 as documented in the headers it travels with.
"""

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError
from .features import IntensityChannel

__all__ = [
    "RasterHeader",
    "RgbImage",
    "payload_path_for",
    "read_raster",
    "write_raster",
    "read_channel",
    "write_channel",
    "equalize",
    "compose_rgb",
    "write_ppm",
]

_DTYPES = {"float32": "<f4", "float64": "<f8"}
_HEADER_KEYS = ("width", "height", "bands", "dtype", "byteorder", "looks", "bands-names")


@dataclass(frozen=True)
class RasterHeader:
    width: int
    height: int
    bands: int
    dtype: str
    looks: float
    band_names: tuple
    byteorder: str = "little"

    def __post_init__(self):
        if self.width < 1 or self.height < 1 or self.bands < 1:
            raise DataError("width, height and bands must be positive")
        if self.dtype not in _DTYPES:
            raise DataError(f"dtype must be one of {sorted(_DTYPES)}")
        if self.byteorder != "little":
            raise DataError("byteorder must be 'little'")
        if not (math.isfinite(self.looks) and self.looks > 0.0):
            raise DataError("looks must be finite and positive")
        names = tuple(str(n) for n in self.band_names)
        if len(names) != self.bands:
            raise DataError(
                f"{self.bands} bands but {len(names)} band names"
            )
        if any("," in n or not n for n in names):
            raise DataError("band names must be nonempty and comma-free")
        object.__setattr__(self, "band_names", names)

    @property
    def payload_bytes(self) -> int:
        itemsize = 4 if self.dtype == "float32" else 8
        return self.width * self.height * self.bands * itemsize


@dataclass(frozen=True)
class RgbImage:
    """8-bit three-plane image."""

    red: np.ndarray
    green: np.ndarray
    blue: np.ndarray

    def __post_init__(self):
        shape = self.red.shape
        for name in ("red", "green", "blue"):
            plane = getattr(self, name)
            if plane.ndim != 2 or plane.shape != shape or plane.dtype != np.uint8:
                raise DataError("planes must be equal-shape 2-D uint8 grids")

    @property
    def height(self) -> int:
        return self.red.shape[0]

    @property
    def width(self) -> int:
        return self.red.shape[1]


def payload_path_for(header_path) -> Path:
    """Conventional payload location: the header path with a .raw suffix."""
    return Path(header_path).with_suffix(".raw")


def write_raster(header_path, payload_path, header: RasterHeader, bands, comments=()):
    """Write a header/payload pair.

    bands is an array of shape (bands, height, width) or a sequence of
    2-D grids; samples are stored little-endian, band after band, rows
    in raster order.
    """
    data = np.asarray(bands, dtype=np.float64)
    if data.ndim == 2:
        data = data[None, :, :]
    if data.shape != (header.bands, header.height, header.width):
        raise DataError(
            f"data shape {data.shape} does not match header "
            f"({header.bands}, {header.height}, {header.width})"
        )
    lines = [f"# {c}" for c in comments]
    lines += [
        f"width: {header.width}",
        f"height: {header.height}",
        f"bands: {header.bands}",
        f"dtype: {header.dtype}",
        f"byteorder: {header.byteorder}",
        f"looks: {header.looks!r}",
        f"bands-names: {','.join(header.band_names)}",
    ]
    Path(header_path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    Path(payload_path).write_bytes(
        np.ascontiguousarray(data.astype(_DTYPES[header.dtype])).tobytes()
    )


def _parse_header(header_path) -> RasterHeader:
    fields = {}
    for ln, raw in enumerate(
        Path(header_path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise DataError(f"{header_path}:{ln}: expected 'key: value', got {raw!r}")
        fields[key.strip()] = value.strip()
    missing = [k for k in _HEADER_KEYS if k not in fields]
    if missing:
        raise DataError(f"{header_path}: missing header keys {missing}")
    try:
        return RasterHeader(
            width=int(fields["width"]),
            height=int(fields["height"]),
            bands=int(fields["bands"]),
            dtype=fields["dtype"],
            looks=float(fields["looks"]),
            band_names=tuple(fields["bands-names"].split(",")),
            byteorder=fields["byteorder"],
        )
    except ValueError as exc:
        raise DataError(f"{header_path}: {exc}") from None


def read_raster(header_path, payload_path=None):
    """Read a header/payload pair; returns (RasterHeader, float64 array
    of shape (bands, height, width))."""
    header = _parse_header(header_path)
    payload_path = (
        payload_path_for(header_path) if payload_path is None else payload_path
    )
    blob = Path(payload_path).read_bytes()
    if len(blob) != header.payload_bytes:
        raise DataError(
            f"{payload_path}: payload is {len(blob)} bytes, header declares "
            f"{header.payload_bytes}"
        )
    data = np.frombuffer(blob, dtype=_DTYPES[header.dtype]).astype(np.float64)
    return header, data.reshape(header.bands, header.height, header.width)


def read_channel(header_path, payload_path=None, band: int = 0) -> IntensityChannel:
    """Read one band as an intensity channel.

    The band must be named HH, HV or VV and contain only finite
    nonnegative samples; the first offending payload offset is reported
    otherwise.
    """
    header, data = read_raster(header_path, payload_path)
    if not 0 <= band < header.bands:
        raise DataError(f"band {band} out of range for {header.bands} bands")
    grid = data[band]
    bad = ~np.isfinite(grid) | (grid < 0.0)
    if np.any(bad):
        flat = int(np.argmax(bad.ravel()))
        offset = (band * grid.size + flat) * (4 if header.dtype == "float32" else 8)
        raise DataError(
            f"{header_path}: band {band} has a non-finite or negative sample "
            f"at payload byte offset {offset}"
        )
    return IntensityChannel(
        values=grid, channel_id=header.band_names[band], looks=header.looks
    )


def write_channel(
    ch,
    header_path,
    payload_path=None,
    *,
    band_name=None,
    looks=None,
    comments=(),
):
    """Write a single-band raster from an IntensityChannel or a bare grid.

    Bare grids (feature maps) may hold NaN sentinels; a header comment
    records the sentinel convention.
    """
    if isinstance(ch, IntensityChannel):
        grid = ch.values
        band_name = ch.channel_id if band_name is None else band_name
        looks = ch.looks if looks is None else looks
    else:
        grid = np.asarray(ch, dtype=np.float64)
        if band_name is None or looks is None:
            raise DataError("bare grids need explicit band_name and looks")
    if grid.ndim != 2:
        raise DataError("expected a 2-D grid")
    if np.any(np.isinf(grid)):
        raise DataError("grids may hold NaN sentinels but not infinities")
    payload_path = (
        payload_path_for(header_path) if payload_path is None else payload_path
    )
    header = RasterHeader(
        width=grid.shape[1],
        height=grid.shape[0],
        bands=1,
        dtype="float64",
        looks=float(looks),
        band_names=(band_name,),
    )
    notes = list(comments)
    if np.any(np.isnan(grid)):
        notes.append("NaN samples mark failed window fits; render as level 0")
    write_raster(header_path, payload_path, header, grid[None, :, :], comments=notes)
    return header


def equalize(grid) -> np.ndarray:
    """Rank-based histogram equalization onto 8-bit levels.

    Valid samples map to floor(255 * rank / (n - 1)) with 0-based ranks
    averaged over ties, so the result depends only on the ordering of
    the values.  NaN sentinels map to 0; a constant grid maps to 128.
    """
    arr = np.asarray(grid, dtype=np.float64)
    flat = arr.ravel()
    valid = np.isfinite(flat)
    n = int(valid.sum())
    if n == 0:
        raise DataError("grid holds no valid samples to equalize")
    out = np.zeros(flat.size, dtype=np.uint8)
    vals = flat[valid]
    if vals.min() == vals.max():
        out[valid] = 128
        return out.reshape(arr.shape)
    order = np.argsort(vals, kind="stable")
    sv = vals[order]
    run_start = np.concatenate(([True], sv[1:] != sv[:-1]))
    run_id = np.cumsum(run_start) - 1
    pos = np.arange(n, dtype=np.float64)
    mean_rank = np.bincount(run_id, weights=pos) / np.bincount(run_id)
    ranks = np.empty(n, dtype=np.float64)
    ranks[order] = mean_rank[run_id]
    out[valid] = np.floor(255.0 * ranks / (n - 1)).astype(np.uint8)
    return out.reshape(arr.shape)


def compose_rgb(hh, hv, vv) -> RgbImage:
    """Map three equalized grids onto red, green and blue."""
    planes = []
    for grid in (hh, hv, vv):
        arr = np.asarray(grid)
        if arr.dtype != np.uint8:
            raise DataError("compose_rgb expects 8-bit grids (run equalize first)")
        planes.append(arr)
    if planes[0].shape != planes[1].shape or planes[0].shape != planes[2].shape:
        raise DataError(
            f"band dimensions differ: {[p.shape for p in planes]}"
        )
    return RgbImage(red=planes[0], green=planes[1], blue=planes[2])


def write_ppm(img: RgbImage, path):
    """Binary PPM (P6, maxval 255), samples interleaved RGB in raster order."""
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    body = np.stack([img.red, img.green, img.blue], axis=-1).tobytes()
    Path(path).write_bytes(header + body)
