"""Command-line surface: simulate, summarize, features, render.

Configuration comes from defaults, then an optional JSON config file,
then explicit flags (flags win).  Every command that writes files also
writes a manifest.json beside them recording the command, the resolved
configuration, the seed, and SHA-256 checksums of the inputs, so runs
are reproducible and diffable.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
"""

import argparse
import hashlib
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DataError, NumericalError
from .estimation import FALLBACK_FAILED, SolverConfig, fit_g0_mle, sample_mean
from .features import WindowSpec, extract_features
from .information import complexity, hellinger_distance, pipeline_entropy
from .distributions import GammaParams
from .raster import (
    compose_rgb,
    equalize,
    payload_path_for,
    read_channel,
    read_raster,
    write_channel,
    write_ppm,
)
from .simulate import default_scene, load_scene, render_phantom
from .specfun import QuadratureConfig

FEATURE_ORDER = ("mean", "alpha", "gamma", "entropy", "distance", "complexity", "status")


@dataclass(frozen=True)
class RunConfig:
    """Resolved knobs shared by all commands."""

    looks: float = 4.0
    window: int = 7
    boundary: str = "reflect"
    stride: int = 1
    seed: int = 0
    threads: int = 0
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_subdivisions: int = 200
    solver_tol: float = 1e-8
    max_iter: int = 100
    texture_cap: float = 50.0

    def window_spec(self) -> WindowSpec:
        return WindowSpec(side=self.window, boundary=self.boundary, stride=self.stride)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            tol=self.solver_tol, max_iter=self.max_iter, texture_cap=self.texture_cap
        )

    def quadrature_config(self) -> QuadratureConfig:
        return QuadratureConfig(
            rel_tol=self.rel_tol,
            abs_tol=self.abs_tol,
            max_subdivisions=self.max_subdivisions,
        )


_CONFIG_FIELDS = tuple(RunConfig.__dataclass_fields__)


def _resolve_config(args) -> RunConfig:
    values = {}
    if args.config is not None:
        try:
            loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise DataError(f"{args.config}: invalid JSON ({exc})") from None
        unknown = set(loaded) - set(_CONFIG_FIELDS)
        if unknown:
            raise DataError(f"{args.config}: unknown config keys {sorted(unknown)}")
        values.update(loaded)
    for name in _CONFIG_FIELDS:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    try:
        cfg = RunConfig(**values)
        cfg.window_spec()
        cfg.solver_config()
        cfg.quadrature_config()
    except (TypeError, ValueError) as exc:
        raise DataError(f"bad configuration: {exc}") from None
    return cfg


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--looks", type=float, help="nominal number of looks (default 4)")
    p.add_argument("--window", type=int, help="window side in pixels, odd (default 7)")
    p.add_argument("--boundary", choices=("reflect", "valid"), help="window boundary")
    p.add_argument("--stride", type=int, help="window stride (default 1)")
    p.add_argument("--seed", type=int, help="master seed (default 0)")
    p.add_argument("--threads", type=int, help="worker threads, 0 = auto")
    p.add_argument("--rel-tol", dest="rel_tol", type=float, help="quadrature relative tolerance")
    p.add_argument("--abs-tol", dest="abs_tol", type=float, help="quadrature absolute tolerance")
    p.add_argument(
        "--max-subdivisions", dest="max_subdivisions", type=int,
        help="quadrature subdivision budget",
    )
    p.add_argument("--solver-tol", dest="solver_tol", type=float, help="fit tolerance")
    p.add_argument("--max-iter", dest="max_iter", type=int, help="fit iteration budget")
    p.add_argument(
        "--texture-cap", dest="texture_cap", type=float,
        help="|alpha| beyond which fits report the textureless limit",
    )
    p.add_argument("--config", help="JSON file with the same keys; flags win")


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_manifest(directory, command, cfg: RunConfig, inputs, outputs, extra=None):
    manifest = {
        "command": command,
        "version": __version__,
        "config": asdict(cfg),
        "seed": cfg.seed,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "outputs": sorted(str(o) for o in outputs),
    }
    if extra:
        manifest.update(extra)
    path = Path(directory) / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", "utf-8")
    return path


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def cmd_simulate(args) -> int:
    cfg = _resolve_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.phantom is not None:
        scene = load_scene(args.phantom, seed=args.seed, looks=args.looks)
        inputs = [args.phantom]
    else:
        scene = default_scene(seed=cfg.seed, looks=cfg.looks)
        inputs = []
    outputs = []
    seeds = {}
    for name, phantom in scene.items():
        channel = render_phantom(phantom)
        hdr = out / f"phantom_{name}.hdr"
        write_channel(
            channel,
            hdr,
            comments=(f"synthetic scene, seed {phantom.seed}",),
        )
        outputs += [hdr, payload_path_for(hdr)]
        seeds[name] = phantom.seed
    outputs.append(
        _write_manifest(
            out, "simulate", cfg, inputs, outputs, extra={"channel_seeds": seeds}
        )
    )
    for o in outputs:
        print(o)
    return 0


def _crop_rect(grid, rect):
    h, w = grid.shape
    if rect is None:
        return grid
    x0, y0, rw, rh = rect
    if rw < 1 or rh < 1:
        raise DataError(f"empty rectangle {rect}")
    if x0 < 0 or y0 < 0 or x0 + rw > w or y0 + rh > h:
        raise DataError(f"rectangle {rect} leaves the {w}x{h} raster")
    return grid[y0 : y0 + rh, x0 : x0 + rw]


def cmd_summarize(args) -> int:
    cfg = _resolve_config(args)
    channel = read_channel(args.raster, args.payload, band=args.band)
    sample = _crop_rect(channel.values, args.rect).ravel()
    sigma = sample_mean(sample)
    fit = fit_g0_mle(sample, looks=cfg.looks, config=cfg.solver_config())
    if fit.fallback == FALLBACK_FAILED or fit.params is None:
        print(f"fit failed after {fit.iterations} iterations", file=sys.stderr)
        print(f"fallback = {fit.fallback}")
        raise NumericalError("no usable parameter estimate for this sample")
    qc = cfg.quadrature_config()
    entropy = pipeline_entropy(fit.params, qc, scale_hint=sigma)
    distance = hellinger_distance(
        fit.params, GammaParams(sigma2=sigma, looks=cfg.looks), qc, scale_hint=sigma
    )
    gsc = complexity(entropy, distance)
    rows = [
        ("sigma_hat", _fmt(sigma)),
        ("alpha_hat", _fmt(fit.params.alpha)),
        ("gamma_hat", _fmt(fit.params.gamma)),
        ("entropy", _fmt(entropy)),
        ("distance", _fmt(distance)),
        ("complexity", _fmt(gsc)),
        ("converged", "true" if fit.converged else "false"),
        ("iterations", str(fit.iterations)),
        ("fallback", fit.fallback),
    ]
    label_w = max(len(k) for k, _ in rows)
    value_w = max(len(v) for _, v in rows)
    print(f"{'quantity':<{label_w}}  {'value':>{value_w}}")
    for key, val in rows:
        print(f"{key:<{label_w}}  {val:>{value_w}}")
    print()
    lines = [f"{key} = {val}" for key, val in rows]
    for line in lines:
        print(line)
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        txt = out / "summary.txt"
        txt.write_text("\n".join(lines) + "\n", encoding="utf-8")
        _write_manifest(out, "summarize", cfg, [args.raster], [txt])
    return 0


def cmd_features(args) -> int:
    cfg = _resolve_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    outputs = []
    for header_path in args.rasters:
        header, _ = read_raster(header_path)
        stem = Path(header_path).stem
        for band in range(header.bands):
            channel = read_channel(header_path, band=band)
            maps = extract_features(
                channel,
                window=cfg.window_spec(),
                solver=cfg.solver_config(),
                quadrature=cfg.quadrature_config(),
                threads=cfg.threads,
            )
            prefix = stem if header.bands == 1 else f"{stem}_{channel.channel_id}"
            for name, grid in maps.grids():
                hdr = out / f"{prefix}_{name}.hdr"
                write_channel(
                    np.asarray(grid, dtype=np.float64),
                    hdr,
                    band_name=f"{channel.channel_id}-{name}",
                    looks=cfg.looks,
                    comments=(
                        f"window feature '{name}', side {cfg.window}, "
                        f"boundary {cfg.boundary}, stride {cfg.stride}",
                    ),
                )
                outputs += [hdr, payload_path_for(hdr)]
    inputs = list(args.rasters) + [payload_path_for(p) for p in args.rasters]
    outputs.append(_write_manifest(out, "features", cfg, inputs, outputs))
    for o in outputs:
        print(o)
    return 0


def cmd_render(args) -> int:
    cfg = _resolve_config(args)
    grids = []
    for header_path in args.rasters:
        header, data = read_raster(header_path)
        if not 0 <= args.band < header.bands:
            raise DataError(
                f"{header_path}: band {args.band} out of range "
                f"({header.bands} bands)"
            )
        grids.append(data[args.band])
    shapes = {g.shape for g in grids}
    if len(shapes) != 1:
        raise DataError(f"band dimensions differ: {[g.shape for g in grids]}")
    img = compose_rgb(*(equalize(g) for g in grids))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_ppm(img, out)
    inputs = list(args.rasters) + [payload_path_for(p) for p in args.rasters]
    manifest = {
        "command": "render",
        "version": __version__,
        "config": asdict(cfg),
        "seed": cfg.seed,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "outputs": [str(out)],
    }
    Path(str(out) + ".manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", "utf-8"
    )
    print(out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sargsc",
        description=(
            "statistical-complexity features for SAR intensity imagery: "
            "simulate phantoms, summarize samples, extract window features, "
            "render false-color composites"
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="render a synthetic scene to rasters")
    p.add_argument("--phantom", help="phantom spec JSON (default: built-in scene)")
    p.add_argument("--out", required=True, help="output directory")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("summarize", help="fit and measure one rectangular sample")
    p.add_argument("raster", help="raster header path")
    p.add_argument("--payload", help="payload path (default: header with .raw)")
    p.add_argument("--band", type=int, default=0, help="band index (default 0)")
    p.add_argument(
        "--rect", type=int, nargs=4, metavar=("X0", "Y0", "W", "H"),
        help="sample rectangle (default: whole band)",
    )
    p.add_argument("--out", help="optional directory for summary.txt + manifest")
    _add_common(p)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("features", help="window feature maps for every band")
    p.add_argument("rasters", nargs="+", help="raster header paths")
    p.add_argument("--out", required=True, help="output directory")
    _add_common(p)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("render", help="equalize three bands into a P6 composite")
    p.add_argument("rasters", nargs=3, help="three raster header paths (R, G, B)")
    p.add_argument("--band", type=int, default=0, help="band index (default 0)")
    p.add_argument("--out", required=True, help="output PPM path")
    _add_common(p)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
