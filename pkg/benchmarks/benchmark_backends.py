#!/usr/bin/env python3
"""Time the compiled kernels against the pure-Python reference.

Each backend runs in its own subprocess (the choice is fixed at import
time), timing the two hot paths: parameter fits on homogeneous samples
and a full single-threaded window sweep.  Example:

    python3 benchmarks/benchmark_backends.py --repeats 5
"""

import argparse
import json
import os
import subprocess
import sys
import time


def parse_args(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--repeats", type=int, default=3,
        help="timing repetitions per workload (best is reported, default 3)",
    )
    parser.add_argument(
        "--fit-size", type=int, default=10201,
        help="sample size per fit (default 10201)",
    )
    parser.add_argument(
        "--fits", type=int, default=20,
        help="number of fits per repetition (default 20)",
    )
    parser.add_argument(
        "--scene", type=int, nargs=2, default=(72, 120), metavar=("H", "W"),
        help="window-sweep scene dimensions (default 72 120)",
    )
    parser.add_argument(
        "--window", type=int, default=7, help="window side (default 7)"
    )
    parser.add_argument(
        "--worker", choices=("python", "compiled"), help=argparse.SUPPRESS
    )
    return parser.parse_args(argv)


def time_workloads(args) -> dict:
    import numpy as np

    import sargsc
    from sargsc import (
        G0Params,
        IntensityChannel,
        WindowSpec,
        extract_features,
        fit_g0_mle,
        sample_g0,
    )

    truth = G0Params(alpha=-2.717, gamma=0.179, looks=4.0)
    samples = [
        sample_g0(truth, args.fit_size, seed=k) for k in range(args.fits)
    ]
    h, w = args.scene
    values = sample_g0(truth, h * w, seed=424).reshape(h, w)
    channel = IntensityChannel(values=values, channel_id="HH", looks=4.0)
    spec = WindowSpec(side=args.window)

    fit_best = float("inf")
    sweep_best = float("inf")
    for _ in range(args.repeats):
        start = time.perf_counter()
        for z in samples:
            fit_g0_mle(z, looks=4.0)
        fit_best = min(fit_best, time.perf_counter() - start)

        start = time.perf_counter()
        extract_features(channel, window=spec, threads=1)
        sweep_best = min(sweep_best, time.perf_counter() - start)

    return {
        "backend": sargsc.backend_name(),
        "fit_seconds": fit_best,
        "fit_count": args.fits,
        "sweep_seconds": sweep_best,
        "sweep_windows": h * w,
    }


def run_backend(choice: str, argv) -> dict:
    env = dict(os.environ, SARGSC_KERNELS=choice)
    res = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--worker", choice]
        + argv,
        capture_output=True,
        text=True,
        env=env,
    )
    if res.returncode != 0:
        raise RuntimeError(f"{choice} worker failed:\n{res.stderr}")
    return json.loads(res.stdout)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    args = parse_args(argv)
    if args.worker is not None:
        json.dump(time_workloads(args), sys.stdout)
        return 0

    passthrough = [a for a in argv]
    reports = {}
    for choice in ("python", "compiled"):
        try:
            reports[choice] = run_backend(choice, passthrough)
        except RuntimeError as exc:
            print(exc, file=sys.stderr)
    if "python" not in reports:
        return 1

    print(f"{'workload':<28} {'python':>12} {'compiled':>12} {'speedup':>9}")
    rows = [
        ("fit_seconds",
         f"{reports['python']['fit_count']} fits of "
         f"{args.fit_size} samples"),
        ("sweep_seconds",
         f"window sweep, {args.scene[0]}x{args.scene[1]} @ {args.window}"),
    ]
    for key, label in rows:
        py = reports["python"][key]
        if "compiled" in reports:
            cc = reports["compiled"][key]
            print(f"{label:<28} {py:>11.3f}s {cc:>11.3f}s {py / cc:>8.1f}x")
        else:
            print(f"{label:<28} {py:>11.3f}s {'n/a':>12} {'n/a':>9}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
