#!/usr/bin/env python3
"""Compare the compiled temporal filter kernel against the numpy fallback.

Builds one synthetic stream (events concentrated on a 48x48 patch so pixel
state stays hot), runs each backend over it a few times, and reports the
best sustained rate.

    python3 benchmarks/bench_highpass.py --events 100000000
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from evrange import filtering
from evrange._highpass_py import highpass_mask as numpy_mask


def build_arrays(n: int, seed: int):
    rng = np.random.default_rng(seed)
    x = rng.integers(600, 648, size=n, dtype=np.uint16)
    y = rng.integers(300, 348, size=n, dtype=np.uint16)
    t = np.cumsum(rng.integers(0, 7, size=n, dtype=np.uint16).astype(np.uint64))
    return x, y, t


def bench(fn, args, repeats: int) -> tuple[float, np.ndarray]:
    best = float("inf")
    mask = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        mask = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, mask


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--events", type=int, default=20_000_000)
    ap.add_argument("--cutoff-us", type=int, default=2000)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=17)
    args = ap.parse_args()

    n = args.events
    print(f"building {n:,} events ...")
    x, y, t = build_arrays(n, args.seed)
    call = (x, y, t, args.cutoff_us, 1280, 720)

    rows = []
    if filtering.HAVE_COMPILED:
        from evrange._highpass import highpass_mask as compiled_mask

        dt, mask_c = bench(compiled_mask, call, args.repeats)
        rows.append(("compiled", dt, np.asarray(mask_c)))
    else:
        print("compiled kernel unavailable in this build")
        mask_c = None

    dt, mask_np = bench(numpy_mask, call, args.repeats)
    rows.append(("numpy", dt, mask_np))

    print(f"\n{'backend':<10} {'best time':>10} {'events/s':>12} {'kept':>7}")
    for name, dt, mask in rows:
        print(f"{name:<10} {dt:>9.2f}s {n / dt / 1e6:>10.1f} M {100 * mask.mean():>6.1f}%")

    if len(rows) == 2:
        if not np.array_equal(rows[0][2], rows[1][2]):
            print("\nERROR: backends disagree on the keep mask")
            return 1
        print(f"\nspeedup: {rows[1][1] / rows[0][1]:.1f}x, masks identical")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
