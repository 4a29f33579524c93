#!/usr/bin/env python3
"""Benchmark the geometry kernels: compiled extension vs pure-Python twin.

Micro benchmarks time the bulk kernels on packed scenes of growing size;
--macro also times an end-to-end generation run per backend (the pure run
re-executes this interpreter with TASKFORGE_PURE_PYTHON=1).

Usage: python benchmarks/bench_kernels.py [--macro]
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import tempfile
import time
from array import array

from taskforge.physical import _kernels_py as kpy
from taskforge.rng import Rng

try:
    from taskforge.physical import _kernels_cy as kcy
except ImportError:
    kcy = None

TOL = 0.001


def make_scene(n: int, rng: Rng) -> array:
    flat = array("d")
    for _ in range(n):
        kind = 1.0 if rng.random() < 0.5 else 0.0
        flat.extend(
            (
                kind,
                rng.uniform(-0.5, 0.5), rng.uniform(-0.35, 0.35), rng.uniform(0.76, 1.35),
                rng.uniform(0.02, 0.1), rng.uniform(0.02, 0.1), rng.uniform(0.02, 0.1),
            )
        )
    return flat


def time_calls(fn, calls: int) -> float:
    t0 = time.perf_counter()
    for _ in range(calls):
        fn()
    return time.perf_counter() - t0


def micro() -> None:
    rng = Rng(4242)
    print(f"{'kernel':<22}{'n':>4}{'python':>12}{'compiled':>12}{'speedup':>10}")
    for n in (4, 8, 16, 32):
        flat = make_scene(n, rng)
        cand = (0.0, 0.02, -0.01, 0.95, 0.05, 0.05, 0.05)
        calls = 200_000 // n

        t_py = time_calls(lambda: kpy.any_overlap(flat, n, *cand, TOL, []), calls)
        row = f"{'any_overlap':<22}{n:>4}{1e6 * t_py / calls:>10.1f}us"
        if kcy is not None:
            t_cy = time_calls(lambda: kcy.any_overlap(flat, n, *cand, TOL, []), calls)
            row += f"{1e6 * t_cy / calls:>10.1f}us{t_py / t_cy:>9.1f}x"
        print(row)

        t_py = time_calls(lambda: kpy.pairwise_overlaps(flat, n, TOL, frozenset()), calls)
        row = f"{'pairwise_overlaps':<22}{n:>4}{1e6 * t_py / calls:>10.1f}us"
        if kcy is not None:
            t_cy = time_calls(lambda: kcy.pairwise_overlaps(flat, n, TOL, frozenset()), calls)
            row += f"{1e6 * t_cy / calls:>10.1f}us{t_py / t_cy:>9.1f}x"
        print(row)
    if kcy is None:
        print("(compiled extension not built; showing pure-Python timings only)")


def macro() -> None:
    print("\nend-to-end: generate 300 tasks (lengths 3-6, 2 workers)")
    for label, env_extra in (("compiled", {}), ("pure-python", {"TASKFORGE_PURE_PYTHON": "1"})):
        with tempfile.TemporaryDirectory() as tmp:
            cmd = [
                sys.executable, "-m", "taskforge.cli", "generate",
                "--domain", "pick_place", "--n", "300", "--seed", "5",
                "--workers", "2", "--out", os.path.join(tmp, "bench.jsonl"),
            ]
            env = os.environ.copy()
            env.update(env_extra)
            t0 = time.perf_counter()
            subprocess.run(cmd, check=True, env=env, capture_output=True)
            print(f"  {label:<12}{time.perf_counter() - t0:>8.2f}s")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--macro", action="store_true", help="also run the end-to-end comparison")
    args = parser.parse_args()
    micro()
    if args.macro:
        macro()
