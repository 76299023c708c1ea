"""Head-to-head timing of the compiled and pure-numpy kernel backends.

The two implementations in ``hejhal_lab._kernels_cy`` and
``hejhal_lab._kernels_py`` expose the same four hot-loop primitives; both are
importable side by side, so the micro-benchmarks run them in-process on
identical inputs and cross-check the results.  The optional end-to-end row
times a full annulus workspace solve in a subprocess per backend (backend
selection is an import-time decision, hence the separate process).

Usage:
    python benchmarks/bench_backends.py [--sizes 256,1024,4096]
                                        [--repeats 5] [--skip-end-to-end]
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from hejhal_lab import _kernels_py

try:
    from hejhal_lab import _kernels_cy
except ImportError:
    _kernels_cy = None


def _best_of(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _test_data(n, rng):
    t = 2.0 * np.pi * np.arange(n) / n
    z = np.exp(1j * t) * (1.0 + 0.15 * np.cos(3 * t))
    dz = np.gradient(z, 2.0 * np.pi / n)
    cw = dz * (2.0 * np.pi / n)
    dens = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    targets = 0.55 * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    targets /= np.maximum(1.0, np.abs(targets) / 0.7)
    T = dz / np.abs(dz)
    sqrtw = np.sqrt(np.abs(cw))
    diag = rng.standard_normal(n)
    return z, cw, dens, targets, T, sqrtw, diag


def _cases(n, rng):
    z, cw, dens, targets, T, sqrtw, diag = _test_data(n, rng)
    return [
        ("cauchy_powersum p=1", lambda k: k.cauchy_powersum(targets, z, dens, cw, 1)),
        ("cauchy_powersum p=2", lambda k: k.cauchy_powersum(targets, z, dens, cw, 2)),
        ("assemble_double_layer", lambda k: k.assemble_double_layer(z, cw, diag)),
        ("assemble_ks", lambda k: k.assemble_ks(z, T, sqrtw)),
        ("min_dist", lambda k: k.min_dist(targets, z)),
    ]


def run_micro(sizes, repeats):
    rows = []
    for n in sizes:
        rng = np.random.default_rng(1234)
        for name, call in _cases(n, rng):
            t_py, out_py = _best_of(lambda: call(_kernels_py), repeats)
            if _kernels_cy is None:
                rows.append((name, n, t_py, None, None))
                continue
            t_cy, out_cy = _best_of(lambda: call(_kernels_cy), repeats)
            scale = float(np.abs(out_py).max()) or 1.0
            agree = float(np.abs(np.asarray(out_py) - np.asarray(out_cy)).max()) / scale
            rows.append((name, n, t_py, t_cy, agree))
    return rows


_END_TO_END_SNIPPET = """
import json, time
import numpy as np
import hejhal_lab as hl

dom = hl.build_domain(hl.CurveParam.circle(radius=1.0),
                      [hl.CurveParam.circle(radius=0.5)])
elapsed = float("inf")
for _ in range(3):  # best of three; the first run pays cold-start costs
    t0 = time.perf_counter()
    ws = hl.Workspace(dom, N=256)
    lam = hl.lambda_from_fit(ws)
    elapsed = min(elapsed, time.perf_counter() - t0)
print(json.dumps({"backend": hl.backend_name(),
                  "seconds": elapsed,
                  "lambda_00": float(lam.matrix[0, 0])}))
"""


def run_end_to_end():
    rows = []
    for backend in ("py", "cy"):
        if backend == "cy" and _kernels_cy is None:
            continue
        env = dict(os.environ, HEJHAL_LAB_BACKEND=backend)
        proc = subprocess.run([sys.executable, "-c", _END_TO_END_SNIPPET],
                              env=env, capture_output=True, text=True)
        if proc.returncode != 0:
            print(f"end-to-end ({backend}) failed:\n{proc.stderr}", file=sys.stderr)
            continue
        rows.append(json.loads(proc.stdout.strip().splitlines()[-1]))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="256,1024,4096",
                    help="comma-separated node counts")
    ap.add_argument("--repeats", type=int, default=5,
                    help="take the best of this many runs")
    ap.add_argument("--skip-end-to-end", action="store_true",
                    help="micro-benchmarks only")
    args = ap.parse_args(argv)
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]

    if _kernels_cy is None:
        print("compiled extension not available; timing the numpy backend only\n")

    header = f"{'kernel':<24}{'n':>6}{'numpy ms':>12}{'cython ms':>12}" \
             f"{'speedup':>9}{'max rel diff':>14}"
    print(header)
    print("-" * len(header))
    for name, n, t_py, t_cy, agree in run_micro(sizes, args.repeats):
        if t_cy is None:
            print(f"{name:<24}{n:>6}{t_py * 1e3:>12.3f}{'-':>12}{'-':>9}{'-':>14}")
        else:
            print(f"{name:<24}{n:>6}{t_py * 1e3:>12.3f}{t_cy * 1e3:>12.3f}"
                  f"{t_py / t_cy:>9.2f}{agree:>14.2e}")

    if not args.skip_end_to_end:
        print("\nend-to-end: annulus workspace + lambda fit at N=256")
        for row in run_end_to_end():
            print(f"  backend={row['backend']:<7} {row['seconds']:8.2f} s   "
                  f"lambda_00={row['lambda_00']:.12e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
