"""Benchmark the numba kernels against the pure-numpy fallback.

Times the channel frequency-response kernel and the greedy sparse-recovery
kernel on representative Monte Carlo workloads, checks that both backends
agree, and reports mean / std wall-clock times plus the speedup. The numba
path is warmed up once before timing so JIT compilation is excluded.

Run:

    python benchmarks/compare_backends.py [--repeats 5]
"""

import argparse
import statistics
import time

import numpy as np

from mmwhybrid import _kernels, sample_paths
from mmwhybrid.sensing import generate_measurement_matrix

HAVE_NUMBA = _kernels._freq_response_jit is not None


def freq_workload(rng, num_sub=64, num_rx=32, num_tx=32, num_paths=6):
    paths = sample_paths(rng, num_paths, 16)
    return (np.ascontiguousarray(paths.gains),
            np.ascontiguousarray(paths.delays),
            np.ascontiguousarray(np.sin(paths.aoa)),
            np.ascontiguousarray(np.sin(paths.aod)),
            num_sub, 1.0, num_rx, num_tx, 0.8)


def somp_workload(rng, m_rows=72, grid=64, num_antennas=32, cols=256, sparsity=6):
    phi = generate_measurement_matrix(rng, m_rows, num_antennas).entries
    sines = np.arcsin(-1.0 + 2.0 * np.arange(grid) / grid)
    atoms = np.exp(1j * np.pi * np.outer(np.arange(num_antennas), np.sin(sines)))
    sensing = np.ascontiguousarray(phi @ atoms)
    coeff = np.zeros((grid, cols), complex)
    rows = rng.choice(grid, sparsity, replace=False)
    coeff[rows] = rng.standard_normal((sparsity, cols)) + 1j * rng.standard_normal((sparsity, cols))
    noise = 0.1 * (rng.standard_normal((m_rows, cols)) + 1j * rng.standard_normal((m_rows, cols)))
    observations = np.ascontiguousarray(sensing @ coeff + noise)
    return sensing, observations, sparsity, 1e-6


def time_calls(fn, args_list, repeats):
    durations = []
    for _ in range(repeats):
        start = time.perf_counter()
        for args in args_list:
            fn(*args)
        durations.append(time.perf_counter() - start)
    return durations


def summarize(name, durations):
    mean = statistics.mean(durations)
    std = statistics.pstdev(durations) if len(durations) > 1 else 0.0
    print(f"{name:28s} mean {mean * 1e3:9.2f} ms  std {std * 1e3:7.2f} ms")
    return mean


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--calls", type=int, default=20,
                        help="kernel invocations per timed repeat")
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    freq_args = [freq_workload(rng) for _ in range(args.calls)]
    somp_args = [somp_workload(rng) for _ in range(args.calls)]

    if not HAVE_NUMBA:
        print("[info] numba backend unavailable; timing the numpy path only")
    else:
        # warm up JIT compilation outside the timed region
        _kernels._freq_response_jit(*freq_args[0])
        _kernels._somp_greedy_jit(*somp_args[0])
        # agreement check between the two backends
        a = _kernels._freq_response_numpy(*freq_args[0])
        b = _kernels._freq_response_jit(*freq_args[0])
        freq_err = np.linalg.norm(a - b) / np.linalg.norm(a)
        sup_a, coef_a, _ = _kernels._somp_greedy_numpy(*somp_args[0])
        sup_b, coef_b, _ = _kernels._somp_greedy_jit(*somp_args[0])
        agree = np.array_equal(sup_a, sup_b) and np.allclose(coef_a, coef_b, atol=1e-10)
        print(f"agreement: freq rel err {freq_err:.2e}, "
              f"somp supports/coefficients {'match' if agree else 'DIFFER'}")

    print(f"\n=== channel frequency response ({args.calls} calls/repeat) ===")
    base = summarize("numpy", time_calls(_kernels._freq_response_numpy,
                                         freq_args, args.repeats))
    if HAVE_NUMBA:
        accel = summarize("numba", time_calls(_kernels._freq_response_jit,
                                              freq_args, args.repeats))
        print(f"speedup: {base / accel:.2f}x")

    print(f"\n=== greedy sparse recovery ({args.calls} calls/repeat) ===")
    base = summarize("numpy", time_calls(_kernels._somp_greedy_numpy,
                                         somp_args, args.repeats))
    if HAVE_NUMBA:
        accel = summarize("numba", time_calls(_kernels._somp_greedy_jit,
                                              somp_args, args.repeats))
        print(f"speedup: {base / accel:.2f}x")


if __name__ == "__main__":
    main()
