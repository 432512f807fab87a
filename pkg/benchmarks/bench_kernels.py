"""Time the compiled and pure-Python integration kernels on the same workloads.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

import numpy as np

from openstirap import _kernels
from openstirap.lindblad import ReservoirSpec, propagate_master
from openstirap.propagator import SimOptions, propagate
from openstirap.pulses import PulseConfig, Sequence

OPTS = SimOptions(sampling=501)

WORKLOADS = {
    "adiabatic, intuitive, GammaT=0.2": lambda b: propagate(
        PulseConfig(10.0, 1.0, Sequence.INTUITIVE), 0.2, "effective", "adiabatic", OPTS, b),
    "bare, counterintuitive, GammaT=500": lambda b: propagate(
        PulseConfig(10.0, 1.0), 500.0, "phenomenological", "bare", OPTS, b),
    "master, counterintuitive, GammaT=1, N=0.3": lambda b: propagate_master(
        PulseConfig(10.0, 1.0), ReservoirSpec(1.0, 0.3, 0.3), OPTS, b),
}


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return min(times), result


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3, help="runs per workload; the best is reported")
    args = parser.parse_args()
    backends = _kernels.available_backends()
    print(f"backends: {', '.join(backends)} (default {_kernels.BACKEND})")
    print(f"{'workload':44s}" + "".join(f"{b:>12s}" for b in backends) + "     speedup   steps  max|diff|")
    for name, job in WORKLOADS.items():
        timings, results = {}, {}
        for b in backends:
            timings[b], results[b] = best_of(lambda: job(b), args.repeat)
        line = f"{name:44s}" + "".join(f"{1e3 * timings[b]:10.1f}ms" for b in backends)
        if len(backends) == 2:
            a, p = results["cython"], results["python"]
            diff = np.max(np.abs(np.asarray(a.p3) - np.asarray(p.p3)))
            line += f"  {timings['python'] / timings['cython']:9.1f}x  {a.n_accepted:6d}  {diff:.1e}"
        print(line)


if __name__ == "__main__":
    main()
