"""Wall-clock comparison of the numba lattice loop and its numpy twin.

Run with ``python3 benchmarks/bench_backends.py``. Each case is timed after a
warm-up call (so jit compilation is excluded) and the two backends' outputs
are compared.
"""

import argparse
import time

import numpy as np

from kantorovich.funcdsl import signal
from kantorovich.group_model import SampleSequence
from kantorovich.kernels import KernelFamily, builtin_kernel
from kantorovich.operators import OperatorSpec, Variant, apply_grid
from kantorovich.operators.lattice import lattice_sum


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def lattice_case(kernel, w, n_points, tol):
    fam = KernelFamily(builtin_kernel(kernel), "dilate")
    chi = fam.at(w)
    rmax = chi.lattice_radius(tol, 1.0 / w) if not chi.family.base.bounded else chi.radius
    k = np.arange(int(np.floor(-10 * w - rmax * w)) - 2, int(np.ceil(10 * w + rmax * w)) + 3)
    anchors = k / w
    coeffs = np.cos(anchors)
    z = np.linspace(-10, 10, n_points)

    def run(which):
        return lambda: lattice_sum(z, anchors, coeffs, chi, rmax=rmax, anchor_spacing=1.0 / w,
                                   backend=which)

    return run


def operator_case(w, n_points):
    spec = OperatorSpec(Variant.SAMPLING, KernelFamily(builtin_kernel("M"), "dilate"),
                        SampleSequence.preset("uniform"), w=w)
    f = signal("f1")
    z = np.linspace(-4, 4, n_points)

    def run(which):
        return lambda: apply_grid(spec, f, z, backend=which).values

    return run


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--points", type=int, default=20_000)
    args = ap.parse_args(argv)
    cases = [
        ("lattice M, w=50", lattice_case("M", 50.0, args.points, 1e-9)),
        ("lattice fejer, w=5", lattice_case("fejer", 5.0, args.points // 100, 1e-3)),
        ("operator (1) f1, w=40", operator_case(40.0, args.points)),
    ]
    print(f"{'case':<24}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}{'max |diff|':>14}")
    for name, make in cases:
        t_jit, a = best_of(make("numba"), args.repeat)
        t_np, b = best_of(make("numpy"), args.repeat)
        print(f"{name:<24}{t_jit:>12.4f}{t_np:>12.4f}{t_np / t_jit:>10.1f}"
              f"{float(np.max(np.abs(a - b))):>14.3e}")


if __name__ == "__main__":
    main()
