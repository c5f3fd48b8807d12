"""Compare the compiled kernels with the numpy/scipy fallback.

    python benchmarks/bench_backends.py [--steps 10000] [--repeat 5]

Times the per-call kernels on the two 1D grid sizes of the studies, one
fractional step, and one spatial-study row (h = 1/16, k = 1e-6) truncated to
``--steps`` steps.
"""

import argparse
import timeit

import numpy as np

from llgfrac import ManufacturedProblem, SchemeConfig, _backend, integrate, make_grid
from llgfrac.schemes import step_fractional


def kernel_cases(n):
    rng = np.random.default_rng(0)
    g = make_grid(1, n)
    m = rng.standard_normal((n, 3))
    k = rng.standard_normal((n, 3))
    cfg = SchemeConfig("fractional", 1e-6, 0.01)
    mf = ManufacturedProblem(1, 0.01, 0.1).sample(g, 0.0)
    return {
        "laplacian_1d": lambda: _backend.kernels.laplacian_1d(m, g.h, False),
        "helmholtz_1d": lambda: _backend.kernels.helmholtz_1d(m, 1e-6, g.h, False),
        "cramer_solve": lambda: _backend.kernels.cramer_solve(k, m),
        "fractional step": lambda: step_fractional(mf, cfg),
    }


def best_of(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def study_row(steps):
    problem = ManufacturedProblem(1, 0.01, 0.1)
    g = make_grid(1, 17)
    cfg = SchemeConfig("fractional", 1e-6, 0.01)
    integrate(problem.sample(g, 0.0), cfg, steps, problem.forcing_on(g))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=10_000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = ["python"] + (["compiled"] if _backend.compiled is not None else [])
    if len(backends) == 1:
        print("compiled kernels not built; timing the fallback only")
    original = _backend.kernels.NAME

    print(f"{'case':<28}" + "".join(f"{b:>14}" for b in backends) + ("     speed-up" if len(backends) == 2 else ""))
    for n in (17, 2001):
        names = list(kernel_cases(n))
        for name in names:
            times = []
            for b in backends:
                _backend.use(b)
                fn = kernel_cases(n)[name]
                times.append(best_of(fn, args.repeat, 200))
            row = f"{name + f' (n={n})':<28}" + "".join(f"{t * 1e6:>11.1f} us" for t in times)
            if len(times) == 2:
                row += f"{times[0] / times[1]:>12.1f}x"
            print(row)

    times = []
    for b in backends:
        _backend.use(b)
        times.append(best_of(lambda: study_row(args.steps), 1, 1))
    row = f"{f'study row ({args.steps} steps)':<28}" + "".join(f"{t:>12.2f} s" for t in times)
    if len(times) == 2:
        row += f"{times[0] / times[1]:>12.1f}x"
    print(row)
    _backend.use(original)


if __name__ == "__main__":
    main()
