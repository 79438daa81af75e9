"""Compare the numba and numpy gate kernels on the same workloads.

    python3 benchmarks/bench_kernels.py --qubits 20 --repeats 5

Each case is run once per backend to warm up (numba compiles on first
call), then timed as the best of ``--repeats``.  Outputs of the two backends
are compared before any timing is reported.
"""

import argparse
import time

import numpy as np

from qwalk import _kernels
from qwalk.circuit import circuit_columns, run
from qwalk.families import build_complete_selfloops, build_cycle_pow2
from qwalk.sim import H, Register, StateVector, X, apply_inplace, custom


def random_state(dim, rng):
    z = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return z / np.linalg.norm(z)


def gates_case(n, gates):
    reg = Register.qubits(n)

    def go(amps, backend):
        for g in gates:
            apply_inplace(amps, reg, g, backend)
        return amps

    return reg.dim, go


def cases(n, rng):
    u4 = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
    yield ("H on every wire", *gates_case(n, [H(w) for w in range(n)]))
    yield ("2-wire dense, 3 controls", *gates_case(n, [custom((w, w + 1), u4, ((0, 1), (1, 0), (2, 1)))
                                                       for w in range(3, n - 1)]))
    yield ("C^kNOT cascade (increment)", *gates_case(n, [X(w, tuple((c, 1) for c in range(w + 1, n)))
                                                         for w in range(n)]))

    circuit, _, _ = build_cycle_pow2(n - 1, "hadamard")

    def walk(amps, backend):
        state = StateVector(circuit.register, amps[:, 0])
        return run(circuit, state, 4, backend).amplitudes[:, None]

    yield ("cycle walk, 4 steps", circuit.register.dim, walk)

    k16, _, _ = build_complete_selfloops(4, "grover")

    def unitary(amps, backend):
        return circuit_columns(k16, np.arange(k16.register.dim), backend)

    yield ("complete-16 unitary (256 cols)", k16.register.dim, unitary)


def best_of(fn, template, backend, repeats):
    times = []
    out = None
    for _ in range(repeats):
        amps = template.copy()
        t0 = time.perf_counter()
        out = fn(amps, backend)
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qubits", type=int, default=20)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if not _kernels.HAVE_NUMBA:
        print("numba not importable; only the numpy path can run")
        return 1
    rng = np.random.default_rng(args.seed)
    print(f"{'case':34s} {'dim':>9s} {'numpy s':>10s} {'numba s':>10s} {'speedup':>8s}")
    for name, dim, fn in cases(args.qubits, rng):
        template = random_state(dim, rng)[:, None].copy()
        fn(template.copy(), "numba")
        t_np, a = best_of(fn, template, "numpy", args.repeats)
        t_nb, b = best_of(fn, template, "numba", args.repeats)
        err = float(np.max(np.abs(a - b)))
        if err > 1e-10:
            raise SystemExit(f"{name}: backends disagree by {err:.2e}")
        print(f"{name:34s} {dim:9d} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
