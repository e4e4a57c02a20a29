"""Compare the compiled and pure-Python statevector kernels.

Usage: python benchmarks/bench_kernels.py [--qubits N] [--batch B] [--repeats R]

Times the three hot operations (single-qubit gate, per-row batched gate,
two-qubit diagonal) plus a full forward pass of the reference model on both
backends and prints the speedups.
"""

import argparse
import time

import numpy as np

from cutreg import _kernels_py


def _load_compiled():
    try:
        from cutreg import _kernels_cy

        return _kernels_cy
    except ImportError:
        return None


def _timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_kernels(impl, n, batch, repeats):
    rng = np.random.default_rng(0)
    dim = 1 << n
    psi = np.ascontiguousarray(
        rng.normal(size=(batch, dim)) + 1j * rng.normal(size=(batch, dim))
    )
    m = np.ascontiguousarray(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    ms = np.ascontiguousarray(np.broadcast_to(m, (batch, 2, 2)).copy())
    d = np.ascontiguousarray(np.exp(1j * rng.uniform(0, 2 * np.pi, 4)))
    q = n // 2
    return {
        "apply_1q": _timeit(lambda: impl.apply_1q(psi, q, m), repeats),
        "apply_1q_batch": _timeit(lambda: impl.apply_1q_batch(psi, q, ms), repeats),
        "apply_diag2": _timeit(lambda: impl.apply_diag2(psi, 0, n - 1, d), repeats),
        "expect_z": _timeit(lambda: impl.expect_z(psi, q), repeats),
    }


def bench_forward(backend_env, n, batch, repeats):
    """Full-model forward pass timed in a subprocess so the backend is fixed."""
    import os
    import subprocess
    import sys

    code = (
        "import time, numpy as np\n"
        "from cutreg.ansatz import AnsatzConfig, QmlModel\n"
        f"model = QmlModel(AnsatzConfig({n}, 3))\n"
        "rng = np.random.default_rng(0)\n"
        "theta = rng.uniform(-np.pi, np.pi, model.num_theta)\n"
        "alpha = rng.uniform(0, 2*np.pi, model.num_alpha)\n"
        f"X = rng.uniform(-np.pi, np.pi, ({batch}, model.config.num_features))\n"
        "model.forward_batch(theta, alpha, X)\n"
        "best = min(\n"
        "    (lambda s: (model.forward_batch(theta, alpha, X), time.perf_counter()-s)[1])(time.perf_counter())\n"
        f"    for _ in range({repeats}))\n"
        "print(best)\n"
    )
    env = dict(os.environ)
    env["CUTREG_PURE_PYTHON"] = backend_env
    out = subprocess.run([sys.executable, "-c", code], capture_output=True,
                         text=True, env=env, check=True)
    return float(out.stdout.strip())


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--qubits", type=int, default=12)
    parser.add_argument("--batch", type=int, default=64)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    compiled = _load_compiled()
    print(f"state size: {args.batch} x 2^{args.qubits}")
    py = bench_kernels(_kernels_py, args.qubits, args.batch, args.repeats)
    if compiled is None:
        print("compiled backend not available; showing pure-Python timings only")
        for name, t in py.items():
            print(f"{name:16s} python {t*1e3:8.3f} ms")
        return
    cy = bench_kernels(compiled, args.qubits, args.batch, args.repeats)
    print(f"{'kernel':16s} {'python':>10s} {'compiled':>10s} {'speedup':>8s}")
    for name in py:
        print(f"{name:16s} {py[name]*1e3:8.3f} ms {cy[name]*1e3:8.3f} ms "
              f"{py[name]/cy[name]:7.2f}x")

    fwd_py = bench_forward("1", 6, args.batch, args.repeats)
    fwd_cy = bench_forward("", 6, args.batch, args.repeats)
    print(f"{'model forward':16s} {fwd_py*1e3:8.3f} ms {fwd_cy*1e3:8.3f} ms "
          f"{fwd_py/fwd_cy:7.2f}x  (6-qubit reference model, batch {args.batch})")


if __name__ == "__main__":
    main()
