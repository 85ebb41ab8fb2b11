"""Compare the jitted and pure-numpy Holant enumeration kernels.

Usage: python benchmarks/bench_kernels.py [edges]

Builds a random 3-regular-ish grid with the requested number of edges
(default 12, ~531k assignments on domain 3) and times both kernel paths
on the same prepared arrays.
"""

import sys
import time

import numpy as np

from holantkit import _kernels
from holantkit.grideval import SignatureGrid, _prepare
from holantkit.sigcore import SymmetricSignature


def ring_grid(n_vertices: int) -> SignatureGrid:
    """Ring of ternary vertices with alternating chords (3-regular)."""
    rng = np.random.default_rng(0)
    f = SymmetricSignature(3, 3, rng.normal(size=10) + 1j * rng.normal(size=10))
    grid = SignatureGrid(domain_size=3)
    for _ in range(n_vertices):
        grid.add_vertex(f)
    for v in range(n_vertices):
        grid.add_edge((v, 0), ((v + 1) % n_vertices, 1))
    for v in range(0, n_vertices, 2):
        grid.add_edge((v, 2), ((v + 1) % n_vertices, 2))
    grid.validate()
    return grid


def main():
    edges = int(sys.argv[1]) if len(sys.argv) > 1 else 12
    n_vertices = (2 * edges) // 3
    if n_vertices % 2:
        n_vertices += 1
    grid = ring_grid(n_vertices)
    arrays = _prepare(grid)
    n_edges = len(grid.edges)
    print(f"grid: {n_vertices} vertices, {n_edges} edges, 3^{n_edges} = {3**n_edges} terms")

    def run(force_numpy, label):
        # warm-up covers jit compilation
        _kernels.eval_assignments(*arrays, n_edges, 3, force_numpy=force_numpy)
        best = float("inf")
        for _ in range(3):
            t0 = time.perf_counter()
            val = _kernels.eval_assignments(*arrays, n_edges, 3, force_numpy=force_numpy)
            best = min(best, time.perf_counter() - t0)
        print(f"{label:12s} {best * 1e3:10.2f} ms   value={val:.6g}")
        return val

    v_np = run(True, "pure numpy")
    if _kernels.USING_NUMBA:
        v_nb = run(False, "numba")
        print(f"paths agree to {abs(v_np - v_nb) / max(1.0, abs(v_np)):.2e} relative")
    else:
        print("numba unavailable or disabled (HOLANTKIT_PURE_NUMPY set); numpy path only")


if __name__ == "__main__":
    main()
