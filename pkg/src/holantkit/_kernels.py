"""Brute-force enumeration kernels for Holant sums.

The hot loop walks all d**n_edges edge assignments in odometer order and
accumulates the product of vertex-table lookups with Kahan compensation.
A numba-jitted kernel is used by default; setting HOLANTKIT_PURE_NUMPY=1
(or a missing numba install) selects a chunked pure-numpy path that
enumerates the same assignments in the same order.  Both paths are
deterministic; benchmarks/bench_kernels.py compares them.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_FLAG = "HOLANTKIT_PURE_NUMPY"


def _numba_requested() -> bool:
    return os.environ.get(_ENV_FLAG, "").strip() not in ("1", "true", "yes")


USING_NUMBA = False
if _numba_requested():
    try:
        from numba import njit

        USING_NUMBA = True
    except ImportError:  # pragma: no cover - exercised only without numba
        USING_NUMBA = False


def _eval_fixed_py(values, offsets, port_edge, port_weight, port_offsets,
                   n_edges, d, fixed):
    """Reference loop: sum over assignments of the free edges.

    fixed holds assignments for edge ids >= n_edges (dangling slots);
    edge ids < n_edges are enumerated.  Returns (re, im) Kahan-summed
    in odometer order (edge 0 is the fastest digit).
    """
    n_vertices = offsets.shape[0] - 1
    assign = np.zeros(n_edges + fixed.shape[0], dtype=np.int64)
    assign[n_edges:] = fixed
    total = n_edges
    count = d**total if total > 0 else 1
    s_re = s_im = c_re = c_im = 0.0
    for _ in range(count):
        prod = 1.0 + 0.0j
        for v in range(n_vertices):
            idx = 0
            for p in range(port_offsets[v], port_offsets[v + 1]):
                idx += assign[port_edge[p]] * port_weight[p]
            prod *= values[offsets[v] + idx]
        y = prod.real - c_re
        t = s_re + y
        c_re = (t - s_re) - y
        s_re = t
        y = prod.imag - c_im
        t = s_im + y
        c_im = (t - s_im) - y
        s_im = t
        for e in range(total):
            assign[e] += 1
            if assign[e] < d:
                break
            assign[e] = 0
    return s_re, s_im


if USING_NUMBA:
    _eval_fixed_jit = njit(cache=True)(_eval_fixed_py)
else:
    _eval_fixed_jit = None


def _eval_fixed_numpy(values, offsets, port_edge, port_weight, port_offsets,
                      n_edges, d, fixed):
    """Vectorized fallback: enumerate a block of edges at once, loop the rest.

    Assignment order matches the odometer of the jit path; chunk sums use
    numpy pairwise summation and chunks combine with Kahan compensation.
    """
    n_vertices = offsets.shape[0] - 1
    block = min(n_edges, 10)
    n_block = d**block
    outer_edges = n_edges - block
    digits = np.empty((n_block, n_edges + fixed.shape[0]), dtype=np.int64)
    rem = np.arange(n_block)
    for e in range(block):
        digits[:, e] = rem % d
        rem //= d
    if fixed.shape[0]:
        digits[:, n_edges:] = fixed
    s_re = s_im = c_re = c_im = 0.0
    outer = np.zeros(max(outer_edges, 1), dtype=np.int64)
    n_outer = d**outer_edges if outer_edges > 0 else 1
    for _ in range(n_outer):
        if outer_edges:
            digits[:, block:n_edges] = outer
        prod = np.ones(n_block, dtype=np.complex128)
        for v in range(n_vertices):
            idx = np.zeros(n_block, dtype=np.int64)
            for p in range(port_offsets[v], port_offsets[v + 1]):
                idx += digits[:, port_edge[p]] * port_weight[p]
            prod *= values[offsets[v] + idx]
        chunk = complex(prod.sum())
        y = chunk.real - c_re
        t = s_re + y
        c_re = (t - s_re) - y
        s_re = t
        y = chunk.imag - c_im
        t = s_im + y
        c_im = (t - s_im) - y
        s_im = t
        for e in range(outer_edges):
            outer[e] += 1
            if outer[e] < d:
                break
            outer[e] = 0
    return s_re, s_im


def eval_assignments(values, offsets, port_edge, port_weight, port_offsets,
                     n_edges, d, fixed=None, force_numpy=False):
    """Sum over all assignments of the first n_edges edge slots."""
    if fixed is None:
        fixed = np.empty(0, dtype=np.int64)
    args = (
        np.ascontiguousarray(values, dtype=np.complex128),
        np.ascontiguousarray(offsets, dtype=np.int64),
        np.ascontiguousarray(port_edge, dtype=np.int64),
        np.ascontiguousarray(port_weight, dtype=np.int64),
        np.ascontiguousarray(port_offsets, dtype=np.int64),
        int(n_edges),
        int(d),
        np.ascontiguousarray(fixed, dtype=np.int64),
    )
    if USING_NUMBA and not force_numpy:
        re, im = _eval_fixed_jit(*args)
    else:
        re, im = _eval_fixed_numpy(*args)
    return complex(re, im)
