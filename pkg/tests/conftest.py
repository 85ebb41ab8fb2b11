"""Shared builders: reference grids, random tractable signatures, random
decorated instances, and independent brute-force helpers."""

import itertools

import numpy as np
import pytest

from holantkit import holo
from holantkit.grideval import SignatureGrid
from holantkit.sigcore import EvalConfig, SymmetricSignature, Tensor, from_tensor, tensor_power

PAPER_F = SymmetricSignature(3, 3, np.array([3, 1, 1, 5, 1, 3, 7, 5, 1, 1], dtype=complex))
PAPER_VECTORS = (
    np.array([1.0, -1.0, 1.0], dtype=complex),
    np.array([1.0, 0.0, -1.0], dtype=complex),
    np.array([1.0, 2.0, 1.0], dtype=complex),
)

FORM2_F = from_tensor(
    Tensor(
        3,
        3,
        tensor_power(holo.BETA0, 3).array
        + tensor_power(holo.BETA0_BAR, 3).array
        + 2.0 * tensor_power(holo.E3, 3).array,
    )
)

FORM3_F = SymmetricSignature(3, 3, np.array([1, 1j, 0, -1, 0, 0, -1j, 0, 0, 0]))

HARD_F = SymmetricSignature(3, 3, np.array([0, 0, 0, 1, 0, 0, 0, 1, 0, 0], dtype=complex))

EQ3_TERNARY = SymmetricSignature(3, 3, np.array([1, 0, 0, 0, 0, 0, 1, 0, 0, 1], dtype=complex))


@pytest.fixture
def cfg():
    return EvalConfig()


def theta_grid(f, n_parallel=3):
    grid = SignatureGrid(domain_size=f.domain_size)
    grid.add_vertex(f)
    grid.add_vertex(f)
    for p in range(n_parallel):
        grid.add_edge((0, p), (1, p))
    return grid


def complete_graph_grid(f, n):
    """K_n with every vertex labeled f (arity must equal n - 1)."""
    grid = SignatureGrid(domain_size=f.domain_size)
    for _ in range(n):
        grid.add_vertex(f)
    next_port = [0] * n
    for a, b in itertools.combinations(range(n), 2):
        grid.add_edge((a, next_port[a]), (b, next_port[b]))
        next_port[a] += 1
        next_port[b] += 1
    return grid


def k33_grid(f):
    grid = SignatureGrid(domain_size=f.domain_size)
    for _ in range(6):
        grid.add_vertex(f)
    for i in range(3):
        for j in range(3):
            grid.add_edge((i, j), (3 + j, i))
    return grid


def decorated_cycle(f, unaries):
    """Cycle of ternary vertices, each carrying one pendant unary."""
    n = len(unaries)
    grid = SignatureGrid(domain_size=3)
    vs = [grid.add_vertex(f) for _ in range(n)]
    for v, u in zip(vs, unaries):
        p = grid.add_vertex(np.asarray(u, dtype=complex))
        grid.add_edge((v, 0), (p, 0))
    if n == 1:
        grid.add_edge((vs[0], 1), (vs[0], 2))
    else:
        for i in range(n):
            grid.add_edge((vs[i], 1), (vs[(i + 1) % n], 2))
    return grid


def crandn(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_orthogonal3(rng, spread=0.7):
    """Random complex orthogonal 3x3 from three complex plane rotations."""
    t = np.eye(3, dtype=complex)
    for (i, j) in ((0, 1), (0, 2), (1, 2)):
        z = rng.uniform(-2.0, 2.0) + 1j * rng.uniform(-spread, spread)
        c, s = np.cos(z), np.sin(z)
        g = np.eye(3, dtype=complex)
        g[i, i] = c
        g[i, j] = s
        g[j, i] = -s
        g[j, j] = c
        t = g @ t
    if rng.random() < 0.5:
        t = t[::-1]
    return t


def random_separated_transform(rng):
    """Random block-diagonal (1 + 2) transform, not necessarily orthogonal."""
    t = np.zeros((3, 3), dtype=complex)
    t[0, 0] = crandn(rng)
    t[1:, 1:] = crandn(rng, 2, 2)
    return t


def random_tractable(form, rng):
    """Random certified-tractable ternary of the requested form."""
    q = random_orthogonal3(rng)
    if form == "FORM1":
        coeffs = crandn(rng, 3)
        if rng.random() < 0.25:
            coeffs[rng.integers(3)] = 0.0
        arr = sum(c * tensor_power(q @ e, 3).array for c, e in zip(coeffs, np.eye(3)))
        return from_tensor(Tensor(3, 3, arr))
    if form == "FORM2":
        k1, k2 = crandn(rng, 2)
        while min(abs(k1), abs(k2)) < 0.2:
            k1, k2 = crandn(rng, 2)
        a = crandn(rng) if rng.random() < 0.8 else 0.0
        arr = (
            k1 * tensor_power(q @ holo.BETA0, 3).array
            + k2 * tensor_power(q @ holo.BETA0_BAR, 3).array
            + a * tensor_power(q @ holo.E3, 3).array
        )
        return from_tensor(Tensor(3, 3, arr))
    if form == "FORM3":
        x, y, z, w = crandn(rng, 4)
        annihilated = SymmetricSignature(
            3, 3, np.array([x, x * 1j, y, -x, y * 1j, z, -x * 1j, -y, z * 1j, w])
        ).to_tensor().array
        gamma = crandn(rng, 3) if rng.random() < 0.7 else np.zeros(3, dtype=complex)
        b = holo.BETA0
        arr = annihilated + (
            np.einsum("i,j,k->ijk", b, b, gamma)
            + np.einsum("i,j,k->ijk", b, gamma, b)
            + np.einsum("i,j,k->ijk", gamma, b, b)
        )
        arr = np.einsum("ai,bj,ck,ijk->abc", q, q, q, arr)
        return from_tensor(Tensor(3, 3, arr))
    raise ValueError(form)


def random_instance(f, rng, max_edges=8, max_ternary=4):
    """Random connected grid of f-vertices with pendant unary decorations."""
    for _ in range(200):
        n3 = int(rng.integers(1, max_ternary + 1))
        ports = [(v, p) for v in range(n3) for p in range(3)]
        rng.shuffle(ports)
        k_max = (3 * n3) // 2
        k_min = max(0, 3 * n3 - max_edges)
        if k_min > k_max:
            continue
        k = int(rng.integers(k_min, k_max + 1))
        if 3 * n3 - k > max_edges:
            continue
        grid = SignatureGrid(domain_size=3)
        for _ in range(n3):
            grid.add_vertex(f)
        pairs = [(ports[2 * i], ports[2 * i + 1]) for i in range(k)]
        for a, b in pairs:
            grid.add_edge(a, b)
        for p in ports[2 * k:]:
            u = grid.add_vertex(crandn(rng, 3))
            grid.add_edge(p, (u, 0))
        # connectivity over the ternary cores
        adj = {v: set() for v in range(n3)}
        for a, b in pairs:
            adj[a[0]].add(b[0])
            adj[b[0]].add(a[0])
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for w in adj[x]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != n3:
            continue
        grid.validate()
        return grid
    raise RuntimeError("instance generation failed")


def brute_reference(grid):
    """Slow, independent Holant sum written directly from the definition."""
    slot = grid.port_assignment_map()
    d = grid.domain_size
    tensors = [np.asarray(grid.vertex_tensor(v).array) for v in range(len(grid.vertices))]
    total = 0.0 + 0.0j
    for sigma in itertools.product(range(d), repeat=len(grid.edges)):
        prod = 1.0 + 0.0j
        for v, t in enumerate(tensors):
            idx = tuple(sigma[slot[(v, p)]] for p in range(t.ndim))
            prod *= t[idx]
        total += prod
    return total
