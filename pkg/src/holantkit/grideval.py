"""Signature grids and the brute-force Holant oracle.

A grid is a multigraph whose vertices carry signatures; every vertex port
is used by exactly one internal or dangling edge.  holant() enumerates all
d**edges assignments (ground truth for everything else in the package);
gadget_signature() sums over internal edges only, producing the dense
signature of a gadget with dangling edges.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import _kernels, holo
from .sigcore import (
    DEFAULT_CONFIG,
    EvalConfig,
    SignatureError,
    SymmetricSignature,
    Tensor,
    from_tensor,
    multiset_index,
    to_tensor,
)

Port = Tuple[int, int]  # (vertex index, port index)


class GridTooLargeError(RuntimeError):
    """Enumeration would exceed the configured edge cap."""


@dataclass
class SignatureGrid:
    """Vertices with signatures, internal edges, and ordered dangling edges."""

    domain_size: int
    vertices: List[Union[SymmetricSignature, Tensor, np.ndarray]] = field(default_factory=list)
    edges: List[Tuple[Port, Port]] = field(default_factory=list)
    dangling: List[Port] = field(default_factory=list)

    def add_vertex(self, sig) -> int:
        self.vertices.append(sig)
        return len(self.vertices) - 1

    def add_edge(self, a: Port, b: Port) -> None:
        self.edges.append((tuple(a), tuple(b)))

    def add_dangling(self, p: Port) -> None:
        self.dangling.append(tuple(p))

    def vertex_tensor(self, v: int) -> Tensor:
        t = to_tensor(self.vertices[v])
        if t.domain_size != self.domain_size:
            raise SignatureError(f"vertex {v} has domain size {t.domain_size}")
        return t

    def arity(self, v: int) -> int:
        return self.vertex_tensor(v).arity

    def validate(self) -> None:
        """Every port used exactly once; degrees match arities."""
        seen = {}
        for ref, (a, b) in enumerate(self.edges):
            for p in (a, b):
                if p in seen:
                    raise SignatureError(f"port {p} used more than once")
                seen[p] = ref
        for p in self.dangling:
            if p in seen:
                raise SignatureError(f"port {p} used more than once")
            seen[p] = None
        for v in range(len(self.vertices)):
            k = self.arity(v)
            ports = {p for p in seen if p[0] == v}
            if ports != {(v, i) for i in range(k)}:
                raise SignatureError(
                    f"vertex {v} (arity {k}) has ports {sorted(ports)}"
                )

    def port_assignment_map(self):
        """Map each vertex port to an edge slot id.

        Internal edges take slots 0..len(edges)-1, dangling edges follow in
        declared order.
        """
        slot = {}
        for ref, (a, b) in enumerate(self.edges):
            slot[a] = ref
            slot[b] = ref
        base = len(self.edges)
        for k, p in enumerate(self.dangling):
            slot[p] = base + k
        return slot


def bipartite_grid(
    left: Sequence, right: Sequence, edges: Sequence[Tuple[Port, Port]], domain_size: int = 3
) -> SignatureGrid:
    """Grid whose edges all cross between a left and a right vertex set.

    Edge endpoints are ((side-local vertex, port), ...) with left vertices
    first in the combined numbering; crossing is validated.
    """
    grid = SignatureGrid(domain_size=domain_size)
    for sig in left:
        grid.add_vertex(sig)
    offset = len(left)
    for sig in right:
        grid.add_vertex(sig)
    for (lv, lp), (rv, rp) in edges:
        if not (0 <= lv < offset and 0 <= rv < len(right)):
            raise SignatureError("bipartite edge must join a left and a right vertex")
        grid.add_edge((lv, lp), (rv + offset, rp))
    grid.validate()
    return grid


def _prepare(grid: SignatureGrid):
    slot = grid.port_assignment_map()
    values = []
    offsets = [0]
    port_edge = []
    port_weight = []
    port_offsets = [0]
    d = grid.domain_size
    for v in range(len(grid.vertices)):
        t = grid.vertex_tensor(v)
        values.append(t.entries)
        offsets.append(offsets[-1] + t.entries.size)
        for p in range(t.arity):
            port_edge.append(slot[(v, p)])
            port_weight.append(d ** (t.arity - 1 - p))
        port_offsets.append(len(port_edge))
    values = np.concatenate(values) if values else np.zeros(0, dtype=np.complex128)
    return (
        values,
        np.array(offsets, dtype=np.int64),
        np.array(port_edge, dtype=np.int64),
        np.array(port_weight, dtype=np.int64),
        np.array(port_offsets, dtype=np.int64),
    )


def _check_cap(n_edges: int, cfg: EvalConfig):
    if n_edges > cfg.edge_cap:
        raise GridTooLargeError(
            f"{n_edges} edges exceeds the brute-force cap of {cfg.edge_cap} "
            f"({cfg.edge_cap} edges = {3 ** cfg.edge_cap} assignments on domain 3); "
            "raise EvalConfig.edge_cap to override"
        )


def holant(grid: SignatureGrid, cfg: EvalConfig = DEFAULT_CONFIG) -> complex:
    """Exact Holant value: sum over edge assignments of vertex products.

    The empty grid evaluates to 1.  Dangling edges are not allowed here;
    use gadget_signature for open gadgets.
    """
    if grid.dangling:
        raise SignatureError("holant is defined for grids without dangling edges")
    grid.validate()
    _check_cap(len(grid.edges), cfg)
    if not grid.vertices:
        return 1.0 + 0.0j
    arrays = _prepare(grid)
    return _kernels.eval_assignments(*arrays, len(grid.edges), grid.domain_size)


def gadget_signature(grid: SignatureGrid, cfg: EvalConfig = DEFAULT_CONFIG) -> Tensor:
    """Signature of a gadget: sum over internal edges per dangling assignment.

    The dangling declaration order is the index order of the result.
    """
    if not grid.dangling:
        raise SignatureError("gadget_signature needs at least one dangling edge")
    grid.validate()
    d = grid.domain_size
    k = len(grid.dangling)
    _check_cap(len(grid.edges) + k, cfg)
    arrays = _prepare(grid)
    out = np.empty((d,) * k, dtype=np.complex128)
    for tau in itertools.product(range(d), repeat=k):
        out[tau] = _kernels.eval_assignments(
            *arrays, len(grid.edges), d, fixed=np.array(tau, dtype=np.int64)
        )
    return Tensor(d, k, out)


# ---------------------------------------------------------------------------
# Regression fixtures: small gadgets with known closed-form signatures.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FixtureResult:
    name: str
    params: tuple
    residual: float


@dataclass(frozen=True)
class FixtureReport:
    results: Tuple[FixtureResult, ...]

    @property
    def max_residual(self) -> float:
        return max((r.residual for r in self.results), default=0.0)


def _sym3(entries) -> SymmetricSignature:
    return SymmetricSignature(3, 3, np.asarray(entries, dtype=np.complex128))


def _rel_residual(got: np.ndarray, want: np.ndarray) -> float:
    scale = max(1.0, float(np.abs(want).max(initial=0.0)))
    return float(np.abs(np.asarray(got) - np.asarray(want)).max(initial=0.0)) / scale


def _capped_binary_chain(mids: Sequence[np.ndarray]) -> SignatureGrid:
    """cap(=GR, dangling) - mids... - cap(=GR, dangling) as a grid chain."""
    grid = SignatureGrid(domain_size=3)
    caps = [Tensor(3, 2, holo.EQ_GR), Tensor(3, 2, holo.EQ_GR)]
    left = grid.add_vertex(caps[0])
    grid.add_dangling((left, 0))
    prev = (left, 1)
    for m in mids:
        v = grid.add_vertex(Tensor(3, 2, np.asarray(m, dtype=np.complex128)))
        grid.add_edge(prev, (v, 0))
        prev = (v, 1)
    right = grid.add_vertex(caps[1])
    grid.add_edge(prev, (right, 0))
    grid.add_dangling((right, 1))
    return grid


def _decorated_vertex(grid: SignatureGrid, f: SymmetricSignature, u) -> int:
    """Ternary vertex with a pendant unary on its first port."""
    v = grid.add_vertex(f)
    pendant = grid.add_vertex(np.asarray(u, dtype=np.complex128))
    grid.add_edge((v, 0), (pendant, 0))
    return v


def _weed_gadget_grid(f: SymmetricSignature, u) -> SignatureGrid:
    """Two decorated copies of f joined by an edge, capped with =_{G,R}."""
    grid = SignatureGrid(domain_size=3)
    v1 = _decorated_vertex(grid, f, u)
    v2 = _decorated_vertex(grid, f, u)
    grid.add_edge((v1, 1), (v2, 1))
    for v in (v1, v2):
        cap = grid.add_vertex(Tensor(3, 2, holo.EQ_GR))
        grid.add_edge((v, 2), (cap, 0))
        grid.add_dangling((cap, 1))
    return grid


def _weed_gadget_fixture(params, cfg) -> float:
    g, y, w, x, z, a, b, al, be, ga = params
    f = _sym3([g, y, w, x, 0, z, a, 0, 0, b])
    got = gadget_signature(_weed_gadget_grid(f, (al, be, ga)), cfg)
    gr = np.array([got.value((1, 1)), got.value((1, 2)), got.value((2, 2))])
    want = np.array(
        [
            (al * y + be * x) ** 2 + (al * x + be * a) ** 2,
            (al * y + be * x) * (al * w + ga * z),
            (al * w + ga * z) ** 2 + (al * z + ga * b) ** 2,
        ]
    )
    stray = max(abs(got.value((0, c))) for c in range(3))
    return max(_rel_residual(gr, want), stray / max(1.0, float(np.abs(want).max())))


def _triangle_gadget_fixture(params, cfg) -> float:
    a, b = params
    f = _sym3([0, 0, 0, a, b, 0, 1, 0, 0, 0])
    mid = from_tensor(
        Tensor(3, 2, np.array([[f.value((x, y, 1)) for y in range(3)] for x in range(3)])),
        check=False,
    )
    grid = SignatureGrid(domain_size=3)
    corners = [grid.add_vertex(f) for _ in range(3)]
    for c in corners:
        grid.add_dangling((c, 0))
    for i in range(3):
        j = (i + 1) % 3
        l1 = grid.add_vertex(Tensor(3, 2, holo.NEQ_B_GR))
        m = grid.add_vertex(mid)
        l2 = grid.add_vertex(Tensor(3, 2, holo.NEQ_B_GR))
        grid.add_edge((corners[i], 1), (l1, 0))
        grid.add_edge((l1, 1), (m, 0))
        grid.add_edge((m, 1), (l2, 0))
        grid.add_edge((l2, 1), (corners[j], 2))
    got = gadget_signature(grid, cfg)
    gr = np.array(
        [got.value((1, 1, 1)), got.value((1, 1, 2)), got.value((1, 2, 2)), got.value((2, 2, 2))]
    )
    want = np.array(
        [3 * b**4 + 16 * a**3 * b**3, 8 * a**2 * b**4, 4 * a * b**5, 2 * b**6]
    )
    return _rel_residual(gr, want)


def _chain_case_fixture(f, u_outer, u_mid, want, with_links, cfg) -> float:
    """Chain of three decorated ternaries between =_{G,R} caps.

    with_links inserts a disequality link between every adjacent pair,
    matching the bipartite construction the chain comes from.
    """
    grid = SignatureGrid(domain_size=3)
    left = grid.add_vertex(Tensor(3, 2, holo.EQ_GR))
    grid.add_dangling((left, 0))
    prev = (left, 1)

    def link(prev):
        if not with_links:
            return prev
        l = grid.add_vertex(Tensor(3, 2, holo.NEQ_B_GR))
        grid.add_edge(prev, (l, 0))
        return (l, 1)

    for u in (u_outer, u_mid, u_outer):
        prev = link(prev)
        v = _decorated_vertex(grid, f, u)
        grid.add_edge(prev, (v, 1))
        prev = (v, 2)
    prev = link(prev)
    right = grid.add_vertex(Tensor(3, 2, holo.EQ_GR))
    grid.add_edge(prev, (right, 0))
    grid.add_dangling((right, 1))
    got = gadget_signature(grid, cfg)
    gr = np.array([got.value((1, 1)), got.value((1, 2)), got.value((2, 2))])
    return _rel_residual(gr, np.asarray(want))


def _case1_fixture(params, cfg) -> float:
    g, a, b, p, t = params
    q = 1j * np.sqrt(1 + p * p + 0j)  # p^2 + q^2 + 1 = 0
    f = _sym3([g, a * p * p, b * q * q, a * p, 0, b * q, a, 0, 0, b])
    delta = g - a * p**3 - b * q**3
    want = [
        p * p * delta + a * t * (p * p + 1) ** 2,
        p * q * delta + a * p * q * t * (p * p + 1),
        q * q * delta + a * p * p * q * q * t,
    ]
    res = _chain_case_fixture(f, (0, 1 / a, 1 / b), (1, t - p, -q), want, False, cfg)
    # determinant identity at t = 1/a
    g0 = p * p * delta + (p * p + 1) ** 2
    g1 = p * q * delta + p * q * (p * p + 1)
    g2 = q * q * delta + p * p * q * q
    det_res = abs((g0 * g2 - g1 * g1) - delta * q * q) / max(1.0, abs(delta))
    return max(res, det_res)


def _case2_fixture(params, cfg) -> float:
    g, a, b, p, t = params
    q = -1.0 / p  # p q = -1
    f = _sym3([g, a * p * p, b * q * q, a * p, 0, b * q, a, 0, 0, b])
    delta = g - a * p**3 - b * q**3
    want = [
        q * q * delta + a * t * (p * q + 1) ** 2,
        p * q * delta + a * p * p * t * (p * q + 1),
        p * p * delta + a * p**4 * t,
    ]
    return _chain_case_fixture(f, (0, 1 / a, 1 / b), (1, t - p, -q), want, True, cfg)


def _case3_fixture(params, cfg) -> float:
    g, a, y, t = params
    f = _sym3([g, a * y * y - 1, y * y, a * y - 1 / (2 * y), y, 0, a, 1, 0, 0])
    delta = g - a * y**3 + 1.5 * y
    want = [
        y * y * delta + y**4 * t,
        -delta / 2 + y * y * t / 2,
        delta / (4 * y * y) + t / 4,
    ]
    return _chain_case_fixture(f, (0, 1, -a), (1, -y, t + 1 / (2 * y)), want, True, cfg)


def double_vertex_h4(f: SymmetricSignature, cfg: EvalConfig = DEFAULT_CONFIG) -> Tensor:
    """Arity-4 gadget: two copies of f sharing one edge, outputs restricted
    to the {G, R} subdomain (a 2x2x2x2 tensor on that subdomain)."""
    grid = SignatureGrid(domain_size=3)
    v1 = grid.add_vertex(f)
    v2 = grid.add_vertex(f)
    grid.add_edge((v1, 2), (v2, 0))
    for p in ((v1, 0), (v1, 1), (v2, 1), (v2, 2)):
        grid.add_dangling(p)
    full = gadget_signature(grid, cfg)
    sub = full.array[np.ix_([1, 2], [1, 2], [1, 2], [1, 2])]
    return Tensor(2, 4, sub)


def _h4_fixture(params, cfg) -> float:
    u, t, r, s, p, q = params
    f = _sym3([u, t, r, s, p, q, 1, 0, 0, 0])
    h = double_vertex_h4(f, cfg)
    from .sigcore import matrix_form

    m1 = matrix_form(h, "12|34")
    m2 = matrix_form(h, "13|24")
    want1 = np.array(
        [
            [s * s + 1, s * p, s * p, s * q],
            [s * p, p * p, p * p, p * q],
            [s * p, p * p, p * p, p * q],
            [s * q, p * q, p * q, q * q],
        ]
    )
    want2 = np.array(
        [
            [s * s + 1, s * p, s * p, p * p],
            [s * p, s * q, p * p, p * q],
            [s * p, p * p, s * q, p * q],
            [p * p, p * q, p * q, q * q],
        ]
    )
    return max(_rel_residual(m1, want1), _rel_residual(m2, want2))


_FIXTURES: List[Tuple[str, Callable, List[tuple]]] = [
    (
        "binary-weed-gadget",
        _weed_gadget_fixture,
        [
            (1, 2, 3, 4, 5, 6, 7, 1, 1, 1),
            (2.0, -1.0, 0.5, 1.5, 1.0, 3.0, -2.0, 1.0, 0.5, -1.5),
            (1j, 2, 1 + 1j, -1, 2j, 1, 3, 1, 1j, 2),
            (1, 2, 3, 4, 5, 6, 7, 0, 0, 0),
        ],
    ),
    (
        "triangle-chain-gadget",
        _triangle_gadget_fixture,
        [(1, 2), (2, 1), (1.5, -0.5), (0.5 + 0.5j, 1.25)],
    ),
    (
        "matrix-chain-case1",
        _case1_fixture,
        [(2.0, 1.5, 0.7, 0.9, 0.31), (1j, 2.0, 1.0, 0.4, 1.2), (-1.0, 0.5, 2.5, 1.1, 0.0)],
    ),
    (
        "matrix-chain-case2",
        _case2_fixture,
        [(1.3, 0.8, 2.1, 1.7, 0.9), (0.5j, 1.0, 1.0, 0.6, 1.0), (2.0, 2.0, 0.5, -1.3, 0.25)],
    ),
    (
        "matrix-chain-case3",
        _case3_fixture,
        [(2.2, 0.6, 1.4, 0.8), (1.0, 1.0, 0.5, 1.0), (-0.7, 1.5, -1.1, 0.4)],
    ),
    (
        "double-vertex-arity4",
        _h4_fixture,
        [(1.0, 2.0, 0.5, 1.5, 0.7, -0.3), (0.0, 1.0, 1.0, 0.0, 0.0, 2.0), (1j, 0.5, 1.0, 2.0, 1.0, 0.0)],
    ),
]


def regression_fixture_suite(cfg: EvalConfig = DEFAULT_CONFIG) -> FixtureReport:
    """Evaluate every catalogued gadget and compare to its closed form."""
    results = []
    for name, fixture, param_sets in _FIXTURES:
        for params in param_sets:
            results.append(FixtureResult(name, params, fixture(params, cfg)))
    return FixtureReport(tuple(results))
