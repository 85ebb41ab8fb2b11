import itertools

import numpy as np
import pytest

from holantkit import holo
from holantkit.grideval import (
    GridTooLargeError,
    SignatureGrid,
    bipartite_grid,
    double_vertex_h4,
    gadget_signature,
    holant,
    regression_fixture_suite,
)
from holantkit.sigcore import (
    EvalConfig,
    SignatureError,
    SymmetricSignature,
    Tensor,
    from_tensor,
    matrix_form,
)

from conftest import (
    PAPER_F,
    brute_reference,
    complete_graph_grid,
    crandn,
    random_instance,
    theta_grid,
)


def test_empty_grid_is_one():
    assert holant(SignatureGrid(domain_size=3)) == 1


def test_theta_graph_paper_value():
    # 251 = 27 + 8 + 216, the component-product value on two vertices
    assert abs(holant(theta_grid(PAPER_F)) - 251) < 1e-9


def test_k4_paper_value():
    assert abs(holant(complete_graph_grid(PAPER_F, 4)) - 47449) < 1e-6


def test_dangling_edges_rejected():
    g = theta_grid(PAPER_F)
    g.add_vertex(np.array([1.0, 0, 0]))
    g.add_dangling((2, 0))
    with pytest.raises(SignatureError):
        holant(g)


def test_validation_catches_port_reuse():
    g = SignatureGrid(domain_size=3)
    g.add_vertex(PAPER_F)
    g.add_vertex(PAPER_F)
    g.add_edge((0, 0), (1, 0))
    g.add_edge((0, 0), (1, 1))
    g.add_edge((0, 1), (1, 2))
    with pytest.raises(SignatureError):
        g.validate()


def test_matches_reference_on_random_grids():
    rng = np.random.default_rng(42)
    for _ in range(25):
        f = SymmetricSignature(3, 3, crandn(rng, 10))
        grid = random_instance(f, rng, max_edges=6, max_ternary=3)
        got = holant(grid)
        want = brute_reference(grid)
        assert abs(got - want) <= 1e-10 * max(1.0, abs(want))


def test_relabeling_invariance():
    rng = np.random.default_rng(17)
    f = SymmetricSignature(3, 3, crandn(rng, 10))
    grid = random_instance(f, rng, max_edges=7)
    base = holant(grid)
    perm = list(rng.permutation(len(grid.vertices)))
    relabeled = SignatureGrid(domain_size=3)
    for old in sorted(range(len(grid.vertices)), key=lambda v: perm[v]):
        pass
    order = sorted(range(len(grid.vertices)), key=lambda v: perm[v])
    for v in order:
        relabeled.add_vertex(grid.vertices[v])
    where = {v: i for i, v in enumerate(order)}
    edges = list(grid.edges)
    rng.shuffle(edges)
    for (a, b) in edges:
        relabeled.add_edge((where[a[0]], a[1]), (where[b[0]], b[1]))
    assert abs(holant(relabeled) - base) <= 1e-12 * max(1.0, abs(base))


def test_edge_cap_refusal():
    g = theta_grid(PAPER_F)
    with pytest.raises(GridTooLargeError):
        holant(g, EvalConfig(edge_cap=2))
    # the cap is configuration, not a hard limit
    assert abs(holant(g, EvalConfig(edge_cap=3)) - 251) < 1e-9


def test_gadget_identity_vertex():
    g = SignatureGrid(domain_size=3)
    g.add_vertex(PAPER_F)
    for p in range(3):
        g.add_dangling((0, p))
    got = gadget_signature(g)
    assert np.allclose(got.array, PAPER_F.to_tensor().array)


def test_gadget_chain_is_matrix_product():
    rng = np.random.default_rng(5)
    a = crandn(rng, 3, 3)
    b = crandn(rng, 3, 3)
    g = SignatureGrid(domain_size=3)
    g.add_vertex(Tensor(3, 2, a))
    g.add_vertex(Tensor(3, 2, b))
    g.add_edge((0, 1), (1, 0))
    g.add_dangling((0, 0))
    g.add_dangling((1, 1))
    got = gadget_signature(g)
    assert np.allclose(got.array, a @ b)


def test_gadget_compositionality():
    # replacing a two-vertex sub-gadget by its computed signature keeps the
    # full Holant value
    rng = np.random.default_rng(77)
    for _ in range(50):
        f = SymmetricSignature(3, 3, crandn(rng, 10))
        grid = random_instance(f, rng, max_edges=7, max_ternary=3)
        pair = None
        for eid, (a, b) in enumerate(grid.edges):
            ta = grid.vertex_tensor(a[0]).arity
            tb = grid.vertex_tensor(b[0]).arity
            if a[0] != b[0] and ta == 3 and tb == 3:
                pair = (eid, a[0], b[0])
                break
        if pair is None:
            continue
        eid, va, vb = pair
        sub = SignatureGrid(domain_size=3)
        sub.add_vertex(grid.vertices[va])
        sub.add_vertex(grid.vertices[vb])
        local = {va: 0, vb: 1}
        boundary = []  # (original port) in dangling order
        for e2, (a, b) in enumerate(grid.edges):
            ends_in = [p for p in (a, b) if p[0] in local]
            if e2 == eid or (len(ends_in) == 2 and a[0] != b[0] and e2 == eid):
                pass
            if len(ends_in) == 2 and {a[0], b[0]} == {va, vb}:
                sub.add_edge((local[a[0]], a[1]), (local[b[0]], b[1]))
            elif len(ends_in) == 2:  # self-loop inside one sub vertex
                sub.add_edge((local[a[0]], a[1]), (local[b[0]], b[1]))
            else:
                for p in ends_in:
                    sub.add_dangling((local[p[0]], p[1]))
                    boundary.append(p)
        sig = gadget_signature(sub)
        reduced = SignatureGrid(domain_size=3)
        keep = {}
        for v in range(len(grid.vertices)):
            if v not in local:
                keep[v] = reduced.add_vertex(grid.vertices[v])
        new_v = reduced.add_vertex(sig)
        port_of = {p: (new_v, i) for i, p in enumerate(boundary)}
        for e2, (a, b) in enumerate(grid.edges):
            if a[0] in local and b[0] in local:
                continue
            pa = port_of.get(a, (keep.get(a[0]), a[1]))
            pb = port_of.get(b, (keep.get(b[0]), b[1]))
            if pa[0] is None or pb[0] is None:
                continue
            reduced.add_edge(pa, pb)
        want = holant(grid)
        got = holant(reduced)
        assert abs(got - want) <= 1e-9 * max(1.0, abs(want))


def test_gadget_symmetric_output_when_symmetric():
    # a symmetric star gadget produces a permutation-invariant signature
    rng = np.random.default_rng(9)
    f = SymmetricSignature(3, 3, crandn(rng, 10))
    g = SignatureGrid(domain_size=3)
    g.add_vertex(f)
    u = g.add_vertex(crandn(rng, 3))
    g.add_edge((0, 0), (u, 0))
    g.add_dangling((0, 1))
    g.add_dangling((0, 2))
    got = gadget_signature(g)
    assert got.is_symmetric()


def test_bipartite_grid_validation():
    eq = Tensor(3, 2, np.eye(3, dtype=complex))
    g = bipartite_grid([eq], [eq], [(((0, 0)), ((0, 0))), ((0, 1), (0, 1))])
    assert abs(holant(g) - 3.0) < 1e-12
    with pytest.raises(SignatureError):
        bipartite_grid([eq], [eq], [((0, 0), (1, 0))])


def test_weed_gadget_pinned_point():
    # frozen closed-form values at the integer parameter point
    from holantkit.grideval import _sym3, _weed_gadget_grid

    f = _sym3([1, 2, 3, 4, 0, 5, 6, 0, 0, 7])
    got = gadget_signature(_weed_gadget_grid(f, (1, 1, 1)))
    assert abs(got.value((1, 1)) - 136) < 1e-9
    assert abs(got.value((1, 2)) - 48) < 1e-9
    assert abs(got.value((2, 2)) - 208) < 1e-9


def test_triangle_gadget_pinned_point():
    from holantkit.grideval import _triangle_gadget_fixture

    assert _triangle_gadget_fixture((1, 2), EvalConfig()) < 1e-12


def test_double_vertex_h4_matches_display():
    u, t, r, s, p, q = 1.0, 2.0, 0.5, 0.0, 0.0, 1.5
    f = SymmetricSignature(3, 3, np.array([u, t, r, s, p, q, 1, 0, 0, 0], dtype=complex))
    h = double_vertex_h4(f)
    m = matrix_form(h, "12|34")
    want = np.zeros((4, 4), dtype=complex)
    want[0, 0] = s * s + 1
    want[0, 3] = want[3, 0] = s * q
    want[3, 3] = q * q
    assert np.allclose(m, want, atol=1e-10)


def test_regression_fixture_suite(cfg):
    report = regression_fixture_suite(cfg)
    assert report.max_residual <= 1e-8
    names = {r.name for r in report.results}
    assert "binary-weed-gadget" in names and "triangle-chain-gadget" in names
