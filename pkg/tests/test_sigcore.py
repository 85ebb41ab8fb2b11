import itertools

import numpy as np
import pytest

from holantkit import holo
from holantkit.sigcore import (
    EvalConfig,
    SignatureError,
    SymmetricSignature,
    Tensor,
    canonical_phase,
    connect_unary,
    decomposability_rank_test,
    from_tensor,
    is_degenerate,
    matrix_form,
    matrix_rank_tol,
    multiset_index,
    restrict,
    symmetrize,
    tensor_power,
    tensor_product,
)

from conftest import PAPER_F, crandn


def test_triangular_order_matches_row_reading():
    # BBB; BBG, BBR; BGG, BGR, BRR; GGG, GGR, GRR, RRR
    order = multiset_index(3, 3)
    assert order[0] == (0, 0, 0)
    assert order[1:3] == [(0, 0, 1), (0, 0, 2)]
    assert order[3:6] == [(0, 1, 1), (0, 1, 2), (0, 2, 2)]
    assert order[6:] == [(1, 1, 1), (1, 1, 2), (1, 2, 2), (2, 2, 2)]


def test_lookup_is_permutation_invariant():
    rng = np.random.default_rng(3)
    f = SymmetricSignature(3, 3, crandn(rng, 10))
    for idx in itertools.product(range(3), repeat=3):
        base = f.value(idx)
        for perm in itertools.permutations(idx):
            assert f.value(perm) == base


def test_to_tensor_single_support():
    f = SymmetricSignature(3, 3, np.array([1] + [0] * 9, dtype=complex))
    t = f.to_tensor()
    assert t.value((0, 0, 0)) == 1
    assert np.count_nonzero(t.array) == 1


def test_to_tensor_paper_entry_and_roundtrip():
    t = PAPER_F.to_tensor()
    assert t.value((0, 1, 2)) == 1  # the BGR entry
    back = from_tensor(t)
    assert back.isclose(PAPER_F)


def test_table_length_validation():
    with pytest.raises(SignatureError):
        SymmetricSignature(3, 3, np.zeros(9, dtype=complex))
    with pytest.raises(SignatureError):
        SymmetricSignature(2, 3, np.zeros(10, dtype=complex))


def test_rejects_non_finite():
    with pytest.raises(SignatureError):
        SymmetricSignature(3, 3, np.array([np.nan] + [0] * 9))
    with pytest.raises(SignatureError):
        Tensor(3, 1, np.array([np.inf, 0, 0]))


def test_symmetrize_basis_product():
    t = tensor_product(
        tensor_product(Tensor(3, 1, np.eye(3)[0]), Tensor(3, 1, np.eye(3)[0])),
        Tensor(3, 1, np.eye(3)[1]),
    )
    s = symmetrize(t)
    for idx in ((0, 0, 1), (0, 1, 0), (1, 0, 0)):
        assert s.value(idx) == 2
    assert np.abs(s.array).sum() == 6


def test_symmetrize_of_symmetric_is_factorial_multiple():
    rng = np.random.default_rng(5)
    f = SymmetricSignature(3, 3, crandn(rng, 10))
    t = f.to_tensor()
    assert np.allclose(symmetrize(t).array, 6 * t.array)
    assert symmetrize(t).is_symmetric()


def test_symmetrize_isotropic_pair_closed_form():
    # Sym(b0 x b0 x b0bar): entries vanish off {B,G} and the (u Bs, v Gs)
    # entry equals i^v (3/sqrt(2) - sqrt(2) v); frozen from a brute-force
    # permutation-sum evaluation
    t = tensor_product(
        tensor_product(Tensor(3, 1, holo.BETA0), Tensor(3, 1, holo.BETA0)),
        Tensor(3, 1, holo.BETA0_BAR),
    )
    s = symmetrize(t)
    assert np.abs(s.array[:, :, 2]).max() == 0
    assert np.abs(s.array[2]).max() == 0
    for v in range(4):
        idx = tuple([0] * (3 - v) + [1] * v)
        expected = 1j**v * (3 / np.sqrt(2) - np.sqrt(2) * v)
        assert abs(s.value(idx) - expected) < 1e-12


def test_tensor_product_basics():
    u = Tensor(3, 1, np.array([1.0, 0, 0]))
    uu = tensor_product(u, u)
    assert uu.value((0, 0)) == 1 and np.count_nonzero(uu.array) == 1
    rng = np.random.default_rng(11)
    a, b, c = (Tensor(3, 1, crandn(rng, 3)) for _ in range(3))
    left = tensor_product(tensor_product(a, b), c)
    right = tensor_product(a, tensor_product(b, c))
    assert np.allclose(left.array, right.array)


def test_tensor_product_kronecker_identity():
    rng = np.random.default_rng(12)
    mats = [crandn(rng, 3, 3) for _ in range(4)]
    a, b, ap, bp = mats
    ten = tensor_product(Tensor(3, 2, a), Tensor(3, 2, b))
    assert np.allclose(matrix_form(ten, "13|24"), np.kron(a, b))
    assert np.allclose(np.kron(a, b) @ np.kron(ap, bp), np.kron(a @ ap, b @ bp))


def test_tensor_product_domain_mismatch():
    with pytest.raises(SignatureError):
        tensor_product(Tensor(3, 1, np.zeros(3)), Tensor(2, 1, np.zeros(2)))


def test_connect_unary_basis_vector_is_slice():
    f = PAPER_F
    for c in range(3):
        e = np.eye(3)[c]
        got = connect_unary(e, f)
        want = restrict(f, {0: c})
        assert got.isclose(want)


def test_connect_unary_paper_example():
    got = connect_unary(np.array([1.0, -1.0, 1.0]), PAPER_F)
    assert np.allclose(got.table, [3, -3, 3, 3, -3, 3])
    alpha = np.array([1.0, -1.0, 1.0])
    assert np.allclose(got.matrix(), 3 * np.outer(alpha, alpha))


def test_connect_unary_zero_and_arity_errors():
    assert np.abs(connect_unary(np.zeros(3), PAPER_F).table).max() == 0
    with pytest.raises(SignatureError):
        connect_unary(np.ones(3), SymmetricSignature(3, 0, np.array([2.0])))


def test_contraction_commutativity():
    rng = np.random.default_rng(7)
    for _ in range(20):
        f = SymmetricSignature(3, 3, crandn(rng, 10))
        u, v = crandn(rng, 3), crandn(rng, 3)
        left = connect_unary(v, connect_unary(u, f))
        right = connect_unary(u, connect_unary(v, f))
        assert np.allclose(left.table, right.table)


def test_restrict_rows_of_triangular_table():
    bottom = restrict(PAPER_F, subdomain=(1, 2))
    assert np.allclose(bottom.table, [7, 5, 1, 1])
    third = restrict(PAPER_F, {0: 0}, subdomain=(1, 2))
    assert np.allclose(third.table, [5, 1, 3])
    pinned = restrict(PAPER_F, {0: 0})
    assert np.allclose(pinned.matrix(), [[3, 1, 1], [1, 5, 1], [1, 1, 3]])


def test_is_degenerate_recovers_cube():
    u = np.array([1.0, 2.0, 3.0], dtype=complex)
    f = from_tensor(tensor_power(u, 3))
    got = is_degenerate(f)
    assert got is not None
    assert np.allclose(got, u)


def test_is_degenerate_rejects_paper_example():
    # the pinned slice has rank >= 2, which contradicts degeneracy
    assert matrix_rank_tol(restrict(PAPER_F, {0: 0}).matrix()) >= 2
    assert is_degenerate(PAPER_F) is None


def test_is_degenerate_zero_convention():
    f = SymmetricSignature(3, 3, np.zeros(10, dtype=complex))
    assert np.allclose(is_degenerate(f), np.zeros(3))


def test_is_degenerate_random_cubes_canonical():
    rng = np.random.default_rng(99)
    for _ in range(1000):
        u = crandn(rng, 3)
        f = from_tensor(tensor_power(u, 3))
        got = is_degenerate(f)
        assert got is not None
        expect = canonical_phase(u, 3)
        assert np.allclose(got, expect, atol=1e-8 * np.abs(u).max() ** 1)


def test_degenerate_when_entrywise_unary_times_binary():
    # a symmetric product A(x1) B(x2, x3) forces a pure tensor power
    rng = np.random.default_rng(13)
    a = crandn(rng, 3)
    b = tensor_power(a, 2).array * (2.17 - 0.3j)
    f_arr = np.einsum("i,jk->ijk", a, b)
    f = from_tensor(Tensor(3, 3, f_arr))
    assert is_degenerate(f) is not None


def test_matrix_form_groupings_and_rank():
    rng = np.random.default_rng(21)
    p = crandn(rng, 3, 3)
    q = crandn(rng, 3, 3)
    h = tensor_product(Tensor(3, 2, p), Tensor(3, 2, q))
    assert matrix_rank_tol(matrix_form(h, "12|34")) == 1
    # 2x2 counterexample: identity x identity stays rank 1 in the aligned
    # grouping but has full rank (the 4x4 identity) in the crossed one
    eye = Tensor(2, 2, np.eye(2))
    h2 = tensor_product(eye, eye)
    assert matrix_rank_tol(matrix_form(h2, "12|34")) == 1
    assert matrix_rank_tol(matrix_form(h2, "13|24")) == 4
    with pytest.raises(SignatureError):
        matrix_form(h2, "14|23")


def test_decomposability_rank_test():
    rng = np.random.default_rng(31)
    p = crandn(rng, 3, 3)
    p = p + p.T
    q = crandn(rng, 3, 3)
    q = q + q.T
    h = tensor_product(Tensor(3, 2, p), Tensor(3, 2, q))
    rep = decomposability_rank_test(h)
    assert rep.rank_12_34 <= 1 and rep.decomposable
    zero = Tensor(3, 4, np.zeros((3, 3, 3, 3)))
    rep0 = decomposability_rank_test(zero)
    assert rep0.rank_12_34 == 0 and rep0.rank_13_24 == 0
    bad = crandn(rng, 3, 3, 3, 3)
    with pytest.raises(SignatureError):
        decomposability_rank_test(Tensor(3, 4, bad))


def test_eval_config_validation():
    with pytest.raises(ValueError):
        EvalConfig(tol=0.0)
    with pytest.raises(ValueError):
        EvalConfig(seed=-1)
    assert EvalConfig().rng().integers(10) == EvalConfig().rng().integers(10)
