import numpy as np
import pytest

from holantkit import holo
from holantkit.holo import (
    BETA0,
    BETA0_BAR,
    E3,
    EQ_GR,
    NEQ_B_GR,
    NEQ_GR,
    Transform,
    Z_MAT,
    ZTILDE,
    apply_transform,
    complete_orthogonal_rows,
    covariant_binary,
    domain_separated_restriction_identities,
    inner,
    is_isotropic,
    iso_plus_perp,
    normalize_isotropic,
    normalize_nonisotropic,
    pair_isotropic,
    stabilizer_of_beta0,
    verify_named_constants,
)
from holantkit.sigcore import SignatureError, SymmetricSignature, Tensor, from_tensor

from conftest import PAPER_F, crandn, random_orthogonal3, random_separated_transform


def test_named_constants():
    verify_named_constants()
    assert is_isotropic(BETA0)
    assert abs(inner(BETA0, BETA0_BAR) - 1.0) < 1e-14


def test_inner_and_isotropy_examples():
    assert is_isotropic(np.array([1.0, 1j, 0.0]))
    assert abs(inner(np.array([1.0, -1, 1]), np.array([1.0, -1, 1])) - 3.0) < 1e-14
    assert not is_isotropic(np.array([1.0, -1, 1]))
    assert is_isotropic(np.zeros(3))
    with pytest.raises(SignatureError):
        inner(np.zeros(3), np.zeros(2))


def test_apply_transform_identity_and_symmetry():
    rng = np.random.default_rng(2)
    f = SymmetricSignature(3, 3, crandn(rng, 10))
    same = apply_transform(np.eye(3), f)
    assert same.isclose(f)
    moved = apply_transform(crandn(rng, 3, 3), f)
    assert isinstance(moved, SymmetricSignature)  # symmetric in, symmetric out


def test_z_transform_worked_example():
    # Z**4 applied to [0,0,1,0,0] gives (1/2)[3,0,1,0,3]
    f = SymmetricSignature(2, 4, np.array([0, 0, 1, 0, 0], dtype=complex))
    got = apply_transform(Z_MAT, f)
    assert np.allclose(got.table, np.array([3, 0, 1, 0, 3]) / 2, atol=1e-12)
    # binary equality becomes disequality: (=2) Z**2 = [0,1,0]
    got2 = covariant_binary(Z_MAT, np.eye(2))
    assert np.allclose(got2, [[0, 1], [1, 0]], atol=1e-12)


def test_covariant_binary_examples():
    t = random_orthogonal3(np.random.default_rng(4))
    assert np.allclose(covariant_binary(t, np.eye(3)), np.eye(3), atol=1e-10)
    assert np.allclose(covariant_binary(ZTILDE, np.eye(3)), NEQ_B_GR, atol=1e-12)
    zinv = np.linalg.inv(ZTILDE)
    got = apply_transform(zinv, Tensor(3, 2, EQ_GR))
    assert np.allclose(got.array, NEQ_GR, atol=1e-12)


def test_functoriality():
    rng = np.random.default_rng(8)
    for _ in range(20):
        t1 = crandn(rng, 3, 3)
        t2 = crandn(rng, 3, 3)
        f = SymmetricSignature(3, 3, crandn(rng, 10))
        once = apply_transform(t1 @ t2, f)
        twice = apply_transform(t1, apply_transform(t2, f))
        scale = max(1.0, once.norm_inf())
        assert np.abs(once.table - twice.table).max() <= 1e-9 * scale


def test_domain_separated_identities():
    rng = np.random.default_rng(9)
    f = SymmetricSignature(3, 3, crandn(rng, 10))
    assert domain_separated_restriction_identities(np.eye(3), f).max_residual < 1e-12
    for _ in range(100):
        t = random_separated_transform(rng)
        g = SymmetricSignature(3, 3, crandn(rng, 10))
        rep = domain_separated_restriction_identities(t, g)
        assert rep.max_residual <= 1e-9
    with pytest.raises(SignatureError):
        domain_separated_restriction_identities(crandn(rng, 3, 3), f)


def _check_orthogonal(t, tol=1e-9):
    m = t.matrix if isinstance(t, Transform) else t
    scale = max(1.0, float(np.abs(m).max()) ** 2)
    assert np.abs(m @ m.T - np.eye(m.shape[0])).max() <= tol * scale


def test_normalize_nonisotropic():
    t, s = normalize_nonisotropic(np.eye(3)[0])
    assert abs(s - 1.0) < 1e-12
    assert np.allclose(t.matrix @ np.eye(3)[0], [1, 0, 0])

    v = np.array([1.0, -1.0, 1.0])
    t, s = normalize_nonisotropic(v)
    _check_orthogonal(t)
    assert abs(s * s - 3.0) < 1e-9
    assert np.allclose(t.matrix @ v, [s, 0, 0], atol=1e-9)

    with pytest.raises(SignatureError):
        normalize_nonisotropic(np.array([1.0, 1j, 0.0]))


def test_normalize_isotropic():
    for v in (
        BETA0,
        np.array([1.0, -1j, 0.0]) / np.sqrt(2),
        np.array([0.0, 1.0, 1j]),
    ):
        t = normalize_isotropic(v)
        _check_orthogonal(t)
        assert np.allclose(t.matrix @ v, BETA0, atol=1e-9)
    rng = np.random.default_rng(10)
    for _ in range(50):
        a = crandn(rng)
        q = random_orthogonal3(rng)
        w = q @ (a * BETA0)
        t = normalize_isotropic(w)
        _check_orthogonal(t)
        assert np.allclose(t.matrix @ w, BETA0, atol=1e-8 * max(1, abs(a)))
    with pytest.raises(SignatureError):
        normalize_isotropic(np.zeros(3))
    with pytest.raises(SignatureError):
        normalize_isotropic(np.array([1.0, 2.0, 3.0]))


def test_stabilizer_of_beta0():
    assert np.allclose(stabilizer_of_beta0(0.0).matrix, np.diag([1, 1, -1]))
    rng = np.random.default_rng(12)
    for _ in range(25):
        y = crandn(rng)
        for sign in (1, -1):
            t = stabilizer_of_beta0(y, sign)
            _check_orthogonal(t)
            assert np.allclose(t.matrix @ BETA0, BETA0, atol=1e-9 * max(1, abs(y) ** 2))


def test_pair_isotropic():
    lam, t = pair_isotropic(BETA0, BETA0_BAR)
    assert abs(lam - 1.0) < 1e-12
    assert np.allclose(lam * t.matrix @ BETA0, BETA0, atol=1e-9)

    b1 = np.array([1.0, 1j, 0.0])
    b2 = np.array([0.0, 1.0, 1j])
    lam, t = pair_isotropic(b1, b2)
    _check_orthogonal(t)
    assert np.allclose(lam * (t.matrix @ b1), BETA0, atol=1e-9)
    assert np.allclose(lam * (t.matrix @ b2), BETA0_BAR, atol=1e-9)

    with pytest.raises(SignatureError):
        pair_isotropic(b1, 2.0 * b1)
    with pytest.raises(SignatureError):
        pair_isotropic(b1, np.array([1.0, 0.0, 0.0]))


def test_pair_isotropic_random():
    rng = np.random.default_rng(14)
    for _ in range(50):
        q = random_orthogonal3(rng)
        b1 = crandn(rng) * (q @ BETA0)
        b2 = crandn(rng) * (q @ BETA0_BAR)
        if min(np.abs(b1).max(), np.abs(b2).max()) < 0.1:
            continue
        lam, t = pair_isotropic(b1, b2)
        _check_orthogonal(t, 1e-8)
        assert np.allclose(lam * (t.matrix @ b1), BETA0, atol=1e-8)
        assert np.allclose(lam * (t.matrix @ b2), BETA0_BAR, atol=1e-8)


def test_iso_plus_perp():
    lam, t = iso_plus_perp(BETA0, E3)
    assert abs(lam - 1.0) < 1e-12
    lam, t = iso_plus_perp(np.array([1.0, 1j, 0.0]), np.array([0.0, 0.0, 5.0]))
    assert abs(lam - 0.2) < 1e-12
    _check_orthogonal(t)
    assert np.allclose(lam * (t.matrix @ np.array([0.0, 0.0, 5.0])), E3, atol=1e-9)
    assert np.allclose(lam * (t.matrix @ np.array([1.0, 1j, 0.0])), BETA0, atol=1e-9)
    with pytest.raises(SignatureError):
        iso_plus_perp(BETA0, np.array([1.0, 1j, 0.0]))


def test_iso_plus_perp_random():
    rng = np.random.default_rng(15)
    for _ in range(50):
        q = random_orthogonal3(rng)
        beta = crandn(rng) * (q @ BETA0)
        gamma = crandn(rng) * (q @ E3)
        if min(np.abs(beta).max(), np.abs(gamma).max()) < 0.1:
            continue
        lam, t = iso_plus_perp(beta, gamma)
        _check_orthogonal(t, 1e-8)
        assert np.allclose(lam * (t.matrix @ beta), BETA0, atol=1e-7)
        assert np.allclose(lam * (t.matrix @ gamma), E3, atol=1e-7)


def test_complete_orthogonal_rows():
    t = complete_orthogonal_rows([np.array([1.0, 0.0, 0.0])])
    _check_orthogonal(t)
    assert np.allclose(t.matrix[0], [1, 0, 0])
