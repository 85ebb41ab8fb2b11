"""Holographic transformations and complex-orthogonal normalizations.

The inner product here is bilinear (no conjugation): <u, v> = sum u_i v_i.
A vector is isotropic when <v, v> = 0; such vectors cannot be scaled to
unit length by complex-orthogonal maps, so they get their own normal
forms built from rotations fixing beta0 = (1, i, 0)/sqrt(2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import numpy as np

from .sigcore import (
    DEFAULT_CONFIG,
    EvalConfig,
    SignatureError,
    SymmetricSignature,
    Tensor,
    approx_zero,
    from_tensor,
    require_finite,
    to_tensor,
)

SQRT2 = np.sqrt(2.0)

# Named constant vectors and matrices used across the toolkit.
BETA0 = np.array([1.0, 1.0j, 0.0]) / SQRT2
BETA0_BAR = np.array([1.0, -1.0j, 0.0]) / SQRT2
E1 = np.array([1.0, 0.0, 0.0], dtype=np.complex128)
E2 = np.array([0.0, 1.0, 0.0], dtype=np.complex128)
E3 = np.array([0.0, 0.0, 1.0], dtype=np.complex128)

Z_MAT = np.array([[1.0, 1.0], [1.0j, -1.0j]]) / SQRT2
Z1 = np.array([[1.0, 1.0], [1.0j, -1.0j]])
Z2 = np.array([[1.0, 1.0], [-1.0j, 1.0j]])
ZTILDE = np.block(
    [[np.ones((1, 1)), np.zeros((1, 2))], [np.zeros((2, 1)), Z_MAT]]
).astype(np.complex128)

EQ_GR = np.diag([0.0, 1.0, 1.0]).astype(np.complex128)
NEQ_GR = np.array([[0, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=np.complex128)
NEQ_B_GR = np.array([[1, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=np.complex128)


def inner(u, v) -> complex:
    """Bilinear inner product (no conjugation)."""
    u = require_finite(u)
    v = require_finite(v)
    if u.shape != v.shape:
        raise SignatureError("inner product needs equal-length vectors")
    return complex(np.sum(u * v))


def is_isotropic(v, tol: float = DEFAULT_CONFIG.tol) -> bool:
    """True when |<v, v>| <= tol * ||v||^2 (the zero vector included)."""
    v = require_finite(v)
    norm2 = float(np.sum(np.abs(v) ** 2))
    return abs(inner(v, v)) <= tol * max(norm2, 0.0) or norm2 == 0.0


@dataclass(frozen=True)
class Transform:
    """Square matrix acting on signatures; flags are always recomputed."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = require_finite(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise SignatureError("transform must be a square matrix")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def is_orthogonal(self, tol: float = DEFAULT_CONFIG.tol) -> bool:
        m = self.matrix
        return approx_zero(m @ m.T - np.eye(self.dim), float(np.abs(m).max()) ** 2, tol)

    def domain_separated_block(
        self, tol: float = DEFAULT_CONFIG.tol
    ) -> Optional[Tuple[complex, np.ndarray]]:
        """Return (e, M) when the matrix is diag(e, M) keeping color 0 apart."""
        m = self.matrix
        if self.dim != 3:
            return None
        off = max(abs(m[0, 1]), abs(m[0, 2]), abs(m[1, 0]), abs(m[2, 0]))
        if off > tol * max(1.0, float(np.abs(m).max())):
            return None
        return complex(m[0, 0]), m[1:, 1:].copy()

    def __matmul__(self, other: "Transform") -> "Transform":
        return Transform(self.matrix @ other.matrix)


def _as_matrix(t: Union[Transform, np.ndarray]) -> np.ndarray:
    return t.matrix if isinstance(t, Transform) else require_finite(t)


def apply_transform(t, sig):
    """Contravariant transform T**(arity) applied to every index.

    Symmetric input produces symmetric output for any T; the triangular
    table is expanded, transformed, and read back.
    """
    m = _as_matrix(t)
    if isinstance(sig, SymmetricSignature):
        out = apply_transform(m, sig.to_tensor())
        return from_tensor(out, check=False)
    tensor = to_tensor(sig)
    if m.shape[0] != tensor.domain_size:
        raise SignatureError("transform dimension does not match signature domain")
    arr = tensor.array
    for axis in range(tensor.arity):
        arr = np.tensordot(m, arr, axes=(1, axis))
        arr = np.moveaxis(arr, 0, axis)
    return Tensor(tensor.domain_size, tensor.arity, arr)


def covariant_binary(t, b) -> np.ndarray:
    """Covariant action on a binary in matrix form: T^T B T."""
    m = _as_matrix(t)
    b = require_finite(b)
    if b.shape != (m.shape[0], m.shape[0]):
        raise SignatureError("binary matrix does not match transform dimension")
    return m.T @ b @ m


@dataclass(frozen=True)
class SeparatedIdentityReport:
    residuals: Tuple[float, float, float]

    @property
    def max_residual(self) -> float:
        return max(self.residuals)


def domain_separated_restriction_identities(
    t: Union[Transform, np.ndarray],
    f: SymmetricSignature,
    cfg: EvalConfig = DEFAULT_CONFIG,
) -> SeparatedIdentityReport:
    """Check the three restriction identities of a separated transform.

    For T = diag(e, M) and ternary F:
      (T F)^{*->GR}        = M**3 (F^{*->GR})
      (T F)^{1=B, ->GR}    = e   M**2 (F^{1=B, ->GR})
      (T F)^{1=B,2=B,->GR} = e^2 M    (F^{1=B,2=B,->GR})
    Returns the residual of each, relative to the data scale.
    """
    tr = t if isinstance(t, Transform) else Transform(t)
    block = tr.domain_separated_block(cfg.tol)
    if block is None:
        raise SignatureError("transform is not in domain-separated form")
    e, m = block
    if f.domain_size != 3 or f.arity != 3:
        raise SignatureError("identities are stated for ternary signatures on domain 3")
    from .sigcore import restrict  # local import to avoid cycle noise

    tf = apply_transform(tr.matrix, f)
    residuals = []
    for n_pins, factor in ((0, 1.0), (1, e), (2, e * e)):
        pins = [0] * n_pins
        lhs = restrict(tf, pins, subdomain=(1, 2)).to_tensor()
        rhs_sig = restrict(f, pins, subdomain=(1, 2))
        rhs = factor * apply_transform(m, rhs_sig.to_tensor()).array
        scale = max(1.0, float(np.abs(lhs.array).max()), float(np.abs(rhs).max()))
        residuals.append(float(np.abs(lhs.array - rhs).max()) / scale)
    return SeparatedIdentityReport(tuple(residuals))


def verify_named_constants(tol: float = DEFAULT_CONFIG.tol) -> None:
    """Internal consistency of the constant table; raises on failure."""
    assert abs(inner(BETA0, BETA0)) <= tol
    assert abs(inner(BETA0, BETA0_BAR) - 1.0) <= tol
    assert approx_zero(Z_MAT.T @ Z_MAT - np.array([[0, 1], [1, 0]]), 1.0, tol)
    assert approx_zero(covariant_binary(ZTILDE, np.eye(3)) - NEQ_B_GR, 1.0, tol)
    zinv = np.linalg.inv(ZTILDE)
    assert approx_zero(zinv @ EQ_GR @ zinv.T - NEQ_GR, 1.0, tol)


def _check_image(t: np.ndarray, v: np.ndarray, target: np.ndarray, tol: float, what: str):
    scale = max(1.0, float(np.abs(v).max()), float(np.abs(t).max()) * float(np.abs(v).max()))
    if not approx_zero(t @ v - target, scale, tol):
        raise SignatureError(f"{what}: constructed transform misses its target")
    if not Transform(t).is_orthogonal(tol):
        raise SignatureError(f"{what}: constructed transform is not orthogonal")


def _plane_rotation(dim: int, i: int, j: int, c: complex, s: complex) -> np.ndarray:
    m = np.eye(dim, dtype=np.complex128)
    m[i, i] = c
    m[i, j] = s
    m[j, i] = -s
    m[j, j] = c
    return m


def normalize_nonisotropic(v, cfg: EvalConfig = DEFAULT_CONFIG) -> Tuple[Transform, complex]:
    """Orthogonal T with T v = (s, 0, ..., 0), s**2 = <v, v>.

    Built from pairwise complex rotations [[c, s], [-s, c]] with
    c = a/sqrt(a^2+b^2), s = b/sqrt(a^2+b^2) (principal square root),
    which zero one coordinate while preserving the bilinear product.
    """
    v = require_finite(v)
    vv = inner(v, v)
    norm2 = float(np.sum(np.abs(v) ** 2))
    if abs(vv) <= cfg.tol * max(norm2, 1e-300):
        raise SignatureError("normalize_nonisotropic requires a non-isotropic vector")
    dim = v.size
    t = np.eye(dim, dtype=np.complex128)
    w = v.copy()
    for _ in range(dim):
        live = [i for i in range(dim) if abs(w[i]) > 1e-14 * np.abs(w).max()]
        if len(live) <= 1:
            break
        # best-conditioned pair; some pair satisfies |w_i^2 + w_j^2| >= 2|<w,w>|/k
        pairs = [(i, j) for k, i in enumerate(live) for j in live[k + 1:]]
        i, j = max(pairs, key=lambda p: abs(w[p[0]] ** 2 + w[p[1]] ** 2))
        root = np.sqrt(w[i] ** 2 + w[j] ** 2)
        g = _plane_rotation(dim, i, j, w[i] / root, w[j] / root)
        w = g @ w
        t = g @ t
    pos = int(np.abs(w).argmax())
    if pos != 0:
        perm = np.eye(dim, dtype=np.complex128)[[pos] + [k for k in range(dim) if k != pos]]
        t = perm @ t
        w = perm @ w
    _check_image(t, v, w * (np.arange(dim) == 0), cfg.tol, "normalize_nonisotropic")
    return Transform(t), complex(w[0])


def _rotate_iso_pair_to_beta0(a: complex) -> np.ndarray:
    """2x2 rotation sending a*(1, i) to (1, i)/sqrt(2), via e^{iz} = 1/(sqrt2 a)."""
    w = 1.0 / (SQRT2 * a)
    c = (w + 1.0 / w) / 2.0
    s = (w - 1.0 / w) / 2.0j
    return np.array([[c, s], [-s, c]], dtype=np.complex128)


def normalize_isotropic(v, cfg: EvalConfig = DEFAULT_CONFIG) -> Transform:
    """Orthogonal T with T v = beta0 exactly, for nonzero isotropic v.

    The free phase of the complex rotation absorbs the scale of v, so no
    scalar is returned.  A permutation puts the largest coordinate first,
    which keeps the leading coordinate comparable to ||v|| and the tail
    non-isotropic with a well-conditioned self-product.
    """
    v = require_finite(v)
    norm = float(np.abs(v).max(initial=0.0))
    if norm == 0.0:
        raise SignatureError("normalize_isotropic requires a nonzero vector")
    if abs(inner(v, v)) > cfg.tol * float(np.sum(np.abs(v) ** 2)):
        raise SignatureError("normalize_isotropic requires an isotropic vector")
    dim = v.size
    if dim == 2:
        # both coordinates of a nonzero isotropic 2-vector are nonzero
        a = v[0]
        work = v.copy()
        t = np.eye(2, dtype=np.complex128)
        if abs(work[1] - 1j * a) > abs(work[1] + 1j * a):
            t = np.diag([1.0, -1.0]).astype(np.complex128)
            work = t @ work
        rot = _rotate_iso_pair_to_beta0(a)
        t = rot @ t
        _check_image(t, v, np.array([1.0, 1.0j]) / SQRT2, cfg.tol, "normalize_isotropic")
        return Transform(t)
    if dim != 3:
        raise SignatureError("only dimensions 2 and 3 are supported")
    lead = int(np.abs(v).argmax())
    perm = np.eye(3, dtype=np.complex128)[[lead] + [k for k in range(3) if k != lead]]
    w = perm @ v
    # <tail, tail> = -w0^2 with |w0| = ||v||_inf, so the tail rotation is stable
    sub, _ = normalize_nonisotropic(w[1:], cfg)
    t = np.eye(3, dtype=np.complex128)
    t[1:, 1:] = sub.matrix
    t = t @ perm
    w = t @ v  # (w0, s, 0) with s = +/- i w0
    if abs(w[1] - 1j * w[0]) > abs(w[1] + 1j * w[0]):
        t = np.diag([1.0, -1.0, 1.0]).astype(np.complex128) @ t
        w = np.array([w[0], -w[1], w[2]])
    rot3 = np.eye(3, dtype=np.complex128)
    rot3[:2, :2] = _rotate_iso_pair_to_beta0(w[0])
    t = rot3 @ t
    _check_image(t, v, BETA0, cfg.tol, "normalize_isotropic")
    return Transform(t)


def stabilizer_of_beta0(y: complex, third_column_sign: int = 1) -> Transform:
    """The one-parameter family of orthogonal matrices fixing beta0."""
    if third_column_sign not in (1, -1):
        raise SignatureError("third_column_sign must be +1 or -1")
    y = complex(y)
    t = np.array(
        [
            [1.0 + y * y / 2.0, 1j * y * y / 2.0, 1j * y],
            [1j * y * y / 2.0, 1.0 - y * y / 2.0, -y],
            [1j * y, -y, -1.0],
        ],
        dtype=np.complex128,
    )
    if third_column_sign == -1:
        t[:, 2] = -t[:, 2]
    return Transform(t)


def pair_isotropic(beta1, beta2, cfg: EvalConfig = DEFAULT_CONFIG) -> Tuple[complex, Transform]:
    """Map two independent isotropic vectors onto (beta0, beta0_bar).

    Independent isotropic vectors always satisfy <beta1, beta2> != 0;
    with lam = 1/sqrt(<beta1, beta2>) the returned T obeys
    lam T beta1 = beta0 and lam T beta2 = beta0_bar.
    """
    beta1 = require_finite(beta1)
    beta2 = require_finite(beta2)
    for v in (beta1, beta2):
        if float(np.abs(v).max(initial=0.0)) == 0.0:
            raise SignatureError("pair_isotropic requires nonzero vectors")
        if not is_isotropic(v, cfg.tol):
            raise SignatureError("pair_isotropic requires isotropic vectors")
    cross = np.cross(beta1, beta2)
    scale = float(np.abs(beta1).max() * np.abs(beta2).max())
    if approx_zero(cross, scale, cfg.tol):
        raise SignatureError("pair_isotropic requires linearly independent vectors")
    g = inner(beta1, beta2)
    if abs(g) <= cfg.tol * scale:
        raise AssertionError(
            "independent isotropic vectors with <beta1,beta2> = 0 should not exist"
        )
    lam = 1.0 / np.sqrt(g)
    b1, b2 = lam * beta1, lam * beta2
    t1 = normalize_isotropic(b1, cfg)
    gam = t1.matrix @ b2  # <beta0, gam> = <b1, b2> = 1
    u = gam / inner(gam, BETA0)
    c = u[2] / SQRT2
    stab = stabilizer_of_beta0(c / 1j)
    # stab maps beta0_bar to u, so its transpose maps u back
    t = stab.matrix.T @ t1.matrix
    _check_image(t, b1, BETA0, cfg.tol, "pair_isotropic")
    _check_image(t, b2, BETA0_BAR, cfg.tol, "pair_isotropic")
    return complex(lam), Transform(t)


def iso_plus_perp(beta, gamma, cfg: EvalConfig = DEFAULT_CONFIG) -> Tuple[complex, Transform]:
    """Map an isotropic beta and an orthogonal non-isotropic gamma onto
    (beta0, e3), after the scaling lam = 1/sqrt(<gamma, gamma>)."""
    beta = require_finite(beta)
    gamma = require_finite(gamma)
    if float(np.abs(beta).max(initial=0.0)) == 0.0 or not is_isotropic(beta, cfg.tol):
        raise SignatureError("iso_plus_perp requires a nonzero isotropic beta")
    gg = inner(gamma, gamma)
    if abs(gg) <= cfg.tol * float(np.sum(np.abs(gamma) ** 2)):
        raise SignatureError("iso_plus_perp requires a non-isotropic gamma")
    scale = max(float(np.abs(beta).max()) * float(np.abs(gamma).max()), 1e-300)
    if abs(inner(beta, gamma)) > cfg.tol * scale:
        raise SignatureError("iso_plus_perp requires <beta, gamma> = 0")
    lam = 1.0 / np.sqrt(gg)
    t1 = normalize_isotropic(lam * beta, cfg)
    chat = t1.matrix @ (lam * gamma)  # (a, b, c) with a + bi = 0 and c = +/- 1
    b = chat[1]
    for sign in (1, -1) if abs(chat[2] + 1.0) < abs(chat[2] - 1.0) else (-1, 1):
        stab = stabilizer_of_beta0(-b, third_column_sign=sign)
        t = stab.matrix @ t1.matrix
        try:
            _check_image(t, lam * gamma, E3, cfg.tol, "iso_plus_perp")
            _check_image(t, lam * beta, BETA0, cfg.tol, "iso_plus_perp")
        except SignatureError:
            continue
        return complex(lam), Transform(t)
    raise SignatureError("iso_plus_perp: no stabilizer branch verified")


def complete_orthogonal_rows(rows, cfg: EvalConfig = DEFAULT_CONFIG) -> Transform:
    """Extend bilinearly-orthonormal rows to a full 3x3 orthogonal matrix.

    Rows must be non-isotropic after normalization; completion uses a
    seeded random vector plus the formal cross product.
    """
    rows = [require_finite(r) for r in rows]
    if len(rows) > 3:
        raise SignatureError("at most 3 rows")
    rng = cfg.rng()
    basis = list(rows)
    attempts = 0
    while len(basis) < 2:
        cand = rng.normal(size=3) + 1j * rng.normal(size=3)
        for b in basis:
            cand = cand - inner(cand, b) * b
        q = inner(cand, cand)
        attempts += 1
        if attempts > 200:
            raise SignatureError("could not complete orthogonal basis")
        if abs(q) < 1e-3 * float(np.sum(np.abs(cand) ** 2)):
            continue
        basis.append(cand / np.sqrt(q))
    if len(basis) == 2:
        basis.append(np.cross(basis[0], basis[1]))
    t = np.array(basis, dtype=np.complex128)
    if not Transform(t).is_orthogonal(max(cfg.tol, 1e-9)):
        raise SignatureError("completed matrix failed the orthogonality check")
    return Transform(t)
