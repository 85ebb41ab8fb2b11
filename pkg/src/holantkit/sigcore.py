"""Core signature algebra on small domains.

Symmetric signatures are stored as multiset-indexed triangular tables
(10 entries for a ternary function on a 3-element domain), general
gadget signatures as dense tensors.  All arithmetic is complex double
precision; every equality or rank decision goes through the relative
tolerance carried by :class:`EvalConfig`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

# Domain colors.  On domain size 3 they are written B, G, R throughout.
B, G, R = 0, 1, 2
COLOR_NAMES = "BGR"


class SignatureError(ValueError):
    """Raised on malformed signatures or incompatible operands."""


@dataclass(frozen=True)
class EvalConfig:
    """Numeric policy shared by every operation.

    tol is a relative tolerance: scalars x, y compare equal when
    |x - y| <= tol * max(1, |x|, |y|).  seed fixes every randomized
    probe so runs are reproducible.  edge_cap bounds brute-force
    enumeration (d ** edges terms).
    """

    tol: float = 1e-9
    seed: int = 20259
    edge_cap: int = 16

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


DEFAULT_CONFIG = EvalConfig()


def require_finite(values) -> np.ndarray:
    """Coerce to a complex array, rejecting NaN and infinity."""
    arr = np.asarray(values, dtype=np.complex128)
    if not (np.all(np.isfinite(arr.real)) and np.all(np.isfinite(arr.imag))):
        raise SignatureError("non-finite entry in signature data")
    return arr


def approx_eq(x: complex, y: complex, tol: float = DEFAULT_CONFIG.tol) -> bool:
    """Relative scalar equality: |x - y| <= tol * max(1, |x|, |y|)."""
    return abs(x - y) <= tol * max(1.0, abs(x), abs(y))


def approx_zero(arr, scale: float = 1.0, tol: float = DEFAULT_CONFIG.tol) -> bool:
    arr = np.asarray(arr)
    if arr.size == 0:
        return True
    return float(np.abs(arr).max()) <= tol * max(1.0, scale)


def matrix_rank_tol(m: np.ndarray, tol: float = DEFAULT_CONFIG.tol) -> int:
    """Numeric rank from singular values, thresholded at tol * smax."""
    s = np.linalg.svd(np.asarray(m, dtype=np.complex128), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def canonical_phase(v: np.ndarray, order: int = 3) -> np.ndarray:
    """Rotate v by an order-th root of unity so the first nonzero
    coordinate has argument in [0, 2*pi/order)."""
    v = np.asarray(v, dtype=np.complex128)
    nz = np.flatnonzero(np.abs(v) > 1e-14 * max(1.0, float(np.abs(v).max(initial=0.0))))
    if nz.size == 0:
        return v.copy()
    sector = 2.0 * math.pi / order
    ang = math.atan2(v[nz[0]].imag, v[nz[0]].real) % (2.0 * math.pi)
    k = int(ang // sector)
    return v * np.exp(-1j * sector * k)


def multiset_index(domain_size: int, arity: int) -> list[tuple[int, ...]]:
    """Triangular-table order: nondecreasing color tuples, lexicographic.

    For domain size 3 and arity 3 this reads
    BBB; BBG, BBR; BGG, BGR, BRR; GGG, GGR, GRR, RRR,
    and for domain size 2 it is the Hamming-weight list [f0, ..., fr].
    """
    return list(itertools.combinations_with_replacement(range(domain_size), arity))


def table_size(domain_size: int, arity: int) -> int:
    return math.comb(arity + domain_size - 1, domain_size - 1)


@dataclass(frozen=True)
class SymmetricSignature:
    """Symmetric function of given arity, stored as a triangular table."""

    domain_size: int
    arity: int
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.domain_size not in (2, 3):
            raise SignatureError("domain size must be 2 or 3")
        if self.arity < 0:
            raise SignatureError("arity must be nonnegative")
        tab = require_finite(self.table)
        expected = table_size(self.domain_size, self.arity)
        if tab.shape != (expected,):
            raise SignatureError(
                f"table must have {expected} entries for d={self.domain_size}, "
                f"arity {self.arity}; got shape {tab.shape}"
            )
        object.__setattr__(self, "table", tab)
        object.__setattr__(
            self, "_index", {m: i for i, m in enumerate(multiset_index(self.domain_size, self.arity))}
        )

    @classmethod
    def from_entries(cls, entries, domain_size: int = 3) -> "SymmetricSignature":
        entries = require_finite(entries)
        d = domain_size
        arity = 0
        while table_size(d, arity) < entries.size:
            arity += 1
        if table_size(d, arity) != entries.size:
            raise SignatureError(f"{entries.size} entries is not a triangular table for d={d}")
        return cls(d, arity, entries)

    def value(self, colors: Sequence[int]) -> complex:
        """Table lookup; invariant under any permutation of colors."""
        key = tuple(sorted(colors))
        if len(key) != self.arity:
            raise SignatureError(f"expected {self.arity} colors, got {len(key)}")
        return complex(self.table[self._index[key]])

    def to_tensor(self) -> "Tensor":
        d, r = self.domain_size, self.arity
        arr = np.empty((d,) * r, dtype=np.complex128)
        for idx in itertools.product(range(d), repeat=r):
            arr[idx] = self.table[self._index[tuple(sorted(idx))]]
        return Tensor(d, r, arr)

    def matrix(self) -> np.ndarray:
        """d x d matrix form of a binary signature."""
        if self.arity != 2:
            raise SignatureError("matrix form is defined for arity 2")
        return self.to_tensor().array.copy()

    def scale(self, c: complex) -> "SymmetricSignature":
        return SymmetricSignature(self.domain_size, self.arity, self.table * c)

    def norm_inf(self) -> float:
        return float(np.abs(self.table).max(initial=0.0))

    def isclose(self, other: "SymmetricSignature", tol: float = DEFAULT_CONFIG.tol) -> bool:
        if (self.domain_size, self.arity) != (other.domain_size, other.arity):
            return False
        scale = max(1.0, self.norm_inf(), other.norm_inf())
        return bool(np.abs(self.table - other.table).max(initial=0.0) <= tol * scale)


@dataclass(frozen=True)
class Tensor:
    """Dense function on domain_size ** arity inputs, lexicographic order."""

    domain_size: int
    arity: int
    array: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = require_finite(self.array)
        shape = (self.domain_size,) * self.arity
        if arr.shape != shape:
            if arr.size != self.domain_size**self.arity:
                raise SignatureError(
                    f"need {self.domain_size ** self.arity} entries for d={self.domain_size}, "
                    f"arity {self.arity}"
                )
            arr = arr.reshape(shape)
        object.__setattr__(self, "array", arr)

    @property
    def entries(self) -> np.ndarray:
        return self.array.reshape(-1)

    def value(self, colors: Sequence[int]) -> complex:
        return complex(self.array[tuple(colors)])

    def norm_inf(self) -> float:
        return float(np.abs(self.array).max(initial=0.0))

    def is_symmetric(self, tol: float = DEFAULT_CONFIG.tol) -> bool:
        scale = self.norm_inf()
        for perm in itertools.permutations(range(self.arity)):
            if not approx_zero(self.array - self.array.transpose(perm), scale, tol):
                return False
        return True


Signature = Union[SymmetricSignature, Tensor]


def unary(values) -> np.ndarray:
    """Unary signature as a plain vector."""
    v = require_finite(values)
    if v.ndim != 1 or v.size not in (2, 3):
        raise SignatureError("unary signature must be a vector of length 2 or 3")
    return v


def to_tensor(sig: Signature) -> Tensor:
    if isinstance(sig, Tensor):
        return sig
    if isinstance(sig, SymmetricSignature):
        return sig.to_tensor()
    arr = require_finite(sig)
    return Tensor(arr.shape[0], arr.ndim, arr)


def from_tensor(t: Tensor, tol: float = DEFAULT_CONFIG.tol, check: bool = True) -> SymmetricSignature:
    """Read a symmetric tensor back into the triangular table."""
    if check and not t.is_symmetric(tol):
        raise SignatureError("tensor is not symmetric within tolerance")
    tab = np.array([t.array[m] for m in multiset_index(t.domain_size, t.arity)])
    return SymmetricSignature(t.domain_size, t.arity, tab)


def symmetrize(t: Tensor) -> Tensor:
    """Sum of index permutations (no 1/r! factor)."""
    out = np.zeros_like(t.array)
    for perm in itertools.permutations(range(t.arity)):
        out += t.array.transpose(perm)
    return Tensor(t.domain_size, t.arity, out)


def tensor_product(a: Signature, b: Signature) -> Tensor:
    ta, tb = to_tensor(a), to_tensor(b)
    if ta.domain_size != tb.domain_size:
        raise SignatureError("tensor_product operands must share a domain size")
    arr = np.tensordot(ta.array, tb.array, axes=0)
    return Tensor(ta.domain_size, ta.arity + tb.arity, arr)


def tensor_power(v, k: int) -> Tensor:
    v = require_finite(v)
    t = Tensor(v.shape[0], 1, v)
    out = t
    for _ in range(k - 1):
        out = tensor_product(out, t)
    return out


def connect_unary(u, f: SymmetricSignature) -> SymmetricSignature:
    """Contract one input of a symmetric signature with a unary one.

    Each output entry is the small-triangle combination
    sum_c u[c] * F[multiset + c].
    """
    u = unary(u)
    if f.arity < 1:
        raise SignatureError("cannot connect a unary to an arity-0 signature")
    if u.size != f.domain_size:
        raise SignatureError("unary length must match the domain size")
    d, r = f.domain_size, f.arity
    out = np.zeros(table_size(d, r - 1), dtype=np.complex128)
    for i, m in enumerate(multiset_index(d, r - 1)):
        out[i] = sum(u[c] * f.value(m + (c,)) for c in range(d))
    return SymmetricSignature(d, r - 1, out)


def contract_axis(u, t: Tensor, axis: int = 0) -> Tensor:
    """Contract one index of a dense tensor with a unary signature."""
    u = require_finite(u)
    arr = np.tensordot(u, t.array, axes=(0, axis))
    return Tensor(t.domain_size, t.arity - 1, arr)


def slice_matrix(f: SymmetricSignature, color: int) -> np.ndarray:
    """Matrix form of a ternary signature with one input pinned to color."""
    if f.arity != 3:
        raise SignatureError("slice_matrix expects arity 3")
    d = f.domain_size
    return np.array([[f.value((color, j, k)) for k in range(d)] for j in range(d)])


def _normalize_pins(pins, arity: int) -> list[int]:
    if pins is None:
        return []
    if isinstance(pins, Mapping):
        positions = list(pins.keys())
        if len(set(positions)) != len(positions):
            raise SignatureError("pinned positions must be distinct")
        for p in positions:
            if not 0 <= p < arity:
                raise SignatureError(f"pin position {p} out of range")
        return [pins[p] for p in positions]
    return list(pins)


def restrict(
    f: SymmetricSignature,
    pins: Union[Mapping[int, int], Sequence[int], None] = None,
    subdomain: Optional[Sequence[int]] = None,
) -> SymmetricSignature:
    """Pin some inputs to fixed colors and restrict the rest to a subdomain.

    Since f is symmetric only the multiset of pinned colors matters; pins
    may be a position->color map or a bare color sequence.  When subdomain
    is given the result is re-indexed over it (domain size = len(subdomain)),
    otherwise the full domain is kept.
    """
    pinned = _normalize_pins(pins, f.arity)
    if len(pinned) > f.arity:
        raise SignatureError("more pins than inputs")
    for c in pinned:
        if not 0 <= c < f.domain_size:
            raise SignatureError(f"pinned color {c} out of range")
    free = f.arity - len(pinned)
    if subdomain is None:
        colors = list(range(f.domain_size))
    else:
        colors = list(subdomain)
        if len(set(colors)) != len(colors) or not all(0 <= c < f.domain_size for c in colors):
            raise SignatureError("subdomain must be a set of domain colors")
    d_out = len(colors)
    out = np.zeros(table_size(d_out, free), dtype=np.complex128)
    for i, m in enumerate(multiset_index(d_out, free)):
        out[i] = f.value(tuple(pinned) + tuple(colors[c] for c in m))
    return SymmetricSignature(d_out, free, out)


def is_degenerate(
    f: SymmetricSignature, cfg: EvalConfig = DEFAULT_CONFIG
) -> Optional[np.ndarray]:
    """Return u with f = u**(tensor arity) within tolerance, else None.

    The zero signature counts as degenerate with witness 0.  The recovered
    u is canonicalized: the free arity-th root of unity is fixed so the
    first nonzero coordinate has argument in [0, 2*pi/arity).
    """
    if f.arity < 1:
        raise SignatureError("degeneracy is defined for arity >= 1")
    t = f.to_tensor()
    scale = t.norm_inf()
    if scale == 0.0:
        return np.zeros(f.domain_size, dtype=np.complex128)
    r = f.arity
    flat_idx = np.unravel_index(int(np.abs(t.array).argmax()), t.array.shape)
    fiber = t.array[flat_idx[:-1]]
    u0 = fiber / np.abs(fiber).max()
    anchor = u0[flat_idx[-1]] ** r
    if abs(anchor) == 0.0:
        return None
    s = t.array[flat_idx] / anchor
    u = s ** (1.0 / r) * u0
    if not approx_zero(t.array - tensor_power(u, r).array, scale, cfg.tol):
        return None
    return canonical_phase(u, r)


def matrix_form(h: Tensor, grouping: str = "12|34") -> np.ndarray:
    """d^2 x d^2 matrix form of an arity-4 tensor.

    "12|34" groups rows by (x1, x2) and columns by (x3, x4);
    "13|24" groups rows by (x1, x3) and columns by (x2, x4).
    """
    if h.arity != 4:
        raise SignatureError("matrix_form expects arity 4")
    d = h.domain_size
    if grouping == "12|34":
        arr = h.array
    elif grouping == "13|24":
        arr = h.array.transpose(0, 2, 1, 3)
    else:
        raise SignatureError(f"unknown grouping {grouping!r}")
    return arr.reshape(d * d, d * d).copy()


@dataclass(frozen=True)
class DecomposabilityReport:
    rank_12_34: int
    rank_13_24: int

    @property
    def decomposable(self) -> bool:
        return self.rank_12_34 <= 1 or self.rank_13_24 <= 1


def decomposability_rank_test(
    h: Tensor, cfg: EvalConfig = DEFAULT_CONFIG
) -> DecomposabilityReport:
    """Rank test for splitting an arity-4 function into two binaries.

    Requires the partial symmetry H(x1,x2,x3,x4) = H(x2,x1,x3,x4) =
    H(x1,x2,x4,x3).  Under it, H factors into two binary functions iff
    one of the two matrix forms has rank at most 1.
    """
    if h.arity != 4:
        raise SignatureError("decomposability test expects arity 4")
    a = h.array
    scale = h.norm_inf()
    if not (
        approx_zero(a - a.transpose(1, 0, 2, 3), scale, cfg.tol)
        and approx_zero(a - a.transpose(0, 1, 3, 2), scale, cfg.tol)
    ):
        raise SignatureError("partial symmetry (x1<->x2, x3<->x4) violated")
    return DecomposabilityReport(
        rank_12_34=matrix_rank_tol(matrix_form(h, "12|34"), cfg.tol),
        rank_13_24=matrix_rank_tol(matrix_form(h, "13|24"), cfg.tol),
    )
