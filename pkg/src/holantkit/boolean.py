"""Symmetric Holant* dichotomy on the Boolean domain.

A set of non-degenerate symmetric signatures [f0, ..., fn] is tractable
exactly when it falls into one of four classes: everything has arity at
most 2; a common second-order recurrence a f_k + b f_{k+1} - a f_{k+2} = 0
holds (with b != +-2ia, binaries may instead match lambda [2a, b, -2a]);
the parity recurrence f_k + f_{k+2} = 0 holds (binaries may match
lambda [1, 0, 1]); or f_{k+2} = alpha f_{k+1} + f_k for alpha = +-2i.
Otherwise the problem is #P-hard.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import grideval
from .sigcore import (
    DEFAULT_CONFIG,
    EvalConfig,
    SignatureError,
    SymmetricSignature,
    Tensor,
    approx_zero,
    is_degenerate,
    to_tensor,
)

ARITY_LE_2 = "ARITY_LE_2"
FIBONACCI = "FIBONACCI"
PIN_PARITY = "PIN_PARITY"
VANISHING = "VANISHING"
HARD = "HARD"


@dataclass(frozen=True)
class BooleanClass:
    tag: str
    fibonacci_ab: Optional[Tuple[complex, complex]] = None
    vanishing_alpha: Optional[complex] = None
    all_matches: Tuple[str, ...] = ()
    dropped_degenerate: Tuple[int, ...] = ()

    @property
    def tractable(self) -> bool:
        return self.tag != HARD


def _canonical_ab(a: complex, b: complex) -> Tuple[complex, complex]:
    """Projective normalization: divide by the largest-modulus coordinate."""
    if abs(a) >= abs(b):
        return (1.0 + 0.0j, complex(b / a))
    return (complex(a / b), 1.0 + 0.0j)


def _ab_close(x, y, tol) -> bool:
    """Projective coincidence: the 2x2 determinant of the pair vanishes."""
    scale = max(1.0, abs(x[0]), abs(x[1]), abs(y[0]), abs(y[1]))
    return abs(x[0] * y[1] - x[1] * y[0]) <= 10 * tol * scale * scale


# Witness spaces are ("full", None), ("points", [...]), or ("empty", None).
Witness = Tuple[str, Optional[List[Tuple[complex, complex]]]]


def fibonacci_witness(f: SymmetricSignature, cfg: EvalConfig = DEFAULT_CONFIG) -> Witness:
    """Projective solutions (a, b) of a f_k + b f_{k+1} - a f_{k+2} = 0.

    The system is linear in (a, b); its solution space is empty, a single
    projective point, or the whole projective line.
    """
    if f.domain_size != 2:
        raise SignatureError("fibonacci_witness expects domain size 2")
    fs = f.table
    n = f.arity
    if n < 2:
        return ("full", None)
    rows = np.array([[fs[k] - fs[k + 2], fs[k + 1]] for k in range(n - 1)])
    scale = max(1.0, float(np.abs(rows).max()))
    _, s, vh = np.linalg.svd(rows)
    null_dim = int(np.count_nonzero(s <= cfg.tol * scale)) + (2 - len(s))
    if null_dim >= 2:
        return ("full", None)
    if null_dim == 1:
        a, b = vh[-1]
        return ("points", [_canonical_ab(a, b)])
    return ("empty", None)


def _binary_exception_point(f: SymmetricSignature, cfg) -> Optional[Tuple[complex, complex]]:
    """(a, b) with f = lambda [2a, b, -2a], available for binaries only."""
    if f.arity != 2:
        return None
    f0, f1, f2 = f.table
    scale = max(1.0, float(np.abs(f.table).max()))
    if abs(f0 + f2) > cfg.tol * scale:
        return None
    if abs(f0) <= cfg.tol * scale and abs(f1) <= cfg.tol * scale:
        return None
    return _canonical_ab(f0 / 2.0, f1)


def _intersect(cands, extra: Witness, exception_pt, tol) -> object:
    """Intersect the running candidate set with one signature's options."""
    kind, pts = extra
    options: Optional[List] = None
    if kind == "full":
        options = None  # no constraint
    else:
        options = list(pts) if kind == "points" else []
    if options is not None and exception_pt is not None:
        if not any(_ab_close(exception_pt, o, tol) for o in options):
            options.append(exception_pt)
    if options is None:
        return cands
    if cands is None:
        return options
    return [c for c in cands if any(_ab_close(c, o, tol) for o in options)]


def _satisfies_recurrence(f: SymmetricSignature, coeffs, tol) -> bool:
    """coeffs = (c0, c1, c2) for c0 f_k + c1 f_{k+1} + c2 f_{k+2} = 0."""
    fs = f.table
    scale = max(1.0, float(np.abs(fs).max()) * max(abs(c) for c in coeffs))
    for k in range(f.arity - 1):
        if abs(coeffs[0] * fs[k] + coeffs[1] * fs[k + 1] + coeffs[2] * fs[k + 2]) > tol * scale:
            return False
    return True


def _proportional(f: SymmetricSignature, pattern, tol) -> bool:
    v = f.table
    p = np.asarray(pattern, dtype=np.complex128)
    m = np.vstack([v, p])
    s = np.linalg.svd(m, compute_uv=False)
    return s[-1] <= tol * max(1.0, s[0])


def classify_boolean_symmetric(
    signatures: Sequence[SymmetricSignature], cfg: EvalConfig = DEFAULT_CONFIG
) -> BooleanClass:
    """Dichotomy classification of a set of symmetric Boolean signatures.

    Degenerate members are dropped first (free unaries absorb them) and
    reported.  Classes are tested in the fixed order ARITY_LE_2,
    FIBONACCI, PIN_PARITY, VANISHING; the first match is the tag and
    every match is recorded.
    """
    dropped = []
    live: List[SymmetricSignature] = []
    for i, f in enumerate(signatures):
        if f.domain_size != 2:
            raise SignatureError("classifier expects domain size 2 signatures")
        if f.arity >= 1 and is_degenerate(f, cfg) is not None:
            dropped.append(i)
        else:
            live.append(f)

    matches: List[str] = []
    fib_ab = None
    van_alpha = None

    if all(f.arity <= 2 for f in live):
        matches.append(ARITY_LE_2)

    cands = None  # None = unconstrained
    for f in live:
        cands = _intersect(
            cands, fibonacci_witness(f, cfg), _binary_exception_point(f, cfg), cfg.tol
        )
        if cands is not None and not cands:
            break
    if cands is None:
        fib_ab = (1.0 + 0.0j, 0.0 + 0.0j)
        matches.append(FIBONACCI)
    else:
        admissible = [
            (a, b) for a, b in cands if abs(b - 2j * a) > cfg.tol and abs(b + 2j * a) > cfg.tol
        ]
        if admissible:
            fib_ab = admissible[0]
            matches.append(FIBONACCI)

    if all(
        _satisfies_recurrence(f, (1.0, 0.0, 1.0), cfg.tol)
        or (f.arity == 2 and _proportional(f, [1.0, 0.0, 1.0], cfg.tol))
        for f in live
    ):
        matches.append(PIN_PARITY)

    for alpha in (2j, -2j):
        if all(_satisfies_recurrence(f, (1.0, alpha, -1.0), cfg.tol) for f in live):
            van_alpha = alpha
            matches.append(VANISHING)
            break

    tag = matches[0] if matches else HARD
    return BooleanClass(
        tag=tag,
        fibonacci_ab=fib_ab if FIBONACCI in matches else None,
        vanishing_alpha=van_alpha,
        all_matches=tuple(matches),
        dropped_degenerate=tuple(dropped),
    )


def bool_holant(grid: grideval.SignatureGrid, cfg: EvalConfig = DEFAULT_CONFIG) -> complex:
    """Holant on a Boolean-domain grid (thin wrapper over the oracle)."""
    if grid.domain_size != 2:
        raise SignatureError("bool_holant expects a domain-size-2 grid")
    return grideval.holant(grid, cfg)


# ---------------------------------------------------------------------------
# Membership testers for the generalized-equality and matching classes.
# ---------------------------------------------------------------------------


def in_generalized_equality(sig, cfg: EvalConfig = DEFAULT_CONFIG) -> bool:
    """Support contained in one pair of complementary Boolean points."""
    t = to_tensor(sig)
    if t.domain_size != 2:
        raise SignatureError("expects a Boolean-domain signature")
    scale = t.norm_inf()
    if scale == 0.0:
        return True
    support = [idx for idx in itertools.product(range(2), repeat=t.arity)
               if abs(t.array[idx]) > cfg.tol * scale]
    if len(support) <= 1:
        return True
    if len(support) == 2:
        a, b = support
        return all(x != y for x, y in zip(a, b))
    return False


def in_matching_form(sig, cfg: EvalConfig = DEFAULT_CONFIG) -> bool:
    """Support contained in the points of Hamming weight at most 1."""
    t = to_tensor(sig)
    if t.domain_size != 2:
        raise SignatureError("expects a Boolean-domain signature")
    scale = t.norm_inf()
    if scale == 0.0:
        return True
    for idx in itertools.product(range(2), repeat=t.arity):
        if sum(idx) > 1 and abs(t.array[idx]) > cfg.tol * scale:
            return False
    return True


def in_transformed_class(sig, m: np.ndarray, tester, cfg: EvalConfig = DEFAULT_CONFIG) -> bool:
    """Membership in m . C for a class tester of C: apply m^{-1} and test."""
    from .holo import apply_transform

    t = to_tensor(sig)
    inv = np.linalg.inv(np.asarray(m, dtype=np.complex128))
    return tester(apply_transform(inv, t), cfg)


def fibonacci_orthogonal_frame(a: complex, b: complex, cfg: EvalConfig = DEFAULT_CONFIG) -> np.ndarray:
    """2x2 orthogonal H whose inverse maps the (a, b) recurrence class onto
    generalized equality (support on two complementary points).

    Built from the roots x1, x2 of x^2 - (b/a) x - 1 = 0 (so x1 x2 = -1 and
    the columns (1, xi)/sqrt(1 + xi^2) are orthonormal); requires b != +-2ia.
    """
    if abs(b - 2j * a) <= cfg.tol or abs(b + 2j * a) <= cfg.tol:
        raise SignatureError("frame needs b != +-2ia")
    if abs(a) <= cfg.tol * max(1.0, abs(b)):
        return np.eye(2, dtype=np.complex128)
    ratio = b / a
    disc = np.sqrt(ratio * ratio + 4.0)
    x1 = (ratio + disc) / 2.0
    x2 = (ratio - disc) / 2.0
    cols = []
    for x in (x1, x2):
        v = np.array([1.0, x], dtype=np.complex128)
        cols.append(v / np.sqrt(1.0 + x * x))
    h = np.column_stack(cols)
    if not approx_zero(h @ h.T - np.eye(2), 1.0, max(cfg.tol, 1e-10)):
        raise SignatureError("frame construction failed orthogonality")
    return h
