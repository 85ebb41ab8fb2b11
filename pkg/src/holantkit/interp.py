"""Interpolation reduction: recover Holant values that use the restricted
equality =_{G,R} from instances that avoid it.

Every marked =_{G,R} vertex is replaced by a chain of k copies of a rank-2
binary H of the shape [[0,0,0],[0,a,b],[0,b,c]].  The chain signature is
H**k; stratifying the target Holant sum by the colors fed into the marked
slots turns the chain values into a linear system whose coefficient matrix
is Vandermonde, solvable from the oracle values at k = 1..m+1.  The two
Jordan shapes of the 2x2 block give two variants of the system.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from . import holo
from .grideval import SignatureGrid
from .sigcore import (
    DEFAULT_CONFIG,
    EvalConfig,
    SignatureError,
    Tensor,
    approx_zero,
    matrix_rank_tol,
    require_finite,
    to_tensor,
)

DIAGONAL = "DIAGONAL"
DEFECTIVE = "DEFECTIVE"

MAX_ROOT_OF_UNITY_ORDER = 360  # decidable stand-in for "is a root of unity"


class InterpolationError(RuntimeError):
    pass


def _check_h(h: np.ndarray, tol: float) -> np.ndarray:
    h = require_finite(h)
    if h.shape != (3, 3):
        raise SignatureError("H must be a 3x3 binary matrix")
    scale = max(1.0, float(np.abs(h).max()))
    if float(np.abs(h[0, :]).max()) > tol * scale or float(np.abs(h[:, 0]).max()) > tol * scale:
        raise SignatureError("H must vanish on the first row and column")
    if not approx_zero(h - h.T, scale, tol):
        raise SignatureError("H must be symmetric")
    if matrix_rank_tol(h, tol) != 2:
        raise SignatureError("H must have rank 2")
    return h


@dataclass(frozen=True)
class InterpolationPlan:
    """Jordan data of the 2x2 block of H plus the chain lengths to run."""

    h: np.ndarray
    jordan: str  # DIAGONAL or DEFECTIVE
    eigenvalues: Tuple[complex, complex]
    m: int

    @property
    def chain_lengths(self) -> Tuple[int, ...]:
        return tuple(range(1, self.m + 2))


def jordan_data(h: np.ndarray, cfg: EvalConfig = DEFAULT_CONFIG) -> Tuple[str, complex, complex]:
    """Closed-form 2x2 eigenstructure from the trace and determinant.

    The block is defective exactly when the discriminant vanishes and the
    block is not a scalar multiple of the identity.
    """
    block = h[1:, 1:]
    tr = complex(block[0, 0] + block[1, 1])
    det = complex(block[0, 0] * block[1, 1] - block[0, 1] * block[1, 0])
    scale = max(1.0, float(np.abs(block).max()))
    disc = tr * tr - 4.0 * det
    if abs(disc) <= (cfg.tol * scale) ** 2 * 16.0:
        lam = tr / 2.0
        if approx_zero(block - lam * np.eye(2), scale, cfg.tol):
            return DIAGONAL, lam, lam
        return DEFECTIVE, lam, lam
    root = np.sqrt(disc)
    return DIAGONAL, (tr + root) / 2.0, (tr - root) / 2.0


def make_plan(h, m: int, cfg: EvalConfig = DEFAULT_CONFIG) -> InterpolationPlan:
    h = _check_h(np.asarray(h, dtype=np.complex128), cfg.tol)
    kind, lam, mu = jordan_data(h, cfg)
    if abs(lam) <= cfg.tol or abs(mu) <= cfg.tol:
        raise SignatureError("rank-2 H cannot have a zero eigenvalue in its block")
    return InterpolationPlan(h, kind, (lam, mu), m)


@dataclass(frozen=True)
class OccurrenceInstance:
    """Grid with marked degree-2 vertices carrying =_{G,R}."""

    grid: SignatureGrid
    marked: Tuple[int, ...]

    def __post_init__(self):
        self.grid.validate()
        for v in self.marked:
            t = to_tensor(self.grid.vertices[v])
            if t.arity != 2 or not approx_zero(t.array - holo.EQ_GR, 1.0, 1e-12):
                raise SignatureError(f"marked vertex {v} is not the =_GR binary")

    @property
    def m(self) -> int:
        return len(self.marked)


def build_chain_instance(inst: OccurrenceInstance, h, k: int) -> SignatureGrid:
    """Replace every marked =_{G,R} vertex by a chain of k copies of H."""
    if k < 1:
        raise SignatureError("chain length must be at least 1")
    h = np.asarray(h, dtype=np.complex128)
    grid = inst.grid
    out = SignatureGrid(domain_size=grid.domain_size)
    for v, sig in enumerate(grid.vertices):
        if v in inst.marked:
            out.add_vertex(Tensor(3, 2, h))
        else:
            out.add_vertex(sig)
    extra = {}
    for v in inst.marked:
        chain = [v] + [out.add_vertex(Tensor(3, 2, h)) for _ in range(k - 1)]
        for a, b in zip(chain, chain[1:]):
            out.add_edge((a, 1), (b, 0))
        extra[v] = chain[-1]
    seen_second = set()
    for (a, b) in grid.edges:

        def port(p):
            v, slot = p
            if v not in inst.marked:
                return p
            # marked vertices are symmetric binaries; route their first
            # incident edge into port 0 and the second to the chain tail
            if v not in seen_second:
                seen_second.add(v)
                return (v, 0)
            return (extra[v], 1)

        out.add_edge(port(a), port(b))
    for p in grid.dangling:
        out.add_dangling(p)
    out.validate()
    return out


@dataclass(frozen=True)
class InterpolationReport:
    branch: str
    shortcut_order: Optional[int]
    nodes: Tuple[complex, ...]
    strata: Tuple[complex, ...]
    residual: float
    condition: float


def _root_of_unity_order(z: complex, tol: float) -> Optional[int]:
    if abs(abs(z) - 1.0) > tol:
        return None
    for k in range(1, MAX_ROOT_OF_UNITY_ORDER + 1):
        if abs(z**k - 1.0) <= tol * k:
            return k
    return None


def _solve_vandermonde(nodes: np.ndarray, rhs: np.ndarray, cfg: EvalConfig):
    """Solve sum_j x_j nodes_i^j = rhs_i with row scaling, reporting
    conditioning and the residual of the solved system."""
    m1 = nodes.size
    v = np.vander(nodes, m1, increasing=True)
    row_scale = np.abs(v).max(axis=1)
    row_scale[row_scale == 0.0] = 1.0
    vs = v / row_scale[:, None]
    cond = float(np.linalg.cond(vs))
    if not np.isfinite(cond) or cond > 0.1 / cfg.tol:
        raise InterpolationError(
            f"Vandermonde system too ill-conditioned (estimate {cond:.3e})"
        )
    x = np.linalg.solve(vs, rhs / row_scale)
    resid = float(np.abs(v @ x - rhs).max())
    resid /= max(1.0, float(np.abs(rhs).max()))
    return x, resid, cond


def interpolate(
    inst: OccurrenceInstance,
    h,
    oracle: Callable[[SignatureGrid], complex],
    cfg: EvalConfig = DEFAULT_CONFIG,
    detailed: bool = False,
    use_shortcut: bool = True,
):
    """Recover the Holant value of the marked instance from chain queries.

    DIAGONAL branch: with r = lam/mu a root of unity of order k, one query
    at that k rescaled by mu**(-mk) already equals the answer; otherwise
    the m+1 queries at k = 1..m+1 form a Vandermonde system in r**k for
    the strata sums, whose total is the answer.  DEFECTIVE branch: the
    system is Vandermonde in the chain length itself and the answer is the
    top stratum.
    """
    plan = make_plan(h, inst.m, cfg)
    lam, mu = plan.eigenvalues
    m = inst.m
    if m == 0:
        value = oracle(inst.grid)
        if detailed:
            return value, InterpolationReport("trivial", None, (), (), 0.0, 1.0)
        return value

    if plan.jordan == DIAGONAL:
        ratio = lam / mu
        order = _root_of_unity_order(ratio, cfg.tol) if use_shortcut else None
        if order is not None:
            k = order
            val = oracle(build_chain_instance(inst, plan.h, k)) / mu ** (m * k)
            if detailed:
                return val, InterpolationReport(DIAGONAL, k, (), (), 0.0, 1.0)
            return val
        ys = []
        nodes = []
        for k in plan.chain_lengths:
            y = oracle(build_chain_instance(inst, plan.h, k))
            ys.append(y / mu ** (m * k))
            nodes.append(ratio**k)
        strata, resid, cond = _solve_vandermonde(
            np.array(nodes), np.array(ys), cfg
        )
        value = complex(strata.sum())
        if detailed:
            return value, InterpolationReport(
                DIAGONAL, None, tuple(nodes), tuple(strata), resid, cond
            )
        return value

    # defective block: chain value is lam^{(k-1)m} sum_j (lam^j rho_j) k^{m-j}
    ys = []
    nodes = []
    for k in plan.chain_lengths:
        y = oracle(build_chain_instance(inst, plan.h, k))
        ys.append(y / lam ** ((k - 1) * m))
        nodes.append(float(k))
    # coefficients come out in increasing powers of k: index m-j for stratum j
    coeffs, resid, cond = _solve_vandermonde(np.array(nodes), np.array(ys), cfg)
    top = coeffs[0]  # k^0 term, j = m
    value = complex(top / lam**m)
    if detailed:
        return value, InterpolationReport(
            DEFECTIVE, None, tuple(nodes), tuple(coeffs), resid, cond
        )
    return value


def chain_matrix(h, k: int) -> np.ndarray:
    """Matrix of a k-chain of H (plain matrix power)."""
    h = np.asarray(h, dtype=np.complex128)
    return np.linalg.matrix_power(h, k)
