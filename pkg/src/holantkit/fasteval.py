"""Polynomial-time Holant evaluation for certified tractable signatures.

Grids carry one certified ternary signature F at degree-3 vertices plus
arbitrary unary signatures at degree-1 vertices (free unaries).  Each
evaluator transforms the whole grid into canonical coordinates, then
repeatedly absorbs arity-1 vertices into their neighbors until every
remaining vertex has arity 2 or 3.  Connected components then reduce to
closed forms:

  FORM1  vertices are monochromatic with per-color weights; edges force a
         shared color per component: sum over the three colors of the
         vertex-weight products.
  FORM2  after an extra non-orthogonal change of basis every edge carries
         swap(B, G) + fix(R): the all-R product plus, when the component
         is bipartite, the two alternating B/G colorings.
  FORM3  the annihilator structure cancels everything except the single
         all-R assignment, plus, when the component is a cycle, the two
         alternating beta/gamma pairings:
         2 * <beta, gamma>^n * prod_v <u_v, beta0>.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import classify, holo
from .classify import FORM1, FORM2, FORM3, HARD, Certificate
from .grideval import SignatureGrid
from .sigcore import (
    DEFAULT_CONFIG,
    EvalConfig,
    SignatureError,
    SymmetricSignature,
    approx_zero,
    to_tensor,
)

# edge binary left behind by the FORM2 change of basis: B<->G swap, R fixed
SWAP_BG_FIX_R = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=np.complex128)


@dataclass(frozen=True)
class TractableInstance:
    """A grid over one certified ternary plus free unary decorations."""

    grid: SignatureGrid
    ternary: SymmetricSignature
    certificate: Certificate

    def validate(self, cfg: EvalConfig = DEFAULT_CONFIG) -> None:
        if self.certificate.variant == HARD:
            raise SignatureError("instance requires a non-HARD certificate")
        classify.verify_certificate(self.ternary, self.certificate, cfg)
        self.grid.validate()
        ref = self.ternary.to_tensor().array
        for v, sig in enumerate(self.grid.vertices):
            t = to_tensor(sig)
            if t.arity == 3:
                if not approx_zero(t.array - ref, self.ternary.norm_inf(), cfg.tol):
                    raise SignatureError(f"vertex {v} does not carry the certified ternary")
            elif t.arity != 1:
                raise SignatureError("instance vertices must be the ternary or unaries")


@dataclass
class _Vertex:
    """Mutable evaluation state of one grid vertex.

    Ternary vertices start from the transformed ternary and accumulate
    absorbed unary vectors; unary vertices carry their transformed vector.
    """

    is_ternary: bool
    vector: Optional[np.ndarray] = None
    absorbed: List[np.ndarray] = field(default_factory=list)
    alive: bool = True


class _Reducer:
    """Shared transform-and-absorb machinery for the three evaluators."""

    def __init__(self, grid: SignatureGrid, g_tensor: np.ndarray, linmap: np.ndarray,
                 edge_map: Optional[np.ndarray]):
        grid.validate()
        self.g = g_tensor
        self.edge_map = edge_map
        self.scalar = 1.0 + 0.0j
        self.state: List[_Vertex] = []
        for sig in grid.vertices:
            t = to_tensor(sig)
            if t.arity == 1:
                self.state.append(_Vertex(False, vector=linmap @ t.array))
            elif t.arity == 3:
                self.state.append(_Vertex(True))
            else:
                raise SignatureError("evaluators accept ternary and unary labels only")
        self.adj: List[List[Tuple[int, int]]] = [[] for _ in grid.vertices]
        self._edges = [(a[0], b[0]) for a, b in grid.edges]
        for eid, (a, b) in enumerate(grid.edges):
            self.adj[a[0]].append((eid, b[0]))
            self.adj[b[0]].append((eid, a[0]))
        self.edge_alive = [True] * len(grid.edges)
        self._absorb_all()

    # -- vertex arity/value helpers -------------------------------------
    def _arity(self, v: int) -> int:
        st = self.state[v]
        return (3 - len(st.absorbed)) if st.is_ternary else 1

    def _live_degree(self, v: int) -> int:
        return sum(1 for eid, _ in self.adj[v] if self.edge_alive[eid])

    def _as_vector(self, v: int) -> np.ndarray:
        st = self.state[v]
        if not st.is_ternary:
            return st.vector
        arr = self.g
        for u in st.absorbed:
            arr = np.einsum("i,i...->...", u, arr)
        return arr

    def _full_contraction(self, v: int) -> complex:
        st = self.state[v]
        arr = self.g
        for u in st.absorbed:
            arr = np.einsum("i,i...->...", u, arr)
        return complex(arr)

    # -- absorption loop -------------------------------------------------
    def _absorb_all(self):
        work = True
        while work:
            work = False
            for v, st in enumerate(self.state):
                if not st.alive:
                    continue
                deg = self._live_degree(v)
                arity = self._arity(v)
                if arity != deg:
                    raise SignatureError("vertex degree does not match its arity")
                if arity == 0:
                    self.scalar *= self._full_contraction(v)
                    st.alive = False
                    work = True
                elif arity == 1:
                    self._absorb_pendant(v)
                    work = True

    def _absorb_pendant(self, v: int):
        st = self.state[v]
        eid, w = next((e, w) for e, w in self.adj[v] if self.edge_alive[e])
        if w == v:
            raise SignatureError("an arity-1 vertex cannot carry a self-loop")
        vec = self._as_vector(v)
        if self.edge_map is not None:
            vec = self.edge_map @ vec
        self.edge_alive[eid] = False
        st.alive = False
        other = self.state[w]
        if other.is_ternary:
            other.absorbed.append(vec)
        else:
            self.scalar *= complex(vec @ other.vector)
            other.alive = False

    # -- component structure ---------------------------------------------
    def components(self) -> List[List[int]]:
        live = [v for v, st in enumerate(self.state) if st.alive]
        seen = set()
        comps = []
        for v in live:
            if v in seen:
                continue
            stack, comp = [v], []
            seen.add(v)
            while stack:
                x = stack.pop()
                comp.append(x)
                for eid, w in self.adj[x]:
                    if self.edge_alive[eid] and w not in seen:
                        seen.add(w)
                        stack.append(w)
            comps.append(comp)
        return comps

    def bipartition(self, comp: List[int]) -> Optional[Dict[int, int]]:
        """BFS 2-coloring; None on self-loops or odd cycles."""
        color = {comp[0]: 0}
        stack = [comp[0]]
        while stack:
            x = stack.pop()
            for eid, w in self.adj[x]:
                if not self.edge_alive[eid]:
                    continue
                if w == x:
                    return None
                if w in color:
                    if color[w] == color[x]:
                        return None
                else:
                    color[w] = 1 - color[x]
                    stack.append(w)
        return color

    def edge_count(self, comp: List[int]) -> int:
        cset = set(comp)
        return sum(
            1
            for eid, (a, _) in enumerate(self._edges)
            if self.edge_alive[eid] and a in cset
        )


def _make_reducer(inst: TractableInstance, linmap: np.ndarray, edge_map) -> _Reducer:
    g = holo.apply_transform(linmap, inst.ternary.to_tensor()).array
    return _Reducer(inst.grid, g, linmap, edge_map)


def _diagonal_weights(g: np.ndarray, tol: float) -> np.ndarray:
    diag = np.array([g[c, c, c] for c in range(3)])
    off = g.copy()
    for c in range(3):
        off[c, c, c] = 0.0
    if not approx_zero(off, max(1.0, float(np.abs(g).max())), 1000 * tol):
        raise SignatureError("certificate transform did not diagonalize the signature")
    return diag


def _color_weights(red: _Reducer, comp: List[int], diag: np.ndarray) -> List[np.ndarray]:
    """Per-vertex per-color weights: diagonal coefficients times the
    entries of every absorbed unary."""
    out = []
    for v in comp:
        w = diag.copy()
        for u in red.state[v].absorbed:
            w = w * u
        out.append(w)
    return out


def eval_form1(inst: TractableInstance, cfg: EvalConfig = DEFAULT_CONFIG) -> complex:
    """Diagonal form: each component is monochromatic."""
    cert = inst.certificate
    if cert.variant != FORM1:
        raise SignatureError("eval_form1 needs a FORM1 certificate")
    rows = []
    for v in cert.vectors:
        q = holo.inner(v, v)
        if abs(q) > cfg.tol * max(1.0, float(np.sum(np.abs(v) ** 2))):
            rows.append(np.asarray(v) / np.sqrt(q))
    t = holo.complete_orthogonal_rows(rows, cfg)
    red = _make_reducer(inst, t.matrix, None)
    diag = _diagonal_weights(red.g, cfg.tol)
    value = red.scalar
    for comp in red.components():
        weights = _color_weights(red, comp, diag)
        value *= complex(np.sum(np.prod(np.array(weights), axis=0)))
    return value


def eval_form2(inst: TractableInstance, cfg: EvalConfig = DEFAULT_CONFIG) -> complex:
    """Swap form: all-R product plus bipartite B/G alternations."""
    cert = inst.certificate
    if cert.variant != FORM2:
        raise SignatureError("eval_form2 needs a FORM2 certificate")
    _, b1, b2 = cert.vectors
    if approx_zero(b1, 1.0, cfg.tol) or approx_zero(b2, 1.0, cfg.tol):
        raise SignatureError("FORM2 evaluation needs two nonzero isotropic witnesses")
    _, t = holo.pair_isotropic(b1, b2, cfg)
    # diag(Z^-1, 1) sends (beta0, beta0_bar, e3) to (e1, e2, e3) and leaves
    # the edge equality as swap(B, G) + fix(R)
    m = np.eye(3, dtype=np.complex128)
    m[:2, :2] = np.linalg.inv(holo.Z_MAT)
    linmap = m @ t.matrix
    red = _make_reducer(inst, linmap, SWAP_BG_FIX_R)
    diag = _diagonal_weights(red.g, cfg.tol)
    value = red.scalar
    for comp in red.components():
        weights = _color_weights(red, comp, diag)
        total = complex(np.prod([w[2] for w in weights]))
        coloring = red.bipartition(comp)
        if coloring is not None:
            sides = np.array([coloring[v] for v in comp])
            w_arr = np.array(weights)
            total += complex(
                np.prod(np.where(sides == 0, w_arr[:, 0], w_arr[:, 1]))
                + np.prod(np.where(sides == 0, w_arr[:, 1], w_arr[:, 0]))
            )
        value *= total
    return value


def eval_form3(inst: TractableInstance, cfg: EvalConfig = DEFAULT_CONFIG) -> complex:
    """Annihilator form.

    After rotating beta onto beta0 every vertex function splits into an
    annihilated part plus degenerate beta/gamma terms.  Flipping one edge
    off the first color multiplies both incident annihilated values by i,
    so those contributions cancel pairwise down to the single all-R
    assignment.  Degenerate-only contributions survive exactly on cycle
    components, where the beta/gamma factors must alternate.
    """
    cert = inst.certificate
    if cert.variant != FORM3:
        raise SignatureError("eval_form3 needs a FORM3 certificate")
    beta, gamma = cert.vectors
    t = holo.normalize_isotropic(beta, cfg)
    red = _make_reducer(inst, t.matrix, None)
    c = holo.inner(beta, gamma)
    value = red.scalar
    for comp in red.components():
        sterm = 1.0 + 0.0j
        for v in comp:
            st = red.state[v]
            arr = red.g
            for u in st.absorbed:
                arr = np.einsum("i,i...->...", u, arr)
            sterm *= complex(arr[(2,) * (3 - len(st.absorbed))])
        total = sterm
        if all(len(red.state[v].absorbed) == 1 for v in comp):
            n = red.edge_count(comp)
            if n == len(comp):  # every vertex has live degree 2: a cycle
                kappa = np.prod(
                    [complex(red.state[v].absorbed[0] @ holo.BETA0) for v in comp]
                )
                total += 2.0 * (c**n) * complex(kappa)
        value *= total
    return value


def fast_holant(inst: TractableInstance, cfg: EvalConfig = DEFAULT_CONFIG) -> complex:
    """Dispatch on the certificate; linear time in the grid size."""
    variant = inst.certificate.variant
    if variant == HARD:
        raise SignatureError("fast_holant requires a tractable certificate")
    if inst.grid.dangling:
        raise SignatureError("fast evaluation is defined for closed grids")
    if variant == FORM1:
        return eval_form1(inst, cfg)
    if variant == FORM2:
        return eval_form2(inst, cfg)
    if variant == FORM3:
        return eval_form3(inst, cfg)
    raise SignatureError(f"unknown certificate variant {variant!r}")
