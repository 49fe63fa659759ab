"""Transferred action of vector fields on cochains.

For a generator word ``(a_1, ..., a_p)`` the word tensor is

    T[i, j] = < chain_i, L_{a_1} h L_{a_2} h ... h L_{a_p} cochain_j >

Every ``h`` lowers form degree by one and every Lie derivative preserves
it, so a word of length ``p`` can only connect a cochain of degree ``q`` to
a chain of degree ``q - p + 1``; words longer than ``dim + 1`` vanish.

Matrices are stored sparsely as ``{(row, col): value}`` with zeros pruned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Dict, List, Optional, Sequence, Tuple

from .backends import CochainComplex
from .forms import Form, exterior_derivative, lie_derivative
from .liealg import GeneratorBasis, _index_json
from .scalars import magnitude, to_json as scalar_to_json, zero

Sparse = Dict[Tuple[int, int], object]


def _prune(m: dict) -> dict:
    return {k: v for k, v in m.items() if v != 0}


def sparse_matmul(a: Sparse, b: Sparse) -> Sparse:
    rows: dict = {}
    for (i, k), v in a.items():
        rows.setdefault(k, []).append((i, v))
    out: dict = {}
    for (k, j), w in b.items():
        for i, v in rows.get(k, ()):
            out[(i, j)] = out.get((i, j), 0) + v * w
    return _prune(out)


def sparse_max_abs(m: Sparse) -> float:
    return max((magnitude(v) for v in m.values()), default=0.0)


def sparse_sub(a: Sparse, b: Sparse) -> Sparse:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) - v
    return _prune(out)


@dataclass
class DifferentialMatrix:
    """``entries[(i, j)] = <chain_i, d cochain_j>``."""

    size: int
    entries: Sparse

    def squared(self) -> Sparse:
        return sparse_matmul(self.entries, self.entries)


def differential_matrix(cx: CochainComplex) -> DifferentialMatrix:
    entries: dict = {}
    for j, c in enumerate(cx.cochains):
        for i, v in cx.coordinates(exterior_derivative(c)).items():
            entries[(i, j)] = v
    return DifferentialMatrix(len(cx.cochains), _prune(entries))


@dataclass
class WordMatrix:
    word: tuple
    entries: Sparse
    pruned: bool = False


class _Engine:
    """Applies ``h L_a ... h L_b`` suffixes to basis cochains with caching."""

    def __init__(self, cx: CochainComplex, basis: GeneratorBasis):
        self.cx = cx
        self.basis = basis
        self.fields = {a: basis.field(a) for a in basis.indices}
        # (suffix word, cochain index) -> L_{a_1} h ... h L_{a_p} cochain
        self.cache: Dict[Tuple[tuple, int], Form] = {}

    def apply(self, word: tuple, j: int) -> Form:
        key = (word, j)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        if len(word) == 1:
            out = lie_derivative(self.field(word[0]), self.cx.cochains[j])
        else:
            inner = self.apply(word[1:], j)
            out = lie_derivative(self.field(word[0]), self.cx.homotopy(inner))
        self.cache[key] = out
        return out

    def field(self, a):
        v = self.fields.get(a)
        if v is None:
            v = self.fields[a] = self.basis.field(a)
        return v


def word_operator(cx: CochainComplex, basis: GeneratorBasis, word: Sequence,
                  prune: bool = True, engine: Optional[_Engine] = None) -> WordMatrix:
    """Matrix of ``P L_{a_1} h ... h L_{a_p}`` on the cochain basis.

    With ``prune`` the degree bookkeeping skips columns that must vanish;
    ``prune=False`` recomputes them symbolically.
    """
    word = tuple(word)
    if not word:
        raise ValueError("empty word")
    engine = engine or _Engine(cx, basis)
    p = len(word)
    if prune and p > cx.dim + 1:
        return WordMatrix(word, {}, pruned=True)
    entries: dict = {}
    computed = 0
    for j, c in enumerate(cx.cochains):
        if prune and c.degree - (p - 1) < 0:
            continue
        computed += 1
        out = engine.apply(word, j)
        for i, v in cx.coordinates(out).items():
            entries[(i, j)] = v
    entries = _prune(entries)
    return WordMatrix(word, entries, pruned=computed == 0)


@dataclass
class TransferTensors:
    geometry: str
    basis: GeneratorBasis
    words: Dict[tuple, Sparse]
    exact: bool
    intermediates: Dict = field(default_factory=dict)

    def lengths(self) -> set:
        return {len(w) for w in self.words}

    def antisymmetrized(self, ghosts: Sequence) -> Sparse:
        """Coefficient of ``c^{g_1} ... c^{g_p}`` (``ghosts`` in window order).

        ``sum_w c^{w_1}..c^{w_p} T_w`` collects ``sign(sigma) T_{sigma(g)}``.
        """
        ghosts = tuple(ghosts)
        out: dict = {}
        for perm in permutations(range(len(ghosts))):
            w = tuple(ghosts[i] for i in perm)
            sign = _perm_sign(perm)
            for k, v in self.words.get(w, {}).items():
                out[k] = out.get(k, 0) + (v if sign > 0 else -v)
        return _prune(out)

    def to_json(self) -> dict:
        words = []
        for w in sorted(self.words, key=lambda w: (len(w), [self.basis.position(a) for a in w])):
            rows = [{"chain": i, "cochain": j, "value": scalar_to_json(v)}
                    for (i, j), v in sorted(self.words[w].items())]
            words.append({"word": [_index_json(a) for a in w], "rows": rows})
        return {"geometry": self.geometry, "window": self.basis.window_json(), "words": words}


def _perm_sign(perm) -> int:
    sign = 1
    seen = list(perm)
    for i in range(len(seen)):
        for j in range(i + 1, len(seen)):
            if seen[i] > seen[j]:
                sign = -sign
    return sign


def transfer_tensors(cx: CochainComplex, basis: GeneratorBasis,
                     max_len: Optional[int] = None) -> TransferTensors:
    """All word tensors up to ``max_len`` (default and maximum ``dim + 1``)."""
    top = cx.dim + 1
    if max_len is None:
        max_len = top
    if max_len > top:
        raise ValueError(f"words longer than {top} vanish identically; max_len={max_len}")
    engine = _Engine(cx, basis)
    words = {}
    for p in range(1, max_len + 1):
        for w in product(basis.indices, repeat=p):
            wm = word_operator(cx, basis, w, engine=engine)
            if not wm.pruned:
                words[w] = wm.entries
    tensors = TransferTensors(cx.geometry, basis, words, cx.exact)
    if cx.geometry == "square":
        gamma = cx.indices_of_degree(2)[0]
        # xi = L h L gamma per ordered generator pair
        tensors.intermediates["xi"] = {w: engine.cache[(w, gamma)]
                                       for w in product(basis.indices, repeat=2)
                                       if (w, gamma) in engine.cache}
    return tensors


# -- closed-form tables (interval, circle) ------------------------------------

@dataclass
class ClosedFormTables:
    nu: Dict[object, List]
    dnu: Dict[object, List]
    beta: List[List]
    words: Dict[tuple, Sparse]


def closed_form_tables(cx: CochainComplex, basis: GeneratorBasis) -> ClosedFormTables:
    """Tensor entries assembled from node values of ``nu``, ``nu'`` and ``beta_j^i``.

    Length-2 words carry ``nu_a^i nu_b'^i beta_j^i - nu_a^i sum_m nu_b^m
    beta_j^m (beta_{m-1}^i - beta_m^i)``; the ordered engine value also
    contains ``nu_a^i nu_b^i theta_j'(t_i)``, which is symmetric in ``(a, b)``
    and drops out of every antisymmetrized coefficient.
    """
    if cx.geometry not in ("interval", "circle"):
        raise ValueError(f"no closed-form tables for geometry {cx.geometry!r}")
    alpha_idx = cx.indices_of_degree(0)
    beta_idx = cx.indices_of_degree(1)
    n_nodes, n_edges = len(alpha_idx), len(beta_idx)
    circle = cx.geometry == "circle"
    nodes = [cx.chains[i].coords[0] for i in alpha_idx]

    nu, dnu = {}, {}
    for a in basis.indices:
        f = basis.field(a).comps[0]
        df = f.derivative()
        nu[a] = [f.evaluate(t) for t in nodes]
        dnu[a] = [df.evaluate(t) for t in nodes]

    def b(i, j):
        return cx.beta_value(i, j)

    def node(values, i):
        return values[i % n_nodes] if circle else values[i]

    words: Dict[tuple, Sparse] = {}
    for a in basis.indices:
        m: dict = {}
        for i in range(n_nodes):
            for j in range(n_nodes):
                m[(alpha_idx[i], alpha_idx[j])] = nu[a][i] * (b(i, j - 1) - b(i, j))
        for i in range(n_edges):
            for j in range(n_edges):
                m[(beta_idx[i], beta_idx[j])] = (node(nu[a], i + 1) * b(i + 1, j)
                                                 - nu[a][i] * b(i, j))
        words[(a,)] = _prune(m)
    for a in basis.indices:
        for bb in basis.indices:
            m = {}
            for i in range(n_nodes):
                for j in range(n_edges):
                    s = zero(cx.exact)
                    for mm in range(n_nodes):
                        s = s + nu[bb][mm] * b(mm, j) * (b(i, mm - 1) - b(i, mm))
                    m[(alpha_idx[i], beta_idx[j])] = (nu[a][i] * dnu[bb][i] * b(i, j)
                                                      - nu[a][i] * s)
            words[(a, bb)] = _prune(m)
    beta = [[b(i, j) for j in range(n_edges)] for i in range(n_nodes)]
    return ClosedFormTables(nu, dnu, beta, words)


def antisymmetrize_words(words: Dict[tuple, Sparse], ghosts: Sequence) -> Sparse:
    out: dict = {}
    for perm in permutations(range(len(ghosts))):
        w = tuple(ghosts[i] for i in perm)
        sign = _perm_sign(perm)
        for k, v in words.get(w, {}).items():
            out[k] = out.get(k, 0) + (v if sign > 0 else -v)
    return _prune(out)
