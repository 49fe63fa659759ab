"""Generator bases of vector-field Lie algebras and their structure constants.

Index conventions:

* interval: ``k >= 0`` stands for ``t**k d/dt``
* circle:   ``k`` (any integer) stands for ``exp(i k t) d/dt``
* square:   ``(axis, n, m)`` stands for ``x**n y**m d/d(axis)``

A *window* is the finite list of indices kept in a computation.  Brackets
that leave the window are recorded, never silently dropped.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .backends import TWO_PI
from .forms import VectorField, bracket
from .funcs import Func1D, Func2D
from .scalars import magnitude, to_json as scalar_to_json


class NotExpressibleError(ValueError):
    """A vector field is not a finite combination of the ambient generators."""


class GeneratorBasis:
    def __init__(self, geometry: str, indices: Sequence, exact: bool):
        self.geometry = geometry
        self.indices = list(indices)
        if len(set(self.indices)) != len(self.indices):
            raise ValueError("duplicate generator index")
        self.exact = exact
        self._position = {a: p for p, a in enumerate(self.indices)}

    def __repr__(self):
        return f"GeneratorBasis({self.geometry}, {self.indices})"

    def __len__(self):
        return len(self.indices)

    def in_window(self, a) -> bool:
        return a in self._position

    def position(self, a) -> int:
        return self._position[a]

    def field(self, a) -> VectorField:
        if self.geometry == "interval":
            return VectorField((Func1D.term(a, 0, Fraction(0), Fraction(1)),))
        if self.geometry == "circle":
            return VectorField((Func1D.term(0, a, 0.0, TWO_PI, 1.0 + 0j, exact=False),))
        axis, n, m = a
        mono = Func2D.monomial(n, m)
        zero2 = mono.zero_like()
        return VectorField((mono, zero2) if axis == "x" else (zero2, mono))

    def expand(self, v: VectorField) -> Dict[object, object]:
        """Coefficients of ``v`` in the ambient generator family (any index)."""
        out: dict = {}
        if self.geometry in ("interval", "circle"):
            f = v.comps[0]
            if len(f.pieces) != 1:
                raise NotExpressibleError("piecewise field")
            for (n, k), c in f.pieces[0].items():
                if self.geometry == "interval" and k == 0:
                    out[n] = c
                elif self.geometry == "circle" and n == 0:
                    out[k] = c
                else:
                    raise NotExpressibleError(f"term t^{n} e^({k}it) outside the family")
            return out
        for axis, comp in zip("xy", v.comps):
            for (n, m), c in comp.terms.items():
                out[(axis, n, m)] = c
        return out

    def window_json(self) -> dict:
        return {"geometry": self.geometry, "indices": [_index_json(a) for a in self.indices]}


def _index_json(a):
    return list(a) if isinstance(a, tuple) else a


def interval_basis(K: int = 1, indices: Optional[Iterable[int]] = None) -> GeneratorBasis:
    idx = list(indices) if indices is not None else list(range(K + 1))
    if any(not isinstance(a, int) or a < 0 for a in idx):
        raise ValueError("interval generator indices are integers >= 0")
    return GeneratorBasis("interval", sorted(idx), exact=True)


def circle_basis(K: int = 1, indices: Optional[Iterable[int]] = None) -> GeneratorBasis:
    idx = list(indices) if indices is not None else list(range(-K, K + 1))
    return GeneratorBasis("circle", sorted(idx), exact=False)


def square_basis(D: int = 1, indices: Optional[Iterable[tuple]] = None) -> GeneratorBasis:
    if indices is None:
        indices = [(axis, n, s - n) for axis in "xy" for s in range(D + 1) for n in range(s, -1, -1)]
    idx = [tuple(a) for a in indices]
    return GeneratorBasis("square", sorted(idx), exact=True)


def basis_from_config(geometry: str, window: dict) -> GeneratorBasis:
    window = window or {}
    if "indices" in window:
        raw = window["indices"]
        if geometry == "interval":
            return interval_basis(indices=[int(a) for a in raw])
        if geometry == "circle":
            return circle_basis(indices=[int(a) for a in raw])
        return square_basis(indices=[(a[0], int(a[1]), int(a[2])) for a in raw])
    size = window.get("K", window.get("D", window.get("K_or_D", 1)))
    size = int(size)
    if size < 0:
        raise ValueError("window size must be >= 0")
    if geometry == "interval":
        return interval_basis(size)
    if geometry == "circle":
        return circle_basis(size)
    if geometry == "square":
        return square_basis(size)
    raise ValueError(f"unknown geometry {geometry!r}")


def bracket_generators(basis: GeneratorBasis, a, b) -> Dict[object, object]:
    return basis.expand(bracket(basis.field(a), basis.field(b)))


class StructureConstants:
    """``[v_a, v_b] = sum_d f[a, b][d] v_d`` over all window pairs.

    ``table`` keeps components outside the window too; ``leaves[(a, b)]``
    flags those pairs.
    """

    def __init__(self, basis: GeneratorBasis, table: Dict[Tuple, Dict]):
        self.basis = basis
        self.table = table
        self.leaves = {ab: any(not basis.in_window(d) for d in comps)
                       for ab, comps in table.items()}

    def f(self, a, b, d):
        return self.table.get((a, b), {}).get(d, 0)

    def in_window(self) -> Dict[Tuple, Dict]:
        return {ab: {d: c for d, c in comps.items() if self.basis.in_window(d)}
                for ab, comps in self.table.items()}

    def antisymmetry_defect(self) -> float:
        worst = 0.0
        for (a, b), comps in self.table.items():
            other = self.table[(b, a)]
            for d in set(comps) | set(other):
                worst = max(worst, magnitude(comps.get(d, 0) + other.get(d, 0)))
        return worst

    def jacobi_defect(self) -> Tuple[float, Optional[tuple]]:
        """Worst Jacobi violation over window-closed triples, with its witness."""
        worst, witness = 0.0, None
        idx = self.basis.indices
        for a, b, c in combinations(idx, 3):
            if not window_closed((a, b, c), self.basis, self):
                continue
            total: dict = {}
            for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
                for d, f1 in self.table[(x, y)].items():
                    for e, f2 in self.table[(d, z)].items():
                        total[e] = total.get(e, 0) + f1 * f2
            defect = max((magnitude(v) for v in total.values()), default=0.0)
            if defect > worst:
                worst, witness = defect, (a, b, c)
        return worst, witness

    def to_json(self) -> dict:
        triples = []
        for (a, b), comps in sorted(self.table.items(), key=lambda kv: (str(kv[0]))):
            for d, c in sorted(comps.items(), key=lambda kv: str(kv[0])):
                triples.append({"a": _index_json(a), "b": _index_json(b), "d": _index_json(d),
                                "f": scalar_to_json(c), "in_window": self.basis.in_window(d)})
        return {"window": self.basis.window_json(), "constants": triples}


def structure_constants(basis: GeneratorBasis) -> StructureConstants:
    table = {}
    for a in basis.indices:
        for b in basis.indices:
            table[(a, b)] = bracket_generators(basis, a, b)
    return StructureConstants(basis, table)


def closed_form_constant(geometry: str, k, l, m):
    """Textbook constants: ``(l-k) delta_{k+l-1}^m`` and ``i (l-k) delta_{k+l}^m``."""
    if geometry == "interval":
        return Fraction(l - k) if m == k + l - 1 else Fraction(0)
    if geometry == "circle":
        return 1j * (l - k) if m == k + l else 0j
    raise ValueError("closed-form constants exist only for interval and circle")


def _combine(x: dict, y: dict, sc: StructureConstants, basis: GeneratorBasis):
    out: dict = {}
    for a, ca in x.items():
        for b, cb in y.items():
            comps = sc.table.get((a, b))
            if comps is None:
                comps = bracket_generators(basis, a, b)
            for d, f in comps.items():
                out[d] = out.get(d, 0) + ca * cb * f
    return {d: c for d, c in out.items() if c != 0}


def window_closed(word: Sequence, basis: GeneratorBasis,
                  sc: Optional[StructureConstants] = None) -> bool:
    """True iff every iterated bracket of every sub-multiset of ``word`` stays in the window."""
    word = tuple(word)
    if not word:
        raise ValueError("empty word")
    if any(not basis.in_window(a) for a in word):
        return False
    sc = sc or structure_constants(basis)
    memo: dict = {}

    def brackets(ms: tuple):
        # all full bracketings of the multiset ms, or None when one escapes
        if ms in memo:
            return memo[ms]
        if len(ms) == 1:
            memo[ms] = [{ms[0]: 1}]
            return memo[ms]
        values = []
        first, rest = ms[0], ms[1:]
        for r in range(0, len(rest)):
            for chosen in combinations(range(len(rest)), r):
                left = (first,) + tuple(rest[i] for i in chosen)
                right = tuple(rest[i] for i in range(len(rest)) if i not in chosen)
                lv, rv = brackets(left), brackets(right)
                if lv is None or rv is None:
                    memo[ms] = None
                    return None
                for x in lv:
                    for y in rv:
                        z = _combine(x, y, sc, basis)
                        if any(not basis.in_window(d) for d in z):
                            memo[ms] = None
                            return None
                        values.append(z)
        memo[ms] = values
        return values

    ordered = tuple(sorted(word, key=basis.position))
    for size in range(2, len(ordered) + 1):
        for sub in set(combinations(ordered, size)):
            if brackets(sub) is None:
                return False
    return True
