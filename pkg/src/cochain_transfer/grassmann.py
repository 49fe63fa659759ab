"""Graded polynomial algebra, the antibracket and the classical master equation.

Variables come in dual pairs (field, antifield) of opposite parity:

=================  ==========  =============================
variable           role        parity
=================  ==========  =============================
ghost ``c^a``      ghost       odd
``c*_a``           antighost   even
field of p-form    field       ``p mod 2``
its antifield      antifield   ``(p + 1) mod 2``
=================  ==========  =============================

Monomials are sorted tuples of variables; odd variables occur at most once
and reordering them produces the Koszul sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Tuple

from .liealg import GeneratorBasis, StructureConstants, _index_json, window_closed
from .scalars import fmt, magnitude, to_json as scalar_to_json

ROLES = {"ghost": 0, "antighost": 1, "field": 2, "antifield": 3}
_DUAL = {"ghost": "antighost", "antighost": "ghost", "field": "antifield", "antifield": "field"}
_FIELD_NAMES = {0: "phi", 1: "psi", 2: "omega"}


class UnpairedVariableError(ValueError):
    """A variable without a dual partner entered the antibracket."""


class ParityError(ValueError):
    """An assembled action contains a Grassmann-odd term."""


@dataclass(frozen=True)
class GVar:
    role: str
    index: object
    parity: int
    label: str = field(default="", compare=False)

    @property
    def key(self):
        return (ROLES.get(self.role, 99), self.index)

    def __lt__(self, other: "GVar"):
        return self.key < other.key

    def dual(self) -> "GVar":
        if self.role not in _DUAL:
            raise UnpairedVariableError(f"{self} has no dual partner")
        label = self.label[:-1] if self.label.endswith("*") else self.label + "*"
        return GVar(_DUAL[self.role], self.index, 1 - self.parity, label)

    @property
    def is_field_like(self) -> bool:
        return self.role in ("ghost", "field")

    def __str__(self):
        return self.label or f"{self.role}[{self.index}]"


def ghost(a) -> GVar:
    return GVar("ghost", a, 1, f"c{_index_json(a)}")


def antighost(a) -> GVar:
    return GVar("antighost", a, 0, f"c{_index_json(a)}*")


def field_var(j: int, degree: int, label: Optional[str] = None) -> GVar:
    return GVar("field", j, degree % 2, label or f"{_FIELD_NAMES.get(degree, 'eta')}{j}")


def antifield_var(j: int, degree: int, label: Optional[str] = None) -> GVar:
    return GVar("antifield", j, (degree + 1) % 2,
                label or f"{_FIELD_NAMES.get(degree, 'eta')}{j}*")


Monomial = Tuple[GVar, ...]


def _mono_mul(m1: Monomial, m2: Monomial):
    """Product of sorted monomials: ``(sign, monomial)`` or ``(0, None)``."""
    odd1 = [v for v in m1 if v.parity]
    odd2 = [v for v in m2 if v.parity]
    if set(odd1) & set(odd2):
        return 0, None
    sign = 1
    # each odd pair (x in m1, y in m2) with y < x swaps once
    for y in odd2:
        for x in odd1:
            if y < x:
                sign = -sign
    return sign, tuple(sorted(m1 + m2, key=lambda v: v.key))


def _mono_parity(m: Monomial) -> int:
    return sum(v.parity for v in m) % 2


class GPoly:
    """Sparse polynomial ``{monomial: coefficient}`` in graded variables."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[Monomial, object]] = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c != 0}

    @classmethod
    def var(cls, v: GVar, coeff=1) -> "GPoly":
        return cls({(v,): coeff})

    @classmethod
    def const(cls, c) -> "GPoly":
        return cls({(): c})

    @classmethod
    def monomial(cls, variables: Iterable[GVar], coeff=1) -> "GPoly":
        """Product of variables in the given order (sign from reordering)."""
        out = cls.const(coeff)
        for v in variables:
            out = out * cls.var(v)
        return out

    def __add__(self, other: "GPoly") -> "GPoly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return GPoly(out)

    def __sub__(self, other: "GPoly") -> "GPoly":
        return self + (-other)

    def __neg__(self) -> "GPoly":
        return GPoly({m: -c for m, c in self.terms.items()})

    def scale(self, c) -> "GPoly":
        return GPoly({m: v * c for m, v in self.terms.items()})

    def __mul__(self, other) -> "GPoly":
        if not isinstance(other, GPoly):
            return self.scale(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                sign, m = _mono_mul(m1, m2)
                if sign:
                    out[m] = out.get(m, 0) + (c1 * c2 if sign > 0 else -(c1 * c2))
        return GPoly(out)

    def __rmul__(self, c) -> "GPoly":
        return self.scale(c)

    def __eq__(self, other):
        if not isinstance(other, GPoly):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def max_abs(self) -> float:
        return max((magnitude(c) for c in self.terms.values()), default=0.0)

    def variables(self) -> set:
        return {v for m in self.terms for v in m}

    def odd_terms(self) -> List[Monomial]:
        return [m for m in self.terms if _mono_parity(m)]

    def is_even(self) -> bool:
        return not self.odd_terms()

    def derivative(self, v: GVar) -> "GPoly":
        """Graded left derivative ``d/dv``."""
        out: dict = {}
        for m, c in self.terms.items():
            if v not in m:
                continue
            if v.parity:
                pos = m.index(v)
                sign = -1 if sum(u.parity for u in m[:pos]) % 2 else 1
                rest = m[:pos] + m[pos + 1:]
                out[rest] = out.get(rest, 0) + (c if sign > 0 else -c)
            else:
                mult = m.count(v)
                pos = m.index(v)
                rest = m[:pos] + m[pos + 1:]
                out[rest] = out.get(rest, 0) + c * mult
        return GPoly(out)

    def chop(self, tol: float) -> "GPoly":
        return GPoly({m: c for m, c in self.terms.items() if magnitude(c) > tol})

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: [v.key for v in kv[0]])

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({fmt(c)})" + "".join(f"*{v}" for v in m)
                          for m, c in self.sorted_terms())

    __repr__ = __str__


def antibracket(S: GPoly, T: GPoly, seen: Optional[set] = None) -> GPoly:
    """``sum_a (-1)^|eta^a| (dS/deta^a dT/deta*_a + dS/deta*_a dT/deta^a)``.

    When ``seen`` is given, every monomial produced before cancellation is
    added to it.
    """
    fields = set()
    for v in S.variables() | T.variables():
        if v.role not in _DUAL:
            raise UnpairedVariableError(f"variable {v} has no antifield partner")
        fields.add(v if v.is_field_like else v.dual())
    out = GPoly()
    for eta in sorted(fields, key=lambda v: v.key):
        star = eta.dual()
        parts = (S.derivative(eta) * T.derivative(star), S.derivative(star) * T.derivative(eta))
        if seen is not None:
            for part in parts:
                seen.update(part.terms)
        term = parts[0] + parts[1]
        out = out + (-term if eta.parity else term)
    return out


# -- induced action -----------------------------------------------------------

@dataclass(frozen=True)
class SignConvention:
    """How word tensors enter the induced action.

    ``word_sign(p)`` multiplies every word of length ``p``; ``field_sign``
    toggles the ``(-1)^|eta|`` factor in front of ``eta*_A Q(eta^A)``;
    ``ce_sign`` multiplies ``1/2 f_ab^d c*_d c^a c^b``.
    """

    name: str
    alternate_words: bool = True
    field_sign: bool = True
    ce_sign: int = -1

    def word_sign(self, p: int) -> int:
        return (-1) ** (p - 1) if self.alternate_words else 1


FROZEN_CONVENTION = SignConvention("alternating-words")

CANDIDATE_CONVENTIONS = [
    FROZEN_CONVENTION,
    SignConvention("plain-words", alternate_words=False),
    SignConvention("alternating-words/no-field-sign", field_sign=False),
    SignConvention("alternating-words/ce+", ce_sign=1),
]


def assemble_action(cx, Q, tensors, sc: StructureConstants,
                    convention: SignConvention = FROZEN_CONVENTION) -> GPoly:
    """Induced action ``S = sum_A (-1)^|A| eta*_A X^A`` for the homological field

        X(phi^i) = sum_j Q_ij phi^j + sum_w (-1)^(|w|-1) c^{w_1}..c^{w_p} T_w[i, j] phi^j
        X(c^d)   = 1/2 f_ab^d c^a c^b

    Words are kept ordered (no ``1/p!``); antisymmetrization happens through
    the Grassmann product of the ghosts.
    """
    degrees = cx.degrees
    fields = [field_var(j, p) for j, p in enumerate(degrees)]
    antifields = [antifield_var(j, p) for j, p in enumerate(degrees)]

    def prefactor(i):
        return -1 if (convention.field_sign and degrees[i] % 2) else 1

    S = GPoly()
    rows: dict = {}
    for (i, j), v in Q.entries.items():
        rows[((), i, j)] = rows.get(((), i, j), 0) + v * prefactor(i)
    for word, entries in tensors.words.items():
        s = convention.word_sign(len(word))
        for (i, j), v in entries.items():
            rows[(word, i, j)] = rows.get((word, i, j), 0) + v * s * prefactor(i)
    for (word, i, j), v in rows.items():
        if v == 0:
            continue
        term = GPoly.monomial([antifields[i]] + [ghost(a) for a in word] + [fields[j]], v)
        S = S + term
    half = _half(cx.exact)
    for (a, b), comps in sc.in_window().items():
        for d, f in comps.items():
            S = S + GPoly.monomial([antighost(d), ghost(a), ghost(b)], f * half * convention.ce_sign)
    odd = S.odd_terms()
    if odd:
        raise ParityError(f"odd term in induced action: {odd[0]}")
    return S


def _half(exact: bool):
    from fractions import Fraction
    return Fraction(1, 2) if exact else 0.5


@dataclass
class ResidualReport:
    """Outcome of the master-equation check.

    ``closed_monomials`` counts the distinct monomials produced while
    expanding ``(S, S)`` (before cancellation) whose ghost word is closed; ``closed_words``/``open_words`` count ghost sets (size 1 up to
    ``max_ghosts``) that are or are not window-closed; ``dropped`` counts
    residual monomials discarded because their ghost word is open.
    """

    residual: GPoly
    closed_monomials: int
    closed_words: int
    open_words: int
    dropped: int
    max_abs_residual: float

    @property
    def ok(self) -> bool:
        return self.residual.is_zero()

    def to_json(self, limit: int = 50) -> dict:
        return {
            "closed_monomials": self.closed_monomials,
            "closed_words": self.closed_words,
            "open_words": self.open_words,
            "dropped": self.dropped,
            "max_abs_residual": self.max_abs_residual,
            "nonzero_terms": [f"({fmt(c)})" + "".join(f"*{v}" for v in m)
                              for m, c in self.residual.sorted_terms()[:limit]],
        }


def cme_residual(S: GPoly, basis: GeneratorBasis, sc: Optional[StructureConstants] = None,
                 tol: float = 0.0, max_ghosts: Optional[int] = None) -> ResidualReport:
    """``(S, S)`` restricted to monomials whose ghosts form a window-closed word.

    Entries with ``|coefficient| <= tol`` count as zero (float backends).
    """
    sc = sc or _structure(basis)
    produced: set = set()
    full = antibracket(S, S, produced)
    verdicts: dict = {}

    def closed(word):
        ok = verdicts.get(word)
        if ok is None:
            ok = verdicts[word] = window_closed(word, basis, sc)
        return ok

    def ghost_word(m):
        return tuple(v.index for v in m if v.role == "ghost")

    kept: dict = {}
    dropped = 0
    for m, c in full.terms.items():
        word = ghost_word(m)
        if word and not closed(word):
            dropped += 1
        elif magnitude(c) > tol:
            kept[m] = c
    n_mono = sum(1 for m in produced if not ghost_word(m) or closed(ghost_word(m)))
    if max_ghosts is None:
        max_ghosts = max((sum(v.role == "ghost" for v in m) for m in S.terms), default=0) + 1
    n_closed = n_open = 0
    for size in range(1, max_ghosts + 1):
        for word in combinations(basis.indices, size):
            if closed(word):
                n_closed += 1
            else:
                n_open += 1
    res = GPoly(kept)
    return ResidualReport(res, n_mono, n_closed, n_open, dropped, res.max_abs())


def _structure(basis):
    from .liealg import structure_constants
    return structure_constants(basis)


def smallest_instances():
    """The sign-resolving instances: nodes (0,1) with window {0,1}, then
    nodes (0,1/2,1) with window {0,1,2}.

    The first is too small to tell the candidates apart (its length-2 words
    vanish), so the second one is what actually pins the convention down.
    """
    from fractions import Fraction
    from .backends import build_interval
    from .liealg import interval_basis
    return [(build_interval([Fraction(0), Fraction(1)]), interval_basis(1)),
            (build_interval([Fraction(0), Fraction(1, 2), Fraction(1)]), interval_basis(2))]


def resolve_sign_convention(instances=None, candidates=CANDIDATE_CONVENTIONS, tol: float = 0.0):
    """First candidate whose residual vanishes on every ``(cx, basis)`` instance.

    Returns ``(convention or None, {name: [residual per instance]})``.
    """
    from .transfer import differential_matrix, transfer_tensors

    if instances is None:
        instances = smallest_instances()
    prepared = []
    for cx, basis in instances:
        prepared.append((cx, basis, differential_matrix(cx), transfer_tensors(cx, basis),
                         _structure(basis)))
    log = {}
    chosen = None
    for conv in candidates:
        values = []
        for cx, basis, Q, T, sc in prepared:
            S = assemble_action(cx, Q, T, sc, conv)
            values.append(cme_residual(S, basis, sc, tol).max_abs_residual)
        log[conv.name] = values
        if chosen is None and all(v <= tol for v in values):
            chosen = conv
    return chosen, log
