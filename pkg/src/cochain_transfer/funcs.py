"""Closed symbolic function classes.

``Func1D``
    piecewise sums of ``a * t**n * exp(i*k*t)`` on an interval.  This is the
    smallest class closed under the operations the interval and circle
    retracts need: sums, products, ``d/dt`` and antiderivatives.

``Func2D``
    bivariate polynomials ``sum a_nm x**n y**m`` on the unit square.

Both are immutable; coefficient dictionaries are never mutated after
construction.  Zero coefficients are pruned so that two normalized
functions on the same partition are equal iff their term tables are equal.
"""

from __future__ import annotations

import bisect
from fractions import Fraction
from math import comb
from typing import Dict, Iterable, Sequence, Tuple

from .scalars import (ScalarMixError, check_kind, exp_i, gauss, imag_unit, is_exact,
                      magnitude, one, to_json as scalar_to_json, zero)

CONVENTIONS = ("require-continuous", "left", "right", "average")

Terms1D = Dict[Tuple[int, int], object]


class BreakpointError(ValueError):
    """Evaluation at a jump of a piecewise function without a usable convention."""


def _prune(terms: dict) -> dict:
    return {key: c for key, c in terms.items() if c != 0}


def _add_terms(a: dict, b: dict, sign=1) -> dict:
    out = dict(a)
    for key, c in b.items():
        out[key] = out.get(key, 0) + (c if sign == 1 else -c)
    return _prune(out)


def _mul_terms(a: dict, b: dict) -> dict:
    out: dict = {}
    for (n1, k1), c1 in a.items():
        for (n2, k2), c2 in b.items():
            key = (n1 + n2, k1 + k2)
            out[key] = out.get(key, 0) + c1 * c2
    return _prune(out)


def _inv_ik(k: int, exact: bool):
    # 1/(i k) = -i/k
    if exact:
        return gauss(0, Fraction(-1, k))
    return -1j / k


class Func1D:
    """Piecewise exponential-polynomial on ``[breaks[0], breaks[-1]]``."""

    __slots__ = ("breaks", "pieces", "exact")

    def __init__(self, breaks: Sequence, pieces: Sequence[dict], exact: bool = True):
        breaks = tuple(breaks)
        if len(breaks) < 2 or len(pieces) != len(breaks) - 1:
            raise ValueError("need len(pieces) == len(breaks) - 1 >= 1")
        if any(b >= a for a, b in zip(breaks[1:], breaks[:-1])):
            raise ValueError(f"breakpoints must be strictly increasing: {breaks}")
        for b in breaks:
            if is_exact(b) != exact:
                raise ScalarMixError(f"breakpoint {b!r} does not match exact={exact}")
        cleaned = []
        for p in pieces:
            for c in p.values():
                check_kind(c, exact)
            cleaned.append(_prune(p))
        self.breaks = breaks
        self.pieces = tuple(cleaned)
        self.exact = exact

    # -- constructors -------------------------------------------------
    @classmethod
    def const(cls, c, lo, hi, exact: bool = True) -> "Func1D":
        return cls((lo, hi), [{(0, 0): c}], exact)

    @classmethod
    def term(cls, n: int, k: int, lo, hi, coeff=None, exact: bool = True) -> "Func1D":
        """``coeff * t**n * exp(i k t)`` on a single piece."""
        if coeff is None:
            coeff = one(exact)
        return cls((lo, hi), [{(n, k): coeff}], exact)

    @classmethod
    def from_terms(cls, terms: dict, lo, hi, exact: bool = True) -> "Func1D":
        return cls((lo, hi), [dict(terms)], exact)

    def zero_like(self) -> "Func1D":
        return Func1D(self.domain, [{}], self.exact)

    def const_like(self, c) -> "Func1D":
        return Func1D(self.domain, [{(0, 0): c}], self.exact)

    # -- structure ----------------------------------------------------
    @property
    def domain(self):
        return (self.breaks[0], self.breaks[-1])

    def refine(self, breaks: Sequence) -> "Func1D":
        """Re-express on a finer partition containing all current breakpoints."""
        breaks = tuple(breaks)
        if (breaks[0], breaks[-1]) != self.domain:
            raise ValueError("refinement must keep the domain")
        pieces = []
        for lo in breaks[:-1]:
            idx = bisect.bisect_right(self.breaks, lo) - 1
            pieces.append(self.pieces[min(idx, len(self.pieces) - 1)])
        return Func1D(breaks, pieces, self.exact)

    def _align(self, other: "Func1D"):
        if not isinstance(other, Func1D):
            raise TypeError(f"cannot combine Func1D with {type(other).__name__}")
        if self.exact != other.exact:
            raise ScalarMixError("cannot combine exact and float functions")
        if self.domain != other.domain:
            raise ValueError(f"mismatched domains {self.domain} vs {other.domain}")
        if self.breaks == other.breaks:
            return self, other
        merged = tuple(sorted(set(self.breaks) | set(other.breaks)))
        return self.refine(merged), other.refine(merged)

    # -- algebra ------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Func1D):
            return self + self.const_like(check_kind(other, self.exact))
        a, b = self._align(other)
        return Func1D(a.breaks, [_add_terms(p, q) for p, q in zip(a.pieces, b.pieces)], a.exact)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Func1D):
            return self - self.const_like(check_kind(other, self.exact))
        a, b = self._align(other)
        return Func1D(a.breaks, [_add_terms(p, q, -1) for p, q in zip(a.pieces, b.pieces)], a.exact)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Func1D(self.breaks, [{key: -c for key, c in p.items()} for p in self.pieces], self.exact)

    def __mul__(self, other):
        if not isinstance(other, Func1D):
            c = check_kind(other, self.exact)
            return Func1D(self.breaks, [{key: v * c for key, v in p.items()} for p in self.pieces],
                          self.exact)
        a, b = self._align(other)
        return Func1D(a.breaks, [_mul_terms(p, q) for p, q in zip(a.pieces, b.pieces)], a.exact)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Func1D):
            return NotImplemented
        try:
            a, b = self._align(other)
        except (ScalarMixError, ValueError):
            return False
        return a.pieces == b.pieces

    __hash__ = None

    def is_zero(self) -> bool:
        return all(not p for p in self.pieces)

    def norm(self) -> float:
        """Largest coefficient magnitude (a cheap sup-norm proxy)."""
        return max((magnitude(c) for p in self.pieces for c in p.values()), default=0.0)

    def chop(self, tol: float) -> "Func1D":
        return Func1D(self.breaks, [{key: c for key, c in p.items() if magnitude(c) > tol}
                                    for p in self.pieces], self.exact)

    # -- calculus -----------------------------------------------------
    def derivative(self) -> "Func1D":
        iu = imag_unit(self.exact)
        pieces = []
        for p in self.pieces:
            out: dict = {}
            for (n, k), c in p.items():
                if n:
                    out[(n - 1, k)] = out.get((n - 1, k), 0) + c * n
                if k:
                    out[(n, k)] = out.get((n, k), 0) + c * iu * k
            pieces.append(_prune(out))
        return Func1D(self.breaks, pieces, self.exact)

    def diff(self, axis: int = 0) -> "Func1D":
        if axis != 0:
            raise ValueError("Func1D has a single axis")
        return self.derivative()

    def _primitive_piece(self, p: dict) -> dict:
        out: dict = {}
        for (n, k), c in p.items():
            if k == 0:
                scale = Fraction(1, n + 1) if self.exact else 1 / (n + 1)
                out[(n + 1, 0)] = out.get((n + 1, 0), 0) + c * scale
                continue
            inv = _inv_ik(k, self.exact)
            # int t^n e^{ikt} = t^n e^{ikt}/(ik) - n/(ik) int t^{n-1} e^{ikt}
            factor = c
            for m in range(n, -1, -1):
                factor_m = factor * inv
                out[(m, k)] = out.get((m, k), 0) + factor_m
                factor = -factor_m * m
        return _prune(out)

    def _eval_piece(self, p: dict, t):
        total = zero(self.exact)
        for (n, k), c in p.items():
            total = total + c * (t ** n) * exp_i(k, t, self.exact)
        return total

    def _piece_index(self, t) -> int:
        lo, hi = self.domain
        if t < lo or t > hi:
            raise ValueError(f"point {t} outside domain [{lo}, {hi}]")
        return min(bisect.bisect_right(self.breaks, t) - 1, len(self.pieces) - 1)

    def antiderivative(self, basepoint=None) -> "Func1D":
        """Continuous primitive ``F`` with ``F(basepoint) == 0``."""
        if basepoint is None:
            basepoint = self.breaks[0]
        prims = [self._primitive_piece(p) for p in self.pieces]
        consts = [None] * len(prims)
        start = self._piece_index(basepoint)
        consts[start] = -self._eval_piece(prims[start], basepoint)
        for i in range(start + 1, len(prims)):
            x = self.breaks[i]
            left = self._eval_piece(prims[i - 1], x) + consts[i - 1]
            consts[i] = left - self._eval_piece(prims[i], x)
        for i in range(start - 1, -1, -1):
            x = self.breaks[i + 1]
            right = self._eval_piece(prims[i + 1], x) + consts[i + 1]
            consts[i] = right - self._eval_piece(prims[i], x)
        pieces = [_add_terms(p, {(0, 0): c}) for p, c in zip(prims, consts)]
        return Func1D(self.breaks, pieces, self.exact)

    def integrate(self, a, b):
        """Definite integral from ``a`` to ``b`` (oriented)."""
        if a == b:
            return zero(self.exact)
        if a > b:
            return -self.integrate(b, a)
        lo, hi = self.domain
        if a < lo or b > hi:
            raise ValueError(f"[{a}, {b}] not inside domain [{lo}, {hi}]")
        total = zero(self.exact)
        for i, p in enumerate(self.pieces):
            x0, x1 = max(a, self.breaks[i]), min(b, self.breaks[i + 1])
            if x0 >= x1 or not p:
                continue
            prim = self._primitive_piece(p)
            total = total + self._eval_piece(prim, x1) - self._eval_piece(prim, x0)
        return total

    def evaluate(self, t, convention: str = "require-continuous", tol: float = 1e-9):
        if convention not in CONVENTIONS:
            raise ValueError(f"unknown convention {convention!r}")
        idx = self._piece_index(t)
        interior = t in self.breaks[1:-1]
        if not interior:
            return self._eval_piece(self.pieces[idx], t)
        left = self._eval_piece(self.pieces[idx - 1], t)
        right = self._eval_piece(self.pieces[idx], t)
        if convention == "left":
            return left
        if convention == "right":
            return right
        if convention == "average":
            return (left + right) / 2
        same = left == right if self.exact else magnitude(left - right) <= tol
        if not same:
            raise BreakpointError(f"jump at t={t}: left={left}, right={right}")
        return left

    __call__ = evaluate

    def to_json(self) -> dict:
        pieces = []
        for lo, hi, p in zip(self.breaks[:-1], self.breaks[1:], self.pieces):
            pieces.append({
                "lo": scalar_to_json(lo), "hi": scalar_to_json(hi),
                "terms": [{"n": n, "k": k, "coeff": scalar_to_json(c)}
                          for (n, k), c in sorted(p.items())],
            })
        return {"pieces": pieces}

    def __repr__(self):
        parts = []
        for lo, hi, p in zip(self.breaks[:-1], self.breaks[1:], self.pieces):
            body = " + ".join(f"{c}*t^{n}*e^({k}it)" for (n, k), c in sorted(p.items())) or "0"
            parts.append(f"[{lo},{hi}]: {body}")
        return "Func1D(" + "; ".join(parts) + ")"


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for (n1, m1), c1 in a.items():
        for (n2, m2), c2 in b.items():
            key = (n1 + n2, m1 + m2)
            out[key] = out.get(key, 0) + c1 * c2
    return _prune(out)


class Func2D:
    """Polynomial ``sum a[n, m] x**n y**m`` on the unit square."""

    __slots__ = ("terms", "exact")

    def __init__(self, terms: dict | None = None, exact: bool = True):
        terms = dict(terms or {})
        for c in terms.values():
            check_kind(c, exact)
        self.terms = _prune(terms)
        self.exact = exact

    @classmethod
    def monomial(cls, n: int, m: int, coeff=None, exact: bool = True) -> "Func2D":
        return cls({(n, m): one(exact) if coeff is None else coeff}, exact)

    @classmethod
    def const(cls, c, exact: bool = True) -> "Func2D":
        return cls({(0, 0): c}, exact)

    @classmethod
    def x(cls, exact: bool = True) -> "Func2D":
        return cls.monomial(1, 0, exact=exact)

    @classmethod
    def y(cls, exact: bool = True) -> "Func2D":
        return cls.monomial(0, 1, exact=exact)

    def zero_like(self) -> "Func2D":
        return Func2D({}, self.exact)

    def const_like(self, c) -> "Func2D":
        return Func2D({(0, 0): c}, self.exact)

    def _check(self, other):
        if not isinstance(other, Func2D):
            raise TypeError(f"cannot combine Func2D with {type(other).__name__}")
        if self.exact != other.exact:
            raise ScalarMixError("cannot combine exact and float functions")

    def __add__(self, other):
        if not isinstance(other, Func2D):
            other = self.const_like(check_kind(other, self.exact))
        self._check(other)
        return Func2D(_add_terms(self.terms, other.terms), self.exact)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Func2D):
            other = self.const_like(check_kind(other, self.exact))
        self._check(other)
        return Func2D(_add_terms(self.terms, other.terms, -1), self.exact)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Func2D({key: -c for key, c in self.terms.items()}, self.exact)

    def __mul__(self, other):
        if not isinstance(other, Func2D):
            c = check_kind(other, self.exact)
            return Func2D({key: v * c for key, v in self.terms.items()}, self.exact)
        self._check(other)
        return Func2D(_poly_mul(self.terms, other.terms), self.exact)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Func2D):
            return NotImplemented
        return self.exact == other.exact and self.terms == other.terms

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def norm(self) -> float:
        return max((magnitude(c) for c in self.terms.values()), default=0.0)

    def chop(self, tol: float) -> "Func2D":
        return Func2D({k: c for k, c in self.terms.items() if magnitude(c) > tol}, self.exact)

    def diff(self, axis: int) -> "Func2D":
        out: dict = {}
        for (n, m), c in self.terms.items():
            p = (n, m)[axis]
            if p:
                key = (n - 1, m) if axis == 0 else (n, m - 1)
                out[key] = out.get(key, 0) + c * p
        return Func2D(out, self.exact)

    def integrate_from_zero(self, axis: int) -> "Func2D":
        """``int_0^x f(s, y) ds`` (axis 0) or ``int_0^y f(x, s) ds`` (axis 1)."""
        out: dict = {}
        for (n, m), c in self.terms.items():
            p = (n, m)[axis]
            key = (n + 1, m) if axis == 0 else (n, m + 1)
            out[key] = out.get(key, 0) + (c * Fraction(1, p + 1) if self.exact else c / (p + 1))
        return Func2D(out, self.exact)

    def substitute(self, axis: int, value) -> "Func2D":
        """Freeze one coordinate, e.g. ``f(x, 0)`` via ``substitute(1, 0)``."""
        if not isinstance(value, int):
            check_kind(value, self.exact)
        out: dict = {}
        for (n, m), c in self.terms.items():
            p = (n, m)[axis]
            key = (0, m) if axis == 0 else (n, 0)
            out[key] = out.get(key, 0) + c * value ** p
        return Func2D(out, self.exact)

    def evaluate(self, x, y):
        total = zero(self.exact)
        for (n, m), c in self.terms.items():
            total = total + c * x ** n * y ** m
        return total

    def __call__(self, x, y):
        return self.evaluate(x, y)

    def integrate_rect(self, x0=0, x1=1, y0=0, y1=1):
        total = zero(self.exact)
        for (n, m), c in self.terms.items():
            if self.exact:
                ix = Fraction(x1 ** (n + 1) - x0 ** (n + 1), n + 1)
                iy = Fraction(y1 ** (m + 1) - y0 ** (m + 1), m + 1)
            else:
                ix = (x1 ** (n + 1) - x0 ** (n + 1)) / (n + 1)
                iy = (y1 ** (m + 1) - y0 ** (m + 1)) / (m + 1)
            total = total + c * ix * iy
        return total

    def along_segment(self, start, end) -> Dict[int, object]:
        """Univariate coefficients of ``s -> f(start + s (end - start))``."""
        (ax, ay), (bx, by) = start, end
        dx, dy = bx - ax, by - ay
        out: dict = {}
        for (n, m), c in self.terms.items():
            px = {i: comb(n, i) * ax ** (n - i) * dx ** i for i in range(n + 1)}
            py = {j: comb(m, j) * ay ** (m - j) * dy ** j for j in range(m + 1)}
            for i, u in px.items():
                for j, w in py.items():
                    out[i + j] = out.get(i + j, 0) + c * u * w
        return {p: c for p, c in out.items() if c != 0}

    def to_json(self) -> dict:
        return {"terms": [{"n": n, "m": m, "coeff": scalar_to_json(c)}
                          for (n, m), c in sorted(self.terms.items())]}

    def __repr__(self):
        body = " + ".join(f"{c}*x^{n}*y^{m}" for (n, m), c in sorted(self.terms.items())) or "0"
        return f"Func2D({body})"


def integrate_univariate(coeffs: dict, exact: bool):
    """``int_0^1 sum c_p s**p ds``."""
    total = zero(exact)
    for p, c in coeffs.items():
        total = total + (c * Fraction(1, p + 1) if exact else c / (p + 1))
    return total


def lagrange_basis(nodes: Sequence[Fraction]) -> list:
    """Lagrange interpolation polynomials on ``nodes`` as single-piece Func1D."""
    lo, hi = nodes[0], nodes[-1]
    out = []
    for j, tj in enumerate(nodes):
        poly = {(0, 0): Fraction(1)}
        for m, tm in enumerate(nodes):
            if m == j:
                continue
            den = tj - tm
            poly = _mul_terms(poly, {(1, 0): 1 / den, (0, 0): -tm / den})
        out.append(Func1D.from_terms(poly, lo, hi, exact=True))
    return out


def sum_funcs(funcs: Iterable, start):
    total = start
    for f in funcs:
        total = total + f
    return total
