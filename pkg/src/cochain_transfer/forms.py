"""Differential forms, vector fields and chains in dimension 1 and 2.

A :class:`Form` stores its coefficient functions in a fixed layout:

====  ======  ==========================================
dim   degree  components
====  ======  ==========================================
1     0       ``(f,)``
1     1       ``(f,)`` meaning ``f dt``
2     0       ``(f,)``
2     1       ``(fx, fy)`` meaning ``fx dx + fy dy``
2     2       ``(f,)`` meaning ``f dx^dy``
====  ======  ==========================================

The exterior derivative of a top-degree form is the *top zero*: a form of
degree ``dim + 1`` without components.  Symmetrically a homotopy applied to
a 0-form gives the *bottom zero* of degree ``-1``.  Both are structural
zeros: they behave as zero under every operation, so operator chains never
have to special-case the ends of the complex.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

from .funcs import Func1D, Func2D, integrate_univariate
from .scalars import magnitude, zero

_NCOMP = {(1, 0): 1, (1, 1): 1, (2, 0): 1, (2, 1): 2, (2, 2): 1}


class DegreeError(ValueError):
    """A form of the wrong degree was passed to an operation."""


class Form:
    __slots__ = ("dim", "degree", "comps")

    def __init__(self, dim: int, degree: int, comps: Tuple = ()):
        comps = tuple(comps)
        if degree in (-1, dim + 1):
            if comps:
                raise DegreeError("structural zeros carry no components")
        elif (dim, degree) not in _NCOMP:
            raise DegreeError(f"no {degree}-forms in dimension {dim}")
        elif len(comps) != _NCOMP[dim, degree]:
            raise DegreeError(f"{degree}-form in dim {dim} needs {_NCOMP[dim, degree]} components")
        self.dim = dim
        self.degree = degree
        self.comps = comps

    @property
    def is_top_zero(self) -> bool:
        return self.degree == self.dim + 1

    @property
    def is_structural_zero(self) -> bool:
        return not self.comps

    @property
    def exact(self) -> bool:
        return self.comps[0].exact if self.comps else True

    def _check(self, other: "Form"):
        if not isinstance(other, Form):
            raise TypeError(f"expected Form, got {type(other).__name__}")
        if (self.dim, self.degree) != (other.dim, other.degree):
            raise DegreeError(f"degree mismatch: {self.degree} vs {other.degree}")

    def __add__(self, other: "Form") -> "Form":
        if isinstance(other, Form) and other.is_structural_zero:
            return self
        if self.is_structural_zero and isinstance(other, Form):
            return other
        self._check(other)
        return Form(self.dim, self.degree, [a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other: "Form") -> "Form":
        if isinstance(other, Form) and other.is_structural_zero:
            return self
        if self.is_structural_zero and isinstance(other, Form):
            return -other
        self._check(other)
        return Form(self.dim, self.degree, [a - b for a, b in zip(self.comps, other.comps)])

    def __neg__(self) -> "Form":
        return Form(self.dim, self.degree, [-a for a in self.comps])

    def __mul__(self, c) -> "Form":
        """Multiply by a scalar or by a function (a 0-form coefficient)."""
        return Form(self.dim, self.degree, [a * c for a in self.comps])

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return (self.dim, self.degree) == (other.dim, other.degree) and all(
            a == b for a, b in zip(self.comps, other.comps))

    __hash__ = None

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def norm(self) -> float:
        return max((c.norm() for c in self.comps), default=0.0)

    def zero_like(self) -> "Form":
        return Form(self.dim, self.degree, [c.zero_like() for c in self.comps])

    def to_json(self) -> dict:
        return {"degree": self.degree, "components": [c.to_json() for c in self.comps]}

    def __repr__(self):
        return f"Form(dim={self.dim}, degree={self.degree}, comps={self.comps!r})"


def zero_form(template, dim: int, degree: int) -> Form:
    """Zero form of any degree built from a template function (for domain/exactness)."""
    z = template.zero_like()
    if degree == dim + 1:
        return Form(dim, degree)
    return Form(dim, degree, [z] * _NCOMP[dim, degree])


@dataclass(frozen=True)
class VectorField:
    """``comps[0] d/dt`` in 1D, ``comps[0] d/dx + comps[1] d/dy`` in 2D."""

    comps: Tuple

    @property
    def dim(self) -> int:
        return len(self.comps)

    def __call__(self, f):
        """Directional derivative ``v(f)`` of a function."""
        total = f.zero_like()
        for axis, nu in enumerate(self.comps):
            total = total + nu * f.diff(axis)
        return total

    def __add__(self, other):
        return VectorField(tuple(a + b for a, b in zip(self.comps, other.comps)))

    def __sub__(self, other):
        return VectorField(tuple(a - b for a, b in zip(self.comps, other.comps)))

    def __mul__(self, c):
        return VectorField(tuple(a * c for a in self.comps))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return len(self.comps) == len(other.comps) and all(
            a == b for a, b in zip(self.comps, other.comps))

    __hash__ = None

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def divergence(self):
        total = self.comps[0].zero_like()
        for axis, nu in enumerate(self.comps):
            total = total + nu.diff(axis)
        return total


def bottom_zero(dim: int) -> Form:
    return Form(dim, -1)


def exterior_derivative(w: Form) -> Form:
    if w.degree == -1:
        return w
    if w.is_top_zero or w.degree == w.dim:
        return Form(w.dim, w.dim + 1)
    if w.dim == 1:
        return Form(1, 1, [w.comps[0].derivative()])
    if w.degree == 0:
        f = w.comps[0]
        return Form(2, 1, [f.diff(0), f.diff(1)])
    fx, fy = w.comps
    return Form(2, 2, [fy.diff(0) - fx.diff(1)])


def interior_product(v: VectorField, w: Form) -> Form:
    if w.degree == -1:
        return w
    if w.degree == 0:
        raise DegreeError("interior product of a 0-form")
    if v.dim != w.dim:
        raise DegreeError("vector field and form live in different dimensions")
    if w.is_top_zero:
        return zero_form(v.comps[0], w.dim, w.dim)
    if w.dim == 1:
        return Form(1, 0, [v.comps[0] * w.comps[0]])
    nx, ny = v.comps
    if w.degree == 1:
        fx, fy = w.comps
        return Form(2, 0, [nx * fx + ny * fy])
    (f,) = w.comps
    # i_v(dx^dy) = nu_x dy - nu_y dx
    return Form(2, 1, [-(ny * f), nx * f])


def lie_derivative(v: VectorField, w: Form) -> Form:
    """Cartan's formula ``L_v = d i_v + i_v d``."""
    if w.is_structural_zero:
        return w
    if w.degree == 0:
        return Form(w.dim, 0, [v(w.comps[0])])
    out = exterior_derivative(interior_product(v, w))
    dw = exterior_derivative(w)
    if not dw.is_top_zero:
        out = out + interior_product(v, dw)
    return out


def bracket(v: VectorField, w: VectorField) -> VectorField:
    """Lie bracket ``[v, w]^i = v(w^i) - w(v^i)``."""
    if v.dim != w.dim:
        raise DegreeError("vector fields of different dimension")
    return VectorField(tuple(v(wi) - w(vi) for vi, wi in zip(v.comps, w.comps)))


# -- chains -----------------------------------------------------------------

@dataclass(frozen=True)
class Point:
    coords: tuple

    @property
    def dimension(self) -> int:
        return 0


@dataclass(frozen=True)
class Edge:
    """Straight oriented segment from ``start`` to ``end`` (affine parametrisation)."""

    start: tuple
    end: tuple

    @property
    def dimension(self) -> int:
        return 1


@dataclass(frozen=True)
class Face:
    """The unit square ``[0,1]^2`` with orientation ``dx^dy``."""

    orientation: int = 1

    @property
    def dimension(self) -> int:
        return 2


def pair(z, w: Form, convention: str = "require-continuous"):
    """Integration pairing between a chain and a form of the same degree."""
    if w.is_structural_zero:
        raise DegreeError("cannot pair with a structural zero")
    if z.dimension != w.degree:
        raise DegreeError(f"chain of dimension {z.dimension} vs {w.degree}-form")
    if isinstance(z, Point):
        f = w.comps[0]
        if w.dim == 1:
            return f.evaluate(z.coords[0], convention)
        return f.evaluate(*z.coords)
    if isinstance(z, Edge):
        if w.dim == 1:
            return w.comps[0].integrate(z.start[0], z.end[0])
        fx, fy = w.comps
        dx = z.end[0] - z.start[0]
        dy = z.end[1] - z.start[1]
        exact = fx.exact
        total = zero(exact)
        if dx != 0:
            total = total + integrate_univariate(fx.along_segment(z.start, z.end), exact) * dx
        if dy != 0:
            total = total + integrate_univariate(fy.along_segment(z.start, z.end), exact) * dy
        return total
    if isinstance(z, Face):
        return w.comps[0].integrate_rect() * z.orientation
    raise TypeError(f"unknown chain {z!r}")


def boundary(z):
    """Signed list of chains forming the boundary (used by Stokes checks)."""
    if isinstance(z, Edge):
        return [(1, Point(z.end)), (-1, Point(z.start))]
    if isinstance(z, Face):
        corners = [(0, 0), (1, 0), (1, 1), (0, 1)]
        return [(z.orientation, Edge(corners[i], corners[(i + 1) % 4])) for i in range(4)]
    raise DegreeError("points have empty boundary")


def forms_close(a: Form, b: Form, tol: float = 0.0) -> bool:
    """Exact equality when ``tol == 0``; coefficient sup-norm otherwise."""
    if a.is_structural_zero or b.is_structural_zero:
        return (a - b).is_zero() if tol == 0 else (a - b).norm() <= tol
    if (a.dim, a.degree) != (b.dim, b.degree):
        return False
    if tol == 0:
        return a == b
    return (a - b).norm() <= tol


def max_abs(values) -> float:
    return max((magnitude(v) for v in values), default=0.0)


def form_1d(f: Func1D, degree: int) -> Form:
    return Form(1, degree, [f])


def form_2d(degree: int, *comps: Func2D) -> Form:
    return Form(2, degree, list(comps))
