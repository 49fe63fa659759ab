"""Concrete retracts of the de Rham complex onto cochains.

Each backend builds a :class:`CochainComplex`: chains of the triangulation,
the dual cochain forms, the projector onto their span and a contracting
homotopy ``h`` with ``d h + h d = id - P``.

Geometries:

* ``interval``  -- ``[0, 1]`` with nodes ``t_0 = 0 < ... < t_n = 1``
* ``circle``    -- ``[0, 2 pi)`` with ``n`` equispaced nodes (complex floats)
* ``square``    -- ``[0, 1]^2`` with four vertices, four edges and one face
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from .forms import (DegreeError, Edge, Face, Form, Point, bottom_zero, exterior_derivative, pair)
from .funcs import CONVENTIONS, Func1D, Func2D, lagrange_basis
from .scalars import magnitude, to_exact, zero

TWO_PI = 2 * math.pi
HALF = Fraction(1, 2)


class BuildError(ValueError):
    """A backend could not be constructed from the given parameters."""


class CochainComplex:
    """Chains, dual cochain forms and the retract operators ``P`` and ``h``.

    ``chains[i]`` and ``cochains[i]`` are dual: ``pair(chains[i], cochains[j])
    == delta_ij``.  Cochains are ordered by degree (alphas, betas, gamma).
    """

    def __init__(self, geometry: str, dim: int, exact: bool, chains: list, cochains: list,
                 basis_kind: str, convention: str = "require-continuous", nodes=(),
                 theta=None, build_residual: float = 0.0):
        self.geometry = geometry
        self.dim = dim
        self.exact = exact
        self.chains = list(chains)
        self.cochains = list(cochains)
        self.basis_kind = basis_kind
        self.convention = convention
        self.nodes = tuple(nodes)
        self.theta = theta
        self.build_residual = build_residual
        # 1D: primitives int_0^t beta_j, reused by every homotopy call
        self._beta_primitives = None
        if dim == 1:
            self._beta_primitives = [b.comps[0].antiderivative(b.comps[0].domain[0])
                                     for b in self.cochains if b.degree == 1]

    def __repr__(self):
        return (f"CochainComplex({self.geometry}, basis={self.basis_kind}, "
                f"{len(self.cochains)} cochains)")

    # -- bookkeeping --------------------------------------------------
    @property
    def degrees(self) -> List[int]:
        return [c.degree for c in self.cochains]

    def indices_of_degree(self, p: int) -> List[int]:
        return [i for i, c in enumerate(self.cochains) if c.degree == p]

    @property
    def n_nodes(self) -> int:
        return len(self.indices_of_degree(0))

    def pair(self, i: int, w: Form):
        if w.is_structural_zero:
            return zero(self.exact)
        return pair(self.chains[i], w, self.convention)

    def coordinates(self, w: Form) -> dict:
        """Pairings of ``w`` with every chain of matching degree."""
        if w.is_structural_zero:
            return {}
        return {i: self.pair(i, w) for i in self.indices_of_degree(w.degree)}

    def combination(self, coeffs: dict, degree: int) -> Form:
        out = self.zero_form(degree)
        for i, c in coeffs.items():
            if c != 0:
                out = out + self.cochains[i] * c
        return out

    def zero_form(self, degree: int) -> Form:
        if degree < 0 or degree > self.dim:
            return Form(self.dim, degree)
        template = self.cochains[self.indices_of_degree(degree)[0]]
        return template.zero_like()

    # -- retract operators --------------------------------------------
    def project(self, w: Form) -> Form:
        if w.is_structural_zero:
            return w
        return self.combination(self.coordinates(w), w.degree)

    def homotopy(self, w: Form) -> Form:
        if w.is_structural_zero or w.degree == 0:
            return bottom_zero(self.dim)
        if self.dim == 1:
            return self._homotopy_1d(w)
        return self._homotopy_square(w)

    def _homotopy_1d(self, w: Form) -> Form:
        f = w.comps[0]
        lo = f.domain[0]
        out = f.antiderivative(lo)
        for j, i in enumerate(self.indices_of_degree(1)):
            edge = self.chains[i]
            c = f.integrate(edge.start[0], edge.end[0])
            if c != 0:
                out = out - self._beta_primitives[j] * c
        return Form(1, 0, [out])

    def _homotopy_square(self, w: Form) -> Form:
        if w.degree == 2:
            ie = square_I(w)
            return ie - self.project(ie)
        return square_I(w - self.project(w))

    # -- tables -------------------------------------------------------
    def beta_value(self, i: int, j: int):
        """``beta_j^i``: value of the coefficient of ``beta_j`` at node ``i``.

        Interval: ``beta_{-1} = beta_n = 0``; circle: both indices cyclic.
        """
        n_edges = len(self.indices_of_degree(1))
        if self.geometry == "circle":
            i, j = i % n_edges, j % n_edges
        elif j < 0 or j >= n_edges:
            return zero(self.exact)
        return self.theta[i][j]

    def to_json(self) -> dict:
        from .scalars import to_json as sj

        def chain_json(z):
            if isinstance(z, Point):
                return {"point": [sj(c) for c in z.coords]}
            if isinstance(z, Edge):
                return {"edge": [[sj(c) for c in z.start], [sj(c) for c in z.end]]}
            return {"face": z.orientation}

        return {
            "geometry": self.geometry,
            "basis": self.basis_kind,
            "convention": self.convention,
            "nodes": [[sj(c) for c in t] if isinstance(t, tuple) else sj(t) for t in self.nodes],
            "chains": [chain_json(z) for z in self.chains],
            "cochains": [c.to_json() for c in self.cochains],
            "theta": None if self.theta is None else [[sj(v) for v in row] for row in self.theta],
            "build_residual": self.build_residual,
        }


def square_I(w: Form) -> Form:
    """Path-averaged integration operator on the unit square.

    2-forms: ``e dx^dy -> 1/2 (int_0^x e) dy - 1/2 (int_0^y e) dx``.
    1-forms: half the sum of the integrals of ``f`` along the two edge paths
    from ``(0, 0)`` to ``(x, y)`` of the rectangle ``[0,x] x [0,y]``.
    0-forms map to zero.
    """
    if w.dim != 2:
        raise DegreeError("square_I acts on forms on the square")
    if w.is_structural_zero or w.degree == 0:
        return bottom_zero(2)
    half = HALF if w.exact else 0.5
    if w.degree == 2:
        (e,) = w.comps
        return Form(2, 1, [-(e.integrate_from_zero(1) * half), e.integrate_from_zero(0) * half])
    fx, fy = w.comps
    lower_right = fx.substitute(1, 0).integrate_from_zero(0) + fy.integrate_from_zero(1)
    upper_left = fy.substitute(0, 0).integrate_from_zero(1) + fx.integrate_from_zero(0)
    return Form(2, 0, [(lower_right + upper_left) * half])


# -- interval ---------------------------------------------------------------

def build_interval(nodes: Sequence, basis_kind: str = "lagrange",
                   convention: Optional[str] = None) -> CochainComplex:
    """Interval ``[0, 1]`` with the given nodes.

    ``lagrange``: smooth interpolation polynomials.  ``pwlinear``: Whitney
    hat functions; their derivatives jump at nodes, so a one-sided
    ``convention`` (left/right/average) is mandatory.
    """
    try:
        ts = [to_exact(t) for t in nodes]
    except (TypeError, ValueError) as exc:
        raise BuildError(f"interval nodes must be rational: {exc}") from None
    if len(ts) < 2:
        raise BuildError("need at least 2 nodes")
    if ts[0] != 0 or ts[-1] != 1:
        raise BuildError("interval nodes must start at 0 and end at 1")
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise BuildError("interval nodes must be strictly increasing")
    n = len(ts) - 1

    if basis_kind == "lagrange":
        convention = convention or "require-continuous"
        lag = lagrange_basis(ts)
        alphas_rest = lag[1:]
    elif basis_kind == "pwlinear":
        if convention not in ("left", "right", "average"):
            raise BuildError("pwlinear basis needs convention left/right/average")
        alphas_rest = [_hat(ts, j) for j in range(1, n + 1)]
    else:
        raise BuildError(f"unknown interval basis {basis_kind!r}")
    if convention not in CONVENTIONS:
        raise BuildError(f"unknown convention {convention!r}")

    one = Func1D.const(Fraction(1), Fraction(0), Fraction(1))
    alpha0 = one
    for a in alphas_rest:
        alpha0 = alpha0 - a
    alphas = [alpha0] + alphas_rest
    thetas = []
    for j in range(n):
        tail = one.zero_like()
        for a in alphas[j + 1:]:
            tail = tail + a
        thetas.append(tail.derivative())

    chains = [Point((t,)) for t in ts] + [Edge((ts[i],), (ts[i + 1],)) for i in range(n)]
    cochains = [Form(1, 0, [a]) for a in alphas] + [Form(1, 1, [th]) for th in thetas]
    theta = [[th.evaluate(t, convention) for th in thetas] for t in ts]
    return CochainComplex("interval", 1, True, chains, cochains, basis_kind, convention, ts, theta)


def _hat(ts, j) -> Func1D:
    pieces = []
    for m in range(len(ts) - 1):
        lo, hi = ts[m], ts[m + 1]
        width = hi - lo
        if m == j - 1:
            pieces.append({(1, 0): 1 / width, (0, 0): -lo / width})
        elif m == j:
            pieces.append({(1, 0): -1 / width, (0, 0): hi / width})
        else:
            pieces.append({})
    return Func1D(ts, pieces, exact=True)


# -- circle -----------------------------------------------------------------

def trig_window(n: int) -> List[int]:
    """Frequencies ``-floor((n-1)/2) .. floor(n/2)`` used by the trig-dual basis."""
    return list(range(-((n - 1) // 2), n // 2 + 1))


def _arc_integral(k: int, a: float, b: float) -> complex:
    if k == 0:
        return b - a
    return (np.exp(1j * k * b) - np.exp(1j * k * a)) / (1j * k)


def build_circle(n: int, basis_kind: str = "trig-dual", tol: float = 1e-12) -> CochainComplex:
    """Circle with nodes ``t_j = 2 pi j / n``; arithmetic in complex doubles."""
    if n < 2:
        raise BuildError("circle needs n >= 2")
    ts = [TWO_PI * j / n for j in range(n)] + [TWO_PI]
    lo, hi = 0.0, TWO_PI

    if basis_kind == "trig-dual":
        ks = trig_window(n)
        gram = np.array([[_arc_integral(k, ts[i], ts[i + 1]) for k in ks] for i in range(n)])
        cond = np.linalg.cond(gram)
        if not np.isfinite(cond) or cond > 1e12:
            raise BuildError(f"singular dual-basis system for window {ks} (cond={cond:.3g})")
        coeffs = np.linalg.solve(gram, np.eye(n, dtype=complex))
        residual = float(np.max(np.abs(gram @ coeffs - np.eye(n))))
        thetas = [Func1D((lo, hi), [{(0, k): complex(coeffs[m, j]) for m, k in enumerate(ks)}],
                         exact=False) for j in range(n)]
    elif basis_kind == "midpoint-hat":
        thetas = [_midpoint_hat(ts, j) for j in range(n)]
        residual = 0.0
    else:
        raise BuildError(f"unknown circle basis {basis_kind!r}")

    one = Func1D.const(1.0 + 0j, lo, hi, exact=False)
    alphas = []
    for j in range(n):
        diff = thetas[j - 1] - thetas[j]
        prim = diff.antiderivative(lo)
        alphas.append(one + prim if j == 0 else prim)

    chains = [Point((ts[i],)) for i in range(n)] + [Edge((ts[i],), (ts[i + 1],)) for i in range(n)]
    cochains = [Form(1, 0, [a]) for a in alphas] + [Form(1, 1, [th]) for th in thetas]
    theta = [[th.evaluate(ts[i]) for th in thetas] for i in range(n)]
    cx = CochainComplex("circle", 1, False, chains, cochains, basis_kind, "require-continuous",
                        ts[:-1], theta, residual)
    worst = max(magnitude(cx.pair(i, cochains[j]) - (1 if i == j else 0))
                for i in range(2 * n) for j in range(2 * n) if cochains[j].degree == chains[i].dimension)
    if worst > max(tol, 1e3 * residual):
        raise BuildError(f"duality check failed for circle n={n} ({worst:.3g})")
    cx.build_residual = max(residual, worst)
    return cx


def _midpoint_hat(ts, j) -> Func1D:
    breaks = []
    for a, b in zip(ts[:-1], ts[1:]):
        breaks += [a, (a + b) / 2]
    breaks.append(ts[-1])
    pieces = [{} for _ in range(len(breaks) - 1)]
    a, b = ts[j], ts[j + 1]
    slope = 4 / (b - a) ** 2
    pieces[2 * j] = {(1, 0): complex(slope), (0, 0): complex(-slope * a)}
    pieces[2 * j + 1] = {(1, 0): complex(-slope), (0, 0): complex(slope * b)}
    return Func1D(breaks, pieces, exact=False)


# -- square -----------------------------------------------------------------

SQUARE_VERTICES = [(0, 0), (1, 0), (1, 1), (0, 1)]


def build_square() -> CochainComplex:
    x, y = Func2D.x(), Func2D.y()
    one = Func2D.const(Fraction(1))
    zero2 = one.zero_like()
    alphas = [(one - x) * (one - y), x * (one - y), x * y, y * (one - x)]
    betas = [
        Form(2, 1, [one - y, zero2]),
        Form(2, 1, [zero2, x]),
        Form(2, 1, [-y, zero2]),
        Form(2, 1, [zero2, -(one - x)]),
    ]
    gamma = Form(2, 2, [one])
    verts = [tuple(Fraction(c) for c in v) for v in SQUARE_VERTICES]
    chains = ([Point(v) for v in verts] + [Edge(verts[i], verts[(i + 1) % 4]) for i in range(4)]
              + [Face()])
    cochains = [Form(2, 0, [a]) for a in alphas] + betas + [gamma]
    return CochainComplex("square", 2, True, chains, cochains, "whitney-bilinear",
                          "require-continuous", verts)


def build_from_config(cfg: dict) -> CochainComplex:
    geometry = cfg.get("geometry")
    if geometry == "interval":
        return build_interval(cfg.get("nodes", [0, 1]), cfg.get("basis", "lagrange"),
                              cfg.get("convention"))
    if geometry == "circle":
        return build_circle(int(cfg.get("n", 4)), cfg.get("basis", "trig-dual"))
    if geometry == "square":
        return build_square()
    raise BuildError(f"unknown geometry {geometry!r}")


def d_closure_defect(cx: CochainComplex) -> float:
    """Largest deviation of ``d(cochain)`` from its expansion in the cochain basis."""
    worst = 0.0
    for c in cx.cochains:
        dc = exterior_derivative(c)
        if dc.is_structural_zero:
            continue
        expansion = cx.project(dc)
        diff = dc - expansion
        if cx.exact:
            if not diff.is_zero():
                return math.inf
        else:
            worst = max(worst, diff.norm())
    return worst
