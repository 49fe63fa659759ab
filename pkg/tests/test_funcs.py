import cmath
import math
from fractions import Fraction as F

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from cochain_transfer.funcs import BreakpointError, Func1D, Func2D, lagrange_basis
from cochain_transfer.scalars import GaussianRational

from oracles import rat, t, x, y

small = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@st.composite
def exact_func1d(draw, max_pieces=3):
    """Random piecewise polynomial on [0, 1] with rational breakpoints."""
    cuts = sorted(set(draw(st.lists(st.fractions(min_value=F(1, 10), max_value=F(9, 10),
                                                 max_denominator=10), max_size=max_pieces - 1))))
    breaks = [F(0)] + cuts + [F(1)]
    pieces = []
    for _ in range(len(breaks) - 1):
        terms = draw(st.dictionaries(st.integers(0, 4), small, max_size=4))
        pieces.append({(n, 0): c for n, c in terms.items()})
    return Func1D(breaks, pieces)


def to_sympy(f: Func1D):
    """Piecewise sympy expression for an exact polynomial Func1D."""
    args = []
    for hi, p in zip(f.breaks[1:], f.pieces):
        expr = sum((rat(c) * t ** n for (n, k), c in p.items()), sp.Integer(0))
        args.append((expr, t <= rat(hi)))
    return sp.Piecewise(*args)


def test_product_rule_examples():
    tt = Func1D.term(1, 0, 0, 1)
    assert tt * tt == Func1D.term(2, 0, 0, 1)
    e1 = Func1D.term(0, 1, 0.0, 2 * math.pi, 1.0 + 0j, exact=False)
    e2 = Func1D.term(0, 2, 0.0, 2 * math.pi, 1.0 + 0j, exact=False)
    assert e1 * e2 == Func1D.term(0, 3, 0.0, 2 * math.pi, 1.0 + 0j, exact=False)


def test_partition_of_unity_on_square():
    one, X, Y = Func2D.const(1), Func2D.x(), Func2D.y()
    total = (one - X) * (one - Y) + X * (one - Y) + X * Y + Y * (one - X)
    assert total == one


def test_derivative_examples():
    f = Func1D.term(2, 1, 0.0, 1.0, 1.0 + 0j, exact=False)
    df = f.derivative()
    assert df.pieces[0] == {(1, 1): 2.0 + 0j, (2, 1): 1j}
    assert Func2D.monomial(1, 1).diff(0) == Func2D.y()
    tent = Func1D([F(0), F(1, 2), F(1)], [{(1, 0): F(1)}, {(0, 0): F(1), (1, 0): F(-1)}])
    assert tent.derivative().pieces == ({(0, 0): 1}, {(0, 0): -1})


def test_antiderivative_examples():
    assert Func1D.term(1, 0, 0, 1).antiderivative(0) == Func1D.term(2, 0, 0, 1, F(1, 2))
    k = 3
    f = Func1D.term(0, k, 0.0, 2 * math.pi, 1.0 + 0j, exact=False)
    F_ = f.antiderivative(0.0)
    for s in (0.3, 1.7, 5.0):
        assert abs(F_.evaluate(s) - (cmath.exp(1j * k * s) - 1) / (1j * k)) < 1e-12
    step = Func1D([F(0), F(1, 2), F(1)], [{(0, 0): F(1)}, {}])
    prim = step.antiderivative(0)
    assert prim.pieces == ({(1, 0): 1}, {(0, 0): F(1, 2)})


def test_definite_integrals():
    f = Func1D.term(0, 2, 0.0, 2 * math.pi, 1.0 + 0j, exact=False)
    assert abs(f.integrate(0.0, 2 * math.pi)) < 1e-14
    g = Func1D.term(0, 0, 0.0, 2 * math.pi, 1.0 + 0j, exact=False)
    assert abs(g.integrate(0.0, 2 * math.pi) - 2 * math.pi) < 1e-14
    assert Func2D.const(1).integrate_rect() == 1
    assert Func1D.term(3, 0, 0, 1).integrate(F(1, 2), F(1, 2)) == 0


def test_evaluation_examples():
    assert Func2D.monomial(1, 1).evaluate(1, 1) == 1
    assert Func1D.term(1, 0, 0, 1).evaluate(F(1, 3)) == F(1, 3)
    jump = Func1D([F(0), F(1, 2), F(1)], [{(0, 0): F(1)}, {(0, 0): F(-1)}])
    assert jump.evaluate(F(1, 2), "left") == 1
    assert jump.evaluate(F(1, 2), "right") == -1
    assert jump.evaluate(F(1, 2), "average") == 0
    with pytest.raises(BreakpointError):
        jump.evaluate(F(1, 2))


def test_mismatched_domains_rejected():
    with pytest.raises(ValueError):
        Func1D.term(1, 0, 0, 1) + Func1D.term(1, 0, 0, 2)


@given(exact_func1d(), st.fractions(min_value=0, max_value=1, max_denominator=9))
def test_derivative_inverts_antiderivative(f, base):
    prim = f.antiderivative(base)
    assert prim.derivative() == f
    assert prim.evaluate(base) == 0


@given(exact_func1d(), st.lists(st.fractions(min_value=0, max_value=1, max_denominator=12),
                                min_size=3, max_size=3))
def test_integral_is_additive(f, pts):
    a, b, c = sorted(pts)
    assert f.integrate(a, c) == f.integrate(a, b) + f.integrate(b, c)


@given(exact_func1d(max_pieces=2), st.fractions(min_value=0, max_value=1, max_denominator=9))
def test_integral_matches_sympy(f, b):
    expected = sp.integrate(to_sympy(f), (t, 0, rat(b)))
    expected = sp.Rational(expected)
    assert f.integrate(0, b) == F(int(expected.p), int(expected.q))


@pytest.mark.parametrize("n,k", [(0, 1), (1, 2), (3, -1), (2, 0)])
def test_integration_by_parts_on_exp_poly(n, k):
    # int t^n e^{ikt} against sympy on [0, 1]
    f = Func1D.term(n, k, 0.0, 1.0, 1.0 + 0j, exact=False)
    expected = complex(sp.N(sp.integrate(t ** n * sp.exp(sp.I * k * t), (t, 0, 1))))
    assert abs(f.integrate(0.0, 1.0) - expected) < 1e-12


def test_exact_gaussian_coefficients_survive_calculus():
    f = Func1D.term(2, 0, 0, 1, GaussianRational(1, 2))
    assert f.antiderivative(0).derivative() == f


@given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), small, max_size=5),
       st.sampled_from([((0, 0), (1, 0)), ((1, 0), (1, 1)), ((1, 1), (0, 1)), ((0, 1), (0, 0))]))
def test_along_segment_matches_sympy(terms, edge):
    f = Func2D(terms)
    s = sp.Symbol("s")
    (ax, ay), (bx, by) = edge
    expr = sum((rat(c) * x ** n * y ** m for (n, m), c in terms.items()), sp.Integer(0))
    sub = sp.expand(expr.subs({x: ax + s * (bx - ax), y: ay + s * (by - ay)}))
    coeffs = f.along_segment(*edge)
    assert sp.expand(sum(rat(c) * s ** p for p, c in coeffs.items()) - sub) == 0


def test_lagrange_basis_matches_interpolation():
    nodes = [F(0), F(1, 2), F(1)]
    basis = lagrange_basis(nodes)
    assert basis[2] == Func1D.from_terms({(2, 0): F(2), (1, 0): F(-1)}, F(0), F(1))
    for j, f in enumerate(basis):
        for i, ti in enumerate(nodes):
            assert f.evaluate(ti) == (1 if i == j else 0)


def test_integrate_from_zero_and_substitute():
    f = Func2D({(1, 2): F(3)})
    g = f.integrate_from_zero(0)
    assert g == Func2D({(2, 2): F(3, 2)})
    assert f.substitute(1, 0).is_zero()
    assert f.substitute(0, F(1, 2)) == Func2D({(0, 2): F(3, 2)})
