import pytest
from hypothesis import given, strategies as st

from cochain_transfer.forms import VectorField, bracket
from cochain_transfer.funcs import Func2D
from cochain_transfer.liealg import (basis_from_config, bracket_generators, circle_basis,
                                     closed_form_constant, interval_basis, square_basis,
                                     structure_constants, window_closed)


def test_interval_bracket_v0_v1():
    b = interval_basis(1)
    assert bracket(b.field(0), b.field(1)) == b.field(0)


def test_circle_bracket_v1_v2():
    b = circle_basis(3)
    assert bracket_generators(b, 1, 2) == {3: 1j}


def test_square_commuting_fields():
    b = square_basis(1)
    assert bracket_generators(b, ("x", 1, 0), ("y", 0, 1)) == {}


def test_structure_constant_examples():
    sc = structure_constants(interval_basis(2))
    assert sc.f(1, 2, 2) == 1
    assert all(sc.f(1, 2, m) == 0 for m in (0, 1))
    assert all(sc.f(k, k, m) == 0 for k in range(3) for m in range(3))
    sc_c = structure_constants(circle_basis(1))
    assert sc_c.f(-1, 1, 0) == 2j


@pytest.mark.parametrize("K", range(5))
def test_constants_match_textbook_formulas(K):
    for basis in (interval_basis(K), circle_basis(K)):
        sc = structure_constants(basis)
        for (a, b), comps in sc.table.items():
            for m in set(comps) | set(basis.indices):
                assert abs(comps.get(m, 0) - closed_form_constant(basis.geometry, a, b, m)) <= 1e-12


@pytest.mark.parametrize("basis", [interval_basis(3), circle_basis(2), square_basis(1), square_basis(2)])
def test_antisymmetry_and_jacobi(basis):
    sc = structure_constants(basis)
    assert sc.antisymmetry_defect() == 0
    assert sc.jacobi_defect()[0] == 0


def test_out_of_window_components_are_flagged():
    sc = structure_constants(interval_basis(2))
    assert sc.leaves[(2, 2)] is False
    assert sc.leaves[(1, 2)] is False
    sc3 = structure_constants(interval_basis(3))
    assert sc3.leaves[(2, 3)] is True
    assert sc3.table[(2, 3)] == {4: 1}


def test_window_closed_examples():
    assert window_closed((1, 2), interval_basis(2))
    k1 = circle_basis(1)
    assert window_closed((1, 1), k1)
    assert window_closed((1, 1, -1), k1)
    assert window_closed((-1, 1, 1), k1)
    assert not window_closed((1, 2), circle_basis(2))
    assert not window_closed((2, 3), interval_basis(3))
    with pytest.raises(ValueError):
        window_closed((), k1)


def test_window_closed_sees_nested_brackets():
    # [1, 2] = 2 stays inside {0,1,2,3}, but [2, 3] = t^4 leaves it
    b = interval_basis(3)
    assert window_closed((0, 1, 2), b)
    assert not window_closed((0, 2, 3), b)


def test_window_config_forms():
    assert basis_from_config("interval", {"K": 2}).indices == [0, 1, 2]
    assert basis_from_config("circle", {"K_or_D": 1}).indices == [-1, 0, 1]
    assert len(basis_from_config("square", {"D": 1})) == 6
    assert basis_from_config("interval", {"indices": [1]}).indices == [1]
    with pytest.raises(ValueError):
        basis_from_config("interval", {"K": -1})


def test_structure_constants_json():
    js = structure_constants(circle_basis(1)).to_json()
    assert {"a": -1, "b": 1, "d": 0, "f": {"f64re": 0.0, "f64im": 2.0}, "in_window": True} \
        in js["constants"]


coef = st.fractions(min_value=-3, max_value=3, max_denominator=4)
poly = st.dictionaries(st.tuples(st.integers(0, 2), st.integers(0, 2)), coef, max_size=3).map(Func2D)
fields = st.tuples(poly, poly).map(VectorField)


@given(fields, fields, fields, coef)
def test_bracket_is_bilinear_and_antisymmetric(u, v, w, c):
    assert bracket(u + v * c, w) == bracket(u, w) + bracket(v, w) * c
    assert bracket(u, v) == bracket(v, u) * -1


@given(fields, fields, poly)
def test_bracket_with_function_multiple(v, w, f):
    # [v, f w] = v(f) w + f [v, w]
    fw = VectorField(tuple(f * c for c in w.comps))
    lhs = bracket(v, fw)
    rhs = VectorField(tuple(v(f) * c for c in w.comps)) + VectorField(
        tuple(f * c for c in bracket(v, w).comps))
    assert lhs == rhs
