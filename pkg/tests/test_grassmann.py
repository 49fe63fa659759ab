from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from cochain_transfer.backends import build_interval
from cochain_transfer.grassmann import (CANDIDATE_CONVENTIONS, FROZEN_CONVENTION, GPoly, GVar,
                                        ParityError, UnpairedVariableError,
                                        antibracket, antifield_var, antighost, assemble_action,
                                        cme_residual, field_var, ghost, resolve_sign_convention)
from cochain_transfer.liealg import (StructureConstants, circle_basis, interval_basis,
                                     square_basis, structure_constants)
from cochain_transfer.transfer import differential_matrix, transfer_tensors

c1, c2, c3 = ghost(1), ghost(2), ghost(3)


def var(v):
    return GPoly.var(v)


def test_odd_variables_anticommute():
    assert var(c1) * var(c2) == -(var(c2) * var(c1))
    assert (var(c1) * var(c1)).is_zero()


def test_even_variables_commute():
    a, b = var(antighost(1)), var(antighost(2))
    assert a * b == b * a
    assert not (a * a).is_zero()


def test_parity_table():
    assert ghost(0).parity == 1 and antighost(0).parity == 0
    for p in (0, 1, 2):
        assert field_var(0, p).parity == p % 2
        assert antifield_var(0, p).parity == (p + 1) % 2
        assert field_var(0, p).dual() == antifield_var(0, p)


VARS = [ghost(0), ghost(1), antighost(0), field_var(0, 0), field_var(1, 1),
        antifield_var(0, 0), antifield_var(1, 1), field_var(2, 2)]


@st.composite
def gpolys(draw):
    out = GPoly()
    for _ in range(draw(st.integers(0, 3))):
        vs = draw(st.lists(st.sampled_from(VARS), min_size=0, max_size=3))
        out = out + GPoly.monomial(vs, draw(st.integers(-3, 3)))
    return out


@given(gpolys(), gpolys(), gpolys())
def test_product_is_associative_and_distributive(p, q, r):
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r


@given(gpolys())
def test_normalization_is_involutive(p):
    # rebuilding every monomial from its sorted variables is the identity
    rebuilt = GPoly()
    for m, c in p.terms.items():
        rebuilt = rebuilt + GPoly.monomial(m, c)
    assert rebuilt == p


def _homogeneous_parts(p):
    even = GPoly({m: c for m, c in p.terms.items() if sum(v.parity for v in m) % 2 == 0})
    return even, p - even


@given(gpolys(), gpolys(), st.sampled_from(VARS))
def test_left_derivative_is_graded_leibniz(p, q, v):
    for part in _homogeneous_parts(p):
        if part.is_zero():
            continue
        deg = sum(u.parity for u in next(iter(part.terms))) % 2
        sign = -1 if (deg and v.parity) else 1
        lhs = (part * q).derivative(v)
        rhs = part.derivative(v) * q + (part * q.derivative(v)).scale(sign)
        assert lhs == rhs


def test_antibracket_of_differential_is_zero(interval3):
    Q = differential_matrix(interval3)
    T = transfer_tensors(interval3, interval_basis(2))
    T.words = {}
    S = assemble_action(interval3, Q, T, StructureConstants(interval_basis(0), {}))
    assert antibracket(S, S).is_zero()


def test_ce_term_squares_to_zero_by_jacobi():
    basis = interval_basis(2)
    sc = structure_constants(basis)
    S = GPoly()
    for (a, b), comps in sc.in_window().items():
        for d, f in comps.items():
            S = S + GPoly.monomial([ghost(a), ghost(b), antighost(d)], f * F(1, 2))
    assert antibracket(S, S).is_zero()


def test_single_ghost_action_squares_away():
    phi, phis = field_var(1, 0), antifield_var(1, 0)
    S = GPoly.monomial([ghost(1), phis, phi])
    assert antibracket(S, S).is_zero()


def test_unpaired_variable_is_rejected():
    stray = GVar("param", 0, 0, "lambda")
    with pytest.raises(UnpairedVariableError):
        antibracket(GPoly.var(stray), GPoly.var(ghost(0)))


def test_odd_action_is_rejected(interval2):
    Q = differential_matrix(interval2)
    T = transfer_tensors(interval2, interval_basis(1))
    # a length-1 word may not connect a 1-cochain to a 0-chain: phi* c psi is odd
    T.words = {(1,): {(0, 2): 1}}
    with pytest.raises(ParityError):
        assemble_action(interval2, Q, T, structure_constants(interval_basis(1)))


def test_interval_action_contains_differential_terms():
    cx = build_interval([F(0), F(1)])
    basis = interval_basis(1)
    S = assemble_action(cx, differential_matrix(cx), transfer_tensors(cx, basis),
                        structure_constants(basis))
    psi_star = antifield_var(2, 1)
    assert not S.derivative(psi_star).derivative(field_var(1, 0)).is_zero()


def test_square_action_has_a_cubic_word_term():
    # with affine fields the cubic tensor vanishes; quadratic fields switch it on
    from cochain_transfer.backends import build_square
    cx = build_square()
    basis = square_basis(2)
    S = assemble_action(cx, differential_matrix(cx), transfer_tensors(cx, basis),
                        structure_constants(basis))
    cubic = [m for m in S.terms if sum(v.role == "ghost" for v in m) == 3
             and any(v.role == "field" and v.index == 8 for v in m)]
    assert cubic


def test_empty_window_leaves_only_the_differential(interval3):
    empty = interval_basis(indices=[])
    T = transfer_tensors(interval3, empty)
    S = assemble_action(interval3, differential_matrix(interval3), T, structure_constants(empty))
    assert all(not any(v.role == "ghost" for v in m) for m in S.terms)
    assert len(S.terms) == len(differential_matrix(interval3).entries)


@pytest.mark.parametrize("nodes,K", [([F(0), F(1)], 1), ([F(0), F(1, 2), F(1)], 1),
                                     ([F(0), F(1, 2), F(1)], 2), ([F(0), F(1)], 2)])
def test_interval_cme_vanishes(nodes, K):
    cx = build_interval(nodes)
    basis = interval_basis(K)
    sc = structure_constants(basis)
    S = assemble_action(cx, differential_matrix(cx), transfer_tensors(cx, basis), sc)
    report = cme_residual(S, basis, sc)
    assert report.ok and report.closed_monomials > 0


def test_circle_cme_within_tolerance(circle4):
    basis = circle_basis(1)
    sc = structure_constants(basis)
    S = assemble_action(circle4, differential_matrix(circle4), transfer_tensors(circle4, basis), sc)
    assert cme_residual(S, basis, sc).max_abs_residual <= 1e-9


def test_abelian_single_generator_window(interval3):
    basis = interval_basis(indices=[1])
    sc = structure_constants(basis)
    S = assemble_action(interval3, differential_matrix(interval3),
                        transfer_tensors(interval3, basis), sc)
    assert cme_residual(S, basis, sc).ok


def test_open_words_are_counted_not_hidden(interval4):
    basis = interval_basis(3)
    sc = structure_constants(basis)
    S = assemble_action(interval4, differential_matrix(interval4),
                        transfer_tensors(interval4, basis), sc)
    report = cme_residual(S, basis, sc)
    assert report.ok
    assert report.open_words == 3 and report.dropped > 0
    assert set(report.to_json()) >= {"closed_monomials", "dropped", "max_abs_residual",
                                     "nonzero_terms"}


def test_sign_resolution_selects_alternating_words():
    chosen, log = resolve_sign_convention()
    assert chosen == FROZEN_CONVENTION
    assert log[FROZEN_CONVENTION.name] == [0.0, 0.0]
    others = [c for c in CANDIDATE_CONVENTIONS if c != FROZEN_CONVENTION]
    assert all(max(log[c.name]) > 0 for c in others)


def test_wrong_sign_is_detected(interval3):
    basis = interval_basis(2)
    sc = structure_constants(basis)
    S = assemble_action(interval3, differential_matrix(interval3),
                        transfer_tensors(interval3, basis), sc, CANDIDATE_CONVENTIONS[1])
    report = cme_residual(S, basis, sc)
    assert not report.ok and report.to_json()["nonzero_terms"]
