from fractions import Fraction as F

import pytest

from cochain_transfer.backends import build_circle, build_interval, build_square
from cochain_transfer.liealg import circle_basis, interval_basis, square_basis
from cochain_transfer.verify import Context, golden_key, load_golden, verify_suite


def _entries(ctx, suites=("homotopy", "liealg", "transfer", "cme")):
    out = []
    for res in verify_suite(ctx, suites).values():
        out.extend(res["entries"])
    return out


@pytest.mark.parametrize("make,basis", [
    (lambda: build_interval([F(0), F(1, 2), F(1)]), interval_basis(2)),
    (lambda: build_interval([F(0), F(1, 3), F(1)], "pwlinear", "left"), interval_basis(1)),
    (lambda: build_circle(4), circle_basis(1)),
    (build_square, square_basis(1)),
])
def test_every_suite_passes(make, basis):
    entries = _entries(Context(make(), basis))
    failed = [(e.name, e.value, e.witness) for e in entries if e.failed]
    assert not failed


def test_retract_identity_exact_on_three_nodes():
    ctx = Context(build_interval([F(0), F(1, 2), F(1)]), interval_basis(2))
    entry = next(e for e in _entries(ctx, ("homotopy",)) if e.name == "retract_identity")
    assert entry.status == "pass" and entry.value == 0.0 and entry.tol == 0.0


def test_circle_duality_within_tolerance():
    ctx = Context(build_circle(4), circle_basis(1))
    entry = next(e for e in _entries(ctx, ("homotopy",)) if e.name == "duality")
    assert entry.value <= 1e-12


def test_square_reports_h_gamma_and_no_long_words():
    ctx = Context(build_square(), square_basis(1))
    by_name = {e.name: e for e in _entries(ctx, ("transfer",))}
    assert by_name["h_gamma"].status == "pass"
    assert by_name["stored_lengths"].detail == "[1, 2, 3]"


def test_failures_name_a_witness():
    cx = build_interval([F(0), F(1, 2), F(1)])
    honest = cx.homotopy

    def broken(w):
        out = honest(w)
        return out * 2 if not out.is_structural_zero else out

    cx.homotopy = broken
    entries = _entries(Context(cx, interval_basis(1)), ("homotopy",))
    bad = next(e for e in entries if e.name == "retract_identity")
    assert bad.failed and bad.witness


def test_golden_files_are_found_and_match():
    cx, basis = build_interval([F(0), F(1, 2), F(1)]), interval_basis(2)
    assert golden_key(cx, basis) == "interval_0_half_1_K2"
    assert load_golden("circle_n4_K1")["window"]["indices"] == [-1, 0, 1]
    entry = next(e for e in _entries(Context(cx, basis), ("transfer",)) if e.name == "golden_diff")
    assert entry.status == "pass" and entry.value == 0.0


def test_cme_suite_reports_the_convention():
    entries = _entries(Context(build_interval([F(0), F(1)]), interval_basis(1)), ("cme",))
    conv = next(e for e in entries if e.name == "sign_convention")
    assert conv.detail == "alternating-words"
    assert next(e for e in entries if e.name == "cme_residual").status == "pass"


def test_pwlinear_skips_closed_forms_and_reports_its_residual():
    cx = build_interval([F(0), F(1, 3), F(1)], "pwlinear", "left")
    entries = {e.name: e for e in _entries(Context(cx, interval_basis(1)), ("transfer", "cme"))}
    assert entries["closed_form_agreement"].status == "skip"
    assert entries["cme_residual"].status == "info" and entries["cme_residual"].value > 0
