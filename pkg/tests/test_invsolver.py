import itertools
from dataclasses import replace

import pytest
import sympy

from svforms.algebra import Element, L, M, Window, Y, ad_weight, bracket, enumerate_window
from svforms.errors import NotStabilizedError, WindowTooSmallError
from svforms.forms import FamilyTag, closed_form, invariance_violations, pair_key
from svforms.invsolver import (
    LEMMAS,
    DiscrepancyReport,
    assemble_invariance_system,
    compare_with_classification,
    fixture_grid,
    lemma_suite,
    projected_span_contains,
    solve_invariant_forms,
)

from conftest import P, naive_violations

W8 = Window(8, 4)


@pytest.fixture(scope="module")
def solved():
    cache = {}

    def get(p, window=W8, **kw):
        key = (p, window, tuple(sorted(kw.items())))
        if key not in cache:
            cache[key] = solve_invariant_forms(p, window, **kw)
        return cache[key]

    return get


def span_equal(a, b):
    return projected_span_contains(a, b) and projected_span_contains(b, a)


# -- assembly ---------------------------------------------------------------


def test_unknowns_are_weight_zero_pairs():
    p = P(-2, 0)
    system = assemble_invariance_system(p, Window(2), weight_filter=True)
    basis = enumerate_window(p, Window(2))
    expected = [(a, b) for i, a in enumerate(basis) for b in basis[i:] if ad_weight(p, a) + ad_weight(p, b) == 0]
    assert system.unknowns == expected
    assert (L(1), M(-1)) in system.index and (Y(0), Y(0)) in system.index


def test_row_for_l0_l1_mminus1():
    p = P(-2, 0)
    system = assemble_invariance_system(p, Window(2))
    rows = [r for r, lab in zip(system.matrix.rows, system.row_labels) if lab == (L(0), L(1), M(-1))]
    assert rows == [{system.index[(L(1), M(-1))]: 1, system.index[(L(0), M(0))]: -1}]


def test_unfiltered_system_has_all_pairs():
    system = assemble_invariance_system(P(0, "1/3"), Window(2), weight_filter=False)
    assert system.n_unknowns == 15 * 16 // 2


def test_window_too_small():
    with pytest.raises(WindowTooSmallError):
        assemble_invariance_system(P(0, 0), Window(1))


# -- independent oracle -----------------------------------------------------


def reference_projected_rank(p, window):
    """Dense sympy nullspace of the unfiltered system built from Element brackets."""
    basis = enumerate_window(p, window)
    members = set(basis)
    pairs = sorted({pair_key(a, b) for a in basis for b in basis})
    col = {k: i for i, k in enumerate(pairs)}
    rows = set()
    for x, y, z in itertools.product(basis, repeat=3):
        xy = bracket(p, Element.basis(x), Element.basis(y))
        yz = bracket(p, Element.basis(y), Element.basis(z))
        if any(b not in members for b in list(xy) + list(yz)):
            continue
        row = {}
        for b, c in xy.items():
            k = col[pair_key(b, z)]
            row[k] = row.get(k, 0) + c
        for b, c in yz.items():
            k = col[pair_key(x, b)]
            row[k] = row.get(k, 0) - c
        row = tuple(sorted((k, v) for k, v in row.items() if v))
        if row:
            rows.add(row)
    mat = sympy.zeros(len(rows), len(pairs))
    for i, row in enumerate(sorted(rows)):
        for k, v in row:
            mat[i, k] = sympy.Rational(v.numerator, v.denominator)
    kernel = mat.nullspace()
    core = [i for i, (a, b) in enumerate(pairs) if window.in_core(a, p.s) and window.in_core(b, p.s)]
    if not kernel:
        return 0
    return sympy.Matrix.hstack(*kernel).extract(core, list(range(len(kernel)))).rank()


@pytest.mark.parametrize("p", [P(-2, 0), P(-5, 0), P(-3, 0), P(-1, 0), P(0, "1/3"), P(-2, "1/2", "0")], ids=str)
def test_projected_dimension_matches_dense_oracle(p):
    w = Window(2, 1)
    sol = solve_invariant_forms(p, w, weight_filter=True, check_stability=False)
    assert sol.projected_dimension == reference_projected_rank(p, w)


# -- properties -------------------------------------------------------------


@pytest.mark.parametrize("p", [P(-2, 0), P(-1, 0), P(0, "1/3")], ids=str)
@pytest.mark.parametrize("M_", [4, 6])
def test_weight_filter_equivalence(p, M_):
    w = Window(M_, M_ // 2)
    on = solve_invariant_forms(p, w, weight_filter=True, check_stability=False)
    off = solve_invariant_forms(p, w, weight_filter=False, check_stability=False)
    assert on.projected_dimension == off.projected_dimension
    assert span_equal(on.projected_basis, off.projected_basis)


@pytest.mark.parametrize("p", [P(-2, 0), P(-3, 1), P(-5, "1/2", "1/2"), P(-4, 0)], ids=str)
def test_monotonic_truncation(p):
    small = solve_invariant_forms(p, Window(4, 2), check_stability=False)
    big = solve_invariant_forms(p, Window(6, 2), check_stability=False)
    assert projected_span_contains(small.projected_basis, big.projected_basis)


@pytest.mark.parametrize("p", [P(-2, 0), P(-3, 0), P(-5, 1), P(-2, "-1/2", "1/2")], ids=str)
def test_kernel_forms_are_sound(p):
    w = Window(4, 2)
    sol = solve_invariant_forms(p, w, check_stability=False)
    assert len(sol.kernel) >= sol.projected_dimension
    for f in sol.kernel:
        assert invariance_violations(p, f, w) == []


def test_kernel_forms_sound_by_direct_evaluation():
    p = P(-2, "1/2", "0")
    sol = solve_invariant_forms(p, Window(2, 1), check_stability=False)
    for f in sol.kernel:
        assert naive_violations(p, f, Window(2)) == []


# -- examples at the production window --------------------------------------


def test_de_generator_proportional_to_closed_form(solved):
    p = P(-2, 0)
    sol = solved(p)
    assert sol.stabilized and sol.projected_dimension == 1
    ref = closed_form(p, FamilyTag.D, W8).restrict_to_window(W8, core=True)
    assert sol.generator.ratio_to(ref) is not None


@pytest.mark.parametrize("p", [P(0, 0), P(-1, "1/2", "0")], ids=str)
def test_zero_dimension_examples(solved, p):
    sol = solved(p)
    assert sol.stabilized and sol.projected_dimension == 0 and sol.generator is None


def test_compare_c_family(solved):
    rep = compare_with_classification(solved(P(-5, "1/2", "1/2")))
    assert (rep.solver_dim, rep.printed_dim, rep.lemma_dim) == (1, 1, 1)
    assert rep.match_printed and rep.match_lemma
    assert rep.scalar_printed == rep.scalar_lemma is not None
    assert rep.witnesses == []


def test_compare_lambda_minus_one(solved):
    rep = compare_with_classification(solved(P(-1, 0)))
    assert (rep.solver_dim, rep.printed_dim, rep.lemma_dim) == (0, 1, 0)
    assert not rep.match_printed and rep.match_lemma
    assert rep.witnesses == [
        {"convention": "printed", "kind": "violated_triple", "witness": {"triple": ["L(1)", "L(-1)", "M(0)"], "residual": "-2"}}
    ]


def test_compare_lambda_minus_three(solved):
    rep = compare_with_classification(solved(P(-3, 0)))
    assert (rep.solver_dim, rep.printed_dim, rep.lemma_dim) == (1, 1, 1)
    assert rep.match_lemma and not rep.match_printed
    kinds = {w["kind"]: w for w in rep.witnesses if w["convention"] == "printed"}
    assert kinds["violated_triple"]["witness"] == {"triple": ["L(1)", "L(-1)", "M(0)"], "residual": "-2"}
    outside = kinds["kernel_vector_outside_span"]["witness"]
    assert outside["zero_on_claimed_support"] == [["L(0)", "M(0)"]]
    assert outside["form"]["entries"] == [{"a": "Y(0)", "b": "Y(0)", "val": "1"}]


def test_compare_refuses_unstabilized(solved):
    sol = replace(solved(P(-2, 0)), stabilized=False)
    with pytest.raises(NotStabilizedError, match="enlarge M"):
        compare_with_classification(sol)
    with pytest.raises(NotStabilizedError):
        lemma_suite(sol.params, sol)
    assert compare_with_classification(sol, allow_unstable=True).solver_dim == 1


def test_report_round_trip(solved):
    for p in (P(-3, 0), P(-1, 0), P(-2, "1/2", "0")):
        rep = compare_with_classification(solved(p))
        assert DiscrepancyReport.from_dict(rep.to_dict()) == rep


# -- lemma replay -----------------------------------------------------------


def test_lemma_suite_de_example(solved):
    p = P(-2, 0)
    sol = solved(p)
    g = sol.generator
    assert g.value(Y(1), Y(-1)) == -2 * g.value(L(0), M(0)) != 0
    verdicts = lemma_suite(p, sol)
    assert {v["lemma"] for v in verdicts} == {lem.name for lem in LEMMAS}
    assert all(v["status"] in ("pass", "not_applicable") for v in verdicts)
    assert any(v["status"] == "pass" and v["instances"] > 0 for v in verdicts)


def test_lemma_suite_vacuous_when_empty(solved):
    p = P(0, "1/3")
    verdicts = lemma_suite(p, solved(p))
    assert {v["status"] for v in verdicts} <= {"vacuous", "not_applicable"}
    assert any(v["status"] == "vacuous" for v in verdicts)


def test_lemma_suite_catches_a_bad_form(solved):
    p = P(-2, 0)
    sol = solved(p)
    good = closed_form(p, FamilyTag.D, W8)
    bad = type(good)(p, {**good.entries, (Y(-1), Y(1)): 5})
    verdicts = lemma_suite(p, replace(sol, kernel=[bad]))
    assert any(v["status"] == "fail" for v in verdicts)


def test_fixture_grid_shape():
    grid = fixture_grid()
    assert len(grid) == 98 == len(set(grid))
