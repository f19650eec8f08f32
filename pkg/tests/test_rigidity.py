from __future__ import annotations

from fractions import Fraction
from math import factorial

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from crrigidity.exact_linalg import Q
from crrigidity.rigidity import (
    INCONCLUSIVE,
    NOT_RIGID,
    RIGID,
    coefficient_C,
    determinant_polynomial_roots,
    report_table,
    verify_cr_dim_one,
    verify_full_model,
    warhurst_matrix,
)
from oracles import cofactor_det

F = Fraction
# the displayed matrix written out by hand at three values of rho
LITERAL = {
    4: [[6, 0, 4, 0, -1, 0], [0, 0, -1, 0, 4, 6], [0, 1, 0, 2, 0, 1],
        [F(3, 2), 0, 2, 0, 0, 0], [1, 0, 2, 1, 0, 0], [0, 0, 0, 2, 0, F(3, 2)]],
    5: [[10, 0, 5, 0, -1, 0], [0, 0, -1, 0, 5, 10], [0, 2, 0, 2, 0, 1],
        [2, 0, 2, 0, 0, 0], [1, 0, 2, 2, 0, 0], [0, 0, 0, 2, 0, 2]],
    6: [[15, 0, 6, 0, -1, 0], [0, 0, -1, 0, 6, 15], [0, 3, 0, 2, 0, 1],
        [F(5, 2), 0, 2, 0, 0, 0], [1, 0, 2, 3, 0, 0], [0, 0, 0, 2, 0, F(5, 2)]],
}


def _binom(r, s):
    if s < 0 or s > r:
        return 0
    return factorial(r) // (factorial(s) * factorial(r - s))


def test_coefficient_examples():
    assert coefficient_C(4, 0) == 6
    assert coefficient_C(5, 1) == 20
    assert coefficient_C(3, 2) == 0


@given(st.integers(0, 30), st.integers(0, 30))
def test_coefficient_formula(r, j):
    assert coefficient_C(r, j) == (j + 1) * _binom(r, j + 2)


def test_coefficient_rejects_negative():
    with pytest.raises(ValueError):
        coefficient_C(-1, 0)


@pytest.mark.parametrize("rho", [4, 5, 6])
def test_matrix_matches_display_literally(rho):
    m = warhurst_matrix(rho).matrix6.to_dense()
    assert [[F(int(x.numerator), int(x.denominator)) for x in row] for row in m] == LITERAL[rho]


def test_named_entries():
    assert warhurst_matrix(4).entry(1, 1) == 6
    assert warhurst_matrix(5).entry(6, 6) == 2


def test_first_row_encodes_equation():
    s = warhurst_matrix("rho")
    r = s.rho
    a1, a2, b2, a3, b3, b4 = sympy.symbols(" ".join(s.unknown_labels))
    row = s.matrix6.row(0)
    expr = sum(c * v for c, v in zip(row, (a1, a2, b2, a3, b3, b4)))
    assert sympy.simplify(expr - (r * b2 - b3 + a1 * r * (r - 1) / 2)) == 0


@pytest.mark.parametrize("rho", range(2, 13))
def test_symbolic_and_exact_determinants_agree_with_cofactor(rho):
    sym = warhurst_matrix("rho")
    det_sym = sym.determinant().subs(sym.rho, rho)
    exact = warhurst_matrix(rho).determinant()
    dense = [[F(int(x.numerator), int(x.denominator)) for x in row] for row in warhurst_matrix(rho).matrix6.to_dense()]
    oracle = cofactor_det(dense)
    assert exact == Q(oracle.numerator, oracle.denominator)
    assert sympy.Rational(oracle.numerator, oracle.denominator) == det_sym


def test_determinant_report():
    rep = determinant_polynomial_roots()
    assert rep.degree <= 6
    assert rep.nonzero_above_3 and rep.no_integer_root_above_3
    assert all(rep.values[r] != 0 for r in range(4, 13))
    assert rep.value_at_3 == 0  # reported, not interpreted
    assert rep.values[4] == Q(-105, 4)


def test_equation_variant_also_nonzero_above_three():
    rep = determinant_polynomial_roots(variant="equations")
    assert rep.nonzero_above_3 and rep.no_integer_root_above_3
    disp = warhurst_matrix(5).matrix6.to_dense()
    eqs = warhurst_matrix(5, variant="equations").matrix6.to_dense()
    assert [i for i in range(6) if disp[i] != eqs[i]] == [4]


def test_matrix_rejects_small_rho():
    with pytest.raises(ValueError):
        warhurst_matrix(1)


@pytest.mark.parametrize("n,rho", [(1, 3), (1, 4), (1, 5)])
def test_full_models_rigid(n, rho):
    r = verify_full_model(n, rho)
    assert r.verdict == RIGID and r.routes_agree
    assert r.tanaka_g1_dim == 0
    assert r.g0_tanaka == r.g0_autcr == 2 * n * n
    assert r.dimension_bound_holds
    if rho == 3:
        assert any("computational" in label for label in r.labels)


def test_n2_rho4_low_weights():
    r = verify_full_model(2, 4, max_weight=1)
    assert r.verdict == RIGID and r.g0_tanaka == 8 and r.g0_autcr == 8


def test_contrast_case():
    r = verify_full_model(1, 2, contrast=True)
    assert r.verdict == NOT_RIGID and r.routes_agree and r.ok
    assert sum(r.autcr_dims) == 8
    with pytest.raises(ValueError):
        verify_full_model(1, 2)


def test_budget_gives_inconclusive():
    r = verify_full_model(2, 3, budget=35)
    assert r.verdict == INCONCLUSIVE
    assert not any(label.startswith("verified") for label in r.labels)


@pytest.mark.parametrize("rho", [3, 4])
def test_cr_dim_one(rho):
    rep = verify_cr_dim_one(rho)
    assert rep.verdict == RIGID
    assert rep.free_tanaka_dims == [2, 0]
    assert [c.k for c in rep.cases] == list(range({3: 2, 4: 4}[rho], {3: 4, 4: 7}[rho]))
    for c in rep.cases:
        assert c.tanaka_g1_dim == 0 and c.g0_tanaka <= 2 and c.routes_agree


def test_verdict_monotone_in_weight():
    verdicts = [verify_full_model(1, 3, max_weight=W).verdict for W in range(0, 5)]
    assert verdicts == [RIGID] * 5
    contrast = [verify_full_model(1, 2, max_weight=W, contrast=True).verdict for W in range(1, 4)]
    assert contrast == [NOT_RIGID] * 3


def test_table_formats():
    reps = [verify_full_model(1, 3), verify_full_model(1, 2, contrast=True)]
    text = report_table(reps)
    assert text.splitlines()[0].startswith("case")
    assert "rigid" in text and "not-rigid" in text
    csv_text = report_table(reps, "csv")
    assert csv_text.splitlines()[1].startswith("full-model,1,3,3,2,0,2,")
