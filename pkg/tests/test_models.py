from __future__ import annotations

import dataclasses
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from crrigidity.cr_structures import free_cr_algebra, is_totally_nondegenerate_symbol
from crrigidity.errors import BudgetExceeded
from crrigidity.exact_linalg import Matrix, Q
from crrigidity.graded_lie import check_axioms
from crrigidity.models import (
    GraphRestriction,
    assign_weights,
    basis_N2,
    basis_N3,
    basis_Nj,
    check_total_nondegeneracy,
    free_cr_dims,
    full_model,
    is_pluriharmonic_on_graph,
    model_equations,
    model_for,
    symbol_algebra,
    tower_ring,
)
from crrigidity.polynomials import Ring, real_monomial_basis
from oracles import fraction_rank


def _frac_rows(polys, ids):
    rows = []
    for p in polys:
        row = {}
        for k, c in p.items():
            row[ids.setdefault(k, len(ids))] = Fraction(int(c.numerator), int(c.denominator))
        rows.append(row)
    return rows


@pytest.mark.parametrize("n", [1, 2, 3])
def test_N2_N3_sizes(n):
    assert len(basis_N2(n)) == n * n
    assert len(basis_N3(n)) == n ** 3 + n * n


@pytest.mark.parametrize("n,j", [(1, 4), (1, 5), (1, 6), (2, 4)])
def test_Nj_is_a_complement(n, j):
    """|N_j| = k_j, and N_j completes the restricted pluriharmonic span to all real polynomials."""
    N = basis_Nj(n, j)
    assert len(N) == free_cr_dims(n, j)[j - 1]
    ring = tower_ring(n, j)
    phis = []
    for w in range(2, j):
        for t in basis_Nj(n, w):
            # lower bases live over fewer u variables; pad the exponents
            exps = t.exps + (0,) * (ring.nvars - len(t.exps))
            phis.append(dataclasses.replace(t, exps=exps).poly(ring))
    phis.extend({} for _ in range(ring.k - len(phis)))
    span = GraphRestriction(ring, phis).pluriharmonic_span(j, max_w_weight=j - 1)
    ids = {}
    span_rows = _frac_rows(span, ids)
    n_rows = _frac_rows([t.poly(ring) for t in N], ids)
    all_rows = _frac_rows([t.poly(ring) for t in real_monomial_basis(ring, j, j - 1)], ids)
    r_span = fraction_rank(span_rows)
    assert fraction_rank(span_rows + n_rows) == r_span + len(N)
    assert fraction_rank(span_rows + n_rows + all_rows) == r_span + len(N)


def test_N5_uses_u_terms_for_n1():
    N = basis_Nj(1, 5)
    assert any(any(t.exps[2:]) for t in N)


def test_assign_weights():
    c = assign_weights(2, 10)
    assert c.rho == 3 and c.weights == (2,) * 4 + (3,) * 6
    assert not c.full_model
    assert assign_weights(2, 16).full_model


def test_assign_weights_budget():
    with pytest.raises(BudgetExceeded):
        assign_weights(3, 500, budget=50)


def test_cubic_text_and_latex():
    m = model_for(1, 3)
    assert m.to_text().splitlines() == ["Im w1 = z1*zb1", "Im w2 = Re(z1^2*zb1)", "Im w3 = Im(z1^2*zb1)"]
    lines = m.to_latex().splitlines()
    assert len(lines) == 3 and all(l.startswith(r"\operatorname{Im} w_") for l in lines)


def test_json_fields():
    out = full_model(2, 3).to_json()
    assert out["full_model"] is True and out["k"] == 16
    assert len(out["equations"]) == 16


def test_matrix_validation():
    coords = assign_weights(1, 3)
    with pytest.raises(ValueError):
        model_equations(coords, {2: Matrix.from_dense([[1]]), 3: Matrix.from_dense([[1, 0]])})
    with pytest.raises(ValueError):
        model_equations(coords, {2: Matrix.from_dense([[1]]), 3: Matrix.from_dense([[1, 1], [2, 2]])})
    with pytest.raises(ValueError):
        model_equations(coords, {2: Matrix.from_dense([[1]])})


def test_seeded_models_are_reproducible():
    a = model_for(2, 12, seed=7).to_json()
    assert a == model_for(2, 12, seed=7).to_json()
    assert a != model_for(2, 12).to_json()


def _cumulative(n, k):
    c = assign_weights(n, k)
    acc, out = 2 * n, [2 * n]
    for w in range(2, c.rho + 1):
        acc += c.group_sizes[w]
        out.append(acc)
    return out


@pytest.mark.parametrize("n,k", [(1, k) for k in range(1, 7)] + [(2, k) for k in (1, 4, 5, 16, 17, 30, 47)])
def test_filtration_dimensions(n, k):
    rep = check_total_nondegeneracy(model_for(n, k))
    assert rep.totally_nondegenerate
    assert rep.dims == _cumulative(n, k)


@given(st.integers(1, 6), st.integers(0, 10 ** 6))
def test_seeded_cr_dim_one_models_nondegenerate(k, seed):
    rep = check_total_nondegeneracy(model_for(1, k, seed=seed))
    assert rep.totally_nondegenerate and rep.dims == _cumulative(1, k)


def test_degenerate_model_stalls():
    m = model_for(1, 1)
    flat = dataclasses.replace(m, phis=[{}])
    rep = check_total_nondegeneracy(flat)
    assert not rep and rep.stalled_at == 2


@pytest.mark.parametrize("n,rho", [(1, 3), (1, 4), (2, 3)])
def test_full_model_symbol_is_free_cr(n, rho):
    alg, J = symbol_algebra(full_model(n, rho))
    rep = check_axioms(alg)
    assert rep.is_lie and rep.is_fundamental
    nd = is_totally_nondegenerate_symbol(alg, J)
    assert nd.totally_nondegenerate and nd.full_free
    assert list(alg.dims) == free_cr_algebra(n, rho).k


def test_partial_model_symbol():
    alg, J = symbol_algebra(model_for(1, 2))
    assert list(alg.dims) == [2, 1, 1]
    nd = is_totally_nondegenerate_symbol(alg, J)
    assert nd.totally_nondegenerate and not nd.full_free


def test_pluriharmonic_examples():
    ring = Ring(1, (2,))
    phi = {(0, 1, 1, 0): Q(1)}  # z zb
    re_z2 = {(0, 2, 0, 0): Q(1, 2), (0, 0, 2, 0): Q(1, 2)}
    assert is_pluriharmonic_on_graph(re_z2, ring, [phi])
    assert is_pluriharmonic_on_graph(phi, ring, [phi])  # Im w on the graph
    u_phi = {(0, 1, 1, 1): Q(1)}  # u z zb = Im(w^2)/2
    assert is_pluriharmonic_on_graph(u_phi, ring, [phi])
    zzb_re_z = {(0, 2, 1, 0): Q(1, 2), (0, 1, 2, 0): Q(1, 2)}
    test = is_pluriharmonic_on_graph(zzb_re_z, ring, [phi])
    assert not test and test.residual
