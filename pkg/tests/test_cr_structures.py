from __future__ import annotations

import pytest

from crrigidity.cr_structures import (
    ComplexStructure,
    cr_identity_defects,
    free_cr_algebra,
    is_totally_nondegenerate_symbol,
    standard_complex_structure,
)
from crrigidity.exact_linalg import ONE, Matrix
from crrigidity.free_lie import free_nilpotent_algebra
from crrigidity.graded_lie import GradedLieAlgebra, check_axioms, heisenberg


@pytest.mark.parametrize("n", [1, 2, 3])
def test_low_degree_dimensions(n):
    F = free_cr_algebra(n, 3)
    assert F.k[:3] == [2 * n, n * n, n ** 3 + n * n]


@pytest.mark.parametrize(
    "n,rho,dims",
    [(1, 6, [2, 1, 2, 3, 6, 9]), (2, 5, [4, 4, 12, 31, 92]), (3, 4, [6, 9, 36, 132])],
)
def test_dimensions_frozen(n, rho, dims):
    # frozen from an independent run of the saturated-ideal construction
    assert free_cr_algebra(n, rho).k == dims


def test_n1_ideal_is_trivial():
    F = free_cr_algebra(1, 5)
    a, _ = free_nilpotent_algebra(2, 5)
    assert F.k == list(a.dims)


@pytest.mark.parametrize("n,rho", [(1, 4), (2, 3), (3, 3)])
def test_quotient_is_lie_and_satisfies_cr_identity(n, rho):
    F = free_cr_algebra(n, rho)
    rep = check_axioms(F.algebra)
    assert rep.is_lie and rep.is_fundamental and rep.is_nondegenerate
    assert cr_identity_defects(F) == []


def test_invalid_complex_structure():
    with pytest.raises(ValueError):
        ComplexStructure(Matrix.from_dense([[1, 0], [0, 1]]))


def test_standard_J_squares_to_minus_one():
    J = standard_complex_structure(2)
    for i in range(4):
        v = J.apply(J.image(i))
        assert v == {i: -ONE}


def test_heisenberg_is_totally_nondegenerate():
    assert is_totally_nondegenerate_symbol(heisenberg())


def test_rank2_length3_truncation_is_free_cr():
    # dims [2,1,1]: the length-2 truncation is the free CR algebra [2,1]
    a = GradedLieAlgebra(
        [-1, -2, -3], [2, 1, 1], {(0, 1): {2: ONE}, (0, 2): {3: ONE}}
    )
    rep = is_totally_nondegenerate_symbol(a)
    assert rep.totally_nondegenerate and not rep.full_free


def test_rank2_length4_with_small_degree3_is_not():
    a = GradedLieAlgebra(
        [-1, -2, -3, -4], [2, 1, 1, 1], {(0, 1): {2: ONE}, (0, 2): {3: ONE}, (0, 3): {4: ONE}}
    )
    assert check_axioms(a).is_lie
    rep = is_totally_nondegenerate_symbol(a)
    assert not rep.totally_nondegenerate
    assert rep.truncated_dims == [2, 1, 1] and rep.expected_dims == [2, 1, 2]


def test_cr_identity_violation_detected():
    # n = 2 abelian-in-degree-2 algebra where [Jx, Jy] != [x, y]
    a, _ = free_nilpotent_algebra(4, 2)
    rep = is_totally_nondegenerate_symbol(a)
    assert not rep.cr_identity and not rep
