import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricroots.lattice import (
    determinant,
    lattice_generates,
    matmul,
    primitive_vector,
    rank,
    smith_normal_form,
)


def check_snf(A):
    d = smith_normal_form(A)
    assert matmul(matmul(d.U, A), d.V) == d.S
    assert abs(determinant(d.U)) == 1
    assert abs(determinant(d.V)) == 1
    m, c = len(A), len(A[0])
    for i in range(m):
        for j in range(c):
            if i != j or i >= d.rank:
                assert d.S[i][j] == 0
    f = d.invariant_factors
    assert all(x > 0 for x in f)
    assert all(f[i + 1] % f[i] == 0 for i in range(len(f) - 1))
    assert d.rank == rank(A)
    return d


def test_snf_small_example():
    d = check_snf([[2, 4], [6, 8]])
    assert d.invariant_factors == (2, 4)


def test_snf_identity_and_zero():
    assert smith_normal_form([[1, 0, 0], [0, 1, 0], [0, 0, 1]]).invariant_factors == (1, 1, 1)
    d = smith_normal_form([[0, 0], [0, 0]])
    assert d.rank == 0 and d.invariant_factors == ()


def test_snf_torsion_example():
    # Z^2 / <(2, 0), (0, 3)> is cyclic of order 6
    d = check_snf([[2, 0], [0, 3]])
    assert d.invariant_factors == (1, 6)


def test_snf_rejects_empty():
    with pytest.raises(ValueError):
        smith_normal_form([])


def test_snf_of_transposed_ray_matrix():
    F = [[1, 0, -1, 0], [0, 1, 2, -1]]
    d = check_snf(np.array(F).T.tolist())
    assert d.invariant_factors == (1, 1)


def test_snf_big_entries_stay_exact():
    A = [[10**30 + 1, 3], [7, 10**25]]
    check_snf(A)


matrices = st.integers(1, 6).flatmap(
    lambda m: st.integers(1, 6).flatmap(
        lambda c: st.lists(
            st.lists(st.integers(-20, 20), min_size=c, max_size=c), min_size=m, max_size=m
        )
    )
)


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_snf_property(A):
    check_snf(A)


def test_determinant_against_numpy():
    rng = np.random.default_rng(1)
    for _ in range(50):
        A = rng.integers(-5, 6, size=(4, 4))
        assert determinant(A) == round(np.linalg.det(A))


def test_determinant_needs_square():
    with pytest.raises(ValueError):
        determinant([[1, 2, 3], [4, 5, 6]])


def test_primitive_vector():
    assert primitive_vector((4, -6, 2)) == (2, -3, 1)
    assert primitive_vector((0, -3)) == (0, -1)
    with pytest.raises(ValueError, match="degenerate"):
        primitive_vector((0, 0, 0))


def test_lattice_generates():
    assert lattice_generates([[1, 0], [0, 1]], 2)
    assert not lattice_generates([[2, 0], [0, 1]], 2)
    assert lattice_generates([[2, 0], [3, 0], [0, 1]], 2)
    assert not lattice_generates([[1, 1]], 2)
    with pytest.raises(ValueError):
        lattice_generates([[1, 2, 3]], 2)
