import numpy as np
import pytest

from iwasawa_k1.configuration_utils import load_config, set_config
from iwasawa_k1.exactnum import Residue
from iwasawa_k1.linalg import (
    berkowitz_charpoly,
    berkowitz_det,
    coefficient_dtype,
    cyclic_summand_count,
    elementary_divisor_valuations,
    howell_form,
    kernel_mod_pN,
    mat_mul,
    row_basis_mod_p,
    smith_normal_form,
)


def test_smith_normal_form():
    M = [[2, 4, 4], [-6, 6, 12], [10, -4, -16]]
    U, S, V, U_inv = smith_normal_form(M)
    assert mat_mul(mat_mul(U, M), V) == S
    assert [S[t][t] for t in range(3)] == [2, 6, 12]
    assert all(S[s][t] == 0 for s in range(3) for t in range(3) if s != t)
    assert mat_mul(U, U_inv) == [[int(s == t) for t in range(3)] for s in range(3)]


def test_smith_normal_form_of_a_relation_matrix():
    # Z/9 modulo (4 - 1): the quotient is Z/3
    U, S, V, _ = smith_normal_form([[9, 3]])
    assert S == [[3, 0]]


def test_elementary_divisor_valuations():
    M = [[2, 4, 4], [-6, 6, 12], [10, -4, -16]]
    assert elementary_divisor_valuations(M, 2) == [1, 1, 2]
    assert elementary_divisor_valuations(M, 3) == [0, 1, 1]
    assert elementary_divisor_valuations([[0, 0]], 3) == []


def test_cyclic_summands_differ_from_howell_pivots():
    # the Howell form of (3, 1) modulo 9 also holds (0, 3)
    generators = np.array([[3, 1]], dtype=object)
    assert len(howell_form(generators, 3, 2).pivots) == 2
    assert cyclic_summand_count(generators, 3, 2) == 1
    assert cyclic_summand_count(np.array([[9, 0], [0, 3]], dtype=object), 3, 2) == 1
    assert cyclic_summand_count(np.zeros((0, 2), dtype=object), 3, 2) == 0


def test_howell_form_membership_and_length():
    generators = np.array([[3, 0], [0, 1], [1, 3]], dtype=object)
    basis = howell_form(generators, 3, 2)
    assert basis.length == 4
    assert basis.contains(np.array([5, 7]))

    sub = howell_form(np.array([[3, 0]], dtype=object), 3, 2)
    assert sub.length == 1
    assert sub.contains(np.array([6, 0]))
    assert not sub.contains(np.array([1, 0]))
    assert sub.issubset(basis)
    assert not basis.issubset(sub)


def test_howell_solve_returns_a_witness():
    generators = np.array([[3, 6, 0], [0, 3, 3]], dtype=object)
    basis = howell_form(generators, 3, 3)
    target = np.array([6, 21, 9], dtype=object)
    w = basis.solve(target)
    assert w is not None
    assert ((w.astype(object).dot(generators) - target) % 27 == 0).all()
    assert basis.solve(np.array([1, 0, 0])) is None


def test_same_module_ignores_generator_choice():
    a = howell_form(np.array([[1, 1], [0, 3]], dtype=object), 3, 2)
    b = howell_form(np.array([[1, 4], [2, 2]], dtype=object), 3, 2)
    assert a.same_module(b)


def test_kernel_mod_pN():
    matrix = np.array([[1, 2], [2, 4], [0, 9]], dtype=object)
    kernel = kernel_mod_pN(matrix, 3, 2)
    for w in kernel:
        assert (w.astype(object).dot(matrix) % 9 == 0).all()
    # (2, -1, 0) is a relation
    relations = howell_form(kernel, 3, 2)
    assert relations.contains(np.array([2, 8, 0]))
    assert relations.contains(np.array([0, 0, 1]))


def test_berkowitz_det_over_integers():
    M = [[2, -1, 0], [-1, 2, -1], [0, -1, 2]]
    assert berkowitz_det(M, 1) == 4
    assert berkowitz_charpoly([[1, 2], [3, 4]], 1) == [1, -5, -2]
    assert berkowitz_det([], 1) == 1


def test_berkowitz_det_over_residues():
    one = Residue(1, 5, 2)
    M = [[Residue(3, 5, 2), Residue(1, 5, 2)], [Residue(7, 5, 2), Residue(4, 5, 2)]]
    assert berkowitz_det(M, one).value == (3 * 4 - 7) % 25


def test_row_basis_mod_p():
    rows = np.array([[1, 2, 0], [2, 4, 0], [0, 1, 1]])
    basis = row_basis_mod_p(rows, 3)
    assert basis.shape == (2, 3)
    assert basis.tolist() == [[1, 0, 1], [0, 1, 1]]
    assert row_basis_mod_p(np.zeros((2, 3), dtype=np.int64), 3).shape == (0, 3)


def test_coefficient_dtype_follows_config():
    assert coefficient_dtype(3**4) == np.int64
    assert coefficient_dtype(3**40) == object
    set_config(load_config(overrides=["precision.max_modulus_bits=4"]))
    assert coefficient_dtype(3**4) == object


@pytest.mark.parametrize("p,N", [(3, 1), (5, 2)])
def test_howell_full_module(p, N):
    basis = howell_form(np.eye(3, dtype=object), p, N)
    assert basis.length == 3 * N
    assert len(basis.kernel) == 0
