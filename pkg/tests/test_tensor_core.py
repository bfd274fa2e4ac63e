import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import brute_contract, brute_mode_matrix
from tensorncp.tensor_core import (
    DiagonalizableForm,
    Tensor,
    contract_power,
    diagonal_tensor,
    from_diagonalizable,
    identity_tensor,
    is_diagonal,
    is_symmetric,
    mode_k_matrix_product,
    mode_k_vector_product,
    new_dense,
    partial_symmetrize_tail,
    symmetrize,
)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@st.composite
def tensor_and_vector(draw, max_order=4, max_dim=3):
    m = draw(st.integers(2, max_order))
    n = draw(st.integers(1, max_dim))
    data = draw(arrays(float, (n,) * m, elements=finite))
    x = draw(arrays(float, (n,), elements=st.floats(-3, 3, allow_nan=False)))
    return Tensor.from_array(data), x


def rel_close(a, b, rtol, scale):
    return np.all(np.abs(np.asarray(a) - np.asarray(b)) <= rtol * (1 + scale))


def test_new_dense_identity_matrix():
    T = new_dense(2, 2, (1, 0, 0, 1))
    np.testing.assert_array_equal(T.data, np.eye(2))


def test_new_dense_identity_tensor_layout():
    entries = np.zeros(16)
    entries[0] = entries[15] = 1.0
    assert new_dense(4, 2, entries) == identity_tensor(4, 2)
    assert new_dense(4, 2, entries)[1, 1, 1, 1] == 1.0


def test_new_dense_lexicographic_first_index_slowest():
    T = new_dense(3, 2, range(8))
    assert T[0, 0, 1] == 1 and T[1, 0, 0] == 4


@pytest.mark.parametrize(
    "order,dim,entries",
    [(3, 2, [0] * 7), (2, 2, [1, 2, 3, np.nan]), (2, 2, [1, 2, np.inf, 0]), (0, 2, [1]), (2, 0, [])],
)
def test_new_dense_rejects(order, dim, entries):
    with pytest.raises(ValueError):
        new_dense(order, dim, entries)


def test_tensor_is_immutable():
    T = identity_tensor(2, 2)
    with pytest.raises(ValueError):
        T.data[0, 0] = 5


def test_identity_tensor_matrix_case():
    np.testing.assert_array_equal(identity_tensor(2, 3).data, np.eye(3))


def test_identity_tensor_nonzeros():
    I = identity_tensor(4, 2)
    assert np.count_nonzero(I.data) == 2 and I[0, 0, 0, 0] == I[1, 1, 1, 1] == 1


def test_identity_power_sum():
    assert contract_power(identity_tensor(4, 2), [1, 1], 4) == 2.0


def test_mode_matrix_identity_is_noop():
    rng = np.random.default_rng(0)
    A = Tensor.from_array(rng.standard_normal((3,) * 4))
    for k in range(4):
        assert mode_k_matrix_product(A, np.eye(3), k) == A


def test_mode_matrix_on_matrix():
    C = mode_k_matrix_product(identity_tensor(2, 2), [[2, 0], [0, 3]], 0)
    np.testing.assert_array_equal(C.data, np.diag([2.0, 3.0]))


def test_mode_matrix_identity_tensor_shear():
    B = np.array([[1.0, 1.0], [0.0, 1.0]])
    C = mode_k_matrix_product(identity_tensor(4, 2), B, 0)
    expected = brute_mode_matrix(identity_tensor(4, 2).data, B, 0)
    np.testing.assert_array_equal(C.data, expected)
    nonzero = {idx for idx in itertools.product(range(2), repeat=4) if C.data[idx] != 0}
    assert nonzero == {(0, 0, 0, 0), (0, 1, 1, 1), (1, 1, 1, 1)}
    assert all(C.data[i] == 1 for i in nonzero)


def test_mode_matrix_matches_brute_force_every_mode():
    rng = np.random.default_rng(1)
    A = Tensor.from_array(rng.standard_normal((3,) * 3))
    B = rng.standard_normal((3, 3))
    for k in range(3):
        np.testing.assert_allclose(mode_k_matrix_product(A, B, k).data, brute_mode_matrix(A.data, B, k), atol=1e-12)


def test_mode_matrix_errors():
    A = identity_tensor(3, 2)
    with pytest.raises(ValueError):
        mode_k_matrix_product(A, np.eye(2), 3)
    with pytest.raises(ValueError):
        mode_k_matrix_product(A, np.eye(3), 0)


def test_mode_vector_matrix_case():
    np.testing.assert_array_equal(mode_k_vector_product(identity_tensor(2, 2), [5, 7], 1).data, [5, 7])


def test_mode_vector_identity_tensor():
    C = mode_k_vector_product(identity_tensor(4, 2), [1, 2], 3)
    expected = np.zeros((2, 2, 2))
    expected[0, 0, 0], expected[1, 1, 1] = 1, 2
    np.testing.assert_array_equal(C.data, expected)
    np.testing.assert_array_equal(C.data, brute_contract(identity_tensor(4, 2).data, [1, 2], 1))


def test_mode_vector_shape_error():
    with pytest.raises(ValueError):
        mode_k_vector_product(identity_tensor(2, 2), [1, 2, 3], 0)


def test_contract_power_examples():
    I = identity_tensor(4, 2)
    assert contract_power(I, [1, 1], 4) == 2.0
    np.testing.assert_array_equal(contract_power(I, [2, 3], 3), [8, 27])
    np.testing.assert_array_equal(contract_power(I, [2, 3], 0), I.data)


def test_contract_power_diagonalizable_example():
    A = from_diagonalizable(DiagonalizableForm([1, 1], 2 * np.eye(2)), 4)
    assert contract_power(A, [1, 0], 4) == pytest.approx(16.0, rel=1e-14)


def test_contract_power_errors():
    with pytest.raises(ValueError):
        contract_power(identity_tensor(2, 2), [1, 1], 3)
    with pytest.raises(ValueError):
        contract_power(identity_tensor(2, 2), [1, 1, 1], 1)


@settings(max_examples=60, deadline=None)
@given(tensor_and_vector())
def test_contract_power_matches_brute_force(Ax):
    A, x = Ax
    for p in range(A.order + 1):
        np.testing.assert_allclose(contract_power(A, x, p), brute_contract(A.data, x, p), rtol=1e-10, atol=1e-9)


@settings(max_examples=100, deadline=None)
@given(tensor_and_vector(max_order=5))
def test_contraction_consistency(Ax):
    A, x = Ax
    m = A.order
    full = contract_power(A, x, m)
    vec = contract_power(A, x, m - 1)
    mat = np.atleast_2d(contract_power(A, x, m - 2))
    scale = np.sum(np.abs(A.data)) * (1 + np.max(np.abs(x))) ** m
    assert rel_close(full, x @ vec, 1e-12, scale)
    assert rel_close(vec, mat @ x, 1e-12, scale)


@settings(max_examples=100, deadline=None)
@given(tensor_and_vector(max_order=5), st.floats(0.01, 20))
def test_homogeneity(Ax, lam):
    A, x = Ax
    m = A.order
    lhs = contract_power(A, lam * x, m - 1)
    rhs = lam ** (m - 1) * contract_power(A, x, m - 1)
    scale = np.sum(np.abs(A.data)) * (lam * (1 + np.max(np.abs(x)))) ** (m - 1)
    assert rel_close(lhs, rhs, 1e-12, scale)


def test_is_symmetric_examples():
    assert is_symmetric(identity_tensor(4, 3))
    assert not is_symmetric(Tensor(2, 2, [0, 1, 0, 0]))


def test_symmetrize_examples():
    np.testing.assert_array_equal(symmetrize(Tensor(2, 2, [0, 2, 0, 0])).data, [[0, 1], [1, 0]])
    I = identity_tensor(4, 3)
    assert symmetrize(I) == I


@settings(max_examples=60, deadline=None)
@given(tensor_and_vector(max_order=4))
def test_symmetrize_properties(Ax):
    A, x = Ax
    S = symmetrize(A)
    assert is_symmetric(S, 0.0)
    assert symmetrize(S) == S
    scale = np.sum(np.abs(A.data)) * (1 + np.max(np.abs(x))) ** A.order
    assert rel_close(contract_power(S, x, A.order), contract_power(A, x, A.order), 1e-12, scale)


def test_partial_symmetrize_example():
    data = np.zeros((2, 2, 2))
    data[0, 0, 1] = 1.0
    T = partial_symmetrize_tail(Tensor.from_array(data))
    assert T[0, 0, 1] == T[0, 1, 0] == 0.5
    assert partial_symmetrize_tail(identity_tensor(4, 2)) == identity_tensor(4, 2)


@settings(max_examples=60, deadline=None)
@given(tensor_and_vector(max_order=4))
def test_partial_symmetrize_properties(Ax):
    A, x = Ax
    T = partial_symmetrize_tail(A)
    assert partial_symmetrize_tail(T) == T
    scale = np.sum(np.abs(A.data)) * (1 + np.max(np.abs(x))) ** A.order
    assert rel_close(contract_power(T, x, A.order - 1), contract_power(A, x, A.order - 1), 1e-12, scale)


def test_from_diagonalizable_examples():
    assert from_diagonalizable(DiagonalizableForm(np.ones(3), np.eye(3)), 4) == identity_tensor(4, 3)
    np.testing.assert_allclose(
        from_diagonalizable(DiagonalizableForm([1, 1], 2 * np.eye(2)), 4).data, 16 * identity_tensor(4, 2).data
    )


def test_from_diagonalizable_rejects_singular():
    with pytest.raises(ValueError):
        DiagonalizableForm([1, 1], [[1, 1], [1, 1]])


def test_diagonalizable_identity_and_symmetry():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = rng.integers(2, 5)
        form = DiagonalizableForm(rng.uniform(-2, 2, n), rng.standard_normal((n, n)))
        A = form.realize(4)
        assert is_symmetric(A)
        x = rng.standard_normal(n)
        direct = np.sum(form.diag * (form.basis.T @ x) ** 4)
        assert contract_power(A, x, 4) == pytest.approx(direct, rel=1e-10, abs=1e-10)


def test_is_diagonal_examples():
    assert is_diagonal(identity_tensor(4, 2))
    data = np.array(identity_tensor(4, 2).data)
    data[0, 1, 0, 0] = 1e-3
    A = Tensor.from_array(data)
    assert not is_diagonal(A, 1e-6)
    assert is_diagonal(A, 1e-2)
    assert is_diagonal(diagonal_tensor([3, -1], 3))
