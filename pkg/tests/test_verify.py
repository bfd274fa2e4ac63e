import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from tensorncp.generate import random_symmetric
from tensorncp.solver import ProblemInstance
from tensorncp.tensor_core import Tensor, identity_tensor
from tensorncp.verify import (
    complementarity_residual,
    feasibility,
    feasibility_probe,
    kkt_check,
    theorem2_condition,
)

I4 = identity_tensor(4, 2)
P_neg = ProblemInstance.ncp(I4, [-1, -1])


def test_feasibility_examples():
    assert feasibility(ProblemInstance.ncp(I4, [1, 1]), [0, 0])
    assert not feasibility(P_neg, [0, 0])
    assert feasibility(P_neg, [2, 2])
    np.testing.assert_array_equal(P_neg.F([2, 2]), [7, 7])
    with pytest.raises(ValueError):
        feasibility(P_neg, [1, 2, 3])


def test_residual_examples():
    assert complementarity_residual(P_neg, [1, 1]) == 0.0
    # min-part: min(2, 7) = 2; gap: 2*7*2 / (1 + sqrt 2)
    expected = max(2.0, 28.0 / (1.0 + np.sqrt(2.0)))
    assert complementarity_residual(P_neg, [2, 2]) == pytest.approx(expected, rel=1e-15)
    assert complementarity_residual(ProblemInstance.ncp(I4, [1, 3]), [0, 0]) == 0.0


def test_residual_zero_iff_exact_solution():
    rng = np.random.default_rng(0)
    for _ in range(200):
        x = np.where(rng.random(2) < 0.3, 0.0, rng.uniform(0, 2, 2))
        r = complementarity_residual(P_neg, x)
        exact = feasibility(P_neg, x, 0.0) and x @ P_neg.F(x) == 0
        assert (r == 0) == exact


def test_kkt_self_multiplier_example():
    cert = kkt_check(P_neg, [1, 1], [1, 1])
    assert cert.passed
    np.testing.assert_array_equal(cert.stationarity, [0, 0])
    assert cert.ineq7_holds


def test_kkt_zero_multiplier_fails():
    cert = kkt_check(P_neg, [1, 1], [0, 0])
    np.testing.assert_array_equal(cert.stationarity, [3, 3])
    assert cert.stationarity_min >= 0 and cert.u_comp == 0
    assert cert.stationarity_comp == 6
    assert not cert.passed


def test_kkt_rejects_gncp_and_shape():
    G = ProblemInstance.gncp([I4, identity_tensor(2, 2)], [-2, -2])
    with pytest.raises(ValueError):
        kkt_check(G, [1, 1], [1, 1])
    with pytest.raises(ValueError):
        kkt_check(P_neg, [1, 1, 1], [1, 1])


@settings(max_examples=200, deadline=None)
@given(
    arrays(float, (3,) * 4, elements=st.floats(-1, 1)),
    arrays(float, (3,), elements=st.floats(-5, 5)),
    arrays(float, (3,), elements=st.floats(-5, 5)),
)
def test_kkt_split_summands_add_up(data, x, u):
    P = ProblemInstance.ncp(Tensor.from_array(data), [1.0, -1.0, 0.5])
    cert = kkt_check(P, x, u)
    np.testing.assert_allclose(cert.ineq8 + cert.ineq9, cert.ineq7, rtol=1e-12, atol=1e-12)


def test_self_multiplier_collapses_to_ncp_conditions():
    rng = np.random.default_rng(1)
    A = random_symmetric(4, 3, rng)
    P = ProblemInstance.ncp(A, rng.uniform(-1, 1, 3))
    for _ in range(50):
        x = rng.uniform(0, 2, 3)
        cert = kkt_check(P, x, x)
        np.testing.assert_allclose(cert.stationarity, P.F(x), atol=1e-12)
        assert cert.stationarity_comp == pytest.approx(x @ P.F(x), abs=1e-12)


def test_positive_support_condition_examples():
    assert theorem2_condition(P_neg, [1, 1])
    assert not theorem2_condition(P_neg, [1, 0])
    with pytest.raises(ValueError):
        theorem2_condition(P_neg, [0, 0])


def test_feasibility_probe_examples():
    x = feasibility_probe(P_neg)
    assert x is not None and feasibility(P_neg, x) and np.all(x >= 1)
    np.testing.assert_array_equal(feasibility_probe(ProblemInstance.ncp(I4, [0.5, 2])), [0, 0])
    rng = np.random.default_rng(3)
    A = random_symmetric(4, 3, rng, 0.1, 1.0)
    P = ProblemInstance.ncp(A, [-50.0, 3.0, -7.0])
    x = feasibility_probe(P)
    assert x is not None and feasibility(P, x)


def test_feasibility_probe_gives_up():
    assert feasibility_probe(ProblemInstance.ncp(-1.0 * I4, [-1, -1]), budget=50) is None
