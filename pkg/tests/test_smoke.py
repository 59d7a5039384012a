"""Seconds-scale checks of the search layer on y^2 = x^5 - x + 1 over F_7."""
import time

import pytest

from x1mn.funcfield.curve import PlaneCurveFq
from x1mn.funcfield.search import BudgetExceeded, gonality_search, verify_certificate, wdr_count

pytestmark = pytest.mark.criterion("A4")


@pytest.fixture(scope="module")
def C():
    return PlaneCurveFq({(0, 2): 1, (5, 0): -1, (1, 0): 1, (0, 0): -1}, 7)


def test_genus_and_point_counts(C):
    assert C.genus() == 2
    assert C.zeta_counts(3) == [7, 49, 322]


def test_hyperelliptic_gonality(C):
    t0 = time.time()
    none = gonality_search(C, 1)
    assert not none.found
    assert verify_certificate(C, none.certificate)["ok"]
    two = gonality_search(C, 2)
    assert two.found and two.degree == 2
    three = gonality_search(C, 3)
    assert three.found and three.degree <= 3
    assert time.time() - t0 < 30


def _jacobian_order(C):
    # L(T) = 1 - s1 T + e2 T^2 - q s1 T^3 + q^2 T^4 for genus 2, #J = L(1)
    q = C.q
    N1, N2 = C.zeta_counts(2)
    s1 = q + 1 - N1
    s2 = q * q + 1 - N2
    e2 = (s1 * s1 - s2) // 2
    return 1 - s1 + e2 - q * s1 + q * q


def test_wdr_counts(C):
    h = _jacobian_order(C)
    assert h == 42
    # W_d fills Pic^d from d = g on
    assert [wdr_count(C, d, 0) for d in range(4)] == [1, C.zeta_counts(1)[0], h, h]
    # g^1_2 is unique, so W^1_2 has one point; W^1_3 is all of Pic^3
    assert [wdr_count(C, d, 1) for d in range(5)] == [0, 0, 1, h, h]


def test_exact_degree_three(C):
    res = gonality_search(C, 3, exact=True)
    assert res.found and res.degree == 3


def test_budget_is_enforced(C):
    with pytest.raises(BudgetExceeded):
        gonality_search(C, 3, budget=1, exact=True)
