import numpy as np
import pytest
from scipy.integrate import dblquad

from ssie.quadrature import (SingularScheme, classify_pair, integrate_pair, regular_rule)

REF = np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0]])


def moment(i, j):
    """int_{ref} x^i y^j = i! j! / (i + j + 2)!"""
    from math import factorial
    return factorial(i) * factorial(j) / factorial(i + j + 2)


def rule_integral(rule, f):
    x = rule.map(REF)
    return 0.5 * np.sum(rule.weights * f(x[:, 0], x[:, 1]))


def test_centroid_rule():
    r = regular_rule(1)
    assert len(r) == 1
    assert np.allclose(r.points, 1 / 3) and r.weights[0] == pytest.approx(1.0)


@pytest.mark.parametrize("order", range(1, 21))
def test_rule_is_exact(order):
    r = regular_rule(order)
    assert abs(r.weights.sum() - 1) < 1e-14
    assert np.all(r.points >= -1e-15) and np.all(np.abs(r.points.sum(1) - 1) < 1e-14)
    for i in range(order + 1):
        j = order - i
        got = rule_integral(r, lambda x, y: x ** i * y ** j)
        assert got == pytest.approx(moment(i, j), rel=1e-12, abs=1e-15)


def test_x_squared_order3():
    # the reference triangle here has area 1/2; scaled to unit area the moment is 1/12
    assert 2 * rule_integral(regular_rule(3), lambda x, y: x ** 2) == pytest.approx(1 / 6)
    assert rule_integral(regular_rule(3), lambda x, y: x ** 2) == pytest.approx(1 / 12)


def test_unsupported_order():
    with pytest.raises(ValueError):
        regular_rule(0)
    with pytest.raises(ValueError):
        regular_rule(21)


def _in_plane_potential(T, x):
    """int_T 1/|x - y| dy for x in the plane of T (closed form, edge sum)."""
    n = np.cross(T[1] - T[0], T[2] - T[0])
    n /= np.linalg.norm(n)
    s = 0.0
    for i in range(3):
        a, b = T[i], T[(i + 1) % 3]
        e = (b - a) / np.linalg.norm(b - a)
        d = np.dot(a - x, np.cross(e, n))
        if abs(d) < 1e-300:
            continue
        ta, tb = np.dot(a - x, e), np.dot(b - x, e)
        s += d * np.log((tb + np.linalg.norm(b - x)) / (ta + np.linalg.norm(a - x)))
    return s


def test_self_term_against_semi_analytic():
    T = np.array([[0, 0, 0], [1.0, 0, 0], [0.3, 0.8, 0]])
    A2 = np.linalg.norm(np.cross(T[1] - T[0], T[2] - T[0]))
    ref, _ = dblquad(lambda u, v: A2 * _in_plane_potential(T, T[0] + v * (T[1] - T[0])
                                                           + u * (T[2] - T[0])),
                     0, 1, 0, lambda v: 1 - v, epsabs=1e-13, epsrel=1e-12)
    k = lambda x, y: 1.0 / (4 * np.pi * np.linalg.norm(x - y, axis=1))  # noqa: E731
    got = integrate_pair(T, T, k)
    assert abs(got / (ref / (4 * np.pi)) - 1) < 1e-6


def test_separated_constant_kernel():
    T1 = REF
    T2 = REF + [5.0, 0, 0]
    got = integrate_pair(T1, T2, lambda x, y: np.ones(len(x)))
    assert got == pytest.approx(0.25, abs=1e-14)


def test_classification():
    T = np.array([[0, 0, 0], [1.0, 0, 0], [0, 1, 0]])
    assert classify_pair(T, T)[0] == "identical"
    assert classify_pair(T, np.array([[1.0, 0, 0], [0, 1, 0], [1, 1, 0.2]]))[0] == "edge"
    assert classify_pair(T, np.array([[1.0, 0, 0], [2, 0, 0], [2, 1, 0.3]]))[0] == "vertex"
    assert classify_pair(T, T + 3.0)[0] == "none"


@pytest.mark.parametrize("other", [
    np.array([[1.0, 0, 0], [0, 1, 0], [1, 1, 0.2]]),     # shared edge
    np.array([[1.0, 0, 0], [2, 0, 0], [2, 1, 0.3]]),     # shared vertex
    np.array([[0, 0, 0], [1.0, 0, 0], [0, 1, 0]]),       # identical
])
def test_singular_self_convergence(other):
    T = np.array([[0, 0, 0], [1.0, 0, 0], [0, 1, 0]])
    k = lambda x, y: 1.0 / np.linalg.norm(x - y, axis=1)  # noqa: E731
    vals = [integrate_pair(T, other, k, SingularScheme(order=o)) for o in (4, 8, 12)]
    assert abs(vals[2] - vals[1]) < 1e-2 * abs(vals[1] - vals[0])
    assert abs(vals[2] - vals[1]) < 1e-6 * abs(vals[2])


def test_vertex_pair_order_doubling():
    T1 = np.array([[0, 0, 0], [1.0, 0, 0], [0, 1, 0]])
    T2 = np.array([[0, 0, 0], [-1.0, 0, 0.2], [0, -1, 0.1]])
    k = lambda x, y: 1.0 / (4 * np.pi * np.linalg.norm(x - y, axis=1))  # noqa: E731
    a = integrate_pair(T1, T2, k, SingularScheme(order=8))
    b = integrate_pair(T1, T2, k, SingularScheme(order=16))
    assert abs(a - b) < 1e-8 * abs(b)


def test_kernel_symmetry():
    T1 = np.array([[0, 0, 0], [1.0, 0, 0], [0, 1, 0]])
    T2 = np.array([[1.0, 0, 0], [0, 1, 0], [1, 1, 0.2]])
    kap = 1.3
    k = lambda x, y: np.exp(1j * kap * np.linalg.norm(x - y, axis=1)) / np.linalg.norm(x - y, axis=1)  # noqa: E731,E501
    # touching pairs are symmetric up to the quadrature error of the scheme
    hi = SingularScheme(order=12)
    assert integrate_pair(T1, T2, k, hi) == pytest.approx(integrate_pair(T2, T1, k, hi), rel=1e-10)
    T3 = T1 + [0.2, 2.5, 0.1]
    assert integrate_pair(T1, T3, k) == pytest.approx(integrate_pair(T3, T1, k), rel=1e-12)


def test_duffy_agrees_with_sauter_schwab():
    T = np.array([[0, 0, 0], [1.0, 0, 0], [0.3, 0.8, 0]])
    k = lambda x, y: 1.0 / np.linalg.norm(x - y, axis=1)  # noqa: E731
    ss = integrate_pair(T, T, k, SingularScheme(order=10))
    du = integrate_pair(T, T, k, SingularScheme("duffy", 16))
    assert du == pytest.approx(ss, rel=2e-3)


def test_bad_scheme():
    with pytest.raises(ValueError):
        SingularScheme("magic")
    with pytest.raises(ValueError):
        SingularScheme(order=0)
