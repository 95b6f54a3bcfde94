"""Quadrature on triangles and triangle pairs.

Regular rules are given in barycentric coordinates with weights summing to
one, so ``integral = area * sum(w * f)``.

Singular pairs (identical, edge-sharing and vertex-sharing triangles) use
the Sauter-Schwab coordinate transforms: a four-dimensional cube is split
into regions on each of which the Jacobian cancels the ``1/|x - y|``
singularity, and a tensor Gauss-Legendre rule is applied.  Both triangles
are parametrised over the reference triangle
``{0 <= t <= s <= 1}`` by ``chi(s, t) = p0 + s (p1 - p0) + t (p2 - p1)``,
which has Jacobian ``2 A``.  Shared vertices must be listed first and a
shared edge must be traversed ``p0 -> p1`` in both triangles.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

__all__ = ["QuadratureRule", "SingularScheme", "regular_rule", "singular_rule",
           "symmetric_singular_rule",
           "classify_pair", "integrate_pair", "DEFAULT_REGULAR_ORDER",
           "DEFAULT_SINGULAR_ORDER"]

DEFAULT_REGULAR_ORDER = 4
DEFAULT_SINGULAR_ORDER = 5


@dataclass(frozen=True)
class QuadratureRule:
    """Rule on the reference triangle.

    Attributes
    ----------
    points : (n, 3) array
        Barycentric coordinates.
    weights : (n,) array
        Positive weights summing to one.
    degree : int
        Polynomial degree integrated exactly.
    """

    points: np.ndarray
    weights: np.ndarray
    degree: int

    def __len__(self):
        return len(self.weights)

    def map(self, corners):
        """Physical points for a (3, 3) array of corners."""
        return self.points @ corners


@dataclass(frozen=True)
class SingularScheme:
    """How touching triangle pairs are integrated.

    ``kind`` is ``"sauter-schwab"`` (default) or ``"duffy"``; ``order`` is
    the number of Gauss points per cube dimension.
    """

    kind: str = "sauter-schwab"
    order: int = DEFAULT_SINGULAR_ORDER

    def __post_init__(self):
        if self.kind not in ("sauter-schwab", "duffy"):
            raise ValueError("unknown singular scheme %r" % self.kind)
        if self.order < 1:
            raise ValueError("singular order must be >= 1")


def _sym3(a, w):
    """Orbit of (a, a, 1-2a) under permutation."""
    b = 1.0 - 2.0 * a
    return [[a, a, b], [a, b, a], [b, a, a]], [w] * 3


@lru_cache(maxsize=None)
def regular_rule(order):
    """Return a rule exact for polynomials of total degree ``order``.

    Orders 1, 2, 4 and 5 use classical symmetric rules (centroid,
    three-point, six-point and the seven-point Radon rule).  Other orders
    use a collapsed Gauss-Jacobi/Gauss-Legendre product rule with
    ``ceil((order + 1) / 2)**2`` points.  All weights are positive and all
    points interior.
    """
    order = int(order)
    if not 1 <= order <= 20:
        raise ValueError("unsupported quadrature order %d (allowed 1..20)" % order)
    if order == 1:
        pts, wts = [[1 / 3, 1 / 3, 1 / 3]], [1.0]
    elif order == 2:
        pts, wts = _sym3(1 / 6, 1 / 3)
    elif order == 4:
        p1, w1 = _sym3(0.445948490915965, 0.223381589678011)
        p2, w2 = _sym3(0.091576213509771, 0.109951743655322)
        pts, wts = p1 + p2, w1 + w2
    elif order == 5:
        r = 15 ** 0.5
        p1, w1 = _sym3((6 - r) / 21, (155 - r) / 1200)
        p2, w2 = _sym3((6 + r) / 21, (155 + r) / 1200)
        pts, wts = [[1 / 3, 1 / 3, 1 / 3]] + p1 + p2, [9 / 40] + w1 + w2
    else:
        return _collapsed(order)
    w = np.asarray(wts, dtype=float)
    return QuadratureRule(np.asarray(pts, dtype=float), w / w.sum(), order)


def _collapsed(order):
    n = (order + 2) // 2
    # u in [0, 1] with weight (1 - u): Gauss-Jacobi alpha=1 on [-1, 1]
    xu, wu = roots_jacobi(n, 1.0, 0.0)
    u = (xu + 1) / 2
    wu = wu / 4.0
    xv, wv = np.polynomial.legendre.leggauss(n)
    v = (xv + 1) / 2
    wv = wv / 2
    U, V = np.meshgrid(u, v, indexing="ij")
    W = np.outer(wu, wv)
    x = U.ravel()
    y = ((1 - U) * V).ravel()
    pts = np.stack([1 - x - y, x, y], axis=1)
    w = 2.0 * W.ravel()
    return QuadratureRule(pts, w / w.sum(), order)


def _gauss01(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1) / 2, w / 2


@lru_cache(maxsize=None)
def singular_rule(case, order=DEFAULT_SINGULAR_ORDER):
    """Sauter-Schwab points for a touching pair.

    Parameters
    ----------
    case : {"identical", "edge", "vertex"}
    order : int
        Gauss points per cube dimension.

    Returns
    -------
    bx, by : (n, 3) arrays
        Barycentric coordinates of the paired points on each triangle.
    w : (n,) array
        Weights; the pair integral is ``(2 A_x)(2 A_y) * sum(w * k)``.
    """
    g, gw = _gauss01(order)
    xi, e1, e2, e3 = (a.ravel() for a in np.meshgrid(g, g, g, g, indexing="ij"))
    W = np.einsum("i,j,k,l->ijkl", gw, gw, gw, gw).ravel()
    X, Y, J = [], [], []
    if case == "identical":
        jac = xi ** 3 * e1 ** 2 * e2
        a = (xi, xi * (1 - e1 + e1 * e2))
        b = (xi * (1 - e1 * e2 * e3), xi * (1 - e1))
        c = (xi, xi * e1 * (1 - e2 + e2 * e3))
        d = (xi * (1 - e1 * e2), xi * e1 * (1 - e2))
        e = (xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3))
        f = (xi, xi * e1 * (1 - e2))
        for x, y in ((a, b), (b, a), (c, d), (d, c), (e, f), (f, e)):
            X.append(x)
            Y.append(y)
            J.append(jac)
    elif case == "edge":
        regions = [
            ((xi, -xi * e1 * e2, xi * e1 * (1 - e2), xi * e1 * e3), xi ** 3 * e1 ** 2),
            ((xi, -xi * e1 * e2 * e3, xi * e1 * e2 * (1 - e3), xi * e1), xi ** 3 * e1 ** 2 * e2),
            ((xi * (1 - e1 * e2), xi * e1 * e2, xi * e1 * e2 * e3, xi * e1 * (1 - e2)),
             xi ** 3 * e1 ** 2 * e2),
            ((xi * (1 - e1 * e2 * e3), xi * e1 * e2 * e3, xi * e1, xi * e1 * e2 * (1 - e3)),
             xi ** 3 * e1 ** 2 * e2),
            ((xi * (1 - e1 * e2 * e3), xi * e1 * e2 * e3, xi * e1 * e2, xi * e1 * (1 - e2 * e3)),
             xi ** 3 * e1 ** 2 * e2),
        ]
        for w4, jac in regions:
            X.append((w4[0], w4[3]))
            Y.append((w4[0] + w4[1], w4[2]))
            J.append(jac)
    elif case == "vertex":
        jac = xi ** 3 * e2
        a = (xi, xi * e1)
        b = (xi * e2, xi * e2 * e3)
        X += [a, b]
        Y += [b, a]
        J += [jac, jac]
    else:
        raise ValueError("unknown singular case %r" % case)

    def bary(st):
        s, t = st
        return np.stack([1 - s, s - t, t], axis=1)

    bx = np.concatenate([bary(x) for x in X])
    by = np.concatenate([bary(y) for y in Y])
    w = np.concatenate([W * j for j in J])
    return bx, by, w


def symmetric_singular_rule(case, order=DEFAULT_SINGULAR_ORDER):
    """Like :func:`singular_rule`, but invariant under swapping the triangles.

    The identical and vertex rules already come in swapped pairs.  The edge
    rule is averaged over its images under ``x <-> y`` and under reversal of
    the shared edge, so the result does not depend on which triangle is
    called the test triangle or on the direction the shared edge is listed.
    Galerkin matrices built with it are exactly symmetric.
    """
    bx, by, w = singular_rule(case, order)
    if case != "edge":
        return bx, by, w
    flip = [1, 0, 2]
    xs = [bx, by, bx[:, flip], by[:, flip]]
    ys = [by, bx, by[:, flip], bx[:, flip]]
    return np.concatenate(xs), np.concatenate(ys), np.tile(w, 4) / 4.0


def classify_pair(t1, t2, tol=1e-12):
    """Shared-vertex classification of two triangles.

    Parameters
    ----------
    t1, t2 : (3, 3) arrays of corners

    Returns
    -------
    case : {"identical", "edge", "vertex", "none"}
    p1, p2 : tuples of int
        Vertex permutations putting shared vertices first (and a shared
        edge in the same direction).
    """
    t1 = np.asarray(t1, float)
    t2 = np.asarray(t2, float)
    scale = max(np.ptp(t1, axis=0).max(), np.ptp(t2, axis=0).max())
    d = np.linalg.norm(t1[:, None, :] - t2[None, :, :], axis=2) <= tol * scale
    pairs = [(i, j) for i in range(3) for j in range(3) if d[i, j]]
    n = len(pairs)
    if n == 3:
        perm2 = tuple(j for i in range(3) for j in range(3) if d[i, j])
        return "identical", (0, 1, 2), perm2
    if n == 2:
        (i0, j0), (i1, j1) = pairs
        i2 = 3 - i0 - i1
        j2 = 3 - j0 - j1
        return "edge", (i0, i1, i2), (j0, j1, j2)
    if n == 1:
        (i0, j0), = pairs
        return "vertex", (i0, (i0 + 1) % 3, (i0 + 2) % 3), (j0, (j0 + 1) % 3, (j0 + 2) % 3)
    return "none", (0, 1, 2), (0, 1, 2)


def _area(t):
    return 0.5 * np.linalg.norm(np.cross(t[1] - t[0], t[2] - t[0]))


def integrate_pair(t1, t2, kernel, scheme=SingularScheme(), rule=None):
    """Approximate ``int_{T1} int_{T2} k(x, y) dy dx``.

    Parameters
    ----------
    t1, t2 : (3, 3) arrays of corners
    kernel : callable
        Vectorised ``k(x, y)`` on ``(n, 3)`` point arrays.
    scheme : SingularScheme
        Used when the triangles share at least one vertex.
    rule : QuadratureRule, optional
        Regular rule for separated pairs (default order 4); raised to order
        10 when the pair distance is below half the mean diameter.
    """
    t1 = np.asarray(t1, float)
    t2 = np.asarray(t2, float)
    a1, a2 = _area(t1), _area(t2)
    case, p1, p2 = classify_pair(t1, t2)
    if case == "none":
        if rule is None:
            rule = regular_rule(DEFAULT_REGULAR_ORDER)
        diam = 0.5 * (np.ptp(t1, axis=0).max() + np.ptp(t2, axis=0).max())
        dist = np.linalg.norm(t1.mean(0) - t2.mean(0)) - diam
        if dist < 0.5 * diam:
            rule = regular_rule(max(rule.degree, 10))
        x = rule.map(t1)
        y = rule.map(t2)
        X = np.repeat(x, len(y), axis=0)
        Y = np.tile(y, (len(x), 1))
        w = np.outer(rule.weights, rule.weights).ravel()
        return a1 * a2 * np.sum(w * kernel(X, Y))
    if scheme.kind == "duffy":
        return _duffy_pair(t1, t2, kernel, scheme.order)
    q1 = t1[list(p1)]
    q2 = t2[list(p2)]
    bx, by, w = singular_rule(case, scheme.order)
    return 4.0 * a1 * a2 * np.sum(w * kernel(bx @ q1, by @ q2))


def _duffy_pair(t1, t2, kernel, order):
    """Outer Gauss rule on ``t1``; inner Duffy rule on ``t2`` split at the
    point of ``t2`` nearest to each outer node."""
    outer = regular_rule(min(2 * order, 20))
    g, gw = _gauss01(order)
    U, V = np.meshgrid(g, g, indexing="ij")
    WU = np.outer(gw, gw)
    a1 = _area(t1)
    total = 0.0
    for b, w in zip(outer.points, outer.weights):
        x = b @ t1
        c = _closest_point(t2, x)
        acc = 0.0
        for k in range(3):
            p, q = t2[(k + 1) % 3], t2[(k + 2) % 3]
            cr = np.cross(p - c, q - c)
            area = 0.5 * np.linalg.norm(cr)
            if area < 1e-300:
                continue
            # Duffy: apex c, y = c + u (p - c) + u v (q - p); jacobian 2 A u
            y = c + U.ravel()[:, None] * (p - c) + (U * V).ravel()[:, None] * (q - p)
            jac = 2.0 * area * U.ravel()
            acc += np.sum(WU.ravel() * jac * kernel(np.tile(x, (len(y), 1)), y))
        total += w * acc
    return a1 * total


def _closest_point(tri, x):
    """Closest point to ``x`` on a triangle (projection, clamped)."""
    a, b, c = tri
    n = np.cross(b - a, c - a)
    n /= np.linalg.norm(n)
    p = x - np.dot(x - a, n) * n
    m = np.array([b - a, c - a]).T
    st, *_ = np.linalg.lstsq(m, p - a, rcond=None)
    s, t = st
    if s >= 0 and t >= 0 and s + t <= 1:
        return p
    best, bd = None, np.inf
    for u, v in ((a, b), (b, c), (c, a)):
        e = v - u
        lam = np.clip(np.dot(p - u, e) / np.dot(e, e), 0.0, 1.0)
        q = u + lam * e
        d = np.linalg.norm(q - p)
        if d < bd:
            best, bd = q, d
    return best
