"""Compiled kernels for dense Galerkin assembly.

The engine integrates, for every pair (test triangle ``t``, source
triangle ``s``), the three local interaction blocks

* ``V[k, j] = int_t int_s g(x, y) phi_k(x) . phi_j(y)``
* ``D      = int_t int_s g(x, y) div phi_k div phi_j``  (independent of k, j)
* ``M[k, j] = int_t int_s phi_k(x) . (grad_x g(x, y) x phi_j(y))``

for one of two kernels:

* static:  ``g = 1 / (4 pi r)``, with Sauter-Schwab quadrature on touching
  pairs and distance-graded regular rules elsewhere;
* smooth remainder: ``g = (exp(i k r) - 1) / (4 pi r)``, which is bounded
  with a bounded gradient, so regular rules suffice everywhere.

The full kernel is the sum of the two, so the static part (the only one
needing singular quadrature) is computed once per mesh.

A source triangle may carry "children" (its barycentric subdivision).  For
touching pairs the source is integrated child by child, and each child's
local block is mapped back to the parent shape functions by a restriction
matrix.  This lets a refined test mesh interact with a coarse source mesh.

Results for a block of test triangles are written row-wise into
``(n_test, 3, n_dof)`` arrays using the source local-to-global map.
"""

import math

import numba as nb
import numpy as np

INV4PI = 1.0 / (4.0 * math.pi)


@nb.njit(fastmath=True, cache=True, inline="always")
def _kernel(r, kr, ki, static):
    """Return (g, f) with grad_x g = f * (x - y)."""
    if static:
        g = INV4PI / r
        return complex(g, 0.0), complex(-g / (r * r), 0.0)
    if r == 0.0:
        return complex(-ki, kr) * INV4PI, complex(0.0, 0.0)
    z = complex(-ki * r, kr * r)         # i k r
    if abs(z) < 0.05:
        em1 = z * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z * (1.0 / 120.0 + z / 720.0)))))
        z2 = z * z
        num = z2 * (0.5 + z * (1.0 / 3.0 + z * (0.125 + z * (1.0 / 30.0 + z / 144.0))))
    else:
        b = kr * r
        if ki == 0.0:
            e = complex(math.cos(b), math.sin(b))
        else:
            ea = math.exp(-ki * r)
            e = complex(ea * math.cos(b), ea * math.sin(b))
        em1 = e - 1.0
        num = z * e - em1
    return em1 * (INV4PI / r), num * (INV4PI / (r * r * r))


@nb.njit(fastmath=True, cache=True, inline="always")
def _finish(mom, Pt, Ps, sc, want_m, V, M):
    """Turn accumulated moments into the 3x3 blocks.

    With ``u_k = x - P_k`` and ``v_j = y - Q_j``::

        sum w g u_k . v_j = Sxy - Sx.Q_j - P_k.Sy + (P_k.Q_j) S0
        sum w f u_k . ((x - y) x v_j) = Q_j.A - P_k.A + (Q_j x P_k).Bd

    where ``A = sum w f (x x y)`` and ``Bd = sum w f (x - y)``.
    """
    s0 = mom[0]
    sx0 = mom[1]
    sx1 = mom[2]
    sx2 = mom[3]
    sy0 = mom[4]
    sy1 = mom[5]
    sy2 = mom[6]
    sxy = mom[7]
    for k in range(3):
        pk0 = Pt[k, 0]
        pk1 = Pt[k, 1]
        pk2 = Pt[k, 2]
        rowk = sxy - (pk0 * sy0 + pk1 * sy1 + pk2 * sy2)
        for j in range(3):
            q0 = Ps[j, 0]
            q1 = Ps[j, 1]
            q2 = Ps[j, 2]
            V[k, j] += sc * (rowk - (sx0 * q0 + sx1 * q1 + sx2 * q2)
                             + (pk0 * q0 + pk1 * q1 + pk2 * q2) * s0)
    if want_m:
        a0 = mom[8]
        a1 = mom[9]
        a2 = mom[10]
        d0 = mom[11]
        d1 = mom[12]
        d2 = mom[13]
        for k in range(3):
            p0 = Pt[k, 0]
            p1 = Pt[k, 1]
            p2 = Pt[k, 2]
            rowk = p0 * a0 + p1 * a1 + p2 * a2
            for j in range(3):
                q0 = Ps[j, 0]
                q1 = Ps[j, 1]
                q2 = Ps[j, 2]
                c0 = q1 * p2 - q2 * p1
                c1 = q2 * p0 - q0 * p2
                c2 = q0 * p1 - q1 * p0
                M[k, j] += sc * (q0 * a0 + q1 * a1 + q2 * a2 - rowk
                                 + c0 * d0 + c1 * d1 + c2 * d2)


@nb.njit(fastmath=True, cache=True, inline="always")
def _accumulate(mom, x0, x1, x2, y0, y1, y2, g, f, want_m):
    mom[0] += g
    mom[1] += g * x0
    mom[2] += g * x1
    mom[3] += g * x2
    mom[4] += g * y0
    mom[5] += g * y1
    mom[6] += g * y2
    mom[7] += g * (x0 * y0 + x1 * y1 + x2 * y2)
    if want_m:
        mom[8] += f * (x1 * y2 - x2 * y1)
        mom[9] += f * (x2 * y0 - x0 * y2)
        mom[10] += f * (x0 * y1 - x1 * y0)
        mom[11] += f * (x0 - y0)
        mom[12] += f * (x1 - y1)
        mom[13] += f * (x2 - y2)


@nb.njit(fastmath=True, cache=True, inline="always")
def _load(Pt, Ps, P, Q):
    """Corners relative to the test centroid, copied into ``P`` and ``Q``."""
    for d in range(3):
        o = (Pt[0, d] + Pt[1, d] + Pt[2, d]) / 3.0
        for k in range(3):
            P[k, d] = Pt[k, d] - o
            Q[k, d] = Ps[k, d] - o


@nb.njit(fastmath=True, cache=True)
def _pair_regular(P, At, Q, As, rb, rw, ra, rs, re, kr, ki, static, want_m,
                  V, Dacc, M, ys, mom):
    """Accumulate one pair with tensor regular rules.

    V and M receive the shape-function normalisation ``1 / (4 At As)``
    times the measure ``At As``; Dacc receives the bare integral of g.
    ``P`` and ``Q`` hold corners relative to the test centroid (this
    limits cancellation in the moment formulas).  The test rule occupies
    rows ``ra:rs`` of ``rb``/``rw``, the source rule rows ``rs:re``.
    """
    ns = re - rs
    for q in range(ns):
        for d in range(3):
            ys[q, d] = rb[rs + q, 0] * Q[0, d] + rb[rs + q, 1] * Q[1, d] + rb[rs + q, 2] * Q[2, d]
    s0 = 0j
    sx0 = 0j
    sx1 = 0j
    sx2 = 0j
    sy0 = 0j
    sy1 = 0j
    sy2 = 0j
    sxy = 0j
    a0 = 0j
    a1 = 0j
    a2 = 0j
    d0 = 0j
    d1 = 0j
    d2 = 0j
    for p in range(ra, rs):
        x0 = rb[p, 0] * P[0, 0] + rb[p, 1] * P[1, 0] + rb[p, 2] * P[2, 0]
        x1 = rb[p, 0] * P[0, 1] + rb[p, 1] * P[1, 1] + rb[p, 2] * P[2, 1]
        x2 = rb[p, 0] * P[0, 2] + rb[p, 1] * P[1, 2] + rb[p, 2] * P[2, 2]
        wp = rw[p]
        g0 = 0j
        gy0 = 0j
        gy1 = 0j
        gy2 = 0j
        f0 = 0j
        fy0 = 0j
        fy1 = 0j
        fy2 = 0j
        for q in range(ns):
            y0 = ys[q, 0]
            y1 = ys[q, 1]
            y2 = ys[q, 2]
            dx = x0 - y0
            dy = x1 - y1
            dz = x2 - y2
            r = math.sqrt(dx * dx + dy * dy + dz * dz)
            g, f = _kernel(r, kr, ki, static)
            w = rw[rs + q]
            g = g * w
            g0 += g
            gy0 += g * y0
            gy1 += g * y1
            gy2 += g * y2
            if want_m:
                f = f * w
                f0 += f
                fy0 += f * y0
                fy1 += f * y1
                fy2 += f * y2
        # moments over x follow from the per-x partial sums
        s0 += wp * g0
        sx0 += wp * x0 * g0
        sx1 += wp * x1 * g0
        sx2 += wp * x2 * g0
        sy0 += wp * gy0
        sy1 += wp * gy1
        sy2 += wp * gy2
        sxy += wp * (x0 * gy0 + x1 * gy1 + x2 * gy2)
        if want_m:
            a0 += wp * (x1 * fy2 - x2 * fy1)
            a1 += wp * (x2 * fy0 - x0 * fy2)
            a2 += wp * (x0 * fy1 - x1 * fy0)
            d0 += wp * (x0 * f0 - fy0)
            d1 += wp * (x1 * f0 - fy1)
            d2 += wp * (x2 * f0 - fy2)
    mom[0] = s0
    mom[1] = sx0
    mom[2] = sx1
    mom[3] = sx2
    mom[4] = sy0
    mom[5] = sy1
    mom[6] = sy2
    mom[7] = sxy
    mom[8] = a0
    mom[9] = a1
    mom[10] = a2
    mom[11] = d0
    mom[12] = d1
    mom[13] = d2
    Dacc[0] += mom[0] * (At * As)
    _finish(mom, P, Q, 0.25, want_m, V, M)


@nb.njit(fastmath=True, cache=True)
def _pair_singular(P, At, Q, As, perm_t, perm_s, bx, by, w, qa, qe, want_m, V, Dacc, M, mom):
    """Static-kernel Sauter-Schwab integration of a touching pair.

    Uses rows ``qa:qe`` of the concatenated rule arrays.
    """
    for i in range(14):
        mom[i] = 0.0
    a0, a1, a2 = perm_t[0], perm_t[1], perm_t[2]
    b0, b1, b2 = perm_s[0], perm_s[1], perm_s[2]
    for q in range(qa, qe):
        x0 = bx[q, 0] * P[a0, 0] + bx[q, 1] * P[a1, 0] + bx[q, 2] * P[a2, 0]
        x1 = bx[q, 0] * P[a0, 1] + bx[q, 1] * P[a1, 1] + bx[q, 2] * P[a2, 1]
        x2 = bx[q, 0] * P[a0, 2] + bx[q, 1] * P[a1, 2] + bx[q, 2] * P[a2, 2]
        y0 = by[q, 0] * Q[b0, 0] + by[q, 1] * Q[b1, 0] + by[q, 2] * Q[b2, 0]
        y1 = by[q, 0] * Q[b0, 1] + by[q, 1] * Q[b1, 1] + by[q, 2] * Q[b2, 1]
        y2 = by[q, 0] * Q[b0, 2] + by[q, 1] * Q[b1, 2] + by[q, 2] * Q[b2, 2]
        dx = x0 - y0
        dy = x1 - y1
        dz = x2 - y2
        r = math.sqrt(dx * dx + dy * dy + dz * dz)
        g = INV4PI / r
        f = -g / (r * r)
        _accumulate(mom, x0, x1, x2, y0, y1, y2, complex(g * w[q], 0.0),
                    complex(f * w[q], 0.0), want_m)
    Dacc[0] += mom[0] * (4.0 * At * As)
    _finish(mom, P, Q, 1.0, want_m, V, M)


@nb.njit(fastmath=True, cache=True, inline="always")
def _shared(ids_t, ids_s, perm_t, perm_s):
    """Classify by shared vertex ids; fill permutations. Returns count."""
    ti = np.empty(3, np.int64)
    si = np.empty(3, np.int64)
    n = 0
    for i in range(3):
        for j in range(3):
            if ids_t[i] == ids_s[j]:
                ti[n] = i
                si[n] = j
                n += 1
    if n == 3:
        for i in range(3):
            perm_t[i] = ti[i]
            perm_s[i] = si[i]
    elif n == 2:
        perm_t[0] = ti[0]
        perm_t[1] = ti[1]
        perm_t[2] = 3 - ti[0] - ti[1]
        perm_s[0] = si[0]
        perm_s[1] = si[1]
        perm_s[2] = 3 - si[0] - si[1]
    elif n == 1:
        for i in range(3):
            perm_t[i] = (ti[0] + i) % 3
            perm_s[i] = (si[0] + i) % 3
    return n


@nb.njit(parallel=True, cache=True)
def assemble_block(t0, t1,
                   test_P, test_A, test_ids, test_c, test_rad, test_diam, test_parent,
                   src_P, src_A, src_c, src_rad, src_diam,
                   child_P, child_A, child_ids, child_R,
                   src_ptr, src_idx, src_val, n_dof,
                   kr, ki, static, want_m, half,
                   rules_b, rules_w, rule_ptr,
                   ss_bx, ss_by, ss_w, ss_ptr,
                   near_ratio, mid_ratio, far_ratio,
                   outV, outD, outM):
    """Fill rows ``t0:t1`` of the local-test / global-source arrays.

    With ``half`` (test and source mesh identical, symmetric rules) only
    pairs ``s >= t`` are visited and self pairs are halved; the caller adds
    the transpose.

    Source local shape ``(s, j)`` contributes to the global columns
    ``src_idx[src_ptr[3s+j]:src_ptr[3s+j+1]]`` with weights ``src_val``.

    ``rules_*`` hold eight regular rules concatenated (test/source for the
    distant, far, mid and near tiers); ``ss_*`` hold the identical, edge and vertex
    Sauter-Schwab rules.
    """
    ns = src_P.shape[0]
    nc = child_P.shape[1]
    for ti in nb.prange(t1 - t0):
        t = t0 + ti
        At = test_A[t]
        V = np.zeros((3, 3), np.complex128)
        M = np.zeros((3, 3), np.complex128)
        Vc = np.zeros((3, 3), np.complex128)
        Mc = np.zeros((3, 3), np.complex128)
        Dacc = np.zeros(1, np.complex128)
        perm_t = np.empty(3, np.int64)
        perm_s = np.empty(3, np.int64)
        ids_t = np.empty(3, np.int64)
        ids_c = np.empty(3, np.int64)
        Pt = np.empty((3, 3))
        Ps = np.empty((3, 3))
        wP = np.empty((3, 3))
        wQ = np.empty((3, 3))
        wy = np.empty((rules_b.shape[0], 3))
        mom = np.empty(14, np.complex128)
        for i in range(3):
            ids_t[i] = test_ids[t, i]
            for d in range(3):
                Pt[i, d] = test_P[t, i, d]
        for s in range(ns):
            if half and s < t:
                continue
            dc = 0.0
            for d in range(3):
                dc += (test_c[t, d] - src_c[s, d]) ** 2
            dist = math.sqrt(dc) - test_rad[t] - src_rad[s]
            # symmetric in (t, s) so that primal matrices come out symmetric
            diam = max(src_diam[s], test_diam[t])
            tier = 0
            if dist < near_ratio * diam:
                # the remainder kernel is bounded: mid rules are enough
                tier = 3 if static else 2
            elif dist < mid_ratio * diam:
                tier = 2
            elif dist < far_ratio * diam:
                tier = 1
            m_here = want_m and (test_parent[t] != s)
            for k in range(3):
                for j in range(3):
                    V[k, j] = 0.0
                    M[k, j] = 0.0
            Dacc[0] = 0.0
            touching = False
            if static and tier == 3:
                for c in range(nc):
                    for i in range(3):
                        for j in range(3):
                            if ids_t[i] == child_ids[s, c, j]:
                                touching = True
            a = rule_ptr[2 * tier]
            b = rule_ptr[2 * tier + 1]
            c_ = rule_ptr[2 * tier + 2]
            if not touching:
                for i in range(3):
                    for d in range(3):
                        Ps[i, d] = src_P[s, i, d]
                _load(Pt, Ps, wP, wQ)
                _pair_regular(wP, At, wQ, src_A[s], rules_b, rules_w, a, b, c_,
                              kr, ki, static, m_here, V, Dacc, M, wy, mom)
            else:
                # near-tier rules for the non-touching children
                for c in range(nc):
                    Ac = child_A[s, c]
                    for i in range(3):
                        ids_c[i] = child_ids[s, c, i]
                        for d in range(3):
                            Ps[i, d] = child_P[s, c, i, d]
                    _load(Pt, Ps, wP, wQ)
                    for k in range(3):
                        for j in range(3):
                            Vc[k, j] = 0.0
                            Mc[k, j] = 0.0
                    n = _shared(ids_t, ids_c, perm_t, perm_s)
                    if n == 0:
                        _pair_regular(wP, At, wQ, Ac, rules_b, rules_w, a, b, c_,
                                      kr, ki, static, m_here, Vc, Dacc, Mc, wy, mom)
                    else:
                        case = 3 - n        # 0 identical, 1 edge, 2 vertex
                        _pair_singular(wP, At, wQ, Ac, perm_t, perm_s,
                                       ss_bx, ss_by, ss_w, ss_ptr[case], ss_ptr[case + 1],
                                       m_here, Vc, Dacc, Mc, mom)
                    for k in range(3):
                        for i in range(3):
                            accv = 0.0j
                            accm = 0.0j
                            for j in range(3):
                                accv += Vc[k, j] * child_R[s, c, j, i]
                                accm += Mc[k, j] * child_R[s, c, j, i]
                            V[k, i] += accv
                            M[k, i] += accm
            dval = Dacc[0] / (At * src_A[s])
            if half and s == t:
                dval *= 0.5
                for k in range(3):
                    for j in range(3):
                        V[k, j] *= 0.5
            for j in range(3):
                for e in range(src_ptr[3 * s + j], src_ptr[3 * s + j + 1]):
                    col = src_idx[e]
                    cf = src_val[e]
                    outD[ti, col] += cf * dval
                    for k in range(3):
                        outV[ti, k, col] += cf * V[k, j]
                    if m_here:
                        for k in range(3):
                            outM[ti, k, col] += cf * M[k, j]
