"""Galerkin matrices of the boundary integral operators.

Sign conventions follow from the trace definitions in :mod:`ssie.kernels`
and the averages ``{gamma} = -(gamma + gamma^c) / 2``.  With
``B(j, m) = int j . (m x n)``, the tested forms are

====================  ===========================================
operator              ``B(A f_l, g_k)``
====================  ===========================================
``C_kappa``           ``kappa V[k,l] - D[k,l] / kappa``
``M_kappa``           ``int int g_k(x) . (grad_x G x f_l(y))``
``C_0^*``             ``-(V_0 + D_0)[k,l]``
``C_{kappa,0}``       ``kappa V_0[k,l] - D_0[k,l] / kappa``
``curl V_0 div``      ``-D_0[k,l]``
identity              ``G[k,l] = B(f_l, g_k)``
====================  ===========================================

where ``V = int int G g_k . f_l`` and ``D = int int G div g_k div f_l``.

Three test/trial configurations are supported:

``test="dual"``
    dual test functions, edge trial functions.  Used for ``M_kappa`` and
    the identity: ``G^{-1} [M]`` is a stable matrix of ``M`` on the edge space.
``test="primal"``
    edge functions on both sides (symmetric matrices).  This is the stable
    Galerkin form of the electric operators on the edge space.
``test="YY"``
    dual functions on both sides, computed on the barycentric refinement.
    The stable Galerkin form of the electric operators on the dual space.

Electric-type operators are not tested with the mixed pair: the
divergences of the dual functions span only the vertex-based (dual cell)
constants, so the ``D`` block would lose rank on the edge space.
"""

import logging
import os
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from ..kernels import wavenumber
from ..quadrature import (DEFAULT_REGULAR_ORDER, DEFAULT_SINGULAR_ORDER,
                          regular_rule, singular_rule, symmetric_singular_rule)
from . import _engine

__all__ = ["AssemblyOptions", "Assembler", "BoundaryOperatorMatrix", "get_assembler",
           "assemble_V", "assemble_C", "assemble_M", "assemble_C0_static",
           "assemble_C0_star", "assemble_T0_star", "assemble_pairing",
           "assemble_scalar_V", "set_threads"]

log = logging.getLogger(__name__)


def set_threads(n=None):
    """Set the number of assembly threads (``SSIE_THREADS`` if ``n`` is None)."""
    import numba
    if n is None:
        n = os.environ.get("SSIE_THREADS")
    if n is not None:
        n = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
        numba.set_num_threads(n)
    return numba.get_num_threads()


@dataclass(frozen=True)
class AssemblyOptions:
    """Quadrature controls.

    Parameters
    ----------
    regular_order : int
        Degree of the source rule for well-separated pairs.
    singular_order : int
        Gauss points per dimension in the Sauter-Schwab rules.
    near_ratio, mid_ratio, far_ratio : float
        Pairs closer than ``near_ratio`` (``mid_ratio``, ``far_ratio``)
        source diameters use the near (mid, far) tier rules; pairs beyond
        ``far_ratio`` get the cheapest rule.
    chunk : int
        Test triangles per compiled call.
    """

    regular_order: int = DEFAULT_REGULAR_ORDER
    singular_order: int = DEFAULT_SINGULAR_ORDER
    near_ratio: float = 0.5
    mid_ratio: float = 2.0
    far_ratio: float = 5.0
    chunk: int = 256

    def tiers(self):
        o = self.regular_order
        lo = max(o - 2, 1)
        return [(lo, lo), (lo, o), (o, min(o + 3, 20)), (min(o + 3, 20), min(o + 6, 20))]

    def symmetric_tiers(self):
        """Equal test and source rules, for the primal (symmetric) setting."""
        return [(d, d) for _, d in self.tiers()]


@dataclass
class BoundaryOperatorMatrix:
    """Dense Galerkin matrix of one boundary operator.

    ``matrix[k, l] = B(A f_l, g_k)`` with ``f_l`` edge functions and
    ``g_k`` the test functions selected by ``test``.
    """

    kind: str
    kappa: object
    matrix: np.ndarray
    space: object = field(repr=False)
    test: str = "dual"

    def __post_init__(self):
        n = self.space.dof_count
        if self.matrix.shape != (n, n):
            raise ValueError("matrix shape %s does not match dof_count %d"
                             % (self.matrix.shape, n))

    def as_map(self):
        """Matrix of the operator on edge-function coefficients.

        Only meaningful for ``test="dual"``.
        """
        if self.test != "dual":
            raise ValueError("operator maps need the dual test space")
        return get_assembler(self.space).solve_pairing(self.matrix)


def _geometry(mesh):
    P = np.ascontiguousarray(mesh.corners)
    c = P.mean(axis=1)
    rad = np.linalg.norm(P - c[:, None, :], axis=2).max(axis=1)
    e = np.stack([P[:, 1] - P[:, 0], P[:, 2] - P[:, 1], P[:, 0] - P[:, 2]], axis=1)
    diam = np.linalg.norm(e, axis=2).max(axis=1)
    return P, np.ascontiguousarray(mesh.areas), c, rad, diam


def _csr_source(local_map):
    """CSR arrays (one row per local shape) of a local-flux map."""
    m = sp.csr_matrix(local_map)
    m.sort_indices()
    return dict(src_ptr=np.ascontiguousarray(m.indptr, dtype=np.int64),
                src_idx=np.ascontiguousarray(m.indices, dtype=np.int64),
                src_val=np.ascontiguousarray(m.data, dtype=float))


def _real_lu_solve(lu, rhs, trans):
    # a complex right-hand side is solved as its real and imaginary parts
    rhs = np.asarray(rhs)
    if not np.iscomplexobj(rhs):
        return la.lu_solve(lu, rhs, trans=trans)
    shape = rhs.shape
    r = np.ascontiguousarray(rhs.reshape(shape[0], -1))
    out = la.lu_solve(lu, r.view(float), trans=trans)
    return np.ascontiguousarray(out).view(complex).reshape(shape)


def _pack_rules(tiers):
    rules = []
    for dt, ds in tiers:
        rules += [regular_rule(dt), regular_rule(ds)]
    ptr = np.cumsum([0] + [len(r) for r in rules])
    return (np.ascontiguousarray(np.concatenate([r.points for r in rules])),
            np.ascontiguousarray(np.concatenate([r.weights for r in rules])),
            ptr.astype(np.int64))


def _pack_singular(make, order):
    ss = [make(c, order) for c in ("identical", "edge", "vertex")]
    ptr = np.cumsum([0] + [len(s[2]) for s in ss])
    return tuple(np.ascontiguousarray(np.concatenate([s[i] for s in ss]))
                 for i in range(3)) + (ptr.astype(np.int64),)


class Assembler:
    """Assembles and caches interaction blocks for one edge space.

    The static blocks (kernel ``1/(4 pi r)``) are computed once per test
    configuration and reused for every wave number; only the bounded
    remainder ``(exp(i k r) - 1)/(4 pi r)`` is integrated per wave number.
    """

    def __init__(self, space, options=None):
        self.space = space
        self.options = options or AssemblyOptions()
        self._static = {}
        self._dynamic = {}
        o = self.options
        self._rules = {"dual": _pack_rules(o.tiers()),
                       "primal": _pack_rules(o.symmetric_tiers())}
        self._ss = {"dual": _pack_singular(singular_rule, o.singular_order),
                    "primal": _pack_singular(symmetric_singular_rule, o.singular_order)}

    # -- pairing ------------------------------------------------------------
    @cached_property
    def pairing(self):
        return self.space.mixed_pairing

    @cached_property
    def pairing_lu(self):
        return la.lu_factor(self.pairing)

    def solve_pairing(self, rhs):
        """``G^{-1} rhs`` for the (real) mixed pairing matrix ``G``."""
        return _real_lu_solve(self.pairing_lu, rhs, 0)

    def solve_pairing_transpose(self, rhs):
        """``G^{-T} rhs``."""
        return _real_lu_solve(self.pairing_lu, rhs, 1)

    # -- configurations -----------------------------------------------------
    @cached_property
    def _config(self):
        space = self.space
        mesh = space.mesh
        ref = space.refinement
        rm = ref.mesh
        sP, sA, sc, srad, sdiam = _geometry(mesh)
        src = dict(src_P=sP, src_A=sA, src_c=sc, src_rad=srad, src_diam=sdiam,
                   **_csr_source(space.local_map))
        tP, tA, tc, trad, tdiam = _geometry(rm)
        mixed = dict(test_P=tP, test_A=tA, test_ids=np.ascontiguousarray(rm.triangles),
                     test_c=tc, test_rad=trad, test_diam=tdiam,
                     test_parent=np.ascontiguousarray(ref.parent, dtype=np.int64),
                     child_P=np.ascontiguousarray(rm.corners.reshape(-1, 6, 3, 3)),
                     child_A=np.ascontiguousarray(rm.areas.reshape(-1, 6)),
                     child_ids=np.ascontiguousarray(rm.triangles.reshape(-1, 6, 3)),
                     child_R=np.ascontiguousarray(ref.restriction), **src)
        primal = dict(test_P=sP, test_A=sA, test_ids=np.ascontiguousarray(mesh.triangles),
                      test_c=sc, test_rad=srad, test_diam=sdiam,
                      test_parent=np.arange(mesh.n_triangles, dtype=np.int64),
                      child_P=np.ascontiguousarray(sP[:, None]),
                      child_A=np.ascontiguousarray(sA[:, None]),
                      child_ids=np.ascontiguousarray(mesh.triangles[:, None]),
                      child_R=np.ascontiguousarray(np.broadcast_to(np.eye(3), (mesh.n_triangles, 1, 3, 3))),
                      **src)
        return {"dual": (mixed, space.dual.local_map), "primal": (primal, space.local_map)}

    @cached_property
    def _refined_config(self):
        rm = self.space.refinement.mesh
        P, A, c, rad, diam = _geometry(rm)
        f = rm.n_triangles
        return dict(test_P=P, test_A=A, test_ids=np.ascontiguousarray(rm.triangles),
                    test_c=c, test_rad=rad, test_diam=diam,
                    test_parent=np.arange(f, dtype=np.int64),
                    src_P=P, src_A=A, src_c=c, src_rad=rad, src_diam=diam,
                    child_P=np.ascontiguousarray(P[:, None]),
                    child_A=np.ascontiguousarray(A[:, None]),
                    child_ids=np.ascontiguousarray(rm.triangles[:, None]),
                    child_R=np.ascontiguousarray(np.broadcast_to(np.eye(3), (f, 1, 3, 3))),
                    **_csr_source(self.space.dual.local_map))

    def _run_yy(self, kappa, static):
        """``V`` and ``D`` with dual functions on both sides.

        The refined mesh plays the role of both test and source mesh; the
        source side is mapped to dual coefficients inside the compiled loop
        and the test side afterwards.
        """
        geo = self._refined_config
        L = self.space.dual.local_map.tocsr()
        n = self.space.dof_count
        nt = geo["test_P"].shape[0]
        coo = L.tocoo()
        div_map = sp.csr_matrix((coo.data, (coo.row // 3, coo.col)), shape=(nt, n))
        o = self.options
        V = np.zeros((n, n), complex)
        D = np.zeros((n, n), complex)
        k = complex(kappa)
        chunk = o.chunk
        outV = np.empty((chunk, 3, n), complex)
        outD = np.empty((chunk, n), complex)
        outM = np.empty((1, 3, n), complex)          # not written (want_m is False)
        for t0 in range(0, nt, chunk):
            t1 = min(nt, t0 + chunk)
            m = t1 - t0
            outV[:] = 0.0
            outD[:] = 0.0
            _engine.assemble_block(
                t0, t1, geo["test_P"], geo["test_A"], geo["test_ids"], geo["test_c"],
                geo["test_rad"], geo["test_diam"], geo["test_parent"],
                geo["src_P"], geo["src_A"], geo["src_c"], geo["src_rad"], geo["src_diam"],
                geo["child_P"], geo["child_A"], geo["child_ids"], geo["child_R"],
                geo["src_ptr"], geo["src_idx"], geo["src_val"], n,
                k.real, k.imag, static, False, True,
                *self._rules["primal"], *self._ss["primal"],
                o.near_ratio, o.mid_ratio, o.far_ratio, outV, outD, outM)
            V += L[3 * t0:3 * t1].T @ outV[:m].reshape(3 * m, n)
            D += div_map[t0:t1].T @ outD[:m]
        # only pairs s >= t were visited
        V += V.T
        D += D.T
        if static:
            V, D = V.real, D.real
        return V, D

    def _run(self, test, kappa, static, want_m=True):
        geo, test_map = self._config[test]
        n = self.space.dof_count
        nt = geo["test_P"].shape[0]
        o = self.options
        test_map = test_map.tocsr()
        # divergence map: sum of local fluxes per test triangle
        coo = test_map.tocoo()
        div_map = sp.csr_matrix((coo.data, (coo.row // 3, coo.col)), shape=(nt, n))
        dtype = float if static else complex
        V = np.zeros((n, n), dtype)
        D = np.zeros((n, n), dtype)
        M = np.zeros((n, n), dtype)
        k = complex(kappa)
        for t0 in range(0, nt, o.chunk):
            t1 = min(nt, t0 + o.chunk)
            m = t1 - t0
            outV = np.zeros((m, 3, n), complex)
            outD = np.zeros((m, n), complex)
            outM = np.zeros((m, 3, n), complex)
            _engine.assemble_block(
                t0, t1, geo["test_P"], geo["test_A"], geo["test_ids"], geo["test_c"],
                geo["test_rad"], geo["test_diam"], geo["test_parent"],
                geo["src_P"], geo["src_A"], geo["src_c"], geo["src_rad"], geo["src_diam"],
                geo["child_P"], geo["child_A"], geo["child_ids"], geo["child_R"],
                geo["src_ptr"], geo["src_idx"], geo["src_val"], n,
                k.real, k.imag, static, want_m, False,
                *self._rules[test], *self._ss[test],
                o.near_ratio, o.mid_ratio, o.far_ratio, outV, outD, outM)
            rows = test_map[3 * t0:3 * t1].T
            if static:
                outV, outD, outM = outV.real, outD.real, outM.real
            V += rows @ outV.reshape(3 * m, n)
            M += rows @ outM.reshape(3 * m, n)
            D += div_map[t0:t1].T @ outD
        return V, D, M

    def static_blocks(self, test="dual"):
        """Real matrices ``(V_0, D_0, M_0)`` for the kernel ``1/(4 pi r)``.

        For ``test="YY"`` the third entry is ``None``.
        """
        _check_test(test)
        if test not in self._static:
            log.info("assembling static blocks (%s test, %d dofs)", test, self.space.dof_count)
            if test == "YY":
                self._static[test] = self._run_yy(0.0, True) + (None,)
            else:
                self._static[test] = self._run(test, 0.0, static=True)
        return self._static[test]

    def blocks(self, kappa, test="dual"):
        """Complex matrices ``(V, D, M)`` for ``exp(i kappa r)/(4 pi r)``."""
        kappa = wavenumber(kappa)
        key = (test, kappa)
        if key not in self._dynamic:
            V0, D0, M0 = self.static_blocks(test)
            if kappa == 0:
                out = (V0.astype(complex), D0.astype(complex),
                       None if M0 is None else M0.astype(complex))
            elif test == "YY":
                dV, dD = self._run_yy(kappa, False)
                out = (V0 + dV, D0 + dD, None)
            else:
                dV, dD, dM = self._run(test, kappa, static=False)
                out = (V0 + dV, D0 + dD, M0 + dM)
            # keep the cache small: sweeps visit many wave numbers (two wave
            # numbers times three configurations)
            if len(self._dynamic) >= 6:
                self._dynamic.pop(next(iter(self._dynamic)))
            self._dynamic[key] = out
        return self._dynamic[key]

    def scalar_single_layer(self, kappa=0.0):
        """Piecewise-constant Galerkin matrix of the scalar single layer."""
        mesh = self.space.mesh
        f = mesh.n_triangles
        geo = dict(self._config["primal"][0])
        geo["src_ptr"] = np.arange(3 * f + 1, dtype=np.int64)
        geo["src_idx"] = np.repeat(np.arange(f, dtype=np.int64), 3)
        geo["src_val"] = np.full(3 * f, 1.0 / 3.0)
        o = self.options
        out = np.zeros((f, f), complex)
        k = wavenumber(kappa)
        for static, kk in ((True, 0.0), (False, k)):
            if not static and k == 0:
                continue
            for t0 in range(0, f, o.chunk):
                t1 = min(f, t0 + o.chunk)
                m = t1 - t0
                outV = np.zeros((m, 3, f), complex)
                outD = np.zeros((m, f), complex)
                outM = np.zeros((m, 3, f), complex)
                _engine.assemble_block(
                    t0, t1, geo["test_P"], geo["test_A"], geo["test_ids"], geo["test_c"],
                    geo["test_rad"], geo["test_diam"], geo["test_parent"],
                    geo["src_P"], geo["src_A"], geo["src_c"], geo["src_rad"], geo["src_diam"],
                    geo["child_P"], geo["child_A"], geo["child_ids"], geo["child_R"],
                    geo["src_ptr"], geo["src_idx"], geo["src_val"], f,
                    kk.real if not static else 0.0, kk.imag if not static else 0.0,
                    static, False, False,
                    *self._rules["primal"], *self._ss["primal"],
                    o.near_ratio, o.mid_ratio, o.far_ratio, outV, outD, outM)
                out[t0:t1] += outD
        A = mesh.areas
        return out * A[:, None] * A[None, :]


def _check_test(test):
    if test not in ("dual", "primal", "YY"):
        raise ValueError("test must be 'dual', 'primal' or 'YY', got %r" % (test,))


def get_assembler(space, options=None):
    """Return the (cached) assembler attached to ``space``."""
    asm = space.__dict__.get("_assembler")
    if asm is None or (options is not None and asm.options != options):
        asm = Assembler(space, options)
        space.__dict__["_assembler"] = asm
    return asm


def _wrap(kind, kappa, matrix, space, test):
    return BoundaryOperatorMatrix(kind, kappa, matrix, space, test)


def assemble_V(kappa, space, test="primal"):
    """Vector single layer ``V[k, l] = int int G g_k . f_l``."""
    V, _, _ = get_assembler(space).blocks(kappa, test)
    return _wrap("V", wavenumber(kappa), V, space, test)


def assemble_C(kappa, space, test="dual"):
    """Electric operator ``C_kappa``: ``kappa V - D / kappa``."""
    k = wavenumber(kappa)
    if k == 0:
        raise ValueError("C_kappa needs a non-zero wave number")
    V, D, _ = get_assembler(space).blocks(k, test)
    return _wrap("C", k, k * V - D / k, space, test)


def assemble_M(kappa, space, test="dual"):
    """Magnetic operator ``M_kappa`` (principal value, no jump term)."""
    if test == "YY":
        raise ValueError("M_kappa is assembled with the mixed or primal test")
    _, _, M = get_assembler(space).blocks(kappa, test)
    return _wrap("M", wavenumber(kappa), M, space, test)


def assemble_C0_static(kappa, space, test="dual"):
    """``C_{kappa,0} = -kappa n x V_0 + kappa^{-1} curl V_0 div``."""
    k = wavenumber(kappa)
    if k == 0:
        raise ValueError("C_{kappa,0} needs a non-zero wave number")
    V0, D0, _ = get_assembler(space).static_blocks(test)
    return _wrap("C0_static", k, k * V0 - D0 / k, space, test)


def assemble_C0_star(space, test="dual"):
    """``C_0^* = n x V_0 + curl V_0 div``; tested form ``-(V_0 + D_0)``."""
    V0, D0, _ = get_assembler(space).static_blocks(test)
    return _wrap("C0_star", None, -(V0 + D0).astype(complex), space, test)


def assemble_T0_star(space, test="dual"):
    """The static block ``curl V_0 div``; tested form ``-D_0``."""
    _, D0, _ = get_assembler(space).static_blocks(test)
    return _wrap("T0_star", None, -D0.astype(complex), space, test)


def assemble_pairing(space, test="dual"):
    """Matrix of the identity, ``G[k, l] = B(f_l, g_k)``."""
    m = space.mixed_pairing if test == "dual" else space.pairing
    return _wrap("Gram_B", None, m.astype(complex), space, test)


def assemble_scalar_V(kappa, space):
    """Scalar single layer on piecewise constants (one per triangle)."""
    return get_assembler(space).scalar_single_layer(kappa)
