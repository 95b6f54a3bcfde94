"""Discrete checks of the structural identities of the boundary operators.

All checks work with coefficient maps on the edge space ``X`` and its
barycentric dual ``Y`` (see :mod:`ssie.operators.assembly`):

* ``C`` maps ``X -> Y`` as ``-G^{-T} [C]_XX`` and ``Y -> X`` as ``G^{-1} [C]_YY``;
* ``M`` acts on ``X`` as ``G^{-1} [M]_YX``.

The Calderon identity ``C^2 = 1/4 - M^2`` is then checked on ``X`` as
``C_{Y->X} C_{X->Y} + M_X M_X - 1/4``.
"""

import numpy as np
import scipy.linalg as la

from ..kernels import project_trace, wavenumber
from .assembly import get_assembler

__all__ = ["electric_map", "magnetic_map", "calderon_operator", "calderon_residual",
           "anticommutator_residual", "smooth_probes", "antisymmetry_error",
           "c0_star_check", "t0_square_residual"]


def electric_map(space, kappa, domain="X"):
    """Coefficient map of ``C_kappa`` from ``domain`` to the other space."""
    asm = get_assembler(space)
    k = wavenumber(kappa)
    test = "primal" if domain == "X" else "YY"
    V, D, _ = asm.blocks(k, test)
    A = k * V - D / k
    if domain == "X":
        return -asm.solve_pairing_transpose(A)
    return asm.solve_pairing(A)


def magnetic_map(space, kappa):
    """Coefficient map of ``M_kappa`` on the edge space."""
    asm = get_assembler(space)
    return asm.solve_pairing(asm.blocks(wavenumber(kappa), "dual")[2])


def calderon_operator(space, kappa):
    """The map ``C C + M M - 1/4`` on edge coefficients (zero in the continuum)."""
    CX = electric_map(space, kappa, "X")
    CY = electric_map(space, kappa, "Y")
    MX = magnetic_map(space, kappa)
    R = CY @ CX + MX @ MX
    R[np.diag_indices_from(R)] -= 0.25
    return R


def smooth_probes(space, count=6, seed=0):
    """Edge coefficients of smooth tangential fields (columns).

    The fields are ``n x (A x + d sin(d . x))`` with random ``A`` and
    ``d``; they carry both solenoidal and irrotational parts.
    """
    rng = np.random.default_rng(seed)
    cols = []
    for _ in range(count):
        A = rng.normal(size=(3, 3))
        d = rng.normal(size=3)

        def field(x, n, A=A, d=d):
            return np.cross(n, x @ A.T + np.outer(np.sin(x @ d), d))

        cols.append(project_trace(space, field, basis="X"))
    return np.array(cols).T


def _probe_norm(R, P):
    return float(np.mean(np.linalg.norm(R @ P, axis=0) / np.linalg.norm(0.25 * P, axis=0)))


def calderon_residual(kappa, space, probes=None, full=False):
    """Relative residual of ``C^2 + M^2 = 1/4``.

    By default the residual map is applied to smooth densities
    (:func:`smooth_probes`) and ``mean |R p| / |p/4|`` is returned.  This
    is the quantity that converges under refinement: on mesh-scale
    oscillations no discretization reproduces the operators, so the norm
    of the full residual matrix stays of order 0.1 at every level.

    With ``full=True`` a dict with the probe value and the spectral and
    normalized Frobenius norms of the full residual is returned instead.
    """
    R = calderon_operator(space, kappa)
    P = smooth_probes(space) if probes is None else probes
    value = _probe_norm(R, P)
    if not full:
        return value
    n = R.shape[0]
    return {"probe": value,
            "spectral": float(la.norm(R, 2) / 0.25),
            "frobenius": float(la.norm(R) / (0.25 * np.sqrt(n)))}


def anticommutator_residual(kappa, space, probes=None):
    """Relative residual of ``C M + M C = 0`` on smooth densities (``X -> Y``).

    ``M`` on ``Y`` is the B-adjoint of ``M`` on ``X`` with a sign change,
    ``-G^{-T} [M]_YX^T``.
    """
    asm = get_assembler(space)
    CX = electric_map(space, kappa, "X")
    Mt = asm.blocks(wavenumber(kappa), "dual")[2]
    MX = asm.solve_pairing(Mt)
    MY = -asm.solve_pairing_transpose(np.ascontiguousarray(Mt.T))
    P = smooth_probes(space) if probes is None else probes
    return _probe_norm(CX @ MX + MY @ CX, P)


def antisymmetry_error(kappa, space):
    """B-antisymmetry defects of ``C_kappa`` and ``M_kappa``.

    ``B(A j, m) = -B(j, A m)`` for edge functions means the matrix
    ``B(A f_l, f_k)`` is symmetric.  Both operators are tested with edge
    functions on each side, and ``|A - A^T| / |A|`` is returned per operator.
    """
    k = wavenumber(kappa)
    V, D, M = get_assembler(space).blocks(k, "primal")
    C = k * V - D / k
    return {"C": float(la.norm(C - C.T) / la.norm(C)),
            "M": float(la.norm(M - M.T) / la.norm(M))}


def c0_star_check(space, test="primal"):
    """Self-adjointness and ellipticity of ``C_0^*``.

    The B-quadratic form of ``C_0^*`` is ``int j . V_0 conj(j) +
    div j V_0 div conj(j)``, i.e. the real matrix ``V_0 + D_0``.  Returns
    the relative asymmetry and the smallest eigenvalue of the Hermitian
    part (scaled by the largest).
    """
    V0, D0, _ = get_assembler(space).static_blocks(test)
    Q = V0 + D0
    asym = float(la.norm(Q - Q.T) / la.norm(Q))
    w = la.eigvalsh(0.5 * (Q + Q.T))
    return {"asymmetry": asym, "min_eig": float(w[0]), "min_eig_rel": float(w[0] / w[-1])}


def t0_square_residual(space):
    """``|T_0^* T_0^*| / |T_0^*|^2`` for ``T_0^* = curl V_0 div`` on the edge space.

    The inner product is formed through the mixed pairing, so the check
    reduces to ``div curl = 0`` on the discrete spaces.
    """
    asm = get_assembler(space)
    D0 = asm.static_blocks("primal")[1]
    T = asm.solve_pairing_transpose(D0)           # X -> Y (up to sign)
    DY = asm.static_blocks("YY")[1]
    TY = asm.solve_pairing(DY)                    # Y -> X
    return float(la.norm(TY @ T) / (la.norm(TY) * la.norm(T)))
