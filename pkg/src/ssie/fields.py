"""Fields generated by surface densities.

The two Maxwell layer potentials are

    Psi_E j = kappa psi j + (1/kappa) grad psi(div_G j),     Psi_M m = curl psi m,

with ``psi`` the Helmholtz single layer potential.  A :class:`Representation`
stores a pair of densities ``(j_E, j_M)`` and evaluates
``-Psi_E j_E - Psi_M j_M`` (and its curl) off the surface.  The
formulation-specific field formulas are built by :func:`reconstruct`.

Off-surface integrals use a fixed seven-point rule on every triangle that
is well separated from the target, and recursive four-way subdivision of
the others, so targets close to the surface are handled without any
special treatment of the singularity.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numba as nb
import numpy as np

from .formulations import FormulationKind
from .mesh.spaces import CurrentSpace, evaluate_local
from .quadrature import regular_rule

__all__ = ["DensityTag", "SurfaceDensity", "Representation", "FieldSolution",
           "FarFieldPattern", "eval_potentials", "reconstruct", "far_field",
           "radiation_check", "inside_mask", "sphere_grid", "far_field_grid",
           "NearSurfaceError", "transmission_residuals"]

INV4PI = 1.0 / (4.0 * np.pi)
_STACK = 96


class NearSurfaceError(ValueError):
    """Target point too close to the surface for reliable evaluation."""


class DensityTag(str, Enum):
    j_for_S_T = "j_for_S_T"
    j_for_Sprime = "j_for_Sprime"
    m_for_Tprime = "m_for_Tprime"

    @classmethod
    def for_kind(cls, kind):
        kind = FormulationKind(kind)
        return {FormulationKind.S: cls.j_for_S_T, FormulationKind.T: cls.j_for_S_T,
                FormulationKind.Sprime: cls.j_for_Sprime,
                FormulationKind.Tprime: cls.m_for_Tprime}[kind]


@dataclass
class SurfaceDensity:
    """Coefficients of a current in the edge space (``basis="X"``) or its dual (``"Y"``)."""

    coefficients: np.ndarray
    space: CurrentSpace
    tag: DensityTag = DensityTag.j_for_S_T
    basis: str = "X"

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=complex)
        if self.coefficients.shape != (self.space.dof_count,):
            raise ValueError("density needs %d coefficients, got %s"
                             % (self.space.dof_count, self.coefficients.shape))
        if not np.all(np.isfinite(self.coefficients)):
            raise ValueError("density coefficients must be finite")
        if self.basis not in ("X", "Y"):
            raise ValueError("basis must be 'X' or 'Y'")
        self.tag = DensityTag(self.tag)

    def fluxes(self, refined=False):
        """Local fluxes on the coarse mesh, or on the barycentric refinement."""
        c = self.coefficients
        sp = self.space
        if self.basis == "Y":
            return (sp.dual.local_map @ c).reshape(-1, 3)
        if refined:
            return (sp.refined_map @ c).reshape(-1, 3)
        return sp.local_fluxes(c)


# -- numba kernels -----------------------------------------------------------

@nb.njit(cache=True, fastmath=True)
def _tri_add(x0, x1, x2, a0, a1, a2, b0, b1, b2, c0, c1, c2, area, ce, me, cm, mm,
             kr, ki, qb, qw, want_curl, acc):
    """Add one (sub)triangle's contribution, using the parent field coefficients.

    The parent field is ``v(y) = (S y - sum c_k p_k) / (2 A)``: ``ce``, ``me``
    hold ``S/(2A)`` and ``-sum c_k p_k / (2A)`` for the E density, ``cm``, ``mm``
    for the M density.
    """
    k = complex(kr, ki)
    ik = 1j * k
    divE = 2.0 * ce
    divM = 2.0 * cm
    for q in range(qw.shape[0]):
        y0 = qb[q, 0] * a0 + qb[q, 1] * b0 + qb[q, 2] * c0
        y1 = qb[q, 0] * a1 + qb[q, 1] * b1 + qb[q, 2] * c1
        y2 = qb[q, 0] * a2 + qb[q, 1] * b2 + qb[q, 2] * c2
        d0 = x0 - y0
        d1 = x1 - y1
        d2 = x2 - y2
        r = math.sqrt(d0 * d0 + d1 * d1 + d2 * d2)
        e = np.exp(ik * r)
        g = e * INV4PI / r * (qw[q] * area)
        f = g * (ik * r - 1.0) / (r * r)       # grad_x G = f (x - y)
        vE0 = ce * y0 + me[0]
        vE1 = ce * y1 + me[1]
        vE2 = ce * y2 + me[2]
        vM0 = cm * y0 + mm[0]
        vM1 = cm * y1 + mm[1]
        vM2 = cm * y2 + mm[2]
        # -Psi_E jE
        acc[0] -= k * g * vE0 + f * d0 * divE / k
        acc[1] -= k * g * vE1 + f * d1 * divE / k
        acc[2] -= k * g * vE2 + f * d2 * divE / k
        # -Psi_M jM = -grad G x vM
        acc[0] -= f * (d1 * vM2 - d2 * vM1)
        acc[1] -= f * (d2 * vM0 - d0 * vM2)
        acc[2] -= f * (d0 * vM1 - d1 * vM0)
        if want_curl:
            # curl(-Psi_E jE - Psi_M jM) = -k Psi_M jE - k Psi_E jM
            acc[3] -= k * f * (d1 * vE2 - d2 * vE1)
            acc[4] -= k * f * (d2 * vE0 - d0 * vE2)
            acc[5] -= k * f * (d0 * vE1 - d1 * vE0)
            acc[3] -= k * (k * g * vM0 + f * d0 * divM / k)
            acc[4] -= k * (k * g * vM1 + f * d1 * divM / k)
            acc[5] -= k * (k * g * vM2 + f * d2 * divM / k)


@nb.njit(parallel=True, cache=True)
def _evaluate(points, corners, areas, fE, fM, kr, ki, qb, qw, ratio, max_depth,
              want_curl, out, depth_hit):
    npt = points.shape[0]
    nt = corners.shape[0]
    for p in nb.prange(npt):
        x0 = points[p, 0]
        x1 = points[p, 1]
        x2 = points[p, 2]
        acc = np.zeros(6, dtype=np.complex128)
        stack = np.empty((_STACK, 9))
        sdepth = np.empty(_STACK, dtype=np.int64)
        me = np.empty(3, dtype=np.complex128)
        mm = np.empty(3, dtype=np.complex128)
        hit = 0
        for t in range(nt):
            A = areas[t]
            inv = 1.0 / (2.0 * A)
            sE = fE[t, 0] + fE[t, 1] + fE[t, 2]
            sM = fM[t, 0] + fM[t, 1] + fM[t, 2]
            if sE == 0 and sM == 0 and fE[t, 0] == 0 and fE[t, 1] == 0 and \
                    fM[t, 0] == 0 and fM[t, 1] == 0:
                continue
            ce = sE * inv
            cm = sM * inv
            for d in range(3):
                me[d] = -(fE[t, 0] * corners[t, 0, d] + fE[t, 1] * corners[t, 1, d]
                          + fE[t, 2] * corners[t, 2, d]) * inv
                mm[d] = -(fM[t, 0] * corners[t, 0, d] + fM[t, 1] * corners[t, 1, d]
                          + fM[t, 2] * corners[t, 2, d]) * inv
            top = 0
            for i in range(3):
                for d in range(3):
                    stack[0, 3 * i + d] = corners[t, i, d]
            sdepth[0] = 0
            top = 1
            while top > 0:
                top -= 1
                s = stack[top]
                a0, a1, a2 = s[0], s[1], s[2]
                b0, b1, b2 = s[3], s[4], s[5]
                c0, c1, c2 = s[6], s[7], s[8]
                dep = sdepth[top]
                m0 = (a0 + b0 + c0) / 3.0
                m1 = (a1 + b1 + c1) / 3.0
                m2 = (a2 + b2 + c2) / 3.0
                rad = 0.0
                for (u0, u1, u2) in ((a0, a1, a2), (b0, b1, b2), (c0, c1, c2)):
                    rr = (u0 - m0) ** 2 + (u1 - m1) ** 2 + (u2 - m2) ** 2
                    if rr > rad:
                        rad = rr
                rad = math.sqrt(rad)
                dist = math.sqrt((x0 - m0) ** 2 + (x1 - m1) ** 2 + (x2 - m2) ** 2)
                area = A / (4.0 ** dep)
                if dist > ratio * rad or dep >= max_depth or top + 4 > _STACK:
                    if dist <= ratio * rad:
                        hit = 1
                    _tri_add(x0, x1, x2, a0, a1, a2, b0, b1, b2, c0, c1, c2, area,
                             ce, me, cm, mm, kr, ki, qb, qw, want_curl, acc)
                    continue
                ab0, ab1, ab2 = 0.5 * (a0 + b0), 0.5 * (a1 + b1), 0.5 * (a2 + b2)
                bc0, bc1, bc2 = 0.5 * (b0 + c0), 0.5 * (b1 + c1), 0.5 * (b2 + c2)
                ca0, ca1, ca2 = 0.5 * (c0 + a0), 0.5 * (c1 + a1), 0.5 * (c2 + a2)
                kids = ((a0, a1, a2, ab0, ab1, ab2, ca0, ca1, ca2),
                        (ab0, ab1, ab2, b0, b1, b2, bc0, bc1, bc2),
                        (ca0, ca1, ca2, bc0, bc1, bc2, c0, c1, c2),
                        (ab0, ab1, ab2, bc0, bc1, bc2, ca0, ca1, ca2))
                for kid in kids:
                    for d in range(9):
                        stack[top, d] = kid[d]
                    sdepth[top] = dep + 1
                    top += 1
        for d in range(6):
            out[p, d] = acc[d]
        depth_hit[p] = hit


def _point_distance(points, corners):
    """Distance from each point to the nearest triangle (exact point-triangle distance)."""
    out = np.full(len(points), np.inf)
    a, b, c = corners[:, 0], corners[:, 1], corners[:, 2]
    for i0 in range(0, len(points), 256):
        x = points[i0:i0 + 256, None, :]
        out[i0:i0 + 256] = _tri_dist(x, a, b, c).min(axis=1)
    return out


def _tri_dist(x, a, b, c):
    """Vectorised point-triangle distance (broadcasting over leading axes)."""
    ab, ac = b - a, c - a
    n = np.cross(ab, ac)
    nn = np.einsum("...i,...i", n, n)
    w = x - a
    s = np.einsum("...i,...i", np.cross(w, ac), n) / nn
    t = np.einsum("...i,...i", np.cross(ab, w), n) / nn
    inside = (s >= 0) & (t >= 0) & (s + t <= 1)
    dplane = np.abs(np.einsum("...i,...i", w, n)) / np.sqrt(nn)

    def seg(p, q):
        d = q - p
        u = np.clip(np.einsum("...i,...i", x - p, d) / np.einsum("...i,...i", d, d), 0, 1)
        return np.linalg.norm(x - (p + u[..., None] * d), axis=-1)

    dedge = np.minimum(np.minimum(seg(a, b), seg(b, c)), seg(c, a))
    return np.where(inside, dplane, dedge)


# -- representations ---------------------------------------------------------

@dataclass
class Representation:
    """The field ``-Psi_E j_E - Psi_M j_M`` at wave number ``kappa``.

    Densities are given as local fluxes on the triangles of ``mesh``.
    """

    mesh: object
    kappa: complex
    fluxes_E: np.ndarray
    fluxes_M: np.ndarray
    ratio: float = 4.0
    max_depth: int = 16
    order: int = 5

    def __post_init__(self):
        self.kappa = complex(self.kappa)
        nt = self.mesh.n_triangles
        for name in ("fluxes_E", "fluxes_M"):
            v = getattr(self, name)
            v = np.zeros((nt, 3), complex) if v is None else np.asarray(v, complex).reshape(nt, 3)
            setattr(self, name, v)

    @property
    def is_zero(self):
        return not (np.any(self.fluxes_E) or np.any(self.fluxes_M))

    def _run(self, points, want_curl):
        pts = np.ascontiguousarray(np.atleast_2d(np.asarray(points, float)))
        out = np.zeros((len(pts), 6), complex)
        if self.is_zero or len(pts) == 0:
            return out
        diam = self.mesh.diameter
        d = _point_distance(pts, self.mesh.corners)
        bad = d <= 1e-6 * diam
        if np.any(bad):
            raise NearSurfaceError("%d evaluation point(s) within 1e-6 diameters of the surface"
                                   % int(bad.sum()))
        rule = regular_rule(self.order)
        hit = np.zeros(len(pts), np.int64)
        _evaluate(pts, np.ascontiguousarray(self.mesh.corners), self.mesh.areas,
                  np.ascontiguousarray(self.fluxes_E), np.ascontiguousarray(self.fluxes_M),
                  self.kappa.real, self.kappa.imag, rule.points, rule.weights,
                  float(self.ratio), int(self.max_depth), bool(want_curl), out, hit)
        if np.any(hit):
            # refinement budget exhausted: retry once with a higher-order rule
            idx = np.nonzero(hit)[0]
            rule = regular_rule(10)
            sub = np.zeros((len(idx), 6), complex)
            h2 = np.zeros(len(idx), np.int64)
            _evaluate(pts[idx], np.ascontiguousarray(self.mesh.corners), self.mesh.areas,
                      np.ascontiguousarray(self.fluxes_E), np.ascontiguousarray(self.fluxes_M),
                      self.kappa.real, self.kappa.imag, rule.points, rule.weights,
                      float(self.ratio), int(self.max_depth) + 4, bool(want_curl), sub, h2)
            if np.any(h2):
                raise NearSurfaceError("near-singular evaluation did not resolve")
            out[idx] = sub
        return out

    def field(self, points):
        return self._run(points, False)[:, :3]

    def curl(self, points):
        return self._run(points, True)[:, 3:]

    def field_and_curl(self, points):
        o = self._run(points, True)
        return o[:, :3], o[:, 3:]

    def far_field(self, directions, order=4, chunk=64):
        """Pattern ``F`` with ``field(x) ~ exp(i kappa |x|)/|x| F(x/|x|)``."""
        dirs = np.atleast_2d(np.asarray(directions, float))
        dirs = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
        out = np.zeros(dirs.shape, complex)
        if self.is_zero:
            return out
        m = self.mesh
        rule = regular_rule(order)
        nq = len(rule.weights)
        tri = np.repeat(np.arange(m.n_triangles), nq)
        bary = np.tile(rule.points, (m.n_triangles, 1))
        w = np.tile(rule.weights, m.n_triangles) * m.areas[tri]
        y = np.einsum("pk,pkd->pd", bary, m.corners[tri])
        vE = evaluate_local(m.corners, m.areas, self.fluxes_E, tri, bary) * w[:, None]
        vM = evaluate_local(m.corners, m.areas, self.fluxes_M, tri, bary) * w[:, None]
        k = self.kappa
        for i0 in range(0, len(dirs), chunk):
            d = dirs[i0:i0 + chunk]
            ph = np.exp(-1j * k * (d @ y.T))
            J = ph @ vE
            M = ph @ vM
            # Psi_E j -> k x^ x (J x x^),  Psi_M m -> i k x^ x M   (times 1/(4 pi))
            tE = k * np.cross(d, np.cross(J, d))
            tM = 1j * k * np.cross(d, M)
            res = -(tE + tM) * INV4PI
            out[i0:i0 + chunk] = np.cross(d, np.cross(res, d))
        return out


def eval_potentials(jE, jM, kappa, points):
    """Evaluate ``-Psi_E(kappa) j_E - Psi_M(kappa) j_M`` at off-surface points.

    Parameters
    ----------
    jE, jM : SurfaceDensity or None
    kappa : complex
    points : (m, 3) array

    Raises
    ------
    NearSurfaceError
        For points closer than ``1e-6`` diameters to the surface.
    """
    return _representation(jE, jM, kappa).field(points)


def _representation(jE, jM, kappa):
    dens = [d for d in (jE, jM) if d is not None]
    if not dens:
        raise ValueError("at least one density is required")
    space = dens[0].space
    refined = any(d.basis == "Y" for d in dens)
    mesh = space.refinement.mesh if refined else space.mesh
    fE = jE.fluxes(refined) if jE is not None else None
    fM = jM.fluxes(refined) if jM is not None else None
    return Representation(mesh, kappa, fE, fM)


def inside_mask(mesh, points, chunk=256):
    """Points enclosed by the closed surface (solid-angle test)."""
    pts = np.atleast_2d(np.asarray(points, float))
    a, b, c = (mesh.corners[:, i] for i in range(3))
    out = np.zeros(len(pts), bool)
    for i0 in range(0, len(pts), chunk):
        x = pts[i0:i0 + chunk, None, :]
        r1, r2, r3 = a - x, b - x, c - x
        l1, l2, l3 = (np.linalg.norm(r, axis=-1) for r in (r1, r2, r3))
        num = np.einsum("...i,...i", r1, np.cross(r2, r3))
        den = (l1 * l2 * l3 + np.einsum("...i,...i", r1, r2) * l3
               + np.einsum("...i,...i", r1, r3) * l2 + np.einsum("...i,...i", r2, r3) * l1)
        omega = 2.0 * np.arctan2(num, den).sum(axis=1)
        out[i0:i0 + chunk] = np.abs(omega) > 2.0 * np.pi
    return out


@dataclass
class FieldSolution:
    """Interior and scattered fields of a solved transmission problem."""

    kind: FormulationKind
    interior: Representation
    exterior: Representation
    wave: object
    mesh: object

    def interior_field(self, points):
        return self.interior.field(points)

    def scattered_field(self, points):
        return self.exterior.field(points)

    def total_field(self, points):
        pts = np.atleast_2d(np.asarray(points, float))
        ins = inside_mask(self.mesh, pts)
        out = np.empty(pts.shape, complex)
        if ins.any():
            out[ins] = self.interior.field(pts[ins])
        if (~ins).any():
            out[~ins] = self.exterior.field(pts[~ins]) + self.wave.field(pts[~ins])
        return out

    def far_field(self, directions):
        return far_field(self, directions)

    def transmission_residuals(self, mu_i=1.0, mu_e=1.0, **kw):
        return transmission_residuals(self, mu_i, mu_e, **kw)


def _extrapolate_to_zero(offsets, values):
    """Lagrange extrapolation to offset 0 of samples taken at ``offsets``."""
    out = 0.0
    for i, t in enumerate(offsets):
        w = 1.0
        for j, u in enumerate(offsets):
            if j != i:
                w *= u / (u - t)
        out = out + w * values[i]
    return out


def transmission_residuals(sol, mu_i=1.0, mu_e=1.0, count=200, seed=0,
                           offsets=(1.0, 1.5, 2.0, 2.5)):
    """Relative defects of the two transmission conditions.

    Traces on each side are obtained by sampling the field along the
    normal at ``offsets`` times the local mesh size ``sqrt(area)`` from
    ``count`` random triangle centroids and extrapolating the samples to
    the surface with a cubic.  Sampling at a mesh-size distance keeps the
    values away from the element-scale near field of the discrete
    densities, which does not converge pointwise.

    Returns
    -------
    (t1, t2) : floats
        ``|n x (E_i - E_s - E_inc)| / |n x E_inc|`` and the same for
        ``mu^{-1} curl E``.
    """
    mesh = sol.mesh
    rng = np.random.default_rng(seed)
    idx = rng.choice(mesh.n_triangles, min(count, mesh.n_triangles), replace=False)
    c = mesh.centroids[idx]
    n = mesh.normals[idx]
    h = np.sqrt(mesh.areas[idx])[:, None]

    def traces(rep, sign):
        samples = [rep.field_and_curl(c + sign * t * h * n) for t in offsets]
        E = _extrapolate_to_zero(offsets, [s[0] for s in samples])
        C = _extrapolate_to_zero(offsets, [s[1] for s in samples])
        return E, C

    Ei, Ci = traces(sol.interior, -1.0)
    Es, Cs = traces(sol.exterior, 1.0)
    Einc, Cinc = sol.wave.field(c), sol.wave.curl(c)
    t1 = np.linalg.norm(np.cross(n, Ei - Es - Einc)) / np.linalg.norm(np.cross(n, Einc))
    t2 = (np.linalg.norm(np.cross(n, Ci / mu_i - (Cs + Cinc) / mu_e))
          / np.linalg.norm(np.cross(n, Cinc / mu_e)))
    return float(t1), float(t2)


def reconstruct(kind, density, med, cp, ops, wave):
    """Field evaluators for a density solved from formulation ``kind``.

    ``S``/``T``::

        E^s = -a Psi_E(k_e) j - b Psi_M(k_e) C0* j
        E^i = -(1/rho) Psi_E(k_i)(g_N + N_e j) - Psi_M(k_i)(g_D + L_e j)

    ``Sprime``::

        E^i = -Psi_E(k_i) j
        E^s = rho Psi_E(k_e)((1/2 + M_i) j) + Psi_M(k_e)(C_i j)

    ``Tprime``::

        E^i = -Psi_M(k_i) m
        E^s = rho Psi_E(k_e)(C_i m) + Psi_M(k_e)((1/2 + M_i) m)

    Here ``g_D``, ``g_N`` are the traces of the incident field.
    """
    from .formulations import build_Le_Ne

    kind = FormulationKind(kind)
    if density.tag is not DensityTag.for_kind(kind):
        raise ValueError("density tagged %s cannot be used with formulation %s"
                         % (density.tag.value, kind.value))
    if density.basis != kind.basis:
        raise ValueError("formulation %s needs a density in basis %s" % (kind.value, kind.basis))
    ke, ki, rho = med.kappa_e, med.kappa_i, med.rho
    w = wave.with_kappa(ke)
    j = density.coefficients
    space = density.space
    tag = density.tag

    def X(c):
        return SurfaceDensity(c, space, tag, "X")

    def Y(c):
        return SurfaceDensity(c, space, tag, "Y")

    if kind in (FormulationKind.S, FormulationKind.T):
        a, b = cp.a, cp.b
        # E^s = -Psi_E(a j) - Psi_M(b C0* j); C0* j lies in Y
        jm = Y(b * (ops.map("C0", "X") @ j)) if b != 0 else None
        ext = _representation(X(a * j), jm, ke)
        L, N = build_Le_Ne(med, cp, ops, primed=False, domain="X")
        gd, gn = ops.traces(w)
        inte = _representation(X((gn + N @ j) / rho), Y(gd + L @ j), ki)
    elif kind is FormulationKind.Sprime:
        P = 0.5 * j + ops.map("M_i", "X") @ j
        inte = _representation(X(j), None, ki)
        ext = _representation(X(-rho * P), Y(-(ops.map("C_i", "X") @ j)), ke)
    else:
        P = 0.5 * j + ops.map("M_i", "Y") @ j
        inte = _representation(None, Y(j), ki)
        ext = _representation(X(-rho * (ops.map("C_i", "Y") @ j)), Y(-P), ke)
    return FieldSolution(kind=kind, interior=inte, exterior=ext, wave=w, mesh=space.mesh)


@dataclass
class FarFieldPattern:
    directions: np.ndarray
    values: np.ndarray

    def tangential_error(self):
        return float(np.max(np.abs(np.einsum("ij,ij->i", self.directions, self.values)),
                            initial=0.0))


def far_field(rep, directions):
    """Far-field pattern of the scattered field.

    ``rep`` is a :class:`FieldSolution` (its scattered part is used) or a
    :class:`Representation`.
    """
    r = rep.exterior if isinstance(rep, FieldSolution) else rep
    d = np.atleast_2d(np.asarray(directions, float))
    d = d / np.linalg.norm(d, axis=1, keepdims=True)
    return FarFieldPattern(d, r.far_field(d))


def far_field_grid(n_theta=181, n_phi=73):
    """Directions on a ``theta x phi`` grid (theta in [0, pi], phi in [0, 2 pi])."""
    th = np.linspace(0.0, np.pi, n_theta)
    ph = np.linspace(0.0, 2.0 * np.pi, n_phi)
    T, P = np.meshgrid(th, ph, indexing="ij")
    T, P = T.ravel(), P.ravel()
    d = np.stack([np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], axis=1)
    return T, P, d


def sphere_grid(n_theta=12, n_phi=24):
    """Gauss-Legendre x trapezoidal rule on the unit sphere: ``(points, weights)``."""
    x, wx = np.polynomial.legendre.leggauss(n_theta)
    ph = 2.0 * np.pi * np.arange(n_phi) / n_phi
    ct = np.repeat(x, n_phi)
    st = np.sqrt(1.0 - ct ** 2)
    p = np.tile(ph, n_theta)
    pts = np.stack([st * np.cos(p), st * np.sin(p), ct], axis=1)
    w = np.repeat(wx, n_phi) * (2.0 * np.pi / n_phi)
    return pts, w


def radiation_check(rep, radii, n_theta=12, n_phi=24):
    """Silver-Mueller defect ``int_{|x|=R} |curl E x x^ - i k E|^2`` for each ``R``."""
    r = rep.exterior if isinstance(rep, FieldSolution) else rep
    u, w = sphere_grid(n_theta, n_phi)
    out = []
    for R in np.atleast_1d(np.asarray(radii, float)):
        if r.is_zero:
            out.append(0.0)
            continue
        E, C = r.field_and_curl(R * u)
        defect = np.cross(C, u) - 1j * r.kappa * E
        out.append(float(np.sum(w * np.sum(np.abs(defect) ** 2, axis=1)) * R ** 2))
    return np.array(out)
