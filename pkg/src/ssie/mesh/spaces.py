"""Div-conforming boundary element spaces.

Every field in these spaces is stored triangle by triangle through the
lowest-order Raviart-Thomas shape functions

.. math:: \\phi_{t,k}(x) = (x - p_k) / (2 A_t),

which carry unit outward flux through the edge opposite corner ``p_k`` and
have constant surface divergence ``1 / A_t``.  A global basis function is
then a sparse map from its coefficient to the local fluxes, which keeps
assembly code independent of the basis.

Two spaces are built on a mesh:

* the edge space (RWG functions, normalised by edge length) on the mesh
  itself, used for all unknowns;
* a dual space on the barycentric refinement, where each function lives on
  the two dual cells around the endpoints of a primal edge and crosses the
  dual edge.  It is used to test the skew pairing
  ``B(j, m) = int j . (m x n)``, which is singular on the edge space alone.
"""

from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .surface import SurfaceMesh

__all__ = ["CurrentSpace", "BarycentricRefinement", "DualSpace",
           "build_current_space", "local_skew_gram", "local_mass"]


def local_skew_gram(corners, normals, areas):
    """Per-triangle matrices ``H[t, j, i] = int phi_i . (phi_j x n)``.

    The integrand is linear, so the centroid rule is exact.
    """
    c = corners.mean(axis=1)
    h = np.empty((len(corners), 3, 3))
    for i in range(3):
        for j in range(3):
            v = np.cross(c - corners[:, i], corners[:, i] - corners[:, j])
            h[:, j, i] = np.einsum("ij,ij->i", normals, v) / (4.0 * areas)
    return h


def local_mass(corners, areas):
    """Per-triangle matrices ``int phi_i . phi_j`` (exact, quadratic integrand)."""
    # edge-midpoint rule is exact for quadratics
    mids = 0.5 * (corners[:, [1, 2, 0]] + corners[:, [2, 0, 1]])
    m = np.zeros((len(corners), 3, 3))
    for q in range(3):
        d = mids[:, q][:, None, :] - corners       # (F, 3, 3): x_q - p_i
        m += np.einsum("tid,tjd->tij", d, d)
    return m / (12.0 * areas[:, None, None])


class CurrentSpace:
    """Edge-element (RWG) space on a closed mesh.

    Parameters
    ----------
    mesh : SurfaceMesh

    Attributes
    ----------
    dof_count : int
        Number of basis functions, one per mesh edge.
    tri_dofs, tri_coef : (F, 3) arrays
        Local representation: on triangle ``t`` the basis function
        ``tri_dofs[t, k]`` equals ``tri_coef[t, k] * phi_{t,k}``.
    """

    def __init__(self, mesh):
        if not isinstance(mesh, SurfaceMesh):
            raise TypeError("mesh must be a SurfaceMesh")
        self.mesh = mesh
        self.edges = mesh.edges
        self.edge_tris = mesh.edge_tris
        self.lengths = mesh.edge_lengths
        self.dof_count = mesh.n_edges
        f = mesh.n_triangles
        self.tri_dofs = np.asarray(mesh.tri_edges)
        sign = np.where(self.edge_tris[self.tri_dofs, 0] == np.arange(f)[:, None], 1.0, -1.0)
        self.tri_coef = sign * self.lengths[self.tri_dofs]
        self.local_map = _local_map(self.tri_dofs, self.tri_coef, self.dof_count)

    def __repr__(self):
        return "CurrentSpace(dof_count=%d)" % self.dof_count

    def local_fluxes(self, coeffs):
        """(F, 3) outward fluxes of the field with the given coefficients."""
        return (self.local_map @ np.asarray(coeffs)).reshape(self.mesh.n_triangles, 3)

    def divergence(self, coeffs):
        """Piecewise-constant surface divergence, one value per triangle."""
        return self.local_fluxes(coeffs).sum(axis=1) / self.mesh.areas

    def evaluate(self, coeffs, tri, bary):
        """Evaluate the tangential field at barycentric points.

        Parameters
        ----------
        coeffs : (dof_count,) array
        tri : (P,) int array of triangle indices
        bary : (P, 3) barycentric coordinates
        """
        return evaluate_local(self.mesh.corners, self.mesh.areas,
                              self.local_fluxes(coeffs), tri, bary)

    @cached_property
    def refinement(self):
        return BarycentricRefinement(self.mesh)

    @cached_property
    def dual(self):
        """Barycentric dual space used as the test space of the pairing."""
        return DualSpace(self)

    @cached_property
    def refined_map(self):
        """Sparse map from coefficients to local fluxes on the refined mesh."""
        return self.refinement.restrict(self.local_map)

    @cached_property
    def mass(self):
        """L2 Gram matrix of the edge functions (dense)."""
        m = local_mass(self.mesh.corners, self.mesh.areas)
        return _galerkin(self.local_map, m, self.local_map)

    @cached_property
    def pairing(self):
        """Dense matrix ``P[k, l] = B(f_l, f_k)``.

        Skew-symmetric and, on closed meshes, rank deficient; kept for
        diagnostics only.
        """
        h = local_skew_gram(self.mesh.corners, self.mesh.normals, self.mesh.areas)
        return _galerkin(self.local_map, h, self.local_map)

    @cached_property
    def mixed_pairing(self):
        """Dense matrix ``G[k, l] = B(f_l, g_k)`` with ``g_k`` the dual functions."""
        r = self.refinement.mesh
        h = local_skew_gram(r.corners, r.normals, r.areas)
        return _galerkin(self.dual.local_map, h, self.refined_map)


def build_current_space(mesh):
    """Return the edge-element space of a validated mesh."""
    return CurrentSpace(mesh)


def _local_map(tri_dofs, tri_coef, n):
    f = tri_dofs.shape[0]
    rows = np.arange(3 * f)
    return sp.csr_matrix((tri_coef.ravel(), (rows, tri_dofs.ravel())), shape=(3 * f, n))


def _galerkin(test_map, blocks, trial_map):
    """Assemble ``test_map^T blockdiag(blocks) trial_map`` as a dense array."""
    f = blocks.shape[0]
    idx = np.arange(3 * f).reshape(f, 3)
    rows = np.repeat(idx, 3, axis=1).ravel()
    cols = np.tile(idx, (1, 3)).ravel()
    bd = sp.csr_matrix((blocks.ravel(), (rows, cols)), shape=(3 * f, 3 * f))
    return np.asarray((test_map.T @ bd @ trial_map).todense())


def evaluate_local(corners, areas, fluxes, tri, bary):
    """Evaluate piecewise Raviart-Thomas fields given by local fluxes."""
    p = corners[tri]                                     # (P, 3, 3)
    x = np.einsum("pk,pkd->pd", bary, p)
    c = fluxes[tri]                                      # (P, 3)
    val = c.sum(axis=1)[:, None] * x - np.einsum("pk,pkd->pd", c, p)
    return val / (2.0 * areas[tri][:, None])


class BarycentricRefinement:
    """Barycentric refinement of a mesh: each triangle splits into six.

    Vertex numbering of the refined mesh: the ``V`` original vertices, then
    the ``E`` edge midpoints, then the ``F`` centroids.  The children of
    coarse triangle ``(p0, p1, p2)`` are, in order,
    ``(p0, m01, c), (m01, p1, c), (p1, m12, c), (m12, p2, c), (p2, m20, c),
    (m20, p0, c)``, all with the parent orientation.
    """

    def __init__(self, mesh):
        self.coarse = mesh
        nv, ne, nf = mesh.n_vertices, mesh.n_edges, mesh.n_triangles
        v = mesh.vertices
        mids = v[mesh.edges].mean(axis=1)
        verts = np.concatenate([v, mids, mesh.centroids])
        t = mesh.triangles
        te = mesh.tri_edges + nv                 # midpoint opposite local vertex k
        c = np.arange(nf) + nv + ne
        p0, p1, p2 = t[:, 0], t[:, 1], t[:, 2]
        m01, m12, m20 = te[:, 2], te[:, 0], te[:, 1]
        children = np.stack([
            np.stack([p0, m01, c], 1), np.stack([m01, p1, c], 1),
            np.stack([p1, m12, c], 1), np.stack([m12, p2, c], 1),
            np.stack([p2, m20, c], 1), np.stack([m20, p0, c], 1)], axis=1)   # (F, 6, 3)
        self.mesh = SurfaceMesh(verts, children.reshape(-1, 3))
        self.children = np.arange(6 * nf).reshape(nf, 6)
        self.parent = np.repeat(np.arange(nf), 6)
        self.restriction = self._restriction_blocks()

    def _restriction_blocks(self):
        """``R[T, c, k, i]``: flux of ``phi_{T,i}`` through child edge ``k``."""
        cm = self.coarse
        rm = self.mesh
        P = cm.corners                                   # (F, 3, 3)
        Q = rm.corners.reshape(cm.n_triangles, 6, 3, 3)
        n = cm.normals
        R = np.empty((cm.n_triangles, 6, 3, 3))
        for k in range(3):
            a = Q[:, :, (k + 1) % 3]
            b = Q[:, :, (k + 2) % 3]
            # outward normal times length: (b - a) x n
            nu = np.cross(b - a, n[:, None, :])
            mid = 0.5 * (a + b)
            for i in range(3):
                R[:, :, k, i] = np.einsum("tcd,tcd->tc", mid - P[:, None, i], nu)
        return R / (2.0 * cm.areas[:, None, None, None])

    def restrict(self, coarse_map):
        """Turn a coarse local-flux map into a refined local-flux map."""
        f = self.coarse.n_triangles
        rows, cols, vals = [], [], []
        for c in range(6):
            for k in range(3):
                for i in range(3):
                    rows.append(3 * self.children[:, c] + k)
                    cols.append(3 * np.arange(f) + i)
                    vals.append(self.restriction[:, c, k, i])
        r = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                          shape=(18 * f, 3 * f))
        return (r @ coarse_map).tocsr()


class DualSpace:
    """Dual edge functions on the barycentric refinement.

    Function ``k`` is attached to primal edge ``k = (v_a, v_b)``.  It has
    unit flux through the dual edge ``c_{T+} - m_k - c_{T-}`` (half through
    each half), uniform divergence per refined triangle within the dual
    cells of ``v_a`` (source) and ``v_b`` (sink), and zero flux through the
    radial half edges ``(v, m_k)``.  Its sign is chosen so that the pairing
    with the primal function of the same edge is positive.
    """

    def __init__(self, space):
        self.space = space
        self.refinement = space.refinement
        self.dof_count = space.dof_count
        rows, cols, vals = self._build()
        r = self.refinement.mesh
        self.local_map = sp.csr_matrix((vals, (rows, cols)),
                                       shape=(3 * r.n_triangles, self.dof_count))
        # orient each function so that B(f_k, g_k) > 0
        h = local_skew_gram(r.corners, r.normals, r.areas)
        g = _galerkin_diag(self.local_map, h, space.refined_map)
        sign = np.where(g < 0, -1.0, 1.0)
        self.local_map = (self.local_map @ sp.diags(sign)).tocsr()

    def _build(self):
        cm = self.space.mesh
        ref = self.refinement
        rm = ref.mesh
        nv, ne = cm.n_vertices, cm.n_edges
        rtri = rm.triangles
        # refined edge -> the two refined triangles
        r_edges, r_tri_edges = rm.edges, rm.tri_edges
        edge_index = {(int(a), int(b)): i for i, (a, b) in enumerate(r_edges)}
        r_edge_tris = rm.edge_tris
        valence = cm.vertex_valence()

        def ekey(a, b):
            return edge_index[(min(a, b), max(a, b))]

        rows, cols, vals = [], [], []
        for e in range(ne):
            va, vb = (int(x) for x in cm.edges[e])
            m = nv + e
            tp = int(cm.edge_tris[e, 0])
            c_plus = nv + ne + tp
            for v, s in ((va, 1.0), (vb, -1.0)):
                n2 = 2 * valence[v]
                cross_edges = {ekey(m, c_plus), ekey(m, nv + ne + int(cm.edge_tris[e, 1]))}
                # first triangle: the child of T+ containing v, m and c_plus
                start_edge = ekey(v, m)
                t0, t1 = r_edge_tris[start_edge]
                cur = t0 if c_plus in rtri[t0] else t1
                prev_vertex = m
                q = 0.0
                for _ in range(n2):
                    tri = [int(x) for x in rtri[cur]]
                    w_next = [x for x in tri if x != v and x != prev_vertex][0]
                    b_edge = ekey(prev_vertex, w_next)
                    b = 0.5 * s if b_edge in cross_edges else 0.0
                    q_new = q + s / n2 - b
                    for lk in range(3):
                        opp = tri[lk]
                        if opp == v:
                            flux = b
                        elif opp == w_next:        # entering edge (v, prev)
                            flux = -q
                        else:                      # exit edge (v, w_next)
                            flux = q_new
                        rows.append(3 * cur + lk)
                        cols.append(e)
                        vals.append(flux)
                    q = q_new
                    ex = ekey(v, w_next)
                    a0, a1 = r_edge_tris[ex]
                    cur = a1 if a0 == cur else a0
                    prev_vertex = w_next
                if abs(q) > 1e-12:
                    raise RuntimeError("dual function construction failed to close")
        return np.array(rows), np.array(cols), np.array(vals)

    def local_fluxes(self, coeffs):
        r = self.refinement.mesh
        return (self.local_map @ np.asarray(coeffs)).reshape(r.n_triangles, 3)

    def evaluate(self, coeffs, tri, bary):
        r = self.refinement.mesh
        return evaluate_local(r.corners, r.areas, self.local_fluxes(coeffs), tri, bary)


def _galerkin_diag(test_map, blocks, trial_map):
    """Diagonal of :func:`_galerkin` without forming the dense matrix."""
    f = blocks.shape[0]
    idx = np.arange(3 * f).reshape(f, 3)
    rows = np.repeat(idx, 3, axis=1).ravel()
    cols = np.tile(idx, (1, 3)).ravel()
    bd = sp.csr_matrix((blocks.ravel(), (rows, cols)), shape=(3 * f, 3 * f))
    return np.asarray(test_map.multiply(bd @ trial_map).sum(axis=0)).ravel()
