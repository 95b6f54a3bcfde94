"""Closed, oriented triangulated surfaces.

A :class:`SurfaceMesh` is the geometric substrate of every operator in the
package.  It is validated once on construction (watertight 2-manifold,
consistent outward orientation, genus zero) and is immutable afterwards.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

__all__ = ["MeshError", "SurfaceMesh", "make_icosphere", "build_mesh"]


class MeshError(ValueError):
    """Raised when a triangulation violates the surface invariants."""


def _edge_table(triangles):
    """Unique undirected edges and the triangle/edge incidence.

    Returns
    -------
    edges : (E, 2) int array
        Sorted vertex pairs.
    tri_edges : (F, 3) int array
        ``tri_edges[t, k]`` is the edge opposite local vertex ``k``.
    """
    f = triangles.shape[0]
    # local edge k is opposite vertex k: (v[k+1], v[k+2])
    a = triangles[:, [1, 2, 0]].ravel()
    b = triangles[:, [2, 0, 1]].ravel()
    pairs = np.stack([np.minimum(a, b), np.maximum(a, b)], axis=1)
    edges, inverse = np.unique(pairs, axis=0, return_inverse=True)
    return edges, inverse.reshape(f, 3)


def _repair_orientation(triangles, tri_edges, n_edges):
    """Flip triangles so that neighbours traverse shared edges oppositely.

    Breadth-first propagation from one seed per connected component.
    Raises :class:`MeshError` when no consistent orientation exists.
    """
    tris = [list(t) for t in triangles]
    f = len(tris)
    edge_faces = [[] for _ in range(n_edges)]
    edge_id = {}
    for t in range(f):
        for k, e in enumerate(tri_edges[t]):
            edge_faces[e].append(t)
            a, b = tris[t][(k + 1) % 3], tris[t][(k + 2) % 3]
            edge_id[(min(a, b), max(a, b))] = e

    def runs(tri, a, b):
        i = tri.index(a)
        return tri[(i + 1) % 3] == b

    visited = np.zeros(f, dtype=bool)
    for seed in range(f):
        if visited[seed]:
            continue
        visited[seed] = True
        queue = deque([seed])
        while queue:
            t = queue.popleft()
            tri = tris[t]
            for k in range(3):
                a, b = tri[k], tri[(k + 1) % 3]
                e = edge_id[(min(a, b), max(a, b))]
                for s in edge_faces[e]:
                    if s == t:
                        continue
                    clash = runs(tris[s], a, b)
                    if visited[s]:
                        if clash:
                            raise MeshError("inconsistent orientation: no consistent "
                                            "re-orientation by triangle flips exists")
                        continue
                    if clash:
                        tris[s] = tris[s][::-1]
                    visited[s] = True
                    queue.append(s)
    return np.array(tris, dtype=np.int64)


@dataclass(frozen=True)
class SurfaceMesh:
    """Watertight oriented triangulation with outward normals.

    Parameters
    ----------
    vertices : (V, 3) float array
    triangles : (F, 3) int array
        Vertex indices, counter-clockwise when seen from outside.

    Notes
    -----
    Use :func:`build_mesh` to construct a mesh from raw arrays; it repairs
    orientation and checks the invariants.  Derived connectivity is
    computed once in ``__post_init__``.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    normals: np.ndarray = field(init=False, repr=False)
    areas: np.ndarray = field(init=False, repr=False)
    edges: np.ndarray = field(init=False, repr=False)
    tri_edges: np.ndarray = field(init=False, repr=False)
    edge_tris: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=float)
        t = np.ascontiguousarray(self.triangles, dtype=np.int64)
        p0, p1, p2 = v[t[:, 0]], v[t[:, 1]], v[t[:, 2]]
        cr = np.cross(p1 - p0, p2 - p0)
        dbl = np.linalg.norm(cr, axis=1)
        edges, tri_edges = _edge_table(t)
        counts = np.bincount(tri_edges.ravel(), minlength=len(edges))
        edge_tris = np.full((len(edges), 2), -1, dtype=np.int64)
        if np.all(counts == 2):
            order = np.argsort(tri_edges.ravel(), kind="stable")
            edge_tris[:] = (order // 3).reshape(-1, 2)
        with np.errstate(invalid="ignore", divide="ignore"):
            normals = cr / dbl[:, None]
        for name, val in [("vertices", v), ("triangles", t), ("normals", normals),
                          ("areas", 0.5 * dbl), ("edges", edges),
                          ("tri_edges", tri_edges), ("edge_tris", edge_tris)]:
            val.setflags(write=False)
            object.__setattr__(self, name, val)
        self._check(counts)

    def _check(self, counts):
        if np.any(counts != 2):
            raise MeshError("non-manifold or open edge: %d edges without exactly two triangles"
                            % int(np.sum(counts != 2)))
        if np.any(self.areas <= 1e-14 * max(self.diameter, 1.0) ** 2):
            raise MeshError("degenerate triangle with zero area")
        # consistent orientation: every shared edge traversed in opposite directions
        tri = self.triangles
        a = tri[:, [1, 2, 0]].ravel()
        b = tri[:, [2, 0, 1]].ravel()
        key = a * (self.n_vertices + 1) + b
        if len(np.unique(key)) != len(key):
            raise MeshError("inconsistent orientation")
        if self.euler_characteristic != 2:
            raise MeshError("non-spherical topology: Euler characteristic %d != 2"
                            % self.euler_characteristic)
        if self.signed_volume <= 0.0:
            raise MeshError("normals point inward (negative signed volume)")

    # -- sizes --------------------------------------------------------------
    @property
    def n_vertices(self):
        return self.vertices.shape[0]

    @property
    def n_triangles(self):
        return self.triangles.shape[0]

    @property
    def n_edges(self):
        return self.edges.shape[0]

    @property
    def euler_characteristic(self):
        return self.n_vertices - self.n_edges + self.n_triangles

    # -- geometry -----------------------------------------------------------
    @property
    def corners(self):
        """(F, 3, 3) array of triangle corner coordinates."""
        return self.vertices[self.triangles]

    @property
    def centroids(self):
        return self.corners.mean(axis=1)

    @property
    def edge_lengths(self):
        e = self.edges
        return np.linalg.norm(self.vertices[e[:, 1]] - self.vertices[e[:, 0]], axis=1)

    @property
    def diameter(self):
        v = self.vertices
        return float(np.linalg.norm(v.max(axis=0) - v.min(axis=0)))

    @property
    def signed_volume(self):
        """(1/3) sum over triangles of the flux of x through the surface."""
        return float(np.sum(np.einsum("ij,ij->i", self.centroids, self.normals) * self.areas) / 3.0)

    @property
    def total_area(self):
        return float(self.areas.sum())

    def vertex_valence(self):
        return np.bincount(self.triangles.ravel(), minlength=self.n_vertices)


def build_mesh(vertices, triangles):
    """Validate raw arrays, repairing orientation when possible.

    Triangles are re-oriented by breadth-first propagation, then flipped
    globally if the signed volume is negative.
    """
    v = np.asarray(vertices, dtype=float)
    t = np.asarray(triangles, dtype=np.int64)
    if v.ndim != 2 or v.shape[1] != 3 or t.ndim != 2 or t.shape[1] != 3:
        raise MeshError("vertices must be (V, 3) and triangles (F, 3)")
    if t.size == 0 or t.min() < 0 or t.max() >= len(v):
        raise MeshError("triangle index out of range")
    if np.any((t[:, 0] == t[:, 1]) | (t[:, 1] == t[:, 2]) | (t[:, 0] == t[:, 2])):
        raise MeshError("degenerate triangle with repeated vertex")
    edges, tri_edges = _edge_table(t)
    counts = np.bincount(tri_edges.ravel(), minlength=len(edges))
    if np.any(counts != 2):
        raise MeshError("non-manifold or open edge: %d edges without exactly two triangles"
                        % int(np.sum(counts != 2)))
    t = _repair_orientation(t, tri_edges, len(edges))
    c = v[t].mean(axis=1)
    cr = np.cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])
    if np.sum(np.einsum("ij,ij->i", c, cr)) < 0:
        t = t[:, ::-1].copy()
    return SurfaceMesh(v, t)


def make_icosphere(subdivisions=2, radius=1.0):
    """Icosahedron refined by edge bisection, vertices projected to the sphere.

    Parameters
    ----------
    subdivisions : int
        Refinement level in ``0..7``.  Level ``k`` has ``20 * 4**k`` faces.
    radius : float
        Sphere radius.
    """
    if not 0 <= int(subdivisions) <= 7:
        raise ValueError("subdivisions must be in 0..7")
    if radius <= 0:
        raise ValueError("radius must be positive")
    g = (1.0 + 5 ** 0.5) / 2.0
    v = np.array([[-1, g, 0], [1, g, 0], [-1, -g, 0], [1, -g, 0],
                  [0, -1, g], [0, 1, g], [0, -1, -g], [0, 1, -g],
                  [g, 0, -1], [g, 0, 1], [-g, 0, -1], [-g, 0, 1]], dtype=float)
    f = np.array([[0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
                  [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
                  [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
                  [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1]], dtype=np.int64)
    v /= np.linalg.norm(v, axis=1)[:, None]
    for _ in range(int(subdivisions)):
        edges, tri_edges = _edge_table(f)
        mid = v[edges].mean(axis=1)
        mid /= np.linalg.norm(mid, axis=1)[:, None]
        m = tri_edges + len(v)          # midpoint index opposite each local vertex
        a, b, c = f[:, 0], f[:, 1], f[:, 2]
        ma, mb, mc = m[:, 0], m[:, 1], m[:, 2]   # ma lies on edge (b, c), etc.
        f = np.concatenate([np.stack([a, mc, mb], 1), np.stack([b, ma, mc], 1),
                            np.stack([c, mb, ma], 1), np.stack([ma, mb, mc], 1)])
        v = np.concatenate([v, mid])
    return build_mesh(radius * v, f)
