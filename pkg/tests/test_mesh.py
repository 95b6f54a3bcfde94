import numpy as np
import pytest

from ssie.mesh import (MeshError, build_current_space, build_mesh, load_mesh,
                       make_icosphere, write_off)

OCTAHEDRON_OFF = """OFF
6 8 0
1 0 0
-1 0 0
0 1 0
0 -1 0
0 0 1
0 0 -1
3 0 2 4
3 2 1 4
3 1 3 4
3 3 0 4
3 2 0 5
3 1 2 5
3 3 1 5
3 0 3 5
"""


def cube():
    v = np.array([[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)], float)
    quads = [(0, 1, 3, 2), (4, 6, 7, 5), (0, 4, 5, 1), (2, 3, 7, 6), (0, 2, 6, 4), (1, 5, 7, 3)]
    tris = []
    for a, b, c, d in quads:
        tris += [(a, b, c), (a, c, d)]
    return v, np.array(tris)


def test_octahedron_off(tmp_path):
    p = tmp_path / "octa.off"
    p.write_text(OCTAHEDRON_OFF)
    m = load_mesh(p, "off")
    assert (m.n_vertices, m.n_edges, m.n_triangles) == (6, 12, 8)
    assert m.euler_characteristic == 2
    assert build_current_space(m).dof_count == 12


def test_gmsh_roundtrip(tmp_path):
    m = make_icosphere(1)
    lines = ["$MeshFormat", "2.2 0 8", "$EndMeshFormat", "$Nodes", str(m.n_vertices)]
    lines += ["%d %.17g %.17g %.17g" % ((i + 1,) + tuple(p)) for i, p in enumerate(m.vertices)]
    lines += ["$EndNodes", "$Elements", str(m.n_triangles + 1),
              "1 15 2 0 0 1"]  # a point element that the reader must skip
    lines += ["%d 2 2 0 1 %d %d %d" % ((i + 2,) + tuple(t + 1)) for i, t in enumerate(m.triangles)]
    lines += ["$EndElements"]
    p = tmp_path / "s.msh"
    p.write_text("\n".join(lines) + "\n")
    g = load_mesh(p)
    assert g.n_triangles == m.n_triangles
    assert np.allclose(g.total_area, m.total_area)


@pytest.mark.parametrize("level, F, E, V", [(0, 20, 30, 12), (2, 320, 480, 162)])
def test_icosphere_counts(level, F, E, V):
    m = make_icosphere(level)
    assert (m.n_triangles, m.n_edges, m.n_vertices) == (F, E, V)
    assert np.abs(np.linalg.norm(m.vertices, axis=1) - 1.0).max() < 1e-14


def test_icosphere_area_level3():
    m = make_icosphere(3, 2.0)
    assert abs(m.total_area / (16 * np.pi) - 1) < 5e-3


def test_outward_normals_and_volume():
    m = make_icosphere(2)
    assert m.signed_volume > 0
    assert np.all(np.einsum("ij,ij->i", m.normals, m.centroids) > 0)
    assert np.all(m.areas > 0)


def test_inverted_triangle_is_repaired():
    v, t = cube()
    t = t.copy()
    t[3] = t[3, ::-1]
    m = build_mesh(v, t)
    assert m.signed_volume == pytest.approx(1.0)
    # the repaired orientation agrees with the untouched cube
    ref = build_mesh(*cube())
    assert np.allclose(m.normals, ref.normals)


def test_globally_inward_mesh_is_flipped():
    v, t = cube()
    m = build_mesh(v, t[:, ::-1])
    assert m.signed_volume > 0


def test_non_orientable_rejected():
    # six-vertex projective plane: closed, every edge shared twice, no orientation
    F = [[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 5, 1],
         [1, 2, 4], [2, 3, 5], [3, 4, 1], [4, 5, 2], [5, 1, 3]]
    v = np.random.default_rng(0).normal(size=(6, 3))
    with pytest.raises(MeshError, match="inconsistent orientation"):
        build_mesh(v, F)


def test_open_and_nonmanifold_rejected():
    v, t = cube()
    with pytest.raises(MeshError, match="non-manifold or open"):
        build_mesh(v, t[:-1])
    # a fin: third triangle on an existing edge
    v2 = np.vstack([v, [[0.5, -1.0, 0.0]]])
    with pytest.raises(MeshError):
        build_mesh(v2, np.vstack([t, [[0, 1, 8]]]))


def test_torus_rejected():
    n, m = 8, 6
    R, r = 2.0, 0.5
    u, w = np.meshgrid(np.arange(n) * 2 * np.pi / n, np.arange(m) * 2 * np.pi / m, indexing="ij")
    v = np.stack([(R + r * np.cos(w)) * np.cos(u), (R + r * np.cos(w)) * np.sin(u),
                  r * np.sin(w)], -1).reshape(-1, 3)
    idx = lambda i, j: (i % n) * m + (j % m)  # noqa: E731
    tris = []
    for i in range(n):
        for j in range(m):
            tris += [(idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)),
                     (idx(i, j), idx(i + 1, j + 1), idx(i, j + 1))]
    with pytest.raises(MeshError, match="Euler"):
        build_mesh(v, tris)


def test_parse_failure(tmp_path):
    p = tmp_path / "bad.off"
    p.write_text("OFF\n3 1 0\n0 0 0\n1 0\n")
    with pytest.raises(MeshError):
        load_mesh(p)


def test_off_roundtrip(tmp_path):
    m = make_icosphere(1)
    write_off(m, tmp_path / "m.off")
    assert np.allclose(load_mesh(tmp_path / "m.off").vertices, m.vertices)


def test_divergence_integrates_to_zero(space2):
    sp = space2
    A = sp.mesh.areas
    div = np.array([sp.divergence(e) for e in np.eye(sp.dof_count)[:50]])
    integrals = div @ A
    assert np.all(np.abs(integrals) <= 1e-12 * sp.lengths[:50])


def test_local_divergence_matches_flux(space1):
    # on each triangle the divergence of a basis function is +-length/area
    sp = space1
    for k in range(10):
        e = np.zeros(sp.dof_count)
        e[k] = 1.0
        d = sp.divergence(e)
        t0, t1 = sp.edge_tris[k]
        assert d[t0] == pytest.approx(sp.lengths[k] / sp.mesh.areas[t0])
        assert d[t1] == pytest.approx(-sp.lengths[k] / sp.mesh.areas[t1])
        assert np.count_nonzero(d) == 2


def test_normal_continuity(space1):
    # the normal component across the shared edge agrees on both sides
    sp = space1
    m = sp.mesh
    for k in range(0, sp.dof_count, 17):
        e = np.zeros(sp.dof_count)
        e[k] = 1.0
        a, b = m.vertices[sp.edges[k]]
        mid = 0.5 * (a + b)
        vals = []
        for t in sp.edge_tris[k]:
            P = m.corners[t]
            bary = np.linalg.lstsq(np.vstack([P.T, np.ones(3)]), np.append(mid, 1.0),
                                   rcond=None)[0]
            f = sp.evaluate(e, np.array([t]), bary[None])[0]
            nu = np.cross(b - a, m.normals[t])
            c = P.mean(0)
            nu *= np.sign(np.dot(nu, mid - c))
            vals.append(np.dot(f, nu / np.linalg.norm(nu)))
        assert vals[0] == pytest.approx(-vals[1], abs=1e-12)
