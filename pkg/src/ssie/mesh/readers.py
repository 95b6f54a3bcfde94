"""Readers for Gmsh ASCII v2 and OFF surface meshes."""

from pathlib import Path

import numpy as np

from .surface import MeshError, build_mesh

__all__ = ["load_mesh", "read_gmsh_v2", "read_off", "write_off"]


def _tokens(lines):
    for line in lines:
        s = line.split("#", 1)[0].strip()
        if s:
            yield s


def read_off(text):
    """Parse an OFF file body into ``(vertices, triangles)`` (0-based).

    Polygonal faces with more than three corners are fan-triangulated.
    """
    it = _tokens(text.splitlines())
    try:
        head = next(it)
        if head.startswith("OFF"):
            rest = head[3:].split()
            counts = rest if rest else next(it).split()
        else:
            raise MeshError("OFF parse failure: missing OFF header")
        nv, nf = int(counts[0]), int(counts[1])
        verts = np.array([[float(x) for x in next(it).split()[:3]] for _ in range(nv)])
        tris = []
        for _ in range(nf):
            row = [int(x) for x in next(it).split()]
            n, idx = row[0], row[1:1 + row[0]]
            if n < 3 or len(idx) != n:
                raise MeshError("OFF parse failure: malformed face record")
            tris.extend([idx[0], idx[i], idx[i + 1]] for i in range(1, n - 1))
    except (StopIteration, ValueError, IndexError) as exc:
        raise MeshError("OFF parse failure: %s" % exc) from exc
    return verts.reshape(-1, 3), np.array(tris, dtype=np.int64).reshape(-1, 3)


def read_gmsh_v2(text):
    """Parse a Gmsh 2.x ASCII file, keeping only 3-node triangles (type 2).

    Node tags are mapped to consecutive 0-based indices; unused nodes
    (e.g. geometry points) are dropped.
    """
    lines = text.splitlines()

    def section(name):
        try:
            i = lines.index("$" + name)
        except ValueError:
            raise MeshError("Gmsh parse failure: missing $%s section" % name) from None
        n = int(lines[i + 1].split()[0])
        return lines[i + 2:i + 2 + n]

    try:
        if "$MeshFormat" not in lines:
            raise MeshError("Gmsh parse failure: missing $MeshFormat section")
        version = lines[lines.index("$MeshFormat") + 1].split()[0]
        if not version.startswith("2"):
            raise MeshError("Gmsh parse failure: only format version 2 is supported")
        tags, coords = [], []
        for row in section("Nodes"):
            p = row.split()
            tags.append(int(p[0]))
            coords.append([float(x) for x in p[1:4]])
        tris = []
        for row in section("Elements"):
            p = [int(x) for x in row.split()]
            if p[1] == 2:
                ntags = p[2]
                tris.append(p[3 + ntags:6 + ntags])
    except (ValueError, IndexError) as exc:
        raise MeshError("Gmsh parse failure: %s" % exc) from exc
    if not tris:
        raise MeshError("Gmsh parse failure: no triangle elements")
    tags = np.asarray(tags)
    coords = np.asarray(coords, dtype=float)
    tris = np.asarray(tris, dtype=np.int64)
    lookup = {t: i for i, t in enumerate(tags)}
    try:
        tris = np.vectorize(lookup.__getitem__)(tris)
    except KeyError as exc:
        raise MeshError("Gmsh parse failure: unknown node tag %s" % exc) from exc
    used, tris = np.unique(tris, return_inverse=True)
    return coords[used], tris.reshape(-1, 3)


def load_mesh(path, format=None):
    """Read and validate a closed surface mesh.

    Parameters
    ----------
    path : str or Path
    format : {"gmsh-ascii-v2", "off", None}
        Inferred from the suffix (``.msh`` or ``.off``) when omitted.

    Returns
    -------
    SurfaceMesh
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError("mesh file not found: %s" % path)
    if format is None:
        format = {".msh": "gmsh-ascii-v2", ".off": "off"}.get(path.suffix.lower())
    text = path.read_text()
    if format == "off":
        v, t = read_off(text)
    elif format == "gmsh-ascii-v2":
        v, t = read_gmsh_v2(text)
    else:
        raise MeshError("unsupported mesh format: %r" % (format,))
    return build_mesh(v, t)


def write_off(mesh, path):
    """Write a mesh in OFF format."""
    with open(path, "w") as fh:
        fh.write("OFF\n%d %d 0\n" % (mesh.n_vertices, mesh.n_triangles))
        for p in mesh.vertices:
            fh.write("%.17g %.17g %.17g\n" % tuple(p))
        for t in mesh.triangles:
            fh.write("3 %d %d %d\n" % tuple(t))
