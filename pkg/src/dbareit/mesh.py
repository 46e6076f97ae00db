"""Boundary-conforming triangular meshes for the electrode forward solver.

The mesher places boundary nodes aligned with electrode endpoints (every
electrode spans at least two boundary edges), fills the interior with a
hexagonal lattice clipped away from the boundary, and triangulates with
Delaunay.  Triangles whose centroid falls outside the polygon are dropped,
which is sufficient for the convex-ish disc and chest outlines this package
ships; a failed boundary check raises instead of silently producing a bad
mesh.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import shapely
from scipy.spatial import Delaunay

from .geometry import Domain, ElectrodeLayout, GeometryError, boundary_point


class MeshingError(RuntimeError):
    pass


@dataclass(frozen=True)
class TriMesh:
    """Conforming triangulation with tagged boundary edges.

    vertices : (n, 2) float array, physical coordinates.
    triangles : (t, 3) int array, counterclockwise.
    boundary_edges : (b, 2) int array of vertex pairs on the boundary.
    boundary_tags : (b, ) int array; electrode index or -1 for a gap.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    boundary_tags: np.ndarray

    @property
    def vertex_count(self) -> int:
        return self.vertices.shape[0]

    def triangle_areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        return 0.5 * ((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
                      - (p[:, 2, 0] - p[:, 0, 0]) * (p[:, 1, 1] - p[:, 0, 1]))

    def triangle_centroids(self) -> np.ndarray:
        return self.vertices[self.triangles].mean(axis=1)


def _boundary_arcs(domain: Domain, layout: ElectrodeLayout, target_h: float):
    """Arc-length breakpoints and per-segment electrode tags along the boundary."""
    per = domain.perimeter
    events = []
    for idx in range(layout.count):
        s0, s1 = layout.arcs[idx]
        events.append((np.mod(s0, per), np.mod(s0, per) + layout.length, idx))
    events.sort()
    nodes_s: list[float] = []
    tags: list[int] = []

    def subdivide(s0, s1, tag, min_segments):
        length = s1 - s0
        k = max(min_segments, int(np.ceil(length / target_h)))
        for j in range(k):
            nodes_s.append(s0 + j * length / k)
            tags.append(tag)

    cursor = events[0][0]
    first_start = cursor
    for i, (s0, s1, idx) in enumerate(events):
        if s0 > cursor + 1e-12 * per:
            subdivide(cursor, s0, -1, 1)
        subdivide(s0, s1, idx, 2)
        cursor = s1
    wrap_end = first_start + per
    if wrap_end > cursor + 1e-12 * per:
        subdivide(cursor, wrap_end, -1, 1)
    return np.asarray(nodes_s), np.asarray(tags, dtype=int)


def mesh_domain(domain: Domain, layout: ElectrodeLayout, target_h: float) -> TriMesh:
    """Triangulate the domain with boundary edges conforming to the electrodes.

    target_h is the desired edge length in the domain's physical units.
    """
    if target_h <= 0:
        raise GeometryError("target_h must be positive")
    nodes_s, seg_tags = _boundary_arcs(domain, layout, target_h)
    bpts = boundary_point(domain, nodes_s)
    nb = len(bpts)

    poly = domain.polygon()
    shrunk = poly.buffer(-0.55 * target_h)
    if shrunk.is_empty:
        raise MeshingError("target_h too coarse for this domain")
    minx, miny, maxx, maxy = poly.bounds
    dx = target_h
    dy = target_h * np.sqrt(3) / 2
    rows = np.arange(miny + dy / 2, maxy, dy)
    interior = []
    for r, y in enumerate(rows):
        shift = (r % 2) * dx / 2
        xs = np.arange(minx + shift, maxx, dx)
        keep = shapely.contains_xy(shrunk, xs, np.full_like(xs, y))
        interior.append(np.column_stack([xs[keep], np.full(keep.sum(), y)]))
    interior = np.vstack(interior) if interior else np.empty((0, 2))

    pts = np.vstack([np.column_stack([bpts.real, bpts.imag]), interior])
    tri = Delaunay(pts)
    cent = pts[tri.simplices].mean(axis=1)
    keep = shapely.contains_xy(poly, cent[:, 0], cent[:, 1])
    simplices = tri.simplices[keep]

    # orient counterclockwise
    p = pts[simplices]
    areas = 0.5 * ((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
                   - (p[:, 2, 0] - p[:, 0, 0]) * (p[:, 1, 1] - p[:, 0, 1]))
    flip = areas < 0
    simplices[flip] = simplices[flip][:, ::-1]

    # boundary edges must connect consecutive boundary nodes
    edge_count: dict[tuple[int, int], int] = {}
    for t in simplices:
        for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
            key = (min(a, b), max(a, b))
            edge_count[key] = edge_count.get(key, 0) + 1
    hull = [e for e, c in edge_count.items() if c == 1]
    edges = []
    tags = []
    for a, b in hull:
        if a >= nb or b >= nb:
            raise MeshingError("interior node ended up on the hull; refine target_h")
        if (b - a) % nb == 1:
            lo = a
        elif (a - b) % nb == 1:
            lo = b
        else:
            raise MeshingError("non-consecutive boundary nodes on hull; domain too "
                               "non-convex for this mesher")
        edges.append((a, b))
        tags.append(seg_tags[lo])
    order = np.argsort([min(e) for e in edges])
    edges = np.asarray(edges, dtype=int)[order]
    tags = np.asarray(tags, dtype=int)[order]

    mesh = TriMesh(vertices=pts, triangles=simplices,
                   boundary_edges=edges, boundary_tags=tags)
    for idx in range(layout.count):
        if int(np.sum(tags == idx)) < 2:
            raise MeshingError(f"electrode {idx} covered by fewer than 2 edges")
    if np.any(mesh.triangle_areas() <= 0):
        raise MeshingError("degenerate triangle produced")
    return mesh


def save_mesh(mesh: TriMesh, path) -> None:
    """Plain-text mesh format: counts, vertex lines, triangle lines, edge lines."""
    with open(path, "w") as f:
        f.write(f"{mesh.vertex_count} {len(mesh.triangles)} {len(mesh.boundary_edges)}\n")
        for x, y in mesh.vertices:
            f.write(f"{x:.17g} {y:.17g}\n")
        for a, b, c in mesh.triangles:
            f.write(f"{a} {b} {c}\n")
        for (a, b), t in zip(mesh.boundary_edges, mesh.boundary_tags):
            f.write(f"{a} {b} {t}\n")


def load_mesh(path) -> TriMesh:
    lines = Path(path).read_text().split("\n")
    nv, nt, ne = (int(x) for x in lines[0].split())
    verts = np.array([[float(x) for x in lines[1 + i].split()] for i in range(nv)])
    tris = np.array([[int(x) for x in lines[1 + nv + i].split()] for i in range(nt)],
                    dtype=int)
    raw = [[int(x) for x in lines[1 + nv + nt + i].split()] for i in range(ne)]
    edges = np.array([[r[0], r[1]] for r in raw], dtype=int)
    tags = np.array([r[2] for r in raw], dtype=int)
    return TriMesh(vertices=verts, triangles=tris, boundary_edges=edges,
                   boundary_tags=tags)
