"""Triangle mesh ingestion, bounds, and point containment queries.

Meshes arrive from generative providers or from disk as binary STL, ASCII
STL, or OBJ (``v``/``f`` records only). All coordinates are meters
internally; unit-ambiguous files are rescaled with an explicit ``scale``
argument at ingestion. Containment is a ray-crossing parity test with a
deterministic perturbation retry, so non-watertight provider output is
accepted (flagged, not rejected).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyMesh, MalformedFile, NonClassifiable

# Triangles below this area are dropped at parse time (m^2).
DEGENERATE_AREA = 1e-12

# Primary ray plus deterministic fallback directions for grazing retries.
_RETRY_RNG = np.random.default_rng(0x5EED)
RAY_DIRECTIONS = np.vstack(
    [
        np.array([1.0, 0.0, 0.0]),
        _RETRY_RNG.normal(size=(8, 3)),
    ]
)
RAY_DIRECTIONS /= np.linalg.norm(RAY_DIRECTIONS, axis=1, keepdims=True)

MESH_FORMATS = ("stl_binary", "stl_ascii", "obj")


@dataclass(frozen=True)
class Aabb:
    """Axis-aligned bounding box, min/max corners in meters."""

    min: np.ndarray
    max: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "min", np.asarray(self.min, dtype=float))
        object.__setattr__(self, "max", np.asarray(self.max, dtype=float))
        if np.any(self.min > self.max):
            raise ValueError(f"Aabb min {self.min} exceeds max {self.max}")

    @property
    def extents(self) -> np.ndarray:
        return self.max - self.min

    def contains(self, points: np.ndarray, tol: float = 0.0) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.all((pts >= self.min - tol) & (pts <= self.max + tol), axis=1)


@dataclass(frozen=True)
class TriangleMesh:
    """Indexed triangle soup.

    ``vertices`` is (N, 3) float64 in meters, ``triangles`` is (M, 3)
    integer indices into it. ``watertight`` and ``degenerate_dropped``
    are ingestion metadata: providers routinely emit open meshes, which
    are kept and flagged rather than rejected.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    name: str = ""
    watertight: bool = True
    degenerate_dropped: int = 0

    def __post_init__(self):
        verts = np.ascontiguousarray(np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3))
        tris = np.ascontiguousarray(np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3))
        if not np.all(np.isfinite(verts)):
            raise ValueError("mesh vertices contain non-finite coordinates")
        if tris.size:
            if tris.min() < 0 or tris.max() >= len(verts):
                raise ValueError("triangle index out of range")
            if np.any(
                (tris[:, 0] == tris[:, 1])
                | (tris[:, 1] == tris[:, 2])
                | (tris[:, 0] == tris[:, 2])
            ):
                raise ValueError("triangle repeats a vertex index")
        verts.setflags(write=False)
        tris.setflags(write=False)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "triangles", tris)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_triangles(self) -> int:
        return len(self.triangles)

    def corners(self) -> np.ndarray:
        """Per-triangle corner coordinates, shape (M, 3, 3)."""
        return self.vertices[self.triangles]

    def transformed(self, scale: float = 1.0, offset=(0.0, 0.0, 0.0)) -> "TriangleMesh":
        """Uniformly scaled then translated copy."""
        return TriangleMesh(
            vertices=self.vertices * float(scale) + np.asarray(offset, dtype=float),
            triangles=self.triangles,
            name=self.name,
            watertight=self.watertight,
            degenerate_dropped=self.degenerate_dropped,
        )


def mesh_bounds(mesh: TriangleMesh) -> Aabb:
    """Tight componentwise bounds over the mesh vertices."""
    if mesh.num_triangles == 0 or mesh.num_vertices == 0:
        raise EmptyMesh("cannot bound an empty mesh")
    return Aabb(mesh.vertices.min(axis=0), mesh.vertices.max(axis=0))


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def parse_mesh(data: bytes, fmt: str, scale: float = 1.0, name: str = "") -> TriangleMesh:
    """Parse raw file content into a validated :class:`TriangleMesh`.

    Degenerate triangles (area < ``DEGENERATE_AREA`` after scaling) are
    dropped and counted in ``degenerate_dropped``. Raises
    :class:`MalformedFile` on truncated or inconsistent input and
    :class:`EmptyMesh` when nothing survives cleanup.
    """
    if not data:
        raise MalformedFile("empty file")
    if fmt not in MESH_FORMATS:
        raise ValueError(f"unknown mesh format {fmt!r}; expected one of {MESH_FORMATS}")

    if fmt == "stl_binary":
        corners = _parse_stl_binary(data)
    elif fmt == "stl_ascii":
        corners = _parse_stl_ascii(data)
    else:
        return _finalize(*_parse_obj(data), scale=scale, name=name)

    # STL stores bare facets; weld bit-identical corners into shared vertices
    # so edge bookkeeping (watertightness) works.
    flat = corners.reshape(-1, 3)
    vertices, inverse = np.unique(flat, axis=0, return_inverse=True)
    triangles = inverse.reshape(-1, 3)
    return _finalize(vertices, triangles, scale=scale, name=name)


def _parse_stl_binary(data: bytes) -> np.ndarray:
    if len(data) < 84:
        raise MalformedFile("binary STL shorter than header + facet count")
    (count,) = struct.unpack_from("<I", data, 80)
    expected = 84 + count * 50
    if len(data) < expected:
        raise MalformedFile(
            f"binary STL truncated: header promises {count} facets "
            f"({expected} bytes), got {len(data)}"
        )
    record = np.dtype(
        [("normal", "<f4", 3), ("corners", "<f4", (3, 3)), ("attr", "<u2")]
    )
    facets = np.frombuffer(data, dtype=record, count=count, offset=84)
    return facets["corners"].astype(np.float64)


def _parse_stl_ascii(data: bytes) -> np.ndarray:
    try:
        text = data.decode("ascii", errors="strict")
    except UnicodeDecodeError as exc:
        raise MalformedFile(f"ASCII STL is not ASCII: {exc}") from exc
    coords = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = raw.split()
        if len(parts) >= 4 and parts[0] == "vertex":
            try:
                coords.append([float(parts[1]), float(parts[2]), float(parts[3])])
            except ValueError as exc:
                raise MalformedFile(f"bad vertex on line {lineno}: {raw!r}") from exc
    if not coords:
        raise MalformedFile("ASCII STL contains no vertex records")
    if len(coords) % 3 != 0:
        raise MalformedFile(
            f"ASCII STL vertex count {len(coords)} is not a multiple of 3"
        )
    return np.asarray(coords, dtype=np.float64).reshape(-1, 3, 3)


def _parse_obj(data: bytes) -> tuple[np.ndarray, np.ndarray]:
    try:
        text = data.decode("utf-8", errors="strict")
    except UnicodeDecodeError as exc:
        raise MalformedFile(f"OBJ is not UTF-8: {exc}") from exc
    vertices = []
    faces = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = raw.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "v":
            if len(parts) < 4:
                raise MalformedFile(f"short vertex on line {lineno}: {raw!r}")
            try:
                vertices.append([float(parts[1]), float(parts[2]), float(parts[3])])
            except ValueError as exc:
                raise MalformedFile(f"bad vertex on line {lineno}: {raw!r}") from exc
        elif parts[0] == "f":
            if len(parts) < 4:
                raise MalformedFile(f"face with <3 vertices on line {lineno}: {raw!r}")
            idx = []
            for token in parts[1:]:
                head = token.split("/")[0]
                try:
                    i = int(head)
                except ValueError as exc:
                    raise MalformedFile(f"bad face index on line {lineno}: {raw!r}") from exc
                if i == 0:
                    raise MalformedFile(f"OBJ face index 0 on line {lineno}")
                # OBJ indices are 1-based; negatives count back from the end.
                idx.append(i - 1 if i > 0 else len(vertices) + i)
            for a, b in zip(idx[1:], idx[2:]):  # fan-triangulate polygons
                faces.append([idx[0], a, b])
        # every other record type (vn, vt, usemtl, ...) is ignored
    if not faces:
        raise MalformedFile("OBJ contains no faces")
    verts = np.asarray(vertices, dtype=np.float64).reshape(-1, 3)
    tris = np.asarray(faces, dtype=np.int64)
    if tris.min() < 0 or tris.max() >= len(verts):
        raise MalformedFile(
            f"OBJ face references vertex {tris.max() + 1} of a {len(verts)}-vertex file"
        )
    return verts, tris


def _finalize(
    vertices: np.ndarray, triangles: np.ndarray, scale: float, name: str
) -> TriangleMesh:
    vertices = vertices * float(scale)
    areas = _triangle_areas(vertices, triangles)
    keep = areas >= DEGENERATE_AREA
    dropped = int(np.count_nonzero(~keep))
    triangles = triangles[keep]
    if len(triangles) == 0:
        raise EmptyMesh(f"no triangles left after dropping {dropped} degenerate facet(s)")
    vertices, triangles = _prune_unreferenced(vertices, triangles)
    return TriangleMesh(
        vertices=vertices,
        triangles=triangles,
        name=name,
        watertight=_is_watertight(triangles),
        degenerate_dropped=dropped,
    )


def _triangle_areas(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    corners = vertices[triangles]
    cross = np.cross(corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0])
    return 0.5 * np.linalg.norm(cross, axis=1)


def _prune_unreferenced(
    vertices: np.ndarray, triangles: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    used, inverse = np.unique(triangles, return_inverse=True)
    return vertices[used], inverse.reshape(triangles.shape)


def _is_watertight(triangles: np.ndarray) -> bool:
    """Every undirected edge is shared by exactly two triangles."""
    edges = np.concatenate(
        [triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]]
    )
    edges = np.sort(edges, axis=1)
    _, counts = np.unique(edges, axis=0, return_counts=True)
    return bool(np.all(counts == 2))


# ---------------------------------------------------------------------------
# Serialization (round-trip support and on-disk artifacts)
# ---------------------------------------------------------------------------


def serialize_mesh(mesh: TriangleMesh, fmt: str) -> bytes:
    """Write the mesh back out in any of the supported formats."""
    if fmt == "stl_binary":
        corners = mesh.corners().astype(np.float32)
        normals = _facet_normals(corners)
        record = np.zeros(
            len(corners),
            dtype=np.dtype([("normal", "<f4", 3), ("corners", "<f4", (3, 3)), ("attr", "<u2")]),
        )
        record["normal"] = normals
        record["corners"] = corners
        header = mesh.name.encode("ascii", errors="replace")[:80].ljust(80, b"\0")
        return header + struct.pack("<I", len(corners)) + record.tobytes()
    if fmt == "stl_ascii":
        corners = mesh.corners()
        normals = _facet_normals(corners)
        lines = [f"solid {mesh.name or 'mesh'}"]
        for tri, n in zip(corners, normals):
            lines.append(f"  facet normal {n[0]:.9e} {n[1]:.9e} {n[2]:.9e}")
            lines.append("    outer loop")
            for v in tri:
                lines.append(f"      vertex {v[0]:.9e} {v[1]:.9e} {v[2]:.9e}")
            lines.append("    endloop")
            lines.append("  endfacet")
        lines.append(f"endsolid {mesh.name or 'mesh'}")
        return ("\n".join(lines) + "\n").encode("ascii")
    if fmt == "obj":
        lines = [f"o {mesh.name or 'mesh'}"]
        for v in mesh.vertices:
            lines.append(f"v {v[0]:.12g} {v[1]:.12g} {v[2]:.12g}")
        for t in mesh.triangles:
            lines.append(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}")
        return ("\n".join(lines) + "\n").encode("ascii")
    raise ValueError(f"unknown mesh format {fmt!r}; expected one of {MESH_FORMATS}")


def _facet_normals(corners: np.ndarray) -> np.ndarray:
    cross = np.cross(corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0])
    norm = np.linalg.norm(cross, axis=1, keepdims=True)
    norm[norm == 0] = 1.0
    return cross / norm


# ---------------------------------------------------------------------------
# Point containment
# ---------------------------------------------------------------------------


def points_in_mesh(
    mesh: TriangleMesh,
    points: np.ndarray,
    max_retries: int = 8,
    chunk: int = 512,
) -> np.ndarray:
    """Classify many points at once; returns a boolean array.

    Ray-crossing parity along a fixed +x ray. A crossing whose
    barycentric coordinates graze a triangle edge or whose ray runs
    nearly parallel to the triangle is untrustworthy (the ray may be
    passing through a shared edge or vertex), so those points are
    re-shot along the next deterministic retry direction. Points exactly
    on the surface classify either way by contract. Raises
    :class:`NonClassifiable` if a point stays ambiguous after
    ``max_retries`` retries.
    """
    if mesh.num_triangles == 0:
        raise EmptyMesh("cannot classify points against an empty mesh")
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if pts.shape[1] != 3:
        raise ValueError("points must have shape (N, 3)")
    if max_retries + 1 > len(RAY_DIRECTIONS):
        raise ValueError(f"at most {len(RAY_DIRECTIONS) - 1} retries supported")

    corners = mesh.corners()
    v0 = corners[:, 0]
    e1 = corners[:, 1] - v0
    e2 = corners[:, 2] - v0
    normals = np.cross(e1, e2)
    normals /= np.maximum(np.linalg.norm(normals, axis=1, keepdims=True), 1e-300)
    # Grazing tolerances scale with the mesh so meter-scale and
    # millimeter-scale inputs behave alike.
    scale = float(np.abs(mesh.vertices).max()) or 1.0
    t_eps = 1e-12 * scale
    plane_eps = 1e-9 * scale

    inside = np.zeros(len(pts), dtype=bool)
    pending = np.arange(len(pts))
    for direction in RAY_DIRECTIONS[: max_retries + 1]:
        parity = np.zeros(len(pending), dtype=np.int64)
        suspect = np.zeros(len(pending), dtype=bool)
        for start in range(0, len(pending), chunk):
            sel = pending[start : start + chunk]
            par, sus = _cast_rays(pts[sel], direction, v0, e1, e2, normals, t_eps, plane_eps)
            parity[start : start + chunk] = par
            suspect[start : start + chunk] = sus
        ok = ~suspect
        inside[pending[ok]] = parity[ok] % 2 == 1
        pending = pending[suspect]
        if len(pending) == 0:
            return inside
    raise NonClassifiable(
        f"{len(pending)} point(s) still grazing after {max_retries} retries; "
        f"first: {pts[pending[0]].tolist()}"
    )


def _cast_rays(pts, direction, v0, e1, e2, normals, t_eps, plane_eps):
    """Batched ray-triangle crossings over a (P, T) block: parity plus suspicion."""
    h = np.cross(direction, e2)  # (T, 3)
    a = np.einsum("tk,tk->t", e1, h)  # (T,)
    near_parallel = np.abs(a) < 1e-12
    inv_a = 1.0 / np.where(near_parallel, 1.0, a)  # parallel entries masked below

    s = pts[:, None, :] - v0[None, :, :]  # (P, T, 3)
    u = np.einsum("ptk,tk->pt", s, h) * inv_a
    q = np.cross(s, e1[None, :, :])
    v = np.einsum("ptk,k->pt", q, direction) * inv_a
    t = np.einsum("ptk,tk->pt", q, e2) * inv_a

    w = 1.0 - u - v
    bary_eps = 1e-9
    valid = ~near_parallel[None, :]
    crossing = valid & (u >= 0.0) & (v >= 0.0) & (w >= 0.0) & (t > t_eps)
    # A hit near a triangle edge may be the ray threading a shared
    # edge/vertex: it can be double-counted by the neighbour or missed
    # entirely, so flag hits within bary_eps either side of the border.
    near_tri = valid & (u >= -bary_eps) & (v >= -bary_eps) & (w >= -bary_eps) & (t > t_eps)
    border = near_tri & ((u < bary_eps) | (v < bary_eps) | (w < bary_eps))
    suspect = border.any(axis=1)
    if near_parallel.any():
        # A ray running almost inside a triangle's plane can hide a crossing.
        dist = np.abs(np.einsum("ptk,tk->pt", s[:, near_parallel, :], normals[near_parallel]))
        suspect |= (dist < plane_eps).any(axis=1)
    return crossing.sum(axis=1), suspect


def point_in_mesh(mesh: TriangleMesh, point, max_retries: int = 8) -> bool:
    """Scalar convenience wrapper around :func:`points_in_mesh`."""
    return bool(points_in_mesh(mesh, np.asarray(point, dtype=float)[None, :], max_retries)[0])
