"""Region serialization: exact JSON and Wavefront OBJ meshes."""
from __future__ import annotations

import json
from pathlib import Path

from .geometry import ConvexPolyhedron, GeometryError, Region, facet_polygons

OBJ_DIGITS = 12


def region_to_json(region: Region, indent: int | None = 2) -> str:
    """Half-space JSON with every rational written as ``"p/q"``."""
    return json.dumps(region.to_json(), indent=indent)


def region_from_json(text: str) -> Region:
    return Region.from_json(json.loads(text))


def _fmt(x) -> str:
    return f"{float(x):.{OBJ_DIGITS}g}"


def polyhedron_mesh(P: ConvexPolyhedron) -> tuple[list[tuple], list[list[int]]]:
    """Vertex list and 0-based facet index rings of a full-dimensional polytope."""
    if P.dim != 3:
        raise GeometryError("OBJ export needs 3D polyhedra")
    if not P.full_dimensional:
        return [], []
    verts = list(P.vertices)
    index = {v: i for i, v in enumerate(verts)}
    faces = [[index[v] for v in ring] for ring in facet_polygons(P)]
    return verts, faces


def region_to_obj(region: Region) -> str:
    """One ``o`` object per member; face indices are global and 1-based."""
    lines = [f"# region {region.label}"]
    base = 1
    for label, P in region.members:
        verts, faces = polyhedron_mesh(P)
        lines.append(f"o {label}")
        lines.extend("v " + " ".join(_fmt(c) for c in v) for v in verts)
        lines.extend("f " + " ".join(str(base + i) for i in f) for f in faces)
        base += len(verts)
    return "\n".join(lines) + "\n"


def write_region(region: Region, path: str | Path, fmt: str | None = None) -> Path:
    path = Path(path)
    fmt = fmt or path.suffix.lstrip(".")
    if fmt == "json":
        path.write_text(region_to_json(region))
    elif fmt == "obj":
        path.write_text(region_to_obj(region))
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


__all__ = ["region_to_json", "region_from_json", "region_to_obj", "polyhedron_mesh", "write_region"]
