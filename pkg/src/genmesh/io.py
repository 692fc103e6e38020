"""Text file formats.

Native ``.gm`` files hold up to four sections, each a header line followed by
whitespace separated rows::

    VTX [rows cols]      vertex coordinates, or one label per row with cols = 0
    ELT [rows cols]      element rows, 1-based vertex ids
    NEI_ELT [rows cols]  neighbour element, 0 for none
    NEI_FCT [rows cols]  neighbour facet position (1-based), 0 for none

The row and column counts in a header are optional and checked when given.
``#`` starts a comment. A file without the ``NEI_*`` sections describes a plain
triangulation. ``.fct`` files list fracture facets, one per line, as 1-based
vertex ids. MSH 2.2 ASCII import keeps triangles and tetrahedra only.
"""

from __future__ import annotations

import io
import os
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import ParseError
from .generalized import GeneralizedMesh, from_triangulation
from .simplicial import GeometricMesh, Triangulation

SECTIONS = ("VTX", "ELT", "NEI_ELT", "NEI_FCT")


@dataclass
class _Section:
    name: str
    lineno: int
    rows: list
    linenos: list
    shape: tuple[int, int] | None


def _tokens(text: str):
    for i, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if line:
            yield i, line.split()


def _read_sections(text: str, path: str | None) -> dict[str, _Section]:
    sections: dict[str, _Section] = {}
    cur = None
    for lineno, tok in _tokens(text):
        head = tok[0].upper()
        if head in SECTIONS:
            if head in sections:
                raise ParseError(f"section {head} appears twice", lineno, path)
            shape = None
            if len(tok) == 3:
                try:
                    shape = (int(tok[1]), int(tok[2]))
                except ValueError:
                    raise ParseError(f"bad {head} header {' '.join(tok)!r}", lineno, path) from None
            elif len(tok) != 1:
                raise ParseError(f"bad {head} header {' '.join(tok)!r}", lineno, path)
            cur = sections[head] = _Section(head, lineno, [], [], shape)
        elif cur is None:
            raise ParseError(f"data before the first section header: {' '.join(tok)!r}", lineno, path)
        else:
            cur.rows.append(tok)
            cur.linenos.append(lineno)
    return sections


def _table(sec: _Section, kind, path) -> np.ndarray:
    width = sec.shape[1] if sec.shape else (len(sec.rows[0]) if sec.rows else 0)
    if sec.shape and len(sec.rows) != sec.shape[0]:
        raise ParseError(f"section {sec.name} announces {sec.shape[0]} rows, found {len(sec.rows)}", sec.lineno, path)
    out = []
    for tok, ln in zip(sec.rows, sec.linenos):
        if len(tok) != width:
            raise ParseError(f"section {sec.name}: expected {width} entries, found {len(tok)}", ln, path)
        try:
            out.append([kind(t) for t in tok])
        except ValueError:
            raise ParseError(f"section {sec.name}: cannot parse {' '.join(tok)!r}", ln, path) from None
    dtype = float if kind is float else np.int64
    return np.array(out, dtype=dtype).reshape(len(out), width)


def _vertices(sec: _Section, path):
    if sec.shape is not None and sec.shape[1] == 0:
        if len(sec.rows) != sec.shape[0]:
            raise ParseError(f"section VTX announces {sec.shape[0]} labels, found {len(sec.rows)}", sec.lineno, path)
        for tok, ln in zip(sec.rows, sec.linenos):
            if len(tok) != 1:
                raise ParseError("label rows hold a single token", ln, path)
        return [tok[0] for tok in sec.rows]
    return _table(sec, float, path)


def _parse(text: str, path: str | None):
    sections = _read_sections(text, path)
    for name in ("VTX", "ELT"):
        if name not in sections:
            raise ParseError(f"missing section {name}", None, path)
    vtx = _vertices(sections["VTX"], path)
    elt = _table(sections["ELT"], int, path)
    nv = len(vtx)
    bad = np.argwhere((elt < 1) | (elt > nv))
    if bad.size:
        r = int(bad[0, 0])
        raise ParseError(f"vertex id {elt[r, bad[0, 1]]} out of range 1..{nv}", sections["ELT"].linenos[r], path)
    nei = []
    for name in ("NEI_ELT", "NEI_FCT"):
        if name in sections:
            t = _table(sections[name], int, path)
            if t.shape != elt.shape:
                raise ParseError(f"section {name} has shape {t.shape}, ELT has {elt.shape}", sections[name].lineno, path)
            nei.append(t)
    if len(nei) == 1:
        raise ParseError("NEI_ELT and NEI_FCT must be given together", None, path)
    return vtx, elt, (nei or None)


def _source(src) -> tuple[str, str | None]:
    # a string with a line break is file content, anything else a path
    if isinstance(src, str) and "\n" in src:
        return src, None
    if isinstance(src, (str, os.PathLike)):
        return Path(src).read_text(), str(src)
    if isinstance(src, io.TextIOBase):
        return src.read(), getattr(src, "name", None)
    raise TypeError(f"cannot read mesh data from {type(src).__name__}")


def read_gm(src) -> GeneralizedMesh:
    """Read a native file (path, open file or the text itself).

    Without ``NEI_*`` sections the adjacency of the triangulation is computed.
    """
    text, path = _source(src)
    vtx, elt, nei = _parse(text, path)
    if nei is None:
        tri = Triangulation(elt - 1)
        return from_triangulation(tri, vtx if isinstance(vtx, np.ndarray) else None)
    return GeneralizedMesh.from_tables(vtx, elt, nei[0], nei[1])


def read_volume(src) -> GeometricMesh:
    """Read a regular mesh from a native file (``VTX``/``ELT`` only) or MSH 2.2."""
    text, path = _source(src)
    if text.lstrip().startswith("$MeshFormat"):
        return read_msh(text, path=path)
    vtx, elt, _ = _parse(text, path)
    if not isinstance(vtx, np.ndarray):
        raise ParseError("a volume mesh needs vertex coordinates", None, path)
    return GeometricMesh(Triangulation(elt - 1), vtx)


def read_fracture_mesh(src) -> GeometricMesh:
    """Read an (n-1)-mesh embedded in R^n (``VTX``/``ELT`` only)."""
    text, path = _source(src)
    vtx, elt, _ = _parse(text, path)
    if not isinstance(vtx, np.ndarray):
        raise ParseError("a fracture mesh needs vertex coordinates", None, path)
    return GeometricMesh(Triangulation(elt - 1), vtx, check=False)


def write_gm(mesh: GeneralizedMesh | GeometricMesh, dst=None) -> str:
    """Write a native file and return its text; ``dst`` is a path or open file."""
    lines = []
    if isinstance(mesh, GeometricMesh):
        vtx, tables = mesh.points, {"elt": mesh.cells + 1}
    else:
        vtx = mesh.points if mesh.points is not None else list(mesh.labels)
        tables = mesh.to_tables(one_based=True)
    if isinstance(vtx, np.ndarray):
        lines.append(f"VTX {vtx.shape[0]} {vtx.shape[1]}")
        lines += [" ".join(repr(float(c)) for c in row) for row in vtx]
    else:
        lines.append(f"VTX {len(vtx)} 0")
        lines += [str(v) for v in vtx]
    for key, name in (("elt", "ELT"), ("nei_elt", "NEI_ELT"), ("nei_fct", "NEI_FCT")):
        if key in tables:
            t = tables[key]
            lines.append(f"{name} {t.shape[0]} {t.shape[1]}")
            lines += [" ".join(str(int(v)) for v in row) for row in t]
    text = "\n".join(lines) + "\n"
    _emit(text, dst)
    return text


def read_facets(src) -> np.ndarray:
    """Fracture facets (0-based rows) from a ``.fct`` file or its text."""
    text, path = _source(src)
    rows, width = [], None
    for lineno, tok in _tokens(text):
        if tok[0].upper() == "FCT":
            continue
        try:
            row = [int(t) - 1 for t in tok]
        except ValueError:
            raise ParseError(f"cannot parse facet {' '.join(tok)!r}", lineno, path) from None
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(f"facet with {len(row)} vertices, expected {width}", lineno, path)
        if min(row) < 0:
            raise ParseError("vertex ids are 1-based", lineno, path)
        rows.append(row)
    return np.array(rows, dtype=np.int64).reshape(len(rows), width or 0)


def write_facets(facets, dst=None) -> str:
    text = "".join(" ".join(str(int(v) + 1) for v in row) + "\n" for row in np.asarray(facets))
    _emit(text, dst)
    return text


# MSH 2.2 element type -> number of nodes, for the types we keep or must skip
_MSH_KEEP = {2: 3, 4: 4}


def read_msh(src, path: str | None = None) -> GeometricMesh:
    """Import a regular mesh from the MSH 2.2 ASCII format.

    Triangles (type 2) and tetrahedra (type 4) are read. When tetrahedra are
    present the triangles are taken as boundary entities and dropped. Other
    element types are skipped with a warning. Coordinates are 2-D when the
    mesh has no tetrahedra and every ``z`` is zero.
    """
    if path is None:
        text, path = _source(src)
    else:
        text = src
    lines = text.splitlines()
    i = 0

    def block(name):
        nonlocal i
        while i < len(lines) and lines[i].strip() != f"${name}":
            i += 1
        if i == len(lines):
            raise ParseError(f"missing ${name} block", None, path)
        i += 1
        try:
            count = int(lines[i].split()[0])
        except (ValueError, IndexError):
            raise ParseError(f"bad ${name} count", i + 1, path) from None
        start = i + 1
        i = start + count
        end = f"$End{name}"
        if i >= len(lines) or lines[i].strip() != end:
            raise ParseError(f"expected {end} after {count} entries", i + 1, path)
        return [(start + j + 1, lines[start + j].split()) for j in range(count)]

    fmt = _msh_version(lines, path)
    if not fmt.startswith("2"):
        raise ParseError(f"unsupported MSH version {fmt}", None, path)
    ids, coords = [], []
    for ln, tok in block("Nodes"):
        try:
            ids.append(int(tok[0]))
            coords.append([float(t) for t in tok[1:4]])
        except (ValueError, IndexError):
            raise ParseError("bad node line", ln, path) from None
    index = {nid: j for j, nid in enumerate(ids)}
    cells: dict[int, list] = {2: [], 4: []}
    skipped: dict[int, int] = {}
    for ln, tok in block("Elements"):
        try:
            etype, ntags = int(tok[1]), int(tok[2])
            nodes = [int(t) for t in tok[3 + ntags:]]
        except (ValueError, IndexError):
            raise ParseError("bad element line", ln, path) from None
        if etype not in _MSH_KEEP:
            skipped[etype] = skipped.get(etype, 0) + 1
            continue
        if len(nodes) != _MSH_KEEP[etype]:
            raise ParseError(f"element type {etype} needs {_MSH_KEEP[etype]} nodes", ln, path)
        try:
            cells[etype].append([index[v] for v in nodes])
        except KeyError as exc:
            raise ParseError(f"unknown node {exc.args[0]}", ln, path) from None
    if skipped:
        warnings.warn(f"skipped MSH elements of types {sorted(skipped)}", stacklevel=2)
    pts = np.array(coords, dtype=float).reshape(-1, 3)
    if cells[4]:
        return GeometricMesh(Triangulation(cells[4]), pts)
    if not cells[2]:
        raise ParseError("no triangles or tetrahedra", None, path)
    if not np.all(pts[:, 2] == 0):
        raise ParseError("triangles off the z = 0 plane are not a planar mesh", None, path)
    return GeometricMesh(Triangulation(cells[2]), pts[:, :2])


def _msh_version(lines, path) -> str:
    for j, line in enumerate(lines):
        if line.strip() == "$MeshFormat":
            try:
                return lines[j + 1].split()[0]
            except IndexError:
                raise ParseError("truncated $MeshFormat", j + 2, path) from None
    raise ParseError("missing $MeshFormat block", None, path)


def write_coo(matrix: sp.spmatrix, dst=None) -> str:
    """Sparse matrix as ``rows cols nnz`` followed by 1-based ``i j value`` lines."""
    m = sp.coo_matrix(matrix)
    order = np.lexsort((m.col, m.row))
    lines = [f"{m.shape[0]} {m.shape[1]} {m.nnz}"]
    lines += [f"{int(m.row[j]) + 1} {int(m.col[j]) + 1} {m.data[j]:.17g}" for j in order]
    text = "\n".join(lines) + "\n"
    _emit(text, dst)
    return text


def _emit(text: str, dst) -> None:
    if dst is None:
        return
    if hasattr(dst, "write"):
        dst.write(text)
    else:
        Path(dst).write_text(text)
