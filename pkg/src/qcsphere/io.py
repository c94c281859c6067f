"""ASCII OFF / OBJ / PLY mesh files, face selections and per-face CSV fields."""

import csv
from pathlib import Path

import numpy as np

from .exceptions import MeshFormatError
from .mesh import TriangleMesh

FORMATS = ("OFF", "OBJ", "PLY")


def _infer_format(path, fmt):
    if fmt is None:
        fmt = Path(path).suffix.lstrip(".")
    fmt = str(fmt).upper()
    if fmt not in FORMATS:
        raise MeshFormatError(f"unsupported mesh format {fmt!r} for {path}")
    return fmt


def _tokens(lines):
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line


def _build(vertices, faces, path):
    for i, f in enumerate(faces):
        if len(f) != 3:
            raise MeshFormatError(f"{path}: non-triangular face {i} with {len(f)} vertices")
    try:
        return TriangleMesh(np.array(vertices, dtype=float).reshape(-1, 3),
                            np.array(faces, dtype=np.int64).reshape(-1, 3))
    except ValueError as exc:
        raise MeshFormatError(f"{path}: {exc}") from exc


def _read_off(path, text):
    lines = list(_tokens(text.splitlines()))
    if not lines:
        raise MeshFormatError(f"{path}: empty file")
    head = lines[0].split()
    if not head[0].endswith("OFF"):
        raise MeshFormatError(f"{path}: missing OFF header")
    rest = head[1:]
    pos = 1
    if not rest:
        rest = lines[1].split()
        pos = 2
    try:
        nv, nf = int(rest[0]), int(rest[1])
        verts = [[float(x) for x in lines[pos + i].split()[:3]] for i in range(nv)]
        faces = []
        for line in lines[pos + nv: pos + nv + nf]:
            vals = line.split()
            k = int(vals[0])
            faces.append([int(x) for x in vals[1:1 + k]])
    except (IndexError, ValueError) as exc:
        raise MeshFormatError(f"{path}: malformed OFF body ({exc})") from exc
    if len(faces) != nf:
        raise MeshFormatError(f"{path}: expected {nf} faces, found {len(faces)}")
    return _build(verts, faces, path)


def _read_obj(path, text):
    verts, faces = [], []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                idx = []
                for p in parts[1:]:
                    i = int(p.split("/")[0])
                    # negative indices are relative to the vertices read so far
                    idx.append(i - 1 if i > 0 else len(verts) + i)
                faces.append(idx)
        except ValueError as exc:
            raise MeshFormatError(f"{path}:{lineno}: cannot parse {line!r}") from exc
    return _build(verts, faces, path)


def _read_ply(path, text):
    lines = text.splitlines()
    if not lines or lines[0].strip() != "ply":
        raise MeshFormatError(f"{path}: missing ply magic")
    elements = []
    pos = 1
    while pos < len(lines):
        parts = lines[pos].split()
        pos += 1
        if not parts or parts[0] in ("comment", "obj_info"):
            continue
        if parts[0] == "format":
            if parts[1] != "ascii":
                raise MeshFormatError(f"{path}: only ascii PLY is supported")
        elif parts[0] == "element":
            elements.append([parts[1], int(parts[2]), []])
        elif parts[0] == "property":
            elements[-1][2].append(parts[-1])
        elif parts[0] == "end_header":
            break
    body = [ln for ln in lines[pos:] if ln.strip()]
    verts, faces = [], []
    row = 0
    try:
        for name, count, props in elements:
            chunk = body[row: row + count]
            row += count
            if len(chunk) != count:
                raise MeshFormatError(f"{path}: truncated {name} element")
            if name == "vertex":
                ix = [props.index(c) for c in "xyz"]
                for ln in chunk:
                    vals = ln.split()
                    verts.append([float(vals[i]) for i in ix])
            elif name == "face":
                for ln in chunk:
                    vals = ln.split()
                    k = int(vals[0])
                    faces.append([int(x) for x in vals[1:1 + k]])
    except ValueError as exc:
        raise MeshFormatError(f"{path}: malformed PLY body ({exc})") from exc
    return _build(verts, faces, path)


def load_mesh(path, format=None):
    """Read a triangle mesh; the format defaults to the file suffix.

    Raises
    ------
    FileNotFoundError
        If ``path`` does not exist.
    MeshFormatError
        On parse failures, non-triangular faces or out-of-range indices.
    """
    path = Path(path)
    fmt = _infer_format(path, format)
    text = path.read_text()
    reader = {"OFF": _read_off, "OBJ": _read_obj, "PLY": _read_ply}[fmt]
    return reader(path, text)


def _fmt(x):
    return repr(float(x))


def save_mesh(mesh, path, format=None):
    """Write ``mesh`` as ASCII OFF, OBJ (1-based faces) or PLY."""
    path = Path(path)
    fmt = _infer_format(path, format)
    v, f = mesh.vertices, mesh.faces
    out = []
    if fmt == "OFF":
        out.append("OFF")
        out.append(f"{len(v)} {len(f)} 0")
        out += [" ".join(map(_fmt, p)) for p in v]
        out += ["3 " + " ".join(map(str, t)) for t in f]
    elif fmt == "OBJ":
        out += ["v " + " ".join(map(_fmt, p)) for p in v]
        out += ["f " + " ".join(str(i + 1) for i in t) for t in f]
    else:
        out += ["ply", "format ascii 1.0", f"element vertex {len(v)}",
                "property double x", "property double y", "property double z",
                f"element face {len(f)}", "property list uchar int vertex_indices",
                "end_header"]
        out += [" ".join(map(_fmt, p)) for p in v]
        out += ["3 " + " ".join(map(str, t)) for t in f]
    path.write_text("\n".join(out) + "\n")


def read_face_selection(path, n_faces=None):
    """Newline-delimited face indices; blank lines and ``#`` comments ignored."""
    idx = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            idx.append(int(line))
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: not a face index: {line!r}") from exc
    idx = np.array(idx, dtype=np.int64)
    if len(np.unique(idx)) != len(idx):
        raise ValueError(f"{path}: duplicate face indices")
    if len(idx) and (idx.min() < 0 or (n_faces is not None and idx.max() >= n_faces)):
        raise ValueError(f"{path}: face index out of range")
    return idx


def write_face_selection(path, faces):
    Path(path).write_text("".join(f"{int(i)}\n" for i in faces))


def _read_rows(path, columns):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != list(columns):
            raise ValueError(f"{path}: expected header {','.join(columns)}")
        return [row for row in reader if row]


def _scatter(path, rows, n_faces, dtype, parse):
    out = np.zeros(n_faces, dtype=dtype)
    seen = np.zeros(n_faces, dtype=bool)
    for row in rows:
        i = int(row[0])
        if not 0 <= i < n_faces:
            raise ValueError(f"{path}: face index {i} out of range")
        if seen[i]:
            raise ValueError(f"{path}: face {i} listed twice")
        seen[i] = True
        out[i] = parse(row)
    if not seen.all():
        raise ValueError(f"{path}: missing value for face {int(np.flatnonzero(~seen)[0])}")
    return out


def read_dilation_csv(path, n_faces):
    """Per-face dilation from a ``face_index,K`` CSV covering every face."""
    rows = _read_rows(path, ("face_index", "K"))
    return _scatter(path, rows, n_faces, float, lambda r: float(r[1]))


def write_dilation_csv(path, K):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["face_index", "K"])
        w.writerows([i, _fmt(k)] for i, k in enumerate(K))


def read_beltrami_csv(path, n_faces):
    """Per-face Beltrami coefficients from a ``face_index,re,im`` CSV."""
    rows = _read_rows(path, ("face_index", "re", "im"))
    return _scatter(path, rows, n_faces, complex, lambda r: complex(float(r[1]), float(r[2])))


def write_beltrami_csv(path, mu):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["face_index", "re", "im"])
        w.writerows([i, _fmt(m.real), _fmt(m.imag)] for i, m in enumerate(np.asarray(mu, complex)))
