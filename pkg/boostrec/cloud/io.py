#!/usr/bin/python3

import io
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from boostrec.cloud.datatypes import PointCloud
from boostrec.exceptions import CloudFormatError

PathLike = Union[str, Path]

PCD_TYPES = {
    ("F", 4): "<f4",
    ("F", 8): "<f8",
    ("U", 1): "u1",
    ("U", 2): "<u2",
    ("U", 4): "<u4",
    ("U", 8): "<u8",
    ("I", 1): "i1",
    ("I", 2): "<i2",
    ("I", 4): "<i4",
    ("I", 8): "<i8",
}

PLY_TYPES = {
    "char": "i1",
    "int8": "i1",
    "uchar": "u1",
    "uint8": "u1",
    "short": "<i2",
    "int16": "<i2",
    "ushort": "<u2",
    "uint16": "<u2",
    "int": "<i4",
    "int32": "<i4",
    "uint": "<u4",
    "uint32": "<u4",
    "float": "<f4",
    "float32": "<f4",
    "double": "<f8",
    "float64": "<f8",
}

PCD_HEADER_KEYS = ("VERSION", "FIELDS", "SIZE", "TYPE", "COUNT", "WIDTH", "HEIGHT", "VIEWPOINT",
                   "POINTS", "DATA")  # fmt: skip

NORMAL_FIELDS = ("normal_x", "normal_y", "normal_z")


class CloudFormat(str, Enum):
    PCD_ASCII = "pcd-ascii"
    PCD_BINARY = "pcd-binary"
    PLY_ASCII = "ply-ascii"

    @classmethod
    def from_path(cls, path: PathLike) -> "CloudFormat":
        if Path(path).suffix.lower() == ".ply":
            return cls.PLY_ASCII
        return cls.PCD_BINARY


def load_cloud(path: PathLike) -> PointCloud:
    """Loads a PCD (v0.7, ascii or binary) or ASCII PLY file.

    Organized layout is preserved when the header declares a height above 1.
    Packed-float ``rgb`` fields are unpacked into three 8-bit channels."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise CloudFormatError(path, None, f"unreadable file ({exc.strerror or exc})") from None
    if raw[:3] == b"ply":
        return _load_ply(path, raw)
    return _load_pcd(path, raw)


def save_cloud(
    cloud: PointCloud, path: PathLike, format: Optional[Union[CloudFormat, str]] = None
) -> Path:
    """Writes a cloud to disk. Binary PCD round-trips bit-exactly, ASCII formats
    keep 9 significant digits."""
    path = Path(path)
    fmt = CloudFormat(format) if format is not None else CloudFormat.from_path(path)
    if fmt == CloudFormat.PLY_ASCII:
        data = _ply_bytes(cloud)
    else:
        data = _pcd_bytes(cloud, binary=fmt == CloudFormat.PCD_BINARY)
    path.write_bytes(data)
    return path


# PCD


def _load_pcd(path: Path, raw: bytes) -> PointCloud:
    header: Dict[str, Tuple[int, List[str]]] = {}
    offset = 0
    line_no = 0
    while True:
        end = raw.find(b"\n", offset)
        if end == -1:
            raise CloudFormatError(path, f"line {line_no + 1}", "header ends before DATA line")
        line_no += 1
        line = raw[offset:end].decode("ascii", errors="replace").strip()
        offset = end + 1
        if not line or line.startswith("#"):
            continue
        key, *values = line.split()
        key = key.upper()
        if key not in PCD_HEADER_KEYS:
            raise CloudFormatError(path, f"line {line_no}", f"unknown header entry '{key}'")
        header[key] = (line_no, values)
        if key == "DATA":
            break

    version = header.get("VERSION")
    if version and version[1] and version[1][0].lstrip("0") not in (".7",):
        raise CloudFormatError(
            path, f"line {version[0]}", f"unsupported PCD version {version[1][0]}, expected 0.7"
        )

    data_line, data_values = header["DATA"]
    mode = data_values[0].lower() if data_values else ""
    if mode == "binary_compressed":
        raise CloudFormatError(path, f"line {data_line}", "compressed PCD data is not supported")
    if mode not in ("ascii", "binary"):
        raise CloudFormatError(path, f"line {data_line}", f"unknown DATA mode '{mode}'")

    for key in ("FIELDS", "SIZE", "TYPE", "WIDTH"):
        if key not in header:
            raise CloudFormatError(path, f"line {data_line}", f"missing {key} header entry")
    fields_line, fields = header["FIELDS"]
    sizes_line, sizes = header["SIZE"]
    types_line, types = header["TYPE"]
    counts_line, counts = header.get("COUNT", (fields_line, ["1"] * len(fields)))
    for name, (entry_line, values) in (
        ("SIZE", (sizes_line, sizes)),
        ("TYPE", (types_line, types)),
        ("COUNT", (counts_line, counts)),
    ):
        if len(values) != len(fields):
            raise CloudFormatError(
                path,
                f"line {entry_line}",
                f"{name} lists {len(values)} entries but FIELDS lists {len(fields)}",
            )

    dtype_fields = []
    for name, size, type_, count in zip(fields, sizes, types, counts):
        key = (type_.upper(), _header_int(path, sizes_line, size))
        if key not in PCD_TYPES:
            raise CloudFormatError(
                path, f"line {types_line}", f"unsupported field type {type_}{size} for '{name}'"
            )
        n = _header_int(path, counts_line, count)
        dtype_fields.append((name, PCD_TYPES[key]) if n == 1 else (name, PCD_TYPES[key], (n,)))
    # duplicate names (e.g. padding '_') are made unique
    seen: Dict[str, int] = {}
    for i, entry in enumerate(dtype_fields):
        if entry[0] in seen:
            seen[entry[0]] += 1
            dtype_fields[i] = (f"{entry[0]}__{seen[entry[0]]}",) + entry[1:]
        else:
            seen[entry[0]] = 0
    dtype = np.dtype(dtype_fields)

    width_line, width_values = header["WIDTH"]
    width = _header_int(path, width_line, width_values[0] if width_values else "")
    height_line, height_values = header.get("HEIGHT", (width_line, ["1"]))
    height = _header_int(path, height_line, height_values[0] if height_values else "")
    points = width * height
    if "POINTS" in header:
        points_line, points_values = header["POINTS"]
        declared = _header_int(path, points_line, points_values[0] if points_values else "")
        if declared != points:
            raise CloudFormatError(
                path,
                f"line {points_line}",
                f"POINTS {declared} does not match WIDTH x HEIGHT = {points}",
            )

    if mode == "binary":
        available = len(raw) - offset
        needed = points * dtype.itemsize
        if available < needed:
            raise CloudFormatError(
                path,
                f"byte {offset}",
                f"expected {needed} bytes of point data, found {available}",
            )
        records = np.frombuffer(raw, dtype=dtype, count=points, offset=offset)
    else:
        records = _parse_ascii_records(path, raw[offset:], dtype, points, line_no)

    names = records.dtype.names or ()
    for axis in ("x", "y", "z"):
        if axis not in names:
            raise CloudFormatError(path, f"line {fields_line}", f"missing '{axis}' field")
    xyz = np.column_stack([records[a].astype(np.float64) for a in ("x", "y", "z")])

    rgb = None
    color_field = next((i for i in ("rgb", "rgba") if i in names), None)
    if color_field is not None:
        rgb = _unpack_rgb(records[color_field])

    normals = None
    if all(i in names for i in NORMAL_FIELDS):
        normals = np.column_stack([records[i].astype(np.float64) for i in NORMAL_FIELDS])

    return PointCloud(xyz, width=width, height=height, rgb=rgb, normals=normals)


def _header_int(path: Path, line: int, value: str) -> int:
    try:
        result = int(value)
    except ValueError:
        msg = f"expected an integer, got '{value}'"
        raise CloudFormatError(path, f"line {line}", msg) from None
    if result < 0:
        raise CloudFormatError(path, f"line {line}", f"negative value {result}")
    return result


def _parse_ascii_records(
    path: Path, body: bytes, dtype: np.dtype, points: int, header_lines: int
) -> np.ndarray:
    columns = sum(int(np.prod(dtype[name].shape or (1,))) for name in dtype.names)
    text = body.decode("ascii", errors="replace")
    numbered = enumerate(text.splitlines(), header_lines + 1)
    lines = [(i, line) for i, line in numbered if line.strip()]
    if len(lines) < points:
        raise CloudFormatError(
            path,
            f"line {header_lines + len(text.splitlines()) + 1}",
            f"expected {points} points, found {len(lines)}",
        )
    lines = lines[:points]
    values = np.empty((points, columns), dtype=np.float64)
    try:
        if points:
            values[:] = np.loadtxt(io.StringIO("\n".join(i[1] for i in lines)), ndmin=2)
    except ValueError:
        # slow path, only used to locate the offending line
        for row, (line_no, line) in enumerate(lines):
            tokens = line.split()
            if len(tokens) != columns:
                raise CloudFormatError(
                    path, f"line {line_no}", f"expected {columns} values, found {len(tokens)}"
                ) from None
            try:
                values[row] = [float(t) for t in tokens]
            except ValueError:
                raise CloudFormatError(path, f"line {line_no}", "non-numeric value") from None

    records = np.zeros(points, dtype=dtype)
    col = 0
    for name in dtype.names:
        width = int(np.prod(dtype[name].shape or (1,)))
        base = dtype[name].base
        chunk = values[:, col : col + width]
        if name in ("rgb", "rgba") and base.kind == "f":
            # packed float colors are written as their float value
            records[name] = chunk[:, 0].astype(base)
        elif width == 1:
            records[name] = chunk[:, 0].astype(base)
        else:
            records[name] = chunk.astype(base)
        col += width
    return records


def _unpack_rgb(packed: np.ndarray) -> np.ndarray:
    if packed.dtype.kind == "f":
        packed = packed.astype("<f4").view("<u4")
    else:
        packed = packed.astype(np.int64).astype("<u4")
    return np.column_stack(
        [(packed >> 16) & 0xFF, (packed >> 8) & 0xFF, packed & 0xFF]
    ).astype(np.uint8)


def _pack_rgb(rgb: np.ndarray) -> np.ndarray:
    rgb = rgb.astype(np.uint32)
    return (rgb[:, 0] << 16) | (rgb[:, 1] << 8) | rgb[:, 2]


def _pcd_bytes(cloud: PointCloud, binary: bool) -> bytes:
    fields = [("x", "F", 8), ("y", "F", 8), ("z", "F", 8)]
    if cloud.rgb is not None:
        fields.append(("rgb", "U", 4))
    if cloud.normals is not None:
        fields.extend((name, "F", 8) for name in NORMAL_FIELDS)

    header = "\n".join(
        [
            "# .PCD v0.7 - Point Cloud Data file format",
            "VERSION 0.7",
            "FIELDS " + " ".join(i[0] for i in fields),
            "SIZE " + " ".join(str(i[2]) for i in fields),
            "TYPE " + " ".join(i[1] for i in fields),
            "COUNT " + " ".join("1" for _ in fields),
            f"WIDTH {cloud.width}",
            f"HEIGHT {cloud.height}",
            "VIEWPOINT 0 0 0 1 0 0 0",
            f"POINTS {len(cloud)}",
            f"DATA {'binary' if binary else 'ascii'}",
            "",
        ]
    ).encode("ascii")

    if binary:
        dtype = np.dtype([(name, PCD_TYPES[(type_, size)]) for name, type_, size in fields])
        records = np.zeros(len(cloud), dtype=dtype)
        for i, axis in enumerate(("x", "y", "z")):
            records[axis] = cloud.xyz[:, i]
        if cloud.rgb is not None:
            records["rgb"] = _pack_rgb(cloud.rgb)
        if cloud.normals is not None:
            for i, name in enumerate(NORMAL_FIELDS):
                records[name] = cloud.normals[:, i]
        return header + records.tobytes()

    return header + _ascii_rows(cloud, pack_color=True)


def _ascii_rows(cloud: PointCloud, pack_color: bool) -> bytes:
    columns = [cloud.xyz]
    formats = ["%.9g"] * 3
    if cloud.rgb is not None:
        if pack_color:
            columns.append(_pack_rgb(cloud.rgb).astype(np.float64)[:, None])
            formats.append("%d")
        else:
            columns.append(cloud.rgb.astype(np.float64))
            formats.extend(["%d"] * 3)
    if cloud.normals is not None:
        columns.append(cloud.normals)
        formats.extend(["%.9g"] * 3)
    if not len(cloud):
        return b""
    buffer = io.StringIO()
    np.savetxt(buffer, np.hstack(columns), fmt=formats)
    return buffer.getvalue().encode("ascii")


# PLY


def _load_ply(path: Path, raw: bytes) -> PointCloud:
    marker = raw.find(b"end_header")
    if marker == -1:
        raise CloudFormatError(path, "line 1", "PLY header has no end_header line")
    header_end = raw.find(b"\n", marker)
    header_end = len(raw) if header_end == -1 else header_end + 1
    header_lines = raw[:header_end].decode("ascii", errors="replace").splitlines()

    elements: List[Tuple[str, int, List[Tuple[str, str]]]] = []
    organized: Optional[Tuple[int, int]] = None
    for line_no, line in enumerate(header_lines, 1):
        tokens = line.split()
        if not tokens or tokens[0] in ("ply", "end_header", "obj_info"):
            continue
        if tokens[0] == "format":
            if len(tokens) < 2 or tokens[1] != "ascii":
                raise CloudFormatError(
                    path, f"line {line_no}", "only ASCII PLY files are supported"
                )
        elif tokens[0] == "comment":
            if len(tokens) == 4 and tokens[1] == "organized":
                organized = (_header_int(path, line_no, tokens[2]),
                             _header_int(path, line_no, tokens[3]))  # fmt: skip
        elif tokens[0] == "element":
            if len(tokens) != 3:
                raise CloudFormatError(path, f"line {line_no}", "malformed element line")
            elements.append((tokens[1], _header_int(path, line_no, tokens[2]), []))
        elif tokens[0] == "property":
            if not elements:
                raise CloudFormatError(path, f"line {line_no}", "property before any element")
            if tokens[1] == "list":
                if elements[-1][0] == "vertex":
                    raise CloudFormatError(
                        path, f"line {line_no}", "list properties on vertices are not supported"
                    )
                elements[-1][2].append(("list", tokens[-1]))
                continue
            if len(tokens) != 3 or tokens[1] not in PLY_TYPES:
                raise CloudFormatError(
                    path, f"line {line_no}", f"unsupported property '{' '.join(tokens[1:])}'"
                )
            elements[-1][2].append((tokens[1], tokens[2]))
        else:
            raise CloudFormatError(path, f"line {line_no}", f"unknown header keyword '{tokens[0]}'")

    body_lines = raw[header_end:].decode("ascii", errors="replace").splitlines()
    line_no = len(header_lines)
    cursor = 0
    vertex = None
    for name, count, properties in elements:
        if name != "vertex":
            cursor += count
            continue
        names = [p[1] for p in properties]
        rows = body_lines[cursor : cursor + count]
        if len(rows) < count:
            raise CloudFormatError(
                path,
                f"line {line_no + cursor + len(rows) + 1}",
                f"expected {count} vertices, found {len(rows)}",
            )
        values = np.empty((count, len(names)), dtype=np.float64)
        for i, row in enumerate(rows):
            tokens = row.split()
            if len(tokens) != len(names):
                raise CloudFormatError(
                    path,
                    f"line {line_no + cursor + i + 1}",
                    f"expected {len(names)} values, found {len(tokens)}",
                )
            try:
                values[i] = [float(t) for t in tokens]
            except ValueError:
                raise CloudFormatError(
                    path, f"line {line_no + cursor + i + 1}", "non-numeric value"
                ) from None
        vertex = dict(zip(names, values.T))
        break

    if vertex is None:
        raise CloudFormatError(path, None, "PLY file has no vertex element")
    for axis in ("x", "y", "z"):
        if axis not in vertex:
            raise CloudFormatError(path, None, f"vertex element has no '{axis}' property")
    xyz = np.column_stack([vertex[a] for a in ("x", "y", "z")])

    rgb = None
    for channels in (("red", "green", "blue"), ("r", "g", "b")):
        if all(c in vertex for c in channels):
            rgb = np.column_stack([vertex[c] for c in channels])
            break

    normals = None
    for channels in (("nx", "ny", "nz"), NORMAL_FIELDS):
        if all(c in vertex for c in channels):
            normals = np.column_stack([vertex[c] for c in channels])
            break

    width, height = len(xyz), 1
    if organized is not None:
        width, height = organized
        if width * height != len(xyz):
            raise CloudFormatError(
                path, None, f"organized layout {width}x{height} does not match {len(xyz)} vertices"
            )
    return PointCloud(xyz, width=width, height=height, rgb=rgb, normals=normals)


def _ply_bytes(cloud: PointCloud) -> bytes:
    lines = ["ply", "format ascii 1.0"]
    if cloud.is_organized:
        lines.append(f"comment organized {cloud.width} {cloud.height}")
    lines.append(f"element vertex {len(cloud)}")
    lines.extend(f"property double {a}" for a in ("x", "y", "z"))
    if cloud.rgb is not None:
        lines.extend(f"property uchar {c}" for c in ("red", "green", "blue"))
    if cloud.normals is not None:
        lines.extend(f"property double {c}" for c in ("nx", "ny", "nz"))
    lines.extend(["end_header", ""])
    return "\n".join(lines).encode("ascii") + _ascii_rows(cloud, pack_color=False)
