"""Text format for sampled mode fields (see docs/field_format.md)."""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .overlap import ModeField

MAGIC = "NLCAVITY-FIELD"
VERSION = 1
COLUMNS = ["re_Ex", "im_Ex", "re_Ey", "im_Ey", "re_Ez", "im_Ez", "eps"]


class FieldFormatError(ConfigError):
    pass


def write_field(path, field: ModeField) -> None:
    nx, ny, nz = field.shape
    lines = [
        f"{MAGIC} v{VERSION}",
        f"omega {field.omega!r}",
        f"units {'per-photon' if field.per_photon else 'raw'}",
        f"grid {nx} {ny} {nz}",
    ]
    for name, a, h in zip("xyz", field.axes, field.spacing):
        lines.append(f"{name} {float(a[0])!r} {float(h)!r}")
    lines.append("columns " + " ".join(COLUMNS))
    lines.append("data")
    E = field.E.reshape(3, -1)
    cols = np.column_stack(
        [E[0].real, E[0].imag, E[1].real, E[1].imag, E[2].real, E[2].imag, field.eps.reshape(-1)]
    )
    body = "\n".join(" ".join(repr(float(v)) for v in row) for row in cols)
    Path(path).write_text("\n".join(lines) + "\n" + body + "\n")


def read_field(path) -> ModeField:
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines or not lines[0].startswith(MAGIC):
        raise FieldFormatError(f"{path}: line 1: missing '{MAGIC}' header")
    try:
        version = int(lines[0].split()[1].lstrip("v"))
    except (IndexError, ValueError):
        raise FieldFormatError(f"{path}: line 1: malformed version tag {lines[0]!r}") from None
    if version != VERSION:
        raise FieldFormatError(f"{path}: unsupported field format version {version} (expected {VERSION})")
    header = {}
    i = 1
    while i < len(lines) and lines[i].strip() != "data":
        parts = lines[i].split()
        if parts:
            header[parts[0]] = (i + 1, parts[1:])
        i += 1
    if i == len(lines):
        raise FieldFormatError(f"{path}: no 'data' line")

    def need(key):
        if key not in header:
            raise FieldFormatError(f"{path}: header key '{key}' missing")
        return header[key]

    try:
        omega = float(need("omega")[1][0])
        units = need("units")[1][0]
        shape = tuple(int(v) for v in need("grid")[1])
        axes = []
        for name, n in zip("xyz", shape):
            x0, h = (float(v) for v in need(name)[1])
            axes.append(x0 + h * np.arange(n))
    except (ValueError, IndexError) as exc:
        raise FieldFormatError(f"{path}: malformed header: {exc}") from None
    if units not in ("raw", "per-photon"):
        raise FieldFormatError(f"{path}: line {header['units'][0]}: units must be raw or per-photon")
    if need("columns")[1] != COLUMNS:
        raise FieldFormatError(f"{path}: unexpected column layout {header['columns'][1]}")
    data = np.loadtxt(io.StringIO("\n".join(lines[i + 1:])), ndmin=2)
    n = shape[0] * shape[1] * shape[2]
    if data.shape != (n, len(COLUMNS)):
        raise FieldFormatError(f"{path}: expected {n} rows of {len(COLUMNS)} values, got {data.shape}")
    E = np.stack(
        [data[:, 0] + 1j * data[:, 1], data[:, 2] + 1j * data[:, 3], data[:, 4] + 1j * data[:, 5]]
    ).reshape((3,) + shape)
    eps = data[:, 6].reshape(shape)
    return ModeField(tuple(axes), E, eps, omega, per_photon=units == "per-photon")
