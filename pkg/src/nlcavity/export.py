"""Result files: versioned CSV, structured text reports, echo and plot scripts.

All writes go to a temporary file in the target directory followed by an
atomic rename, so an interrupted run never leaves a partial file behind.
Floats are written with ``repr`` (shortest round-trip form).
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import yaml

FORMAT_VERSION = 1


def _version() -> str:
    from . import __version__

    return __version__


def fmt(v) -> str:
    if isinstance(v, float):
        return repr(float(v))  # np.float64 reprs with its type name under numpy 2
    if hasattr(v, "item"):
        return fmt(v.item())
    return str(v)


def atomic_write(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def header_lines(kind: str, system_hash: str, resolved: dict) -> list:
    return [
        f"# nlcavity {_version()} {kind} format={FORMAT_VERSION}",
        f"# system_hash {system_hash}",
        "# params " + json.dumps(resolved, sort_keys=True, separators=(",", ":")),
    ]


def csv_text(columns: Sequence[str], rows: Iterable[Sequence], header: Sequence[str] = ()) -> str:
    out = list(header)
    out.append(",".join(columns))
    for row in rows:
        out.append(",".join(fmt(v) for v in row))
    return "\n".join(out) + "\n"


def write_csv(path, columns, rows, *, kind: str, system_hash: str, resolved: dict) -> Path:
    return atomic_write(path, csv_text(columns, rows, header_lines(kind, system_hash, resolved)))


def write_columns(path, columns: dict, *, kind: str, system_hash: str, resolved: dict) -> Path:
    """Write equal-length named arrays as CSV columns."""
    return write_csv(path, list(columns), zip(*columns.values()), kind=kind, system_hash=system_hash, resolved=resolved)


def read_csv(path):
    """Parse a file written by :func:`write_csv`: (header comments, columns, float rows)."""
    comments, cols, rows = [], None, []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            comments.append(line)
        elif cols is None:
            cols = line.split(",")
        elif line:
            rows.append([float(v) for v in line.split(",")])
    return comments, cols, rows


def write_report(path, title: str, sections: dict, *, system_hash: str) -> Path:
    """Plain ``key: value`` report grouped into sections."""
    lines = [f"# nlcavity {_version()} {title} format={FORMAT_VERSION}", f"# system_hash {system_hash}"]
    for name, items in sections.items():
        lines.append(f"[{name}]")
        for k, v in items.items():
            lines.append(f"{k}: {fmt(v)}")
    return atomic_write(path, "\n".join(lines) + "\n")


def read_report(path) -> dict:
    out, cur = {}, None
    for line in Path(path).read_text().splitlines():
        if not line or line.startswith("#"):
            continue
        if line.startswith("["):
            cur = out.setdefault(line.strip("[]"), {})
            continue
        k, _, v = line.partition(": ")
        try:
            cur[k] = float(v)
        except ValueError:
            cur[k] = v
    return out


def write_echo(path, echo: dict, system_hash: str) -> Path:
    head = f"# nlcavity {_version()} resolved scenario; system_hash {system_hash}\n"
    body = yaml.safe_dump(echo, sort_keys=True, default_flow_style=False)
    return atomic_write(path, head + body)


def write_sweep_plot(path, sweep_csv: str, ridge_csv: str) -> Path:
    text = f"""# gnuplot script for the pump-power / overcoupling landscape
set datafile separator ','
set datafile commentschars '#'
set key autotitle columnhead
set logscale x
set xlabel 'P_b (mW)'
set ylabel 'delta'
set title 'Extraction probability F'
set view map
set pm3d at b
splot '{sweep_csv}' using 1:2:4 with pm3d notitle, \\
      '{ridge_csv}' using 2:1:3 with lines lw 2 lc rgb 'white' title 'optimum'
pause -1
"""
    return atomic_write(path, text)


def write_contour_plot(path, contour_csv: str, deltas) -> Path:
    plots = ", \\\n     ".join(
        f"'{contour_csv}' using 1:($2=={fmt(float(d))} ? $4 : 1/0) with lines title 'delta={fmt(float(d))}'"
        for d in deltas
    )
    text = f"""# gnuplot script for F(P_b) at fixed overcoupling
set datafile separator ','
set datafile commentschars '#'
set logscale x
set xlabel 'P_b (mW)'
set ylabel 'F'
plot {plots}
pause -1
"""
    return atomic_write(path, text)
