"""Deterministic CSV / JSON payload writers."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence


def fmt(v) -> str:
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    return f"{float(v):.17g}"


def write_table(path, columns: Sequence[str], rows: Iterable[Sequence], fmt_name: str = "csv") -> int:
    """Write rows to ``path`` as CSV (17 significant digits) or JSON. Returns the row count."""
    rows = [tuple(r) for r in rows]
    path = Path(path)
    if fmt_name == "csv":
        lines = [",".join(columns)]
        lines += [",".join(fmt(v) for v in r) for r in rows]
        path.write_text("\n".join(lines) + "\n")
    elif fmt_name == "json":
        data = {"columns": list(columns), "rows": [[_plain(v) for v in r] for r in rows]}
        path.write_text(json.dumps(data) + "\n")
    else:
        raise ValueError(f"unknown format {fmt_name!r}")
    return len(rows)


def _plain(v):
    if isinstance(v, int) and not isinstance(v, bool):
        return v
    return float(fmt(v))


def read_csv(path) -> tuple[list[str], list[list[float]]]:
    lines = Path(path).read_text().strip().splitlines()
    header = lines[0].split(",")
    return header, [[float(t) for t in line.split(",")] for line in lines[1:]]
