"""CSV helpers shared by the report-producing modules."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence


def fmt(x) -> str:
    """Round-trippable, platform-stable text for numbers and booleans."""
    if isinstance(x, (bool,)) or type(x).__name__ == "bool_":
        return "1" if x else "0"
    if isinstance(x, (int,)) or type(x).__name__.startswith("int"):
        return str(int(x))
    return repr(float(x))


def write_csv(path: str | Path, header: Sequence[str], columns: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    cols = [list(c) for c in columns]
    if len(cols) != len(header):
        raise ValueError("header and column count differ")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([fmt(v) for v in row])
    return path


def read_column(path: str | Path, name: str) -> list[float]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or name not in reader.fieldnames:
            raise ValueError(f"{path}: missing column {name!r}")
        return [float(row[name]) for row in reader]
