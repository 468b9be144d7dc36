"""Reading value lists and writing/reading the CSV tables the CLI emits."""
from __future__ import annotations

import csv
import math
from importlib import resources
from pathlib import Path

from .distributions import DistributionSpec

BUNDLED = ("system_a", "system_b")


class DatasetError(ValueError):
    """Malformed dataset file; ``line`` is 1-based when known."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = f"{path}:{line}: " if line is not None else (f"{path}: " if path else "")
        super().__init__(where + message)


def parse_values(text, path=None):
    """Parse one positive real per line; blank lines and ``#`` comments are skipped."""
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            v = float(line)
        except ValueError:
            raise DatasetError(f"not a number: {raw.strip()!r}", path, lineno) from None
        if not math.isfinite(v) or v <= 0:
            raise DatasetError(f"values must be finite and positive, got {v!r}", path, lineno)
        values.append(v)
    if not values:
        raise DatasetError("no values found", path)
    return values


def load_values(path):
    path = Path(path)
    return parse_values(path.read_text(), path)


def bundled_path(name):
    if name not in BUNDLED:
        raise KeyError(f"no bundled dataset {name!r}; choose from {', '.join(BUNDLED)}")
    return resources.files("bootcover") / "data" / f"{name}.csv"


def load_dataset(ref):
    """Empirical spec from a CSV path or a bundled dataset name (``system_a``, ``system_b``)."""
    p = Path(ref)
    if not p.exists() and str(ref) in BUNDLED:
        text = bundled_path(str(ref)).read_text()
        return DistributionSpec.empirical(parse_values(text, ref), name=str(ref))
    return DistributionSpec.empirical(load_values(p), name=p.stem)


def fmt(v):
    """Scientific notation, six significant digits; blank for None."""
    if v is None:
        return ""
    return f"{v:.5e}"


def write_table(path, header, rows, comments=()):
    with open(path, "w", newline="") as fh:
        for c in comments:
            fh.write(f"# {c}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, float) else v for v in row])


def read_table(path):
    """Read a table written by :func:`write_table` back as ``(header, rows, comments)``.

    Numeric cells come back as float, others as str.
    """
    comments, lines = [], []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                comments.append(line[1:].strip())
            elif line.strip():
                lines.append(line)
    reader = csv.reader(lines)
    header = next(reader)
    rows = []
    for rec in reader:
        if len(rec) != len(header):
            raise ValueError(f"{path}: row has {len(rec)} cells, header has {len(header)}")
        rows.append([_cell(c) for c in rec])
    return header, rows, comments


def _cell(c):
    try:
        return float(c)
    except ValueError:
        return c
