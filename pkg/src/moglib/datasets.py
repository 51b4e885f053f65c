"""CSV ingestion and the bundled UEFA Champions League data."""

from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

__all__ = ["Dataset", "DataFormatError", "load_csv", "parse_csv", "load_uefa", "load"]


class DataFormatError(ValueError):
    """Malformed input file; the message names the offending line."""


@dataclass(frozen=True)
class Dataset:
    name: str
    pairs: np.ndarray  # shape (n, 2)
    source: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("dataset name must be nonempty")
        if self.pairs.ndim != 2 or self.pairs.shape[1] != 2:
            raise ValueError("pairs must have shape (n, 2)")
        if np.any(self.pairs < 0):
            raise ValueError("coordinates must be nonnegative")

    def __len__(self):
        return self.pairs.shape[0]

    @property
    def x1(self) -> np.ndarray:
        return self.pairs[:, 0]

    @property
    def x2(self) -> np.ndarray:
        return self.pairs[:, 1]


def parse_csv(text: str, name: str = "data", source: str = "<string>") -> Dataset:
    """Parse ``x1,x2`` CSV text (LF or CRLF line endings)."""
    reader = csv.reader(io.StringIO(text.lstrip("﻿"), newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise DataFormatError(f"{source}: empty file") from None
    if [h.strip().lower() for h in header] != ["x1", "x2"]:
        raise DataFormatError(f"{source}:1: expected header 'x1,x2', got {','.join(header)!r}")
    rows = []
    for row in reader:
        lineno = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise DataFormatError(f"{source}:{lineno}: expected 2 fields, got {len(row)}")
        try:
            v = [float(c) for c in row]
        except ValueError:
            raise DataFormatError(f"{source}:{lineno}: non-numeric value in {','.join(row)!r}") from None
        if not all(math.isfinite(c) for c in v):
            raise DataFormatError(f"{source}:{lineno}: non-finite value")
        if min(v) < 0:
            raise DataFormatError(f"{source}:{lineno}: negative value")
        rows.append(v)
    if not rows:
        raise DataFormatError(f"{source}: no data rows")
    return Dataset(name, np.array(rows, dtype=float), source)


def load_csv(path: str | Path) -> Dataset:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_csv(text, name=path.stem, source=str(path))


def load_uefa() -> Dataset:
    """UEFA Champions League 2004-05 and 2005-06 (Meintanis, 2007), 37 games.

    ``x1``: minute of the first kick goal by either team; ``x2``: minute of
    the home team's first goal. The bundled CSV is verified against its
    SHA-256 checksum.
    """
    pkg = resources.files("moglib") / "data"
    raw = (pkg / "uefa.csv").read_bytes()
    expected = (pkg / "uefa.sha256").read_text().split()[0]
    if hashlib.sha256(raw).hexdigest() != expected:
        raise DataFormatError("bundled uefa.csv does not match its checksum")
    return parse_csv(raw.decode("utf-8"), name="uefa", source="Meintanis (2007), UEFA Champions League")


def load(spec: str) -> Dataset:
    """``"uefa"`` for the bundled data, otherwise a CSV path."""
    if spec == "uefa":
        return load_uefa()
    return load_csv(spec)
