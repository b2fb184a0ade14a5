"""Loading paired samples from delimited text files."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, PairingError, ParseError


@dataclass(frozen=True)
class SampleMatrix:
    """An ``n x d`` matrix of finite observations of one variable group."""

    values: np.ndarray
    column_names: Optional[tuple] = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2:
            raise ValueError("sample must be a 2-D array")
        n, d = values.shape
        if n < 2 or d < 1:
            raise ValueError(f"sample needs n >= 2 and d >= 1, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("sample contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.column_names is not None:
            names = tuple(self.column_names)
            if len(names) != d:
                raise ValueError("column_names length does not match d")
            object.__setattr__(self, "column_names", names)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class PairedSample:
    """Row-paired observations ``(x_i, y_i)``."""

    x: SampleMatrix
    y: SampleMatrix

    def __post_init__(self):
        if not isinstance(self.x, SampleMatrix):
            object.__setattr__(self, "x", SampleMatrix(self.x))
        if not isinstance(self.y, SampleMatrix):
            object.__setattr__(self, "y", SampleMatrix(self.y))
        if self.x.n != self.y.n:
            raise PairingError(f"row counts differ: {self.x.n} vs {self.y.n}")

    @property
    def n(self) -> int:
        return self.x.n

    def joint(self) -> np.ndarray:
        """Concatenated ``[x | y]`` matrix."""
        return np.hstack([self.x.values, self.y.values])


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def _read_table(path, delimiter: Optional[str] = None):
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty file")
    if delimiter is None:
        delimiter = "\t" if "\t" in lines[0] else ","
    rows = [[cell.strip() for cell in r] for r in csv.reader(lines, delimiter=delimiter)]

    header = None
    if not all(_is_number(c) for c in rows[0]):
        header, rows = rows[0], rows[1:]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    width = len(rows[0])
    out = np.empty((len(rows), width))
    # row numbers reported 1-based against the file's data lines
    offset = 2 if header is not None else 1
    for i, r in enumerate(rows):
        if len(r) != width:
            raise ParseError(i + offset, len(r) + 1, "<ragged row>")
        for j, cell in enumerate(r):
            try:
                val = float(cell)
            except ValueError:
                raise ParseError(i + offset, j + 1, cell) from None
            if not math.isfinite(val):
                raise ValueError(f"{path}: non-finite value {cell!r} at row {i + offset}, column {j + 1}")
            out[i, j] = val
    return out, header


_DELIMS = {"csv": ",", "tsv": "\t", None: None}


def load_paired(path_x, path_y, format: Optional[str] = None) -> PairedSample:
    """Load ``x`` and ``y`` from two files with the same number of rows.

    ``format`` is ``"csv"``, ``"tsv"`` or ``None`` to sniff the delimiter
    from the first line.
    """
    if format not in _DELIMS:
        raise ConfigError(f"unknown format {format!r}")
    xv, xh = _read_table(path_x, _DELIMS[format])
    yv, yh = _read_table(path_y, _DELIMS[format])
    if xv.shape[0] != yv.shape[0]:
        raise PairingError(f"row counts differ: {xv.shape[0]} vs {yv.shape[0]}")
    return PairedSample(SampleMatrix(xv, xh), SampleMatrix(yv, yh))


def load_joint(path, split: int, format: Optional[str] = None) -> PairedSample:
    """Load one table and split its columns into ``x = [0, split)`` and ``y = [split, d)``."""
    if format not in _DELIMS:
        raise ConfigError(f"unknown format {format!r}")
    values, header = _read_table(path, _DELIMS[format])
    total = values.shape[1]
    if not 1 <= split < total:
        raise ConfigError(f"split must be in [1, {total - 1}], got {split}")
    hx = hy = None
    if header is not None:
        hx, hy = header[:split], header[split:]
    return PairedSample(SampleMatrix(values[:, :split], hx), SampleMatrix(values[:, split:], hy))


def as_sample(values, column_names: Optional[Sequence[str]] = None) -> SampleMatrix:
    if isinstance(values, SampleMatrix):
        return values
    return SampleMatrix(values, column_names)
