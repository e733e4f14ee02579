"""CSV ingestion and export of data matrices (rows = observations)."""
from __future__ import annotations

import csv

import numpy as np

from .errors import IngestionError, InsufficientDataError


def read_data_csv(path, header=False):
    rows = []
    width = None
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for lineno, raw in enumerate(reader, start=1):
            if header and lineno == 1:
                continue
            if not raw or all(not cell.strip() for cell in raw):
                continue
            if width is None:
                width = len(raw)
            elif len(raw) != width:
                raise IngestionError(f"row {lineno}: expected {width} columns, found {len(raw)}")
            values = []
            for col, cell in enumerate(raw, start=1):
                try:
                    v = float(cell)
                except ValueError:
                    raise IngestionError(f"row {lineno}, column {col}: cannot parse {cell.strip()!r}",
                                         column=col) from None
                if not np.isfinite(v):
                    raise IngestionError(f"row {lineno}, column {col}: non-finite value", column=col)
                values.append(v)
            rows.append(values)
    if len(rows) < 2:
        raise InsufficientDataError(f"need at least 2 observations, found {len(rows)}")
    data = np.array(rows, dtype=float)
    const = np.flatnonzero(np.all(data == data[0], axis=0))
    if const.size:
        raise IngestionError(f"column {const[0] + 1} is constant", column=int(const[0]) + 1)
    data.flags.writeable = False
    return data


def write_data_csv(path, data, header=None):
    """Write with 17 significant digits so a read-back is bit-identical."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if header is not None:
            w.writerow(header)
        for row in np.asarray(data, dtype=float):
            w.writerow([format(v, ".17g") for v in row])
