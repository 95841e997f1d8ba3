"""Loading, validation, alignment and standardization of the input tables.

Tables are plain CSV: a header row, unit ids in the first column and one
numeric column per variable. Rows are prefectures (or any other unit).
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

__all__ = [
    "DataError",
    "PredictorTable",
    "ResponseTable",
    "ResponseMetadata",
    "AlignedDataset",
    "StandardizedDesign",
    "load_table",
    "load_metadata",
    "align",
    "standardize",
    "transform_responses",
]

MISSING_TOKENS = {"", "na", "nan", "null", "none"}


class DataError(ValueError):
    """Raised for malformed or inconsistent input data."""


def _check_unique(names: Sequence[str], what: str) -> None:
    seen = set()
    dups = []
    for name in names:
        if name in seen and name not in dups:
            dups.append(name)
        seen.add(name)
    if dups:
        raise DataError(f"duplicate {what}: {', '.join(map(repr, dups))}")


@dataclass(frozen=True)
class _Table:
    row_ids: Tuple[str, ...]
    names: Tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "row_ids", tuple(self.row_ids))
        object.__setattr__(self, "names", tuple(self.names))
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise DataError("table values must be a 2-d matrix")
        if values.shape != (len(self.row_ids), len(self.names)):
            raise DataError(
                f"matrix shape {values.shape} does not match "
                f"{len(self.row_ids)} row ids x {len(self.names)} columns"
            )
        _check_unique(self.row_ids, "row ids")
        _check_unique(self.names, "column names")
        if not np.all(np.isfinite(values)):
            raise DataError("table contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class PredictorTable(_Table):
    """Units x predictors."""

    @property
    def predictor_names(self) -> Tuple[str, ...]:
        return self.names


@dataclass(frozen=True)
class ResponseTable(_Table):
    """Units x responses; production quantities, so non-negative."""

    def __post_init__(self) -> None:
        super().__post_init__()
        if np.any(self.values < 0):
            i, j = np.argwhere(self.values < 0)[0]
            raise DataError(
                f"negative response value at unit {self.row_ids[i]!r}, "
                f"response {self.names[j]!r}"
            )

    @property
    def response_names(self) -> Tuple[str, ...]:
        return self.names


@dataclass(frozen=True)
class ResponseMetadata:
    """Map from response name to its local factor (integer 1-5)."""

    entries: Dict[str, int]

    def __post_init__(self) -> None:
        for name, factor in self.entries.items():
            if isinstance(factor, bool) or int(factor) != factor or not 1 <= factor <= 5:
                raise DataError(
                    f"local factor for {name!r} must be an integer in 1..5, got {factor!r}"
                )
        object.__setattr__(
            self, "entries", {k: int(v) for k, v in self.entries.items()}
        )

    def __getitem__(self, name: str) -> int:
        return self.entries[name]

    def __contains__(self, name: object) -> bool:
        return name in self.entries


@dataclass(frozen=True)
class AlignedDataset:
    unit_ids: Tuple[str, ...]
    X: np.ndarray
    Y: np.ndarray
    predictor_names: Tuple[str, ...]
    response_names: Tuple[str, ...]
    metadata: Optional[ResponseMetadata] = None

    def __post_init__(self) -> None:
        n = len(self.unit_ids)
        if n < 3:
            raise DataError(f"need at least 3 units, got {n}")
        if self.X.shape != (n, len(self.predictor_names)) or self.X.shape[1] < 1:
            raise DataError("predictor matrix does not match unit ids / names")
        if self.Y.shape != (n, len(self.response_names)) or self.Y.shape[1] < 1:
            raise DataError("response matrix does not match unit ids / names")

    def response(self, name: str) -> np.ndarray:
        try:
            j = self.response_names.index(name)
        except ValueError:
            raise DataError(f"unknown response {name!r}") from None
        return self.Y[:, j]


@dataclass(frozen=True)
class StandardizedDesign:
    """Centered, unit-variance design with the statistics used to build it.

    ``retained`` indexes the columns of the original matrix kept in ``X_std``;
    ``means`` and ``scales`` are given for retained columns only. Scales use
    the 1/n denominator, so every column of ``X_std`` satisfies
    ``x.T @ x == n``.
    """

    X_std: np.ndarray
    means: np.ndarray
    scales: np.ndarray
    retained: np.ndarray
    names: Tuple[str, ...]
    excluded_columns: List[Tuple[str, str]] = field(default_factory=list)
    n_features_in: int = 0

    @property
    def n(self) -> int:
        return self.X_std.shape[0]

    @property
    def p(self) -> int:
        return self.X_std.shape[1]

    @property
    def retained_names(self) -> List[str]:
        return [self.names[j] for j in self.retained]

    def transform(self, X: np.ndarray) -> np.ndarray:
        """Apply the stored centering/scaling to new raw rows."""
        X = np.asarray(X, dtype=float)
        return (X[:, self.retained] - self.means) / self.scales


def _parse_cell(text: str, line: int, col: int, impute: bool) -> float:
    stripped = text.strip()
    if stripped.lower() in MISSING_TOKENS:
        if impute:
            return math.nan
        raise DataError(f"missing value at (row {line}, col {col})")
    try:
        value = float(stripped)
    except ValueError:
        raise DataError(
            f"non-numeric cell {text!r} at (row {line}, col {col})"
        ) from None
    if not math.isfinite(value):
        raise DataError(f"non-finite cell {text!r} at (row {line}, col {col})")
    return value


def _read_rows(path: Union[str, os.PathLike]) -> List[Tuple[int, List[str]]]:
    if not os.path.isfile(path):
        raise FileNotFoundError(f"no such file: {os.fspath(path)}")
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for record in reader:
            if not record or (record[0].startswith("#")):
                continue
            rows.append((reader.line_num, record))
    if not rows:
        raise DataError(f"{os.fspath(path)}: empty file")
    return rows


def load_table(
    path: Union[str, os.PathLike], kind: str = "predictor", impute: bool = False
) -> Union[PredictorTable, ResponseTable]:
    """Read a predictor or response CSV.

    Cell coordinates in error messages are 1-based: ``row`` is the line number
    in the file (the header is row 1) and ``col`` the field number (the unit
    id is col 1). Missing cells are rejected unless ``impute`` is set, in which
    case they are replaced by the column mean of the observed cells.
    Lines starting with ``#`` are skipped.
    """
    if kind not in ("predictor", "response"):
        raise ValueError(f"kind must be 'predictor' or 'response', got {kind!r}")
    rows = _read_rows(path)
    _, header = rows[0]
    names = [h.strip() for h in header[1:]]
    width = len(header)
    if width < 2:
        raise DataError(f"{os.fspath(path)}: header needs a unit id and at least one column")
    _check_unique(names, "column names")

    row_ids = []
    values = np.empty((len(rows) - 1, width - 1))
    for i, (line, record) in enumerate(rows[1:]):
        if len(record) != width:
            raise DataError(
                f"ragged row at line {line}: {len(record)} fields, expected {width}"
            )
        row_ids.append(record[0].strip())
        for j, cell in enumerate(record[1:]):
            values[i, j] = _parse_cell(cell, line, j + 2, impute)
    if len(row_ids) == 0:
        raise DataError(f"{os.fspath(path)}: no data rows")

    if impute:
        for j in range(values.shape[1]):
            col = values[:, j]
            missing = np.isnan(col)
            if missing.all():
                raise DataError(f"column {names[j]!r} has no observed values")
            col[missing] = col[~missing].mean()

    cls = PredictorTable if kind == "predictor" else ResponseTable
    return cls(row_ids, names, values)


def load_metadata(path: Union[str, os.PathLike]) -> ResponseMetadata:
    """Read ``response,local_factor`` rows."""
    rows = _read_rows(path)
    _, header = rows[0]
    header = [h.strip() for h in header]
    try:
        i_name = header.index("response")
        i_factor = header.index("local_factor")
    except ValueError:
        raise DataError("metadata header must contain 'response' and 'local_factor'") from None
    entries: Dict[str, int] = {}
    for line, record in rows[1:]:
        name = record[i_name].strip()
        if name in entries:
            raise DataError(f"duplicate metadata entry {name!r}")
        raw = record[i_factor].strip()
        try:
            entries[name] = int(raw)
        except ValueError:
            raise DataError(
                f"local factor {raw!r} at (row {line}, col {i_factor + 1}) is not an integer"
            ) from None
    return ResponseMetadata(entries)


def align(
    pred: PredictorTable,
    resp: ResponseTable,
    meta: Optional[ResponseMetadata] = None,
) -> AlignedDataset:
    """Join predictors and responses on unit id, sorted by id.

    Mismatched unit sets are an error; no row is ever dropped silently.
    Passing ``meta=None`` skips the metadata coverage check (single-response
    commands do not need local factors).
    """
    p_ids, r_ids = set(pred.row_ids), set(resp.row_ids)
    if p_ids != r_ids:
        only_p = sorted(p_ids - r_ids)
        only_r = sorted(r_ids - p_ids)
        parts = []
        if only_p:
            parts.append(f"missing from responses: {', '.join(only_p)}")
        if only_r:
            parts.append(f"missing from predictors: {', '.join(only_r)}")
        raise DataError("unit ids differ; " + "; ".join(parts))
    if meta is not None:
        missing = [name for name in resp.names if name not in meta]
        if missing:
            raise DataError(f"responses without local factor: {', '.join(missing)}")

    units = sorted(p_ids)
    p_index = {u: i for i, u in enumerate(pred.row_ids)}
    r_index = {u: i for i, u in enumerate(resp.row_ids)}
    X = pred.values[[p_index[u] for u in units]]
    Y = resp.values[[r_index[u] for u in units]]
    return AlignedDataset(
        unit_ids=tuple(units),
        X=X,
        Y=Y,
        predictor_names=pred.names,
        response_names=resp.names,
        metadata=meta,
    )


def standardize(X: np.ndarray, names: Optional[Sequence[str]] = None) -> StandardizedDesign:
    """Center each column and scale it to 1/n-variance one.

    Columns whose entries are all identical are dropped and reported in
    ``excluded_columns`` with reason ``"constant"``.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DataError("design must be a 2-d matrix")
    n, p = X.shape
    if n < 2:
        raise DataError(f"need at least 2 rows to standardize, got {n}")
    if names is None:
        names = [f"x{j}" for j in range(p)]
    names = tuple(names)
    if len(names) != p:
        raise DataError("names do not match the number of columns")

    constant = np.all(X == X[0], axis=0)
    retained = np.flatnonzero(~constant)
    excluded = [(names[j], "constant") for j in np.flatnonzero(constant)]
    if retained.size == 0:
        raise DataError("empty design: every column is constant")

    Xr = X[:, retained]
    means = Xr.mean(axis=0)
    centered = Xr - means
    scales = np.sqrt(np.mean(centered**2, axis=0))
    X_std = centered / scales
    # second pass removes the O(eps) residual mean/variance of the first
    m2 = X_std.mean(axis=0)
    X_std -= m2
    s2 = np.sqrt(np.mean(X_std**2, axis=0))
    X_std /= s2
    means = means + m2 * scales
    scales = scales * s2
    return StandardizedDesign(
        X_std=X_std,
        means=means,
        scales=scales,
        retained=retained,
        names=names,
        excluded_columns=excluded,
        n_features_in=p,
    )


def transform_responses(Y: np.ndarray, transform: str = "identity") -> np.ndarray:
    """Optional response transform; ``log1p`` is exploratory only."""
    if transform == "identity":
        return np.asarray(Y, dtype=float)
    if transform == "log1p":
        return np.log1p(np.asarray(Y, dtype=float))
    raise ValueError(f"unknown transform {transform!r}")
