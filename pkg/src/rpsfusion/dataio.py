"""Dataset ingestion, deterministic fold splitting and report persistence.

CSV files are UTF-8 with a header row, comma separators and '.' decimal
points. The label column defaults to the last one. Fold splitting uses
numpy's PCG64 generator (np.random.default_rng), a named, portable
algorithm, so a (dataset, k, seed) triple reproduces the same folds on
any platform.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import InvariantError, OverwriteError, ParseError

# Cell values parsed as missing (NaN) rather than rejected.
MISSING_TOKENS = frozenset({"", "?", "na", "nan"})

BUNDLED_DATASETS = ("iris", "wine")


@dataclass
class Dataset:
    """Rectangular numeric feature matrix with one symbolic label per row."""

    name: str
    X: np.ndarray
    y: np.ndarray
    feature_names: tuple = ()
    label_name: str = "label"
    provenance: str = ""

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y)
        if self.X.ndim != 2:
            raise InvariantError("feature matrix must be 2-dimensional")
        if len(self.y) != self.X.shape[0]:
            raise InvariantError(
                f"{self.X.shape[0]} feature rows but {len(self.y)} labels"
            )
        if np.isinf(self.X).any():
            raise InvariantError("feature values must be finite (NaN marks missing)")

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def classes(self) -> tuple:
        return tuple(np.unique(self.y).tolist())


def load_dataset(path, label_column=None, name=None) -> Dataset:
    """Parse a CSV file into a Dataset.

    `label_column` may be a header name or a column index; it defaults to
    the last column. Ragged rows, empty files and unparseable feature
    cells are rejected with their row/column coordinates (rows counted
    from 1 including the header). Missing-value tokens ('', '?', 'NA',
    'NaN') become NaN.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        raise ParseError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if len(header) < 2:
        raise ParseError(f"{path}: need at least one feature column and a label column")
    if not rows[1:]:
        raise ParseError(f"{path}: no data rows after the header")

    if label_column is None:
        label_idx = len(header) - 1
    elif isinstance(label_column, int):
        label_idx = label_column if label_column >= 0 else len(header) + label_column
        if not 0 <= label_idx < len(header):
            raise ParseError(f"{path}: label column index {label_column} out of range")
    else:
        try:
            label_idx = header.index(str(label_column))
        except ValueError:
            raise ParseError(
                f"{path}: label column {label_column!r} not in header {header!r}"
            ) from None

    feature_idx = [j for j in range(len(header)) if j != label_idx]
    features = []
    labels = []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ParseError(
                f"{path}: row {r} has {len(row)} cells, expected {len(header)}"
            )
        label = row[label_idx].strip()
        if not label:
            raise ParseError(f"{path}: row {r}, column {label_idx + 1}: empty label")
        labels.append(label)
        parsed = []
        for j in feature_idx:
            cell = row[j].strip()
            if cell.lower() in MISSING_TOKENS:
                parsed.append(float("nan"))
                continue
            try:
                value = float(cell)
            except ValueError:
                raise ParseError(
                    f"{path}: row {r}, column {j + 1}: non-numeric cell {cell!r}"
                ) from None
            if value in (float("inf"), float("-inf")):
                raise ParseError(
                    f"{path}: row {r}, column {j + 1}: non-finite value {cell!r}"
                )
            parsed.append(value)
        features.append(parsed)

    return Dataset(
        name=name or path.stem,
        X=np.asarray(features, dtype=float),
        y=np.asarray(labels),
        feature_names=tuple(header[j] for j in feature_idx),
        label_name=header[label_idx],
        provenance=str(path),
    )


def kfold_split(labels, k: int, seed: int) -> np.ndarray:
    """Deterministic stratified fold assignment.

    Within each class the (sorted) row indices are shuffled with PCG64
    seeded by `seed` and dealt round-robin, rotating the starting fold
    across classes so total fold sizes stay balanced. Every class ends up
    within one sample of an even split across folds.
    """
    labels = np.asarray(labels)
    k = int(k)
    if k < 2:
        raise InvariantError(f"need at least 2 folds, got {k}")
    classes, counts = np.unique(labels, return_counts=True)
    for cls, count in zip(classes, counts):
        if count < k:
            raise InvariantError(
                f"class {cls!r} has {count} samples, fewer than {k} folds"
            )
    rng = np.random.default_rng(int(seed))
    assignment = np.empty(len(labels), dtype=int)
    start = 0
    for cls in classes:
        idx = np.flatnonzero(labels == cls)
        perm = rng.permutation(idx)
        for j, row in enumerate(perm):
            assignment[row] = (start + j) % k
        start = (start + len(idx)) % k
    return assignment


def write_report(report, path, force: bool = False) -> None:
    """Serialise a report (anything with to_dict) to JSON.

    Existing files are protected: pass force=True to overwrite.
    """
    path = Path(path)
    if path.exists() and not force:
        raise OverwriteError(f"{path} exists; pass force/--force to overwrite")
    payload = report.to_dict() if hasattr(report, "to_dict") else report
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def read_report(path):
    """Read a JSON report back into its dataclass.

    The payload shape decides the type: accuracy reports carry
    'per_fold_accuracy', reliability reports carry 'reliability'.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: malformed JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: expected a JSON object")
    if "per_fold_accuracy" in data:
        from .classifier import AccuracyReport

        return AccuracyReport.from_dict(data)
    if "reliability" in data:
        from .reliability import ReliabilityReport

        return ReliabilityReport.from_dict(data)
    raise ParseError(f"{path}: unrecognised report payload")


def bundled_path(name: str) -> Path:
    """Filesystem path of a bundled dataset CSV."""
    if name not in BUNDLED_DATASETS:
        raise InvariantError(
            f"no bundled dataset {name!r}; available: {', '.join(BUNDLED_DATASETS)}"
        )
    return Path(str(resources.files("rpsfusion") / "datasets" / f"{name}.csv"))


def load_bundled(name: str) -> Dataset:
    """Load one of the datasets shipped with the package."""
    return load_dataset(bundled_path(name), name=name)


def bundled_manifest() -> dict:
    """Parsed manifest describing the bundled datasets (sources, checksums)."""
    path = resources.files("rpsfusion") / "datasets" / "manifest.json"
    return json.loads(path.read_text(encoding="utf-8"))
