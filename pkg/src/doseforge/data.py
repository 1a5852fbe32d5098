"""Datasets and CSV ingestion."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import DataError
from .models import Likelihood, LikelihoodKind


@dataclass(frozen=True, eq=False)
class Dataset:
    """Single-outcome dose-response data.

    One row per subject, except for the summary likelihoods where a row is a
    dose-group mean with its standard error (``se``) or an event count out
    of ``trials``.
    """

    dose: np.ndarray
    response: np.ndarray
    likelihood: Likelihood
    se: np.ndarray | None = None
    trials: np.ndarray | None = None
    name: str = ""

    def __post_init__(self):
        dose = np.asarray(self.dose, dtype=float).reshape(-1)
        y = np.asarray(self.response, dtype=float).reshape(-1)
        object.__setattr__(self, "dose", dose)
        object.__setattr__(self, "response", y)
        if len(dose) != len(y):
            raise DataError(f"dose and response lengths differ ({len(dose)} vs {len(y)})")
        if np.any(~np.isfinite(dose)) or np.any(dose < 0):
            raise DataError("doses must be finite and non-negative")
        if np.any(~np.isfinite(y)):
            raise DataError("responses must be finite")
        kind = self.likelihood.kind
        if (self.se is not None) != (kind is LikelihoodKind.NORMAL_SUMMARY):
            raise DataError("standard errors are required for, and only for, summary-normal data")
        if self.se is not None:
            se = np.asarray(self.se, dtype=float).reshape(-1)
            if len(se) != len(y) or np.any(~(se > 0)):
                raise DataError("standard errors must be positive, one per row")
            object.__setattr__(self, "se", se)
        if kind is LikelihoodKind.BINOMIAL:
            if self.trials is None:
                raise DataError("binomial data need trial counts")
            n = np.asarray(self.trials, dtype=float).reshape(-1)
            if len(n) != len(y) or np.any(n < 1) or np.any(n != np.round(n)):
                raise DataError("trial counts must be positive integers, one per row")
            if np.any(y < 0) or np.any(y > n) or np.any(y != np.round(y)):
                raise DataError("event counts must be integers in [0, trials]")
            object.__setattr__(self, "trials", n)
        elif self.trials is not None:
            object.__setattr__(self, "trials", np.asarray(self.trials, dtype=float).reshape(-1))
        if kind is LikelihoodKind.BERNOULLI and np.any((y != 0) & (y != 1)):
            raise DataError("Bernoulli responses must be 0 or 1")
        if kind is LikelihoodKind.POISSON and (np.any(y < 0) or np.any(y != np.round(y))):
            raise DataError("Poisson responses must be non-negative integers")
        if kind is LikelihoodKind.ORDINAL:
            K = self.likelihood.n_categories
            if np.any(y != np.round(y)) or np.any(y < 1) or np.any(y > K):
                raise DataError(f"category indices must be integers in 1..{K}")

    def __len__(self):
        return len(self.response)

    @property
    def doses(self) -> np.ndarray:
        """Distinct doses in ascending order."""
        return np.unique(self.dose)

    def subset(self, mask) -> "Dataset":
        mask = np.asarray(mask, dtype=bool)
        return replace(
            self,
            dose=self.dose[mask],
            response=self.response[mask],
            se=None if self.se is None else self.se[mask],
            trials=None if self.trials is None else self.trials[mask],
        )

    def exclude_doses(self, doses) -> "Dataset":
        return self.subset(~np.isin(self.dose, np.asarray(doses, dtype=float)))


@dataclass(frozen=True, eq=False)
class PairedDataset:
    """Per-subject efficacy/toxicity pairs, optionally with AE severity."""

    dose: np.ndarray
    y_eff: np.ndarray
    y_tox: np.ndarray
    severity: np.ndarray | None = None

    def __post_init__(self):
        for name in ("dose", "y_eff", "y_tox"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float).reshape(-1))
        if self.severity is not None:
            object.__setattr__(self, "severity", np.asarray(self.severity, dtype=float).reshape(-1))
        n = len(self.dose)
        cols = [self.y_eff, self.y_tox] + ([self.severity] if self.severity is not None else [])
        if any(len(c) != n for c in cols):
            raise DataError("paired columns must have equal length")

    def __len__(self):
        return len(self.dose)

    @property
    def doses(self) -> np.ndarray:
        return np.unique(self.dose)

    def efficacy(self, likelihood: Likelihood, name: str = "efficacy") -> Dataset:
        return Dataset(self.dose, self.y_eff, likelihood, name=name)

    def toxicity(self, likelihood: Likelihood, name: str = "toxicity") -> Dataset:
        return Dataset(self.dose, self.y_tox, likelihood, name=name)

    def subset(self, mask) -> "PairedDataset":
        mask = np.asarray(mask, dtype=bool)
        sev = None if self.severity is None else self.severity[mask]
        return PairedDataset(self.dose[mask], self.y_eff[mask], self.y_tox[mask], sev)

    def header(self) -> list[str]:
        h = ["dose", "y_eff", "y_tox"]
        return h + ["severity"] if self.severity is not None else h

    def rows(self):
        cols = [self.dose, self.y_eff, self.y_tox]
        if self.severity is not None:
            cols.append(self.severity)
        return zip(*cols)


# --- CSV ingestion -------------------------------------------------------

_SCHEMAS = {
    "individual": ("dose", "y_eff", "y_tox"),
    "summary": ("dose", "mean", "se", "n"),
    "counts": ("dose", "events", "n"),
    "categorical": ("dose", "category"),
}


def _read_rows(path):
    text = Path(path).read_text()
    lines = [(i + 1, ln) for i, ln in enumerate(text.splitlines())
             if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise DataError(f"{path}: no header line")
    reader = csv.reader(io.StringIO("\n".join(ln for _, ln in lines)))
    rows = list(reader)
    header = [h.strip() for h in rows[0]]
    return header, [(lines[i][0], r) for i, r in enumerate(rows[1:], start=1)]


def _parse(value: str, line: int, col: str, errors: list) -> float:
    v = value.strip()
    if v == "" or v.lower() in ("na", "nan"):
        errors.append(f"line {line}: missing {col}")
        return math.nan
    try:
        x = float(v)
    except ValueError:
        errors.append(f"line {line}: malformed numeric field {col}={v!r}")
        return math.nan
    if not math.isfinite(x):
        errors.append(f"line {line}: non-finite {col}")
    return x


def ingest_csv(path, schema: str, likelihood: Likelihood | None = None,
               n_categories: int | None = None):
    """Read and validate a CSV file.

    ``schema`` is one of ``individual`` (``dose,y_eff,y_tox[,severity]``,
    returns a :class:`PairedDataset`), ``summary`` (``dose,mean,se,n``),
    ``counts`` (``dose,events,n``) or ``categorical`` (``dose,category``).
    The last three return a :class:`Dataset`.
    """
    if schema not in _SCHEMAS:
        raise DataError(f"unknown CSV schema {schema!r}; expected one of {sorted(_SCHEMAS)}")
    header, rows = _read_rows(path)
    required = _SCHEMAS[schema]
    missing = [c for c in required if c not in header]
    if missing:
        raise DataError(f"{path}: header {header} lacks columns {missing} for schema {schema!r}")
    cols = list(required)
    if schema == "individual" and "severity" in header:
        cols.append("severity")
    idx = {c: header.index(c) for c in cols}
    errors: list[str] = []
    table = {c: [] for c in cols}
    for line, r in rows:
        if len(r) < len(header):
            errors.append(f"line {line}: expected {len(header)} fields, got {len(r)}")
            continue
        for c in cols:
            table[c].append(_parse(r[idx[c]], line, c, errors))
        if schema == "summary" and table["se"][-1] <= 0:
            errors.append(f"line {line}: standard error must be positive")
        if schema == "categorical":
            k = table["category"][-1]
            if math.isfinite(k) and (k != round(k) or k < 1):
                errors.append(f"line {line}: category index {k:g} must be a positive integer")
            if n_categories is not None and k > n_categories:
                errors.append(f"line {line}: category index {k:g} out of 1..{n_categories}")
    if errors:
        raise DataError(f"{path}: " + "; ".join(errors))
    arr = {c: np.asarray(v, dtype=float) for c, v in table.items()}
    if schema == "individual":
        return PairedDataset(arr["dose"], arr["y_eff"], arr["y_tox"], arr.get("severity"))
    if schema == "summary":
        return Dataset(arr["dose"], arr["mean"], Likelihood(LikelihoodKind.NORMAL_SUMMARY),
                       se=arr["se"], trials=arr["n"], name=Path(path).stem)
    if schema == "counts":
        lik = likelihood or Likelihood(LikelihoodKind.BINOMIAL)
        return Dataset(arr["dose"], arr["events"], lik, trials=arr["n"], name=Path(path).stem)
    K = int(arr["category"].max()) if len(arr["category"]) else 2
    if n_categories is not None:
        K = n_categories
    return Dataset(arr["dose"], arr["category"], Likelihood(LikelihoodKind.ORDINAL, n_categories=max(K, 2)),
                   name=Path(path).stem)
