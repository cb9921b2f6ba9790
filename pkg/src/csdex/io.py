"""Panel file I/O and the empirical preprocessing pipeline.

Files are delimited text (RFC-4180 style quoting), one numeric cell per
entry, with an optional single header row.  Orientation says whether the
file stores sections as rows or as columns; parsing always normalizes to
sections-as-rows.

The preprocessing mirrors what one does to raw series before estimating
the dependence exponent: standardize each section, then regress each
section on the cross-sectional mean (no intercept) and keep the residuals,
whose average autocorrelations can be compared against those of the
cross-sectional mean itself.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from .errors import DegenerateDataError, PanelFormatError
from .moments import acf
from .panel import Panel

__all__ = [
    "SECTIONS_AS_ROWS",
    "SECTIONS_AS_COLUMNS",
    "PanelFile",
    "EmpiricalDiagnostics",
    "read_panel",
    "write_panel",
    "standardize",
    "defactor",
]

SECTIONS_AS_ROWS = "sections-as-rows"
SECTIONS_AS_COLUMNS = "sections-as-columns"


@dataclass(frozen=True)
class PanelFile:
    """Where and how a panel is stored on disk."""

    path: Union[str, Path]
    orientation: str = SECTIONS_AS_ROWS
    header: bool = False
    delimiter: str = ","

    def __post_init__(self):
        if self.orientation not in (SECTIONS_AS_ROWS, SECTIONS_AS_COLUMNS):
            raise ValueError(f"unknown orientation {self.orientation!r}")
        if len(self.delimiter) != 1:
            raise ValueError("delimiter must be a single character")


@dataclass(frozen=True)
class EmpiricalDiagnostics:
    """Cross-mean regression slopes and the two diagnostic ACFs.

    ``acf_xbar`` is the ACF of the cross-sectional mean.  ``acf_ubar``
    summarizes the residual serial correlation as the average of the
    per-section residual ACFs: the residuals' own cross-sectional mean is
    identically zero by construction (the slopes average to exactly 1), so
    it carries no autocorrelation information.  All-NaN when every
    residual section is constant.
    """

    acf_xbar: np.ndarray
    acf_ubar: np.ndarray
    delta_hat: np.ndarray


def read_panel(file: Union[PanelFile, str, Path], **kwargs) -> Panel:
    """Parse a delimited panel file into a sections-as-rows Panel.

    Accepts a :class:`PanelFile` or a bare path plus the same keywords.
    Raises :class:`PanelFormatError` naming the offending row/column on
    ragged or non-numeric input.
    """
    if not isinstance(file, PanelFile):
        file = PanelFile(path=file, **kwargs)
    elif kwargs:
        raise TypeError("pass either a PanelFile or a path with keywords")
    path = Path(file.path)
    if not path.exists():
        raise PanelFormatError(f"no such file: {path}")
    with open(path, newline="") as handle:
        reader = csv.reader(handle, delimiter=file.delimiter)
        rows = [row for row in reader if row]
    labels = None
    if file.header:
        if not rows:
            raise PanelFormatError(f"{path}: empty file")
        labels = [cell.strip() for cell in rows[0]]
        rows = rows[1:]
    if not rows:
        raise PanelFormatError(f"{path}: no data rows")
    width = len(rows[0])
    values: List[List[float]] = []
    offset = 2 if file.header else 1
    for r, row in enumerate(rows):
        if len(row) != width:
            raise PanelFormatError(
                f"{path}: row {r + offset} has {len(row)} cells, expected {width}"
            )
        parsed = []
        for c, cell in enumerate(row):
            try:
                parsed.append(float(cell))
            except ValueError:
                raise PanelFormatError(
                    f"{path}: cell {cell.strip()!r} at row {r + offset}, "
                    f"column {c + 1} is not numeric"
                ) from None
        values.append(parsed)
    data = np.asarray(values, dtype=float)
    section_labels = time_labels = None
    if file.orientation == SECTIONS_AS_COLUMNS:
        data = data.T
        section_labels = labels
    else:
        time_labels = labels
    if data.shape[0] < 2 or data.shape[1] < 2:
        raise PanelFormatError(
            f"{path}: need at least 2 sections and 2 times, got {data.shape}"
        )
    if not np.all(np.isfinite(data)):
        bad = np.argwhere(~np.isfinite(data))[0]
        raise PanelFormatError(
            f"{path}: non-finite value at section {bad[0] + 1}, time {bad[1] + 1}"
        )
    return Panel(data, section_labels=section_labels, time_labels=time_labels)


def write_panel(
    panel: Panel,
    path: Union[str, Path],
    orientation: str = SECTIONS_AS_ROWS,
    delimiter: str = ",",
) -> None:
    """Write a panel with 17 significant digits (lossless for float64)."""
    data = panel.data if orientation == SECTIONS_AS_ROWS else panel.data.T
    with open(path, "w", newline="") as handle:
        for row in data:
            handle.write(delimiter.join(f"{v:.17g}" for v in row))
            handle.write("\n")


def standardize(panel: Panel) -> Panel:
    """Center and scale each section to mean 0, sample SD 1 (divisor T-1)."""
    data = panel.data
    means = data.mean(axis=1, keepdims=True)
    sds = data.std(axis=1, ddof=1, keepdims=True)
    flat = np.flatnonzero(sds.ravel() == 0.0)
    if flat.size:
        raise DegenerateDataError(
            f"section {flat[0] + 1} is constant; cannot standardize"
        )
    return Panel(
        (data - means) / sds,
        section_labels=panel.section_labels,
        time_labels=panel.time_labels,
    )


def defactor(panel: Panel, max_lag: Optional[int] = None) -> tuple:
    """Remove each section's projection on the cross-sectional mean.

    Fits ``x_it = delta_i * xbar_t`` by least squares without intercept
    and returns the residual panel together with diagnostics: the slopes
    and the ACFs of the cross-sectional means of the data and of the
    residuals.
    """
    data = panel.data
    xbar = data.mean(axis=0)
    denom = float(xbar @ xbar)
    if denom == 0.0:
        raise DegenerateDataError("cross-sectional mean is identically zero")
    delta = data @ xbar / denom
    residuals = data - np.outer(delta, xbar)
    if max_lag is None:
        max_lag = min(20, panel.n_times - 2)
    per_section = [
        acf(row, max_lag)
        for row in residuals
        if np.ptp(row) > 0.0
    ]
    if per_section:
        acf_ubar = np.mean(per_section, axis=0)
    else:
        acf_ubar = np.full(max_lag + 1, np.nan)
    diagnostics = EmpiricalDiagnostics(
        acf_xbar=acf(xbar, max_lag),
        acf_ubar=acf_ubar,
        delta_hat=delta,
    )
    residual_panel = Panel(
        residuals,
        section_labels=panel.section_labels,
        time_labels=panel.time_labels,
    )
    return residual_panel, diagnostics
