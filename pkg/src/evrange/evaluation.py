"""Join estimates against ground truth and summarize the error.

The join key is window_start_us. The headline fraction counts windows whose
valid estimate lands within the threshold, over all in-view truth windows,
so invalid and missing windows score against the pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ranging import RangeEstimate
from .synthgen import GroundTruth

REPORT_CSV_HEADER = "window_start_us,in_view,true_distance_m,est_distance_m,abs_error_m,valid,reason"


@dataclass(frozen=True)
class WindowRow:
    """One joined row; missing sides leave NaN/None placeholders."""

    window_start_us: int
    in_view: bool | None
    true_distance_m: float
    est_distance_m: float
    abs_error_m: float
    valid: bool
    reason: str


@dataclass(frozen=True)
class ErrorReport:
    threshold_m: float
    n_truth: int
    n_estimates: int
    n_matched: int
    n_in_view: int
    n_valid_in_view: int
    n_within: int
    fraction_within: float
    mean_abs_error_m: float
    median_abs_error_m: float
    max_abs_error_m: float
    invalid_reasons: dict[str, int] = field(default_factory=dict)
    rows: tuple[WindowRow, ...] = ()

    def summary_lines(self) -> list[str]:
        lines = [
            f"windows: truth {self.n_truth}, estimates {self.n_estimates}, matched {self.n_matched}",
            f"in view: {self.n_in_view}, valid in view: {self.n_valid_in_view}",
            f"within {self.threshold_m:g} m: {self.n_within}/{self.n_in_view}"
            f" ({100.0 * self.fraction_within:.1f}%)",
        ]
        if self.n_valid_in_view:
            lines.append(
                f"abs error over valid in-view windows: mean {self.mean_abs_error_m:.3f} m,"
                f" median {self.median_abs_error_m:.3f} m, max {self.max_abs_error_m:.3f} m"
            )
        if self.invalid_reasons:
            parts = ", ".join(f"{k} {v}" for k, v in sorted(self.invalid_reasons.items()))
            lines.append(f"failures: {parts}")
        return lines


def evaluate(
    estimates: list[RangeEstimate],
    truth: GroundTruth,
    threshold_m: float = 0.5,
) -> ErrorReport:
    est_by_window = {e.window_start_us: e for e in estimates}
    truth_windows = [int(w) for w in truth.window_start_us]
    truth_by_window = {
        w: (float(truth.true_distance_m[i]), bool(truth.in_view[i]))
        for i, w in enumerate(truth_windows)
    }

    rows: list[WindowRow] = []
    errors_valid_in_view: list[float] = []
    invalid_reasons: dict[str, int] = {}
    n_matched = n_in_view = n_valid_in_view = n_within = 0

    for w in sorted(set(truth_windows) | set(est_by_window)):
        est = est_by_window.get(w)
        tru = truth_by_window.get(w)
        if tru is None:
            rows.append(
                WindowRow(w, None, math.nan, est.distance_m, math.nan, est.valid, "missing-truth")
            )
            continue
        true_d, in_view = tru
        if in_view:
            n_in_view += 1
        if est is None:
            rows.append(WindowRow(w, in_view, true_d, math.nan, math.nan, False, "missing-estimate"))
            if in_view:
                invalid_reasons["missing-estimate"] = invalid_reasons.get("missing-estimate", 0) + 1
            continue
        n_matched += 1
        err = abs(est.distance_m - true_d) if est.valid else math.nan
        rows.append(
            WindowRow(w, in_view, true_d, est.distance_m, err, est.valid, est.reason)
        )
        if in_view:
            if est.valid:
                n_valid_in_view += 1
                errors_valid_in_view.append(err)
                if err <= threshold_m:
                    n_within += 1
            else:
                invalid_reasons[est.reason] = invalid_reasons.get(est.reason, 0) + 1

    errs = np.array(errors_valid_in_view)
    return ErrorReport(
        threshold_m=threshold_m,
        n_truth=len(truth_windows),
        n_estimates=len(estimates),
        n_matched=n_matched,
        n_in_view=n_in_view,
        n_valid_in_view=n_valid_in_view,
        n_within=n_within,
        fraction_within=(n_within / n_in_view) if n_in_view else 0.0,
        mean_abs_error_m=float(errs.mean()) if errs.size else math.nan,
        median_abs_error_m=float(np.median(errs)) if errs.size else math.nan,
        max_abs_error_m=float(errs.max()) if errs.size else math.nan,
        invalid_reasons=invalid_reasons,
        rows=tuple(rows),
    )


def write_report_csv(report: ErrorReport, path) -> None:
    def fmt(v: float) -> str:
        return "" if isinstance(v, float) and math.isnan(v) else f"{v:.4f}"

    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write(REPORT_CSV_HEADER + "\n")
        for r in report.rows:
            in_view = "" if r.in_view is None else str(int(r.in_view))
            f.write(
                f"{r.window_start_us},{in_view},{fmt(r.true_distance_m)},"
                f"{fmt(r.est_distance_m)},{fmt(r.abs_error_m)},{int(r.valid)},{r.reason}\n"
            )
