"""Confusion-count metrics, aggregation, and error overlays.

The headline score is the binary F1 of the change class,
2*TP / (2*TP + FP + FN), computed from counts accumulated over the
whole split (micro accumulation). The two-class mean F1 is also
implemented, but only to demonstrate how class imbalance inflates it;
reports carry it under a non-comparable label.
"""

import dataclasses
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, InvalidMaskError, ShapeError


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def __post_init__(self):
        for name in ("tp", "fp", "fn", "tn"):
            if getattr(self, name) < 0:
                raise InvalidArgumentError(f"{name} must be non-negative")

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            self.tp + other.tp, self.fp + other.fp,
            self.fn + other.fn, self.tn + other.tn,
        )

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def swapped(self) -> "ConfusionCounts":
        """Counts with the class labels exchanged (change <-> unchanged)."""
        return ConfusionCounts(tp=self.tn, fp=self.fn, fn=self.fp, tn=self.tp)


def _check_binary(name: str, mask: np.ndarray) -> np.ndarray:
    arr = np.asarray(mask)
    values = np.unique(arr)
    if not np.isin(values, (0, 1)).all():
        raise InvalidMaskError(f"{name} contains values outside {{0, 1}}: {values[:8]}")
    return arr


def accumulate(counts: ConfusionCounts, pred, gt) -> ConfusionCounts:
    """Add one prediction/ground-truth pair's pixels to the counts."""
    pred = _check_binary("pred", pred)
    gt = _check_binary("gt", gt)
    if pred.shape != gt.shape:
        raise ShapeError(f"pred {pred.shape} vs gt {gt.shape}")
    pred_b = pred.astype(bool)
    gt_b = gt.astype(bool)
    return counts + ConfusionCounts(
        tp=int(np.count_nonzero(pred_b & gt_b)),
        fp=int(np.count_nonzero(pred_b & ~gt_b)),
        fn=int(np.count_nonzero(~pred_b & gt_b)),
        tn=int(np.count_nonzero(~pred_b & ~gt_b)),
    )


def binary_f1(counts: ConfusionCounts) -> float:
    """Change-class F1; 1.0 when there is nothing to detect and nothing
    was predicted (the all-background patch should not score zero)."""
    denom = 2 * counts.tp + counts.fp + counts.fn
    if denom == 0:
        return 1.0
    return 2 * counts.tp / denom


def precision(counts: ConfusionCounts) -> float:
    if counts.tp + counts.fp == 0:
        return 1.0 if counts.fn == 0 else 0.0
    return counts.tp / (counts.tp + counts.fp)


def recall(counts: ConfusionCounts) -> float:
    if counts.tp + counts.fn == 0:
        return 1.0 if counts.fp == 0 else 0.0
    return counts.tp / (counts.tp + counts.fn)


def mean_f1_two_class(counts: ConfusionCounts) -> float:
    """Mean of change-class and unchanged-class F1.

    Inflated under class imbalance; never comparable with binary_f1
    numbers. Kept only so the inflation can be measured and reported.
    """
    return (binary_f1(counts) + binary_f1(counts.swapped())) / 2.0


@dataclass
class MetricsReport:
    precision: float
    recall: float
    f1: float
    mf1: float
    counts: ConfusionCounts
    zero_denominator_flag: bool = False
    # mf1 is computed with the two-class mean formula and is not
    # comparable with binary F1 numbers from other reports
    mf1_comparable: bool = False
    per_seed: list | None = None
    mean: float | None = None
    std: float | None = None
    single_report_flag: bool = False

    @classmethod
    def from_counts(cls, counts: ConfusionCounts) -> "MetricsReport":
        zero_denom = (2 * counts.tp + counts.fp + counts.fn) == 0
        return cls(
            precision=precision(counts),
            recall=recall(counts),
            f1=binary_f1(counts),
            mf1=mean_f1_two_class(counts),
            counts=counts,
            zero_denominator_flag=zero_denom,
        )

    def to_dict(self) -> dict:
        out = {
            "tp": self.counts.tp,
            "fp": self.counts.fp,
            "fn": self.counts.fn,
            "tn": self.counts.tn,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "mf1": self.mf1,
            "zero_denominator_flag": self.zero_denominator_flag,
            "mf1_comparable": self.mf1_comparable,
        }
        if self.per_seed is not None:
            out["per_seed"] = self.per_seed
            out["mean"] = self.mean
            out["std"] = self.std
            out["single_report_flag"] = self.single_report_flag
        return out

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict(), indent=2, sort_keys=True)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text

    @classmethod
    def from_dict(cls, data: dict) -> "MetricsReport":
        counts = ConfusionCounts(
            tp=data["tp"], fp=data["fp"], fn=data["fn"], tn=data["tn"]
        )
        return cls(
            precision=data["precision"],
            recall=data["recall"],
            f1=data["f1"],
            mf1=data["mf1"],
            counts=counts,
            zero_denominator_flag=data.get("zero_denominator_flag", False),
            per_seed=data.get("per_seed"),
            mean=data.get("mean"),
            std=data.get("std"),
            single_report_flag=data.get("single_report_flag", False),
        )


def aggregate(reports: list, weights=None) -> MetricsReport:
    """Unweighted mean and sample std of F1 over seed or dataset reports."""
    if weights is not None:
        raise InvalidArgumentError("weighted aggregation is not supported")
    if not reports:
        raise InvalidArgumentError("aggregate needs at least one report")
    f1s = [r.f1 for r in reports]
    mean = float(np.mean(f1s))
    std = 0.0 if len(f1s) == 1 else float(np.std(f1s, ddof=1))
    total_counts = ConfusionCounts()
    for r in reports:
        total_counts = total_counts + r.counts
    merged = MetricsReport.from_counts(total_counts)
    merged.per_seed = f1s
    merged.mean = mean
    merged.std = std
    merged.single_report_flag = len(f1s) == 1
    return merged


OVERLAY_TP = np.array([255, 255, 255], dtype=np.uint8)
OVERLAY_FP = np.array([255, 0, 0], dtype=np.uint8)
OVERLAY_FN = np.array([0, 0, 255], dtype=np.uint8)


def render_overlay(pair, pred, gt, normalized: bool = False) -> np.ndarray:
    """Error overlay on the post image: TP white, FP red, FN blue,
    TN left as the underlying imagery."""
    pred = _check_binary("pred", pred)
    gt = _check_binary("gt", gt)
    if pred.shape != gt.shape or pred.shape != pair.post.shape[:2]:
        raise ShapeError(
            f"pred {pred.shape}, gt {gt.shape}, image {pair.post.shape[:2]}"
        )
    base = pair.post
    if normalized:
        from .preprocessing import denormalize_image

        base = denormalize_image(base)
    out = (np.clip(base, 0.0, 1.0) * 255).round().astype(np.uint8).copy()
    pred_b = pred.astype(bool)
    gt_b = gt.astype(bool)
    out[pred_b & gt_b] = OVERLAY_TP
    out[pred_b & ~gt_b] = OVERLAY_FP
    out[~pred_b & gt_b] = OVERLAY_FN
    return out


def write_summary_csv(path, rows, dataset_names, include_std=False) -> None:
    """Write a results table: one row per configuration, one column per
    dataset plus the aggregate Avg column (mean of the row's dataset F1s).

    ``rows`` maps a row label to {dataset_name: (f1, std or None)}.
    """
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["config"] + list(dataset_names) + ["Avg"]
        if include_std:
            header += ["Avg_std"]
        writer.writerow(header)
        for label, cells in rows.items():
            row = [label]
            values = []
            for name in dataset_names:
                cell = cells.get(name)
                if cell is None:
                    row.append("FAILED")
                    continue
                f1, std = cell
                values.append(f1)
                if include_std and std is not None:
                    row.append(f"{f1:.4f}±{std:.4f}")
                else:
                    row.append(f"{f1:.4f}")
            if values:
                row.append(f"{float(np.mean(values)):.4f}")
                if include_std:
                    avg_std = 0.0 if len(values) == 1 else float(np.std(values, ddof=1))
                    row.append(f"{avg_std:.4f}")
            else:
                row.append("FAILED")
                if include_std:
                    row.append("")
            writer.writerow(row)
