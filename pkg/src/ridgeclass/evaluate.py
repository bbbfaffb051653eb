"""Experiment harness: split, train, classify, and tabulate accuracies.

Runs one experiment configuration over a manifest (2/3 learning, 1/3
testing, stratified by gender and finger) and aggregates per-finger and
per-gender classification rates into a report whose text rendering has
one row per finger with Male/Female columns, per-gender averages, and the
sample-weighted overall rate.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .classifier import KnnConfig, knn_classify
from .errors import InsufficientDataError
from .features import (
    FeatureDatabase,
    FeatureMode,
    FusedFeature,
    build_database,
    extract_features,
)
from .image_io import (
    CropRegion,
    Gender,
    GrayImage,
    SampleMeta,
    crop,
    load_image,
    load_manifest,
    split_dataset,
)

THREADS_ENV_VAR = "RIDGECLASS_THREADS"
ABSENT_CELL = "—"  # em dash shown for cells with no test samples
FINGERS = range(1, 11)


@dataclass
class ExperimentConfig:
    feature_mode: FeatureMode = FeatureMode.FUSED
    k_level: int = 6
    knn: KnnConfig = field(default_factory=KnnConfig)
    split_seed: int = 0
    wavelet: str = "haar"
    boundary: str = "symmetric"
    crop_region: Optional[CropRegion] = None
    normalize: Optional[str] = None  # None or "zscore"
    per_finger_db: bool = False

    def __post_init__(self):
        if self.normalize not in (None, "zscore"):
            raise ValueError(f"normalize must be None or 'zscore', got {self.normalize!r}")

    def tag(self) -> str:
        """Short token for file names, e.g. ``fused_L6_k1_seed42``."""
        parts = [self.feature_mode.value, f"L{self.k_level}",
                 f"k{self.knn.k_neighbors}", f"seed{self.split_seed}"]
        if self.wavelet != "haar":
            parts.append(self.wavelet)
        if self.normalize:
            parts.append(self.normalize)
        if self.per_finger_db:
            parts.append("perfinger")
        return "_".join(parts)

    def describe(self) -> str:
        return (
            f"mode={self.feature_mode.value} level={self.k_level} "
            f"k={self.knn.k_neighbors} seed={self.split_seed} "
            f"wavelet={self.wavelet} boundary={self.boundary} "
            f"normalize={self.normalize or 'none'} "
            f"per_finger_db={str(self.per_finger_db).lower()}"
        )


@dataclass
class SampleOutcome:
    meta: SampleMeta
    predicted: Gender

    @property
    def correct(self) -> bool:
        return self.predicted == self.meta.gender


@dataclass
class FingerCell:
    male_n: int = 0
    male_correct: int = 0
    female_n: int = 0
    female_correct: int = 0

    @property
    def male_acc(self) -> Optional[float]:
        return 100.0 * self.male_correct / self.male_n if self.male_n else None

    @property
    def female_acc(self) -> Optional[float]:
        return 100.0 * self.female_correct / self.female_n if self.female_n else None


@dataclass
class ClassificationReport:
    per_finger: dict[int, FingerCell]
    male_avg: Optional[float]
    female_avg: Optional[float]
    overall: float
    total_tested: int
    total_correct: int
    config: ExperimentConfig


def resolve_workers(value: Optional[str] = None) -> int:
    """Worker count from RIDGECLASS_THREADS; 0 or unset means auto."""
    if value is None:
        value = os.environ.get(THREADS_ENV_VAR, "0")
    try:
        n = int(value)
    except ValueError:
        raise ValueError(f"{THREADS_ENV_VAR} must be an integer, got {value!r}") from None
    if n < 0:
        raise ValueError(f"{THREADS_ENV_VAR} must be >= 0, got {n}")
    return n if n > 0 else (os.cpu_count() or 1)


def _load_sample(meta: SampleMeta, region: Optional[CropRegion]) -> tuple[GrayImage, SampleMeta]:
    image = load_image(meta.image_path)
    if region is not None:
        image = crop(image, region)
    return image, meta


def _zscore_stats(db: FeatureDatabase) -> tuple[np.ndarray, np.ndarray]:
    matrix = np.stack([e.feature.values for e in db.entries])
    mean = matrix.mean(axis=0)
    std = matrix.std(axis=0)
    std[std == 0.0] = 1.0
    return mean, std


def _zscore_database(db: FeatureDatabase, mean: np.ndarray, std: np.ndarray) -> FeatureDatabase:
    entries = [
        replace(e, feature=FusedFeature((e.feature.values - mean) / std, e.feature.layout))
        for e in db.entries
    ]
    return FeatureDatabase(entries=entries, config=db.config)


def run_outcomes(
    manifest, cfg: ExperimentConfig, workers: Optional[int] = None
) -> list[SampleOutcome]:
    """Split the manifest, build the learning database, classify every test
    sample, and return the raw per-sample outcomes (test-set order)."""
    if workers is None:
        workers = resolve_workers()
    samples = load_manifest(manifest)
    split = split_dataset(samples, cfg.split_seed)
    for gender in Gender:
        if not any(s.gender is gender for s in split.testing):
            raise InsufficientDataError(
                f"gender {gender.value} has zero test samples; "
                f"per-gender rates would be undefined"
            )

    learning = [_load_sample(m, cfg.crop_region) for m in split.learning]
    testing = [_load_sample(m, cfg.crop_region) for m in split.testing]

    db = build_database(
        learning,
        k=cfg.k_level,
        wavelet=cfg.wavelet,
        boundary=cfg.boundary,
        mode=cfg.feature_mode,
        workers=workers,
    )
    mean = std = None
    if cfg.normalize == "zscore":
        mean, std = _zscore_stats(db)
        db = _zscore_database(db, mean, std)

    if cfg.per_finger_db:
        by_finger = {
            f: FeatureDatabase(
                entries=[e for e in db.entries if e.finger_no == f], config=db.config
            )
            for f in FINGERS
        }
        for _, meta in testing:
            if not by_finger[meta.finger_no].entries:
                raise InsufficientDataError(
                    f"finger {meta.finger_no} has test samples but no learning "
                    f"samples for a per-finger database"
                )

    def classify_one(sample: tuple[GrayImage, SampleMeta]) -> SampleOutcome:
        image, meta = sample
        feature = extract_features(
            image, cfg.k_level, cfg.wavelet, cfg.boundary, cfg.feature_mode
        )
        if mean is not None:
            feature = FusedFeature((feature.values - mean) / std, feature.layout)
        target_db = by_finger[meta.finger_no] if cfg.per_finger_db else db
        result = knn_classify(feature, target_db, cfg.knn)
        return SampleOutcome(meta=meta, predicted=result.label)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(classify_one, testing))
    return [classify_one(s) for s in testing]


def aggregate_outcomes(
    outcomes: list[SampleOutcome], cfg: ExperimentConfig
) -> ClassificationReport:
    """Bucket raw outcomes by (finger, gender) and compute all rates."""
    cells = {f: FingerCell() for f in FINGERS}
    for outcome in outcomes:
        cell = cells[outcome.meta.finger_no]
        if outcome.meta.gender is Gender.MALE:
            cell.male_n += 1
            cell.male_correct += outcome.correct
        else:
            cell.female_n += 1
            cell.female_correct += outcome.correct
    male_accs = [c.male_acc for c in cells.values() if c.male_n]
    female_accs = [c.female_acc for c in cells.values() if c.female_n]
    total = len(outcomes)
    correct = sum(o.correct for o in outcomes)
    return ClassificationReport(
        per_finger=cells,
        male_avg=sum(male_accs) / len(male_accs) if male_accs else None,
        female_avg=sum(female_accs) / len(female_accs) if female_accs else None,
        overall=100.0 * correct / total if total else 0.0,
        total_tested=total,
        total_correct=correct,
        config=cfg,
    )


def run_experiment(
    manifest, cfg: ExperimentConfig, workers: Optional[int] = None
) -> ClassificationReport:
    """Full evaluation of one configuration; deterministic per (manifest, cfg)."""
    return aggregate_outcomes(run_outcomes(manifest, cfg, workers), cfg)


# --- report rendering -------------------------------------------------------


class ReportFormat:
    TEXT = "text"
    CSV = "csv"
    JSON = "json"
    ALL = (TEXT, CSV, JSON)


def _fmt2(value: Optional[float]) -> str:
    return ABSENT_CELL if value is None else f"{value:.2f}"


def _round2(value: Optional[float]) -> Optional[float]:
    return None if value is None else round(value, 2)


def _render_text(report: ClassificationReport) -> str:
    lines = [
        "gender classification report",
        report.config.describe(),
        "",
        "finger |   male | female",
        "-------+--------+-------",
    ]
    for f in FINGERS:
        cell = report.per_finger[f]
        lines.append(f"{f:>6} | {_fmt2(cell.male_acc):>6} | {_fmt2(cell.female_acc):>6}")
    lines.append("-------+--------+-------")
    lines.append(f"{'avg':>6} | {_fmt2(report.male_avg):>6} | {_fmt2(report.female_avg):>6}")
    lines.append("")
    lines.append(
        f"overall: {report.overall:.2f} "
        f"({report.total_correct}/{report.total_tested} correct)"
    )
    return "\n".join(lines) + "\n"


def _csv_cell(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.2f}"


def _render_csv(report: ClassificationReport) -> str:
    buf = io.StringIO()
    buf.write(f"# {report.config.describe()}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["finger", "male_acc", "female_acc", "male_n", "female_n"])
    for f in FINGERS:
        cell = report.per_finger[f]
        writer.writerow(
            [f, _csv_cell(cell.male_acc), _csv_cell(cell.female_acc),
             cell.male_n, cell.female_n]
        )
    writer.writerow(["average", _csv_cell(report.male_avg), _csv_cell(report.female_avg), "", ""])
    writer.writerow(["overall", _csv_cell(report.overall), "", "", ""])
    writer.writerow(["total_tested", report.total_tested, "", "", ""])
    writer.writerow(["total_correct", report.total_correct, "", "", ""])
    return buf.getvalue()


def _render_json(report: ClassificationReport) -> str:
    cfg = report.config
    payload = {
        "config": {
            "mode": cfg.feature_mode.value,
            "level": cfg.k_level,
            "k": cfg.knn.k_neighbors,
            "seed": cfg.split_seed,
            "wavelet": cfg.wavelet,
            "boundary": cfg.boundary,
            "normalize": cfg.normalize,
            "per_finger_db": cfg.per_finger_db,
        },
        "per_finger": {
            str(f): {
                "male_acc": _round2(cell.male_acc),
                "female_acc": _round2(cell.female_acc),
                "male_n": cell.male_n,
                "female_n": cell.female_n,
            }
            for f, cell in ((f, report.per_finger[f]) for f in FINGERS)
        },
        "male_avg": _round2(report.male_avg),
        "female_avg": _round2(report.female_avg),
        "overall": _round2(report.overall),
        "total_tested": report.total_tested,
        "total_correct": report.total_correct,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def render_report(report: ClassificationReport, fmt: str = ReportFormat.TEXT) -> str:
    """Render a report as text (paper-style table), CSV, or JSON.

    All formats carry the same values; percentages are shown at two
    decimals (round-half-even) and cells with no test samples render as
    an absent marker, never as 0.
    """
    if fmt == ReportFormat.TEXT:
        return _render_text(report)
    if fmt == ReportFormat.CSV:
        return _render_csv(report)
    if fmt == ReportFormat.JSON:
        return _render_json(report)
    raise ValueError(f"unknown report format {fmt!r} (expected one of {ReportFormat.ALL})")
