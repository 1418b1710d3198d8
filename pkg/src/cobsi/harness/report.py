"""Per-shot PSNR/SSIM tables with per-method averages."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping

import numpy as np

from ..errors import DimensionError
from ..metrics import METRIC_CONVENTION, shot_scores
from ..survey import SamplingMask, SeismicCube

HEADER = ("experiment", "shot_index", "method", "psnr_db", "ssim")


@dataclass(frozen=True)
class ReportRow:
    experiment: str
    shot_index: int
    method: str
    psnr_db: float
    ssim: float


@dataclass
class ReconReport:
    rows: List[ReportRow] = field(default_factory=list)

    def sorted_rows(self) -> List[ReportRow]:
        return sorted(self.rows, key=lambda r: (r.shot_index, r.method))

    def averages(self) -> Dict[str, tuple]:
        """``method -> (mean PSNR, mean SSIM)`` over that method's rows."""
        out = {}
        for method in sorted({r.method for r in self.rows}):
            rows = [r for r in self.rows if r.method == method]
            out[method] = (
                float(np.mean([r.psnr_db for r in rows])),
                float(np.mean([r.ssim for r in rows])),
            )
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# {METRIC_CONVENTION}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(HEADER)
        experiment = self.rows[0].experiment if self.rows else ""
        for r in self.sorted_rows():
            w.writerow([r.experiment, r.shot_index, r.method, _fmt(r.psnr_db), _fmt(r.ssim)])
        for method, (p, s) in self.averages().items():
            w.writerow([experiment, "average", method, _fmt(p), _fmt(s)])
        return buf.getvalue()


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


def evaluate(
    truth: SeismicCube,
    estimates: Mapping[str, SeismicCube],
    mask: SamplingMask,
    experiment: str = "experiment",
) -> ReconReport:
    """Score every missing shot of every method-labelled estimate against ``truth``."""
    if truth.k != mask.total_shots:
        raise DimensionError("truth cube does not match the mask")
    report = ReconReport()
    for method, est in estimates.items():
        if est.shape != truth.shape:
            raise DimensionError(f"{method} cube has shape {est.shape}, truth is {truth.shape}")
        for j in mask.missing:
            p, s = shot_scores(truth.shot(j), est.shot(j))
            report.rows.append(ReportRow(experiment, j, method, p, s))
    return report


def parse_report(text: str):
    """Read a report CSV back into ``(rows, averages)``."""
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    reader = csv.DictReader(lines)
    rows, averages = [], {}
    for rec in reader:
        p, s = float(rec["psnr_db"]), float(rec["ssim"])
        if rec["shot_index"] == "average":
            averages[rec["method"]] = (p, s)
        else:
            rows.append(ReportRow(rec["experiment"], int(rec["shot_index"]), rec["method"], p, s))
    return rows, averages
