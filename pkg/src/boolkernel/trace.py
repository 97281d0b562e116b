"""Step records and run traces shared by the online learners."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .bitvec import BitVec, format_rational


@dataclass(frozen=True, slots=True)
class StepRecord:
    """One prediction step: exact score, prediction, outcome."""

    step: int
    x: BitVec
    label: int
    prediction: int
    mistake: bool
    score: Fraction
    stage: str | None = None

    def to_json_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "step": self.step,
            "x": self.x.to_text(),
            "label": self.label,
            "prediction": self.prediction,
            "mistake": self.mistake,
            "score": format_rational(self.score),
        }
        if self.stage is not None:
            d["stage"] = self.stage
        return d


@dataclass
class Trace:
    """Full run history plus the final learner state."""

    records: list[StepRecord] = field(default_factory=list)
    final_state: Any = None

    @property
    def mistakes(self) -> int:
        return sum(1 for r in self.records if r.mistake)

    def to_json_dict(self, **header: Any) -> dict[str, Any]:
        doc = dict(header)
        doc["records"] = [r.to_json_dict() for r in self.records]
        doc["summary"] = {"steps": len(self.records), "mistakes": self.mistakes}
        return doc

    def to_json(self, **header: Any) -> str:
        return json.dumps(self.to_json_dict(**header), sort_keys=True, indent=1)


SUMMARY_COLUMNS = ["step", "prediction", "label", "mistake", "score_num", "score_den"]


def summary_csv(trace: Trace) -> str:
    """Per-step summary rows with the exact score split into num/den."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    for r in trace.records:
        w.writerow(
            [r.step, r.prediction, r.label, int(r.mistake), r.score.numerator, r.score.denominator]
        )
    return buf.getvalue()


def emit_plotdata(trace: Trace) -> str:
    """CSV of cumulative mistakes against step number."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "cumulative_mistakes"])
    total = 0
    for r in trace.records:
        total += 1 if r.mistake else 0
        w.writerow([r.step, total])
    return buf.getvalue()
