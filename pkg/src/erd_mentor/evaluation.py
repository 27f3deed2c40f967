"""Per-category precision/recall/F1 over labeled feedback outcomes.

A positive means the student submission actually contains a mistake in that
category. TP: the feedback caught it. FP: the feedback invented one. TN: the
feedback correctly stayed quiet. FN: the feedback missed it. Reviewers label
each (feedback, category) pair in a CSV; this module aggregates and renders
the per-category report.

Cells whose denominator is zero are undefined and rendered as an em dash,
never coerced to 0: a fake zero would poison comparisons between categories.
"""

from __future__ import annotations

import csv
import enum
import io
import re
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

OUTCOMES = ("TP", "FP", "TN", "FN")

LABEL_CSV_HEADER = ("feedback_id", "category", "outcome", "labeler", "note")


class DomainError(ValueError):
    pass


class DuplicateLabel(ValueError):
    pass


class MultipleLabelers(ValueError):
    pass


class LabelFormatError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UnknownCategory(LabelFormatError):
    pass


class UnknownOutcome(LabelFormatError):
    pass


class MistakeCategory(enum.Enum):
    """The closed set of mistake categories the harness reports on."""

    RELATIONSHIP_PARTICIPANTS = "RelationshipParticipants"
    CARDINALITIES = "Cardinalities"
    ATTRIBUTES = "Attributes"
    ATTRIBUTE_TYPES = "AttributeTypes"
    KEYS = "Keys"
    TERNARY_RELATIONSHIPS = "TernaryRelationships"
    TOTAL_PARTICIPATION = "TotalParticipation"
    RELATIONSHIP_TYPES = "RelationshipTypes"
    SPECIALIZATION_OR_UNION = "SpecializationOrUnion"
    ENTITY_TYPES = "EntityTypes"
    INVALID_RELATIONSHIPS = "InvalidRelationships"

    @property
    def label(self) -> str:
        """Human-readable row label, e.g. 'Specialization or Union'."""
        return _CATEGORY_LABELS[self]


_CATEGORY_LABELS = {
    MistakeCategory.RELATIONSHIP_PARTICIPANTS: "Relationship Participants",
    MistakeCategory.CARDINALITIES: "Cardinalities",
    MistakeCategory.ATTRIBUTES: "Attributes",
    MistakeCategory.ATTRIBUTE_TYPES: "Attribute Types",
    MistakeCategory.KEYS: "Keys",
    MistakeCategory.TERNARY_RELATIONSHIPS: "Ternary Relationships",
    MistakeCategory.TOTAL_PARTICIPATION: "Total Participation",
    MistakeCategory.RELATIONSHIP_TYPES: "Relationship Types",
    MistakeCategory.SPECIALIZATION_OR_UNION: "Specialization or Union",
    MistakeCategory.ENTITY_TYPES: "Entity Types",
    MistakeCategory.INVALID_RELATIONSHIPS: "Invalid Relationships",
}

_CATEGORY_LOOKUP = {
    re.sub(r"[^a-z]", "", key.lower()): category
    for category in MistakeCategory
    for key in (category.value, category.name, category.label)
}


def parse_category(text: str) -> MistakeCategory:
    """Accepts the code, enum name or row label, forgiving case and spacing."""
    category = _CATEGORY_LOOKUP.get(re.sub(r"[^a-z]", "", text.lower()))
    if category is None:
        raise ValueError(f"unknown mistake category {text!r}")
    return category


@dataclass(frozen=True)
class OutcomeLabel:
    feedback_id: str
    category: MistakeCategory
    outcome: str
    labeler: str
    note: str = ""

    def __post_init__(self):
        if self.outcome not in OUTCOMES:
            raise ValueError(f"outcome must be one of {OUTCOMES}, got {self.outcome!r}")


@dataclass(frozen=True)
class CategoryMetrics:
    category: MistakeCategory
    tp: int
    fp: int
    tn: int
    fn: int
    precision: float | None
    recall: float | None
    f1: float | None

    @classmethod
    def from_counts(cls, category: MistakeCategory, tp: int, fp: int, tn: int,
                    fn: int) -> "CategoryMetrics":
        precision = tp / (tp + fp) if tp + fp else None
        recall = tp / (tp + fn) if tp + fn else None
        if precision is None or recall is None or precision + recall == 0:
            score = None
        else:
            score = f1(precision, recall)
        return cls(category=category, tp=tp, fp=fp, tn=tn, fn=fn,
                   precision=precision, recall=recall, f1=score)


def f1(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall."""
    if not 0.0 <= precision <= 1.0 or not 0.0 <= recall <= 1.0:
        raise DomainError("precision and recall must lie in [0, 1]")
    if precision + recall == 0.0:
        raise DomainError("F1 is undefined when precision and recall are both 0")
    return 2.0 * precision * recall / (precision + recall)


def _majority_vote(labels: list[OutcomeLabel]) -> list[OutcomeLabel]:
    grouped: dict[tuple[str, MistakeCategory], list[OutcomeLabel]] = {}
    for label in labels:
        grouped.setdefault((label.feedback_id, label.category), []).append(label)
    voted: list[OutcomeLabel] = []
    for (feedback_id, category), group in grouped.items():
        tally: dict[str, int] = {}
        for label in group:
            tally[label.outcome] = tally.get(label.outcome, 0) + 1
        best = max(tally.values())
        winners = [outcome for outcome, count in tally.items() if count == best]
        if len(winners) == 1:
            voted.append(OutcomeLabel(feedback_id=feedback_id, category=category,
                                      outcome=winners[0], labeler="majority"))
        # ties carry no signal and are dropped
    return voted


def compute_metrics(labels: list[OutcomeLabel], labeler: str | None = None,
                    majority: bool = False) -> list[CategoryMetrics]:
    """Aggregate labels into one row per category, in report row order.

    With several labelers in play, pick one via ``labeler`` or set
    ``majority`` for per-(feedback, category) majority vote; by default the
    input must come from a single labeler.
    """
    seen: set[tuple[str, MistakeCategory, str]] = set()
    for label in labels:
        key = (label.feedback_id, label.category, label.labeler)
        if key in seen:
            raise DuplicateLabel(
                f"labeler {label.labeler!r} labeled ({label.feedback_id!r}, "
                f"{label.category.label}) more than once")
        seen.add(key)

    if labeler is not None:
        selected = [label for label in labels if label.labeler == labeler]
    elif majority:
        selected = _majority_vote(labels)
    else:
        labelers = {label.labeler for label in labels}
        if len(labelers) > 1:
            raise MultipleLabelers(
                f"labels come from {len(labelers)} labelers; choose one or use majority vote")
        selected = labels

    counts = {category: {"TP": 0, "FP": 0, "TN": 0, "FN": 0} for category in MistakeCategory}
    for label in selected:
        counts[label.category][label.outcome] += 1
    return [
        CategoryMetrics.from_counts(category, tp=c["TP"], fp=c["FP"], tn=c["TN"], fn=c["FN"])
        for category, c in counts.items()
    ]


def load_labels(text: str) -> list[OutcomeLabel]:
    """Parse the label CSV (header: feedback_id,category,outcome,labeler,note)."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise LabelFormatError(1, "empty file; expected a header row") from None
    if tuple(h.strip() for h in header) != LABEL_CSV_HEADER:
        raise LabelFormatError(1, f"expected header {','.join(LABEL_CSV_HEADER)}")
    labels: list[OutcomeLabel] = []
    for line_no, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(LABEL_CSV_HEADER):
            raise LabelFormatError(line_no, f"expected {len(LABEL_CSV_HEADER)} fields, got {len(row)}")
        feedback_id, category_text, outcome, labeler, note = (field.strip() for field in row)
        if not feedback_id:
            raise LabelFormatError(line_no, "feedback_id must be non-empty")
        try:
            category = parse_category(category_text)
        except ValueError as exc:
            raise UnknownCategory(line_no, str(exc)) from exc
        if outcome not in OUTCOMES:
            raise UnknownOutcome(line_no, f"unknown outcome {outcome!r}; expected one of "
                                 f"{', '.join(OUTCOMES)}")
        labels.append(OutcomeLabel(feedback_id=feedback_id, category=category,
                                   outcome=outcome, labeler=labeler, note=note))
    return labels


def round_half_up(value: float, places: int = 2) -> float:
    quantum = Decimal(1).scaleb(-places)
    return float(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP))


def _cell(value: float | None) -> str:
    if value is None:
        return "—"
    return f"{round_half_up(value):.2f}"


def render_report(metrics: list[CategoryMetrics]) -> str:
    """Markdown table with Precision, Recall, F1 columns, half-up 2 decimals."""
    lines = [
        "| Category | Precision | Recall | F1 |",
        "| --- | --- | --- | --- |",
    ]
    for row in metrics:
        lines.append(
            f"| {row.category.label} | {_cell(row.precision)} | {_cell(row.recall)} "
            f"| {_cell(row.f1)} |"
        )
    return "\n".join(lines) + "\n"
