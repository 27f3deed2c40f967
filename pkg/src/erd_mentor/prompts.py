"""Prompt construction and response parsing for the three pipeline stages.

Stage 1 (matching) asks the model to pick the requirement items relevant to
a pruned view; stage 2 (feedback) asks for prose feedback grounded in those
items; stage 3 (faq) asks for follow-up question/answer pairs about the
feedback. The prompt bodies come from template files shipped with the
package (``templates/*.tmpl``) with ``$submitted-erd``,
``$problem-statements``, ``$relevant-statements`` and ``$feedback``
substituted; building a prompt twice from equal inputs yields equal bytes.

Response parsing is deliberately tolerant: chat models wrap JSON in code
fences and prose at will, so we strip fences and scan for the first JSON
value before checking its shape.
"""

from __future__ import annotations

import hashlib
import json
import logging
import re
import string
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .model import to_json
from .prune import PrunedView
from .requirements import RequirementItem, RequirementSet

log = logging.getLogger(__name__)

PROMPT_KINDS = ("matching", "feedback", "faq")


class UnparseableResponse(Exception):
    """The model's reply contains no JSON value at all."""


class ShapeMismatch(Exception):
    """The model's reply is JSON but not in the requested shape."""


class _PromptTemplate(string.Template):
    # template variables use hyphens ($submitted-erd), which the stock
    # Template identifier pattern would cut short
    idpattern = r"[a-z][a-z0-9-]*"


@lru_cache(maxsize=None)
def _load_template(kind: str) -> _PromptTemplate:
    text = (resources.files("erd_mentor") / "templates" / f"{kind}.json.tmpl").read_text("utf-8")
    return _PromptTemplate(text)


@dataclass(frozen=True)
class PromptText:
    body: str
    kind: str
    input_digest: str

    def __post_init__(self):
        if self.kind not in PROMPT_KINDS:
            raise ValueError(f"unknown prompt kind {self.kind!r}")
        if not self.body:
            raise ValueError("prompt body must be non-empty")


def _make_prompt(kind: str, substitutions: dict[str, str]) -> PromptText:
    body = _load_template(kind).substitute(substitutions)
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    return PromptText(body=body, kind=kind, input_digest=digest)


@dataclass(frozen=True)
class RelevantItem:
    """One requirement item the model judged relevant to the view.

    ``matched_id`` ties it back to the source requirement when the
    description matches one (exactly, or after whitespace normalization);
    None means the model returned text we do not recognize.
    """

    description: str
    rubrics: tuple[str, ...] = ()
    questions: tuple[str, ...] = ()
    matched_id: str | None = None


@dataclass(frozen=True)
class RelevantStatements:
    items: tuple[RelevantItem, ...]


@dataclass(frozen=True)
class FeedbackText:
    text: str

    def __post_init__(self):
        if not self.text:
            raise ValueError("feedback text must be non-empty")


@dataclass(frozen=True)
class FaqEntry:
    question: str
    answer: str

    def __post_init__(self):
        if not self.question or not self.answer:
            raise ValueError("FAQ entries need both a question and an answer")


@dataclass(frozen=True)
class FaqList:
    entries: tuple[FaqEntry, ...]
    dropped: int = 0


def _statement_obj(description: str, rubrics, questions) -> dict:
    return {
        "description": description,
        "rubrics": list(rubrics),
        "questions": list(questions),
    }


def _requirements_json(reqs: RequirementSet) -> str:
    return json.dumps(
        [_statement_obj(i.description, i.rubrics, i.questions) for i in reqs.items],
        indent=2,
    )


def _relevant_json(relevant: RelevantStatements) -> str:
    return json.dumps(
        [_statement_obj(i.description, i.rubrics, i.questions) for i in relevant.items],
        indent=2,
    )


def build_matching_prompt(reqs: RequirementSet, view: PrunedView) -> PromptText:
    """Stage-1 prompt: full requirement set plus the pruned diagram."""
    return _make_prompt("matching", {
        "submitted-erd": to_json(view.schema),
        "problem-statements": _requirements_json(reqs),
    })


def build_feedback_prompt(relevant: RelevantStatements, view: PrunedView) -> PromptText:
    """Stage-2 prompt: the matched statements and the pruned diagram."""
    return _make_prompt("feedback", {
        "relevant-statements": _relevant_json(relevant),
        "submitted-erd": to_json(view.schema),
    })


def build_faq_prompt(feedback: FeedbackText, relevant: RelevantStatements,
                     view: PrunedView) -> PromptText:
    """Stage-3 prompt: previous feedback, matched statements, diagram."""
    return _make_prompt("faq", {
        "feedback": json.dumps(feedback.text),
        "relevant-statements": _relevant_json(relevant),
        "submitted-erd": to_json(view.schema),
    })


# ---------------------------------------------------------------------------
# tolerant response parsing
# ---------------------------------------------------------------------------

_FENCE_RE = re.compile(r"```[a-zA-Z0-9_-]*\n(.*?)```", re.DOTALL)


def _extract_json(text: str):
    """First JSON value found in the reply, fences included, or raise."""
    candidates = [m.group(1) for m in _FENCE_RE.finditer(text)]
    candidates.append(text)
    decoder = json.JSONDecoder()
    for candidate in candidates:
        for i, ch in enumerate(candidate):
            if ch not in "{[":
                continue
            try:
                value, _ = decoder.raw_decode(candidate[i:])
            except json.JSONDecodeError:
                continue
            return value
    raise UnparseableResponse("no JSON value found in the response")


def _normalize(text: str) -> str:
    return " ".join(text.split())


def _coerce_strings(value, where: str) -> tuple[str, ...]:
    if value is None:
        return ()
    if isinstance(value, str):
        return (value,)
    if isinstance(value, list) and all(isinstance(v, str) for v in value):
        return tuple(value)
    raise ShapeMismatch(f"{where} must be a string or list of strings")


def parse_matching_response(text: str, reqs: RequirementSet) -> RelevantStatements:
    """Parse the stage-1 reply and tie items back to requirement ids."""
    value = _extract_json(text)
    if isinstance(value, dict):
        for key in ("relevant-statements", "output"):
            if key in value:
                value = value[key]
                break
        else:
            if "description" in value:
                value = [value]
    if not isinstance(value, list):
        raise ShapeMismatch("expected a list of relevant statements")

    by_description = {_normalize(item.description): item for item in reqs.items}
    items: list[RelevantItem] = []
    for i, raw in enumerate(value):
        if not isinstance(raw, dict) or not isinstance(raw.get("description"), str):
            raise ShapeMismatch(f"relevant statement {i} lacks a description")
        description = raw["description"]
        source: RequirementItem | None = by_description.get(_normalize(description))
        if source is None:
            log.warning("matching response item %d does not match any requirement: %.80r",
                        i, description)
        items.append(RelevantItem(
            description=description,
            rubrics=_coerce_strings(raw.get("rubrics"), f"statement {i} rubrics"),
            questions=_coerce_strings(raw.get("questions"), f"statement {i} questions"),
            matched_id=source.id if source is not None else None,
        ))
    return RelevantStatements(items=tuple(items))


def parse_feedback_response(text: str) -> FeedbackText:
    """Parse the stage-2 reply into its feedback paragraph."""
    value = _extract_json(text)
    if isinstance(value, dict) and isinstance(value.get("output"), dict):
        value = value["output"]
    if isinstance(value, dict):
        value = value.get("feedback")
    if not isinstance(value, str) or not value.strip():
        raise ShapeMismatch("expected a non-empty 'feedback' string")
    return FeedbackText(text=value)


def parse_faq_response(text: str) -> FaqList:
    """Parse the stage-3 reply; entries missing a question or answer are
    dropped and counted rather than failing the whole list."""
    value = _extract_json(text)
    if isinstance(value, dict):
        value = value.get("output", value.get("faq"))
    if not isinstance(value, list):
        raise ShapeMismatch("expected a list of question/answer entries")
    entries: list[FaqEntry] = []
    dropped = 0
    for raw in value:
        question = raw.get("question") if isinstance(raw, dict) else None
        answer = raw.get("answer") if isinstance(raw, dict) else None
        if (isinstance(question, str) and question.strip()
                and isinstance(answer, str) and answer.strip()):
            entries.append(FaqEntry(question=question, answer=answer))
        else:
            dropped += 1
    if dropped:
        log.info("dropped %d incomplete FAQ entries", dropped)
    return FaqList(entries=tuple(entries), dropped=dropped)
