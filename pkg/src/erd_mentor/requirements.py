"""Educator-authored requirement corpora.

Each requirement item has three sections: the description students see, the
rubrics that steer the model's judgement, and suggested follow-up questions.
Rubrics and questions stay invisible to students; they travel only inside
prompts.

File format::

    {"title": str, "version": str,
     "items": [{"id": str, "description": str,
                "rubrics": [str], "questions": [str]}]}
"""

from __future__ import annotations

import json
import re
import warnings
from dataclasses import dataclass


class MalformedDocument(Exception):
    """The requirements file is not valid JSON or lacks the expected shape."""


class DuplicateId(Exception):
    """Two requirement items share an id."""


class EmptyDescription(Exception):
    """A requirement item has no student-facing description."""


class RequirementLint(UserWarning):
    """Advisory nudge about requirement granularity; never fatal."""


#: Verbs that usually introduce a relationship when they appear in a
#: requirement description. A description naming three or more distinct ones
#: probably bundles several relationships and should be split. Words that
#: double as common nouns in this domain (record, order, ...) are left out,
#: false alarms would teach educators to ignore the lint.
RELATIONSHIP_VERBS = frozenset({
    "has", "have", "belongs", "belong", "contains", "contain", "includes",
    "include", "owns", "own", "issues", "issue", "manages", "manage",
    "supervises", "supervise", "works", "work", "treats", "treat",
    "provides", "provide", "assigned", "assigns", "participates",
    "participate", "employs", "employ", "maintains", "maintain",
})

_WORD_RE = re.compile(r"[A-Za-z_]+")


@dataclass(frozen=True)
class RequirementItem:
    id: str
    description: str
    rubrics: tuple[str, ...] = ()
    questions: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rubrics", tuple(self.rubrics))
        object.__setattr__(self, "questions", tuple(self.questions))


@dataclass(frozen=True)
class RequirementSet:
    title: str
    version: str
    items: tuple[RequirementItem, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))

    def item(self, item_id: str) -> RequirementItem | None:
        for item in self.items:
            if item.id == item_id:
                return item
        return None


def _string_list(value, where: str) -> tuple[str, ...]:
    if not isinstance(value, list) or any(not isinstance(v, str) for v in value):
        raise MalformedDocument(f"{where} must be a list of strings")
    return tuple(value)


def relationship_verbs_mentioned(description: str) -> set[str]:
    """Distinct relationship-style verbs appearing in a description."""
    return {w for w in (m.group(0).lower() for m in _WORD_RE.finditer(description))
            if w in RELATIONSHIP_VERBS}


def load_requirements(text: str, lint: bool = True) -> RequirementSet:
    """Load and validate a requirements document.

    Emits a :class:`RequirementLint` warning when one description looks like
    it spans several relationships (three or more relationship verbs);
    relationship-level feedback works best when each item covers one.
    ``lint=False`` skips the advisory pass, for re-loads of documents that
    were already checked when they entered the system.
    """
    try:
        obj = json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise MalformedDocument(f"not a JSON document: {exc}") from exc
    if not isinstance(obj, dict):
        raise MalformedDocument("expected a JSON object at the top level")
    for key in obj:
        if key not in ("title", "version", "items"):
            raise MalformedDocument(f"unknown key {key!r}")
    title = obj.get("title", "")
    version = obj.get("version", "")
    if not isinstance(title, str) or not isinstance(version, str):
        raise MalformedDocument("title and version must be strings")
    raw_items = obj.get("items")
    if not isinstance(raw_items, list):
        raise MalformedDocument("items must be a list")
    if not raw_items:
        raise MalformedDocument("a requirement set needs at least one item")

    items: list[RequirementItem] = []
    seen_ids: set[str] = set()
    for i, raw in enumerate(raw_items):
        where = f"items[{i}]"
        if not isinstance(raw, dict):
            raise MalformedDocument(f"{where} must be an object")
        for key in raw:
            if key not in ("id", "description", "rubrics", "questions"):
                raise MalformedDocument(f"{where} has unknown key {key!r}")
        item_id = raw.get("id")
        if not isinstance(item_id, str) or not item_id:
            raise MalformedDocument(f"{where} needs a non-empty string id")
        if item_id in seen_ids:
            raise DuplicateId(f"requirement id {item_id!r} is used more than once")
        seen_ids.add(item_id)
        description = raw.get("description")
        if not isinstance(description, str):
            raise MalformedDocument(f"{where} needs a string description")
        if not description.strip():
            raise EmptyDescription(f"requirement {item_id!r} has an empty description")
        item = RequirementItem(
            id=item_id,
            description=description,
            rubrics=_string_list(raw.get("rubrics", []), f"{where}.rubrics"),
            questions=_string_list(raw.get("questions", []), f"{where}.questions"),
        )
        verbs = relationship_verbs_mentioned(description) if lint else set()
        if len(verbs) >= 3:
            warnings.warn(
                f"requirement {item_id!r} mentions {len(verbs)} relationship verbs "
                f"({', '.join(sorted(verbs))}); consider splitting it so each item "
                "describes one relationship",
                RequirementLint,
                stacklevel=2,
            )
        items.append(item)
    return RequirementSet(title=title, version=version, items=tuple(items))


def serialize_requirements(reqs: RequirementSet) -> str:
    """Inverse of :func:`load_requirements`; stable, two-space indented."""
    return json.dumps(
        {
            "title": reqs.title,
            "version": reqs.version,
            "items": [
                {
                    "id": item.id,
                    "description": item.description,
                    "rubrics": list(item.rubrics),
                    "questions": list(item.questions),
                }
                for item in reqs.items
            ],
        },
        indent=2,
    )


def student_view(reqs: RequirementSet) -> str:
    """The problem statement as students see it: descriptions only.

    Rubrics and questions never appear here, whatever they contain.
    """
    return "\n\n".join(item.description for item in reqs.items)
