"""Pipeline orchestration and persistence for the feedback workbench.

The full loop: a project is created from a requirements file; students
submit ERD text (it must parse, but flawed designs are stored on purpose,
that is what the feedback is for); per relationship, the service prunes the
diagram, asks the model to match requirements, generates feedback, then
FAQs, and persists the record with complete provenance (every LLM exchange
is linked). Teaching staff can open a discussion on any record.

FAQ generation is best-effort: if its responses never parse, the record is
stored with an empty FAQ and a warning flag. Matching and feedback failures
abort the request, there is nothing useful to store without them.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from functools import partial

from . import parser as erd_parser
from .dot import to_dot
from .gateway import LlmGateway, StructuredOutputFailure
from .model import ERDSchema, Violation, from_json, to_json, validate
from .prompts import (
    FaqList,
    build_faq_prompt,
    build_feedback_prompt,
    build_matching_prompt,
    parse_faq_response,
    parse_feedback_response,
    parse_matching_response,
)
from .prune import PrunedView, UnknownRelationship, list_relationships, prune
from .requirements import RequirementSet, load_requirements, serialize_requirements
from .store import DocumentStore

MAX_PROJECT_MEMBERS = 5

FEEDBACK_STATUSES = ("ai_only", "staff_flagged", "discussed")
AUTHOR_ROLES = ("student", "staff")


class UnknownProject(KeyError):
    pass


class UnknownSubmission(KeyError):
    pass


class UnknownParent(KeyError):
    pass


class UnknownFeedback(KeyError):
    pass


class EmptyMessage(ValueError):
    pass


class InvalidRole(ValueError):
    pass


class FeedbackInProgress(RuntimeError):
    """A feedback request for this submission is already running."""


class ParseFailed(Exception):
    def __init__(self, errors):
        super().__init__(f"{len(errors)} parse error(s)")
        self.errors = list(errors)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _new_id(prefix: str) -> str:
    return f"{prefix}_{uuid.uuid4().hex[:12]}"


@dataclass(frozen=True)
class Project:
    id: str
    title: str
    requirements_id: str
    members: tuple[str, ...]
    created_at: str

    def to_dict(self) -> dict:
        return {"id": self.id, "title": self.title, "requirements_id": self.requirements_id,
                "members": list(self.members), "created_at": self.created_at}

    @classmethod
    def from_dict(cls, doc: dict) -> "Project":
        return cls(id=doc["id"], title=doc["title"], requirements_id=doc["requirements_id"],
                   members=tuple(doc["members"]), created_at=doc["created_at"])


@dataclass(frozen=True)
class Submission:
    id: str
    project_id: str
    text: str
    schema_json: str
    spans: tuple[dict, ...]
    violations: tuple[dict, ...]
    parent_id: str | None
    created_at: str

    def to_dict(self) -> dict:
        return {"id": self.id, "project_id": self.project_id, "text": self.text,
                "schema_json": self.schema_json, "spans": list(self.spans),
                "violations": list(self.violations), "parent_id": self.parent_id,
                "created_at": self.created_at}

    @classmethod
    def from_dict(cls, doc: dict) -> "Submission":
        return cls(id=doc["id"], project_id=doc["project_id"], text=doc["text"],
                   schema_json=doc["schema_json"], spans=tuple(doc["spans"]),
                   violations=tuple(doc["violations"]), parent_id=doc["parent_id"],
                   created_at=doc["created_at"])


@dataclass(frozen=True)
class FeedbackRecord:
    id: str
    submission_id: str
    relationship: str
    relevant_requirement_ids: tuple[str, ...]
    feedback: str
    faq: tuple[dict, ...]
    exchange_ids: tuple[str, ...]
    status: str
    warning: str | None
    created_at: str

    def to_dict(self) -> dict:
        return {"id": self.id, "submission_id": self.submission_id,
                "relationship": self.relationship,
                "relevant_requirement_ids": list(self.relevant_requirement_ids),
                "feedback": self.feedback, "faq": list(self.faq),
                "exchange_ids": list(self.exchange_ids), "status": self.status,
                "warning": self.warning, "created_at": self.created_at}

    @classmethod
    def from_dict(cls, doc: dict) -> "FeedbackRecord":
        return cls(id=doc["id"], submission_id=doc["submission_id"],
                   relationship=doc["relationship"],
                   relevant_requirement_ids=tuple(doc["relevant_requirement_ids"]),
                   feedback=doc["feedback"], faq=tuple(doc["faq"]),
                   exchange_ids=tuple(doc["exchange_ids"]), status=doc["status"],
                   warning=doc["warning"], created_at=doc["created_at"])


@dataclass(frozen=True)
class DiscussionMessage:
    id: str
    feedback_id: str
    author_role: str
    body: str
    created_at: str

    def to_dict(self) -> dict:
        return {"id": self.id, "feedback_id": self.feedback_id,
                "author_role": self.author_role, "body": self.body,
                "created_at": self.created_at}

    @classmethod
    def from_dict(cls, doc: dict) -> "DiscussionMessage":
        return cls(id=doc["id"], feedback_id=doc["feedback_id"],
                   author_role=doc["author_role"], body=doc["body"],
                   created_at=doc["created_at"])


class FeedbackService:
    def __init__(self, store: DocumentStore, gateway: LlmGateway):
        self.store = store
        self.gateway = gateway
        self._busy_submissions: set[str] = set()
        self._busy_lock = threading.Lock()

    # -- projects ------------------------------------------------------------

    def create_project(self, requirements_text: str,
                       members: tuple[str, ...] = ()) -> Project:
        if len(members) > MAX_PROJECT_MEMBERS:
            raise ValueError(f"projects take at most {MAX_PROJECT_MEMBERS} members")
        reqs = load_requirements(requirements_text)
        requirements_id = _new_id("req")
        self.store.put("requirements", requirements_id,
                       {"id": requirements_id, "body": serialize_requirements(reqs)})
        project = Project(id=_new_id("proj"), title=reqs.title,
                          requirements_id=requirements_id, members=tuple(members),
                          created_at=_now())
        self.store.put("projects", project.id, project.to_dict())
        return project

    def get_project(self, project_id: str) -> Project:
        doc = self.store.get("projects", project_id)
        if doc is None:
            raise UnknownProject(project_id)
        return Project.from_dict(doc)

    def requirement_set(self, project_id: str) -> RequirementSet:
        project = self.get_project(project_id)
        doc = self.store.get("requirements", project.requirements_id)
        # linted once at project creation; reloads stay quiet
        return load_requirements(doc["body"], lint=False)

    # -- submissions ---------------------------------------------------------

    def submit_erd(self, project_id: str, text: str,
                   parent: str | None = None) -> tuple[Submission, list[Violation]]:
        self.get_project(project_id)
        if parent is not None:
            parent_doc = self.store.get("submissions", parent)
            if parent_doc is None or parent_doc["project_id"] != project_id:
                raise UnknownParent(parent)
        result = erd_parser.parse(text)
        if not result.ok:
            raise ParseFailed(result.errors)
        violations = validate(result.schema)
        submission = Submission(
            id=_new_id("sub"),
            project_id=project_id,
            text=text,
            schema_json=to_json(result.schema),
            spans=tuple(
                {"kind": r.kind, "name": r.name, "start": r.span.start, "end": r.span.end}
                for r in result.spans
            ),
            violations=tuple(
                {"code": v.code, "location": v.location, "message": v.message}
                for v in violations
            ),
            parent_id=parent,
            created_at=_now(),
        )
        self.store.put("submissions", submission.id, submission.to_dict())
        return submission, violations

    def get_submission(self, submission_id: str) -> Submission:
        doc = self.store.get("submissions", submission_id)
        if doc is None:
            raise UnknownSubmission(submission_id)
        return Submission.from_dict(doc)

    def submission_schema(self, submission_id: str) -> ERDSchema:
        return from_json(self.get_submission(submission_id).schema_json)

    def relationships(self, submission_id: str) -> list[str]:
        return list_relationships(self.submission_schema(submission_id))

    def diagram_dot(self, submission_id: str, relationship: str | None = None) -> str:
        schema = self.submission_schema(submission_id)
        if relationship is None:
            return to_dot(schema)
        return to_dot(prune(schema, relationship))

    # -- feedback pipeline -----------------------------------------------------

    def _whole_diagram_view(self, schema: ERDSchema, relationship: str) -> PrunedView:
        # maintenance-only path for comparing isolated vs whole-diagram prompting
        if schema.relationship(relationship) is None:
            raise UnknownRelationship(relationship)
        reasons = {f"relationship:{relationship}": "focus"}
        for entity in schema.entities:
            reasons.setdefault(f"entity:{entity.name}", "participant")
        for rel in schema.relationships:
            reasons.setdefault(f"relationship:{rel.name}", "shared_relationship")
        for spec in schema.specializations:
            reasons.setdefault(f"specialization:{spec.name}", "specialization_context")
        for union in schema.unions:
            reasons.setdefault(f"union:{union.name}", "union_context")
        return PrunedView(focus=relationship, schema=schema, included_reason=reasons)

    def request_feedback(self, submission_id: str, relationship: str,
                         whole_diagram: bool = False) -> FeedbackRecord:
        submission = self.get_submission(submission_id)
        with self._busy_lock:
            if submission_id in self._busy_submissions:
                raise FeedbackInProgress(submission_id)
            self._busy_submissions.add(submission_id)
        try:
            return self._run_pipeline(submission, relationship, whole_diagram)
        finally:
            with self._busy_lock:
                self._busy_submissions.discard(submission_id)

    def _run_pipeline(self, submission: Submission, relationship: str,
                      whole_diagram: bool) -> FeedbackRecord:
        schema = from_json(submission.schema_json)
        if whole_diagram:
            view = self._whole_diagram_view(schema, relationship)
        else:
            view = prune(schema, relationship)
        reqs = self.requirement_set(submission.project_id)

        exchange_ids: list[str] = []

        def persist(exchanges) -> None:
            for exchange in exchanges:
                self.store.append_exchange(exchange.id, exchange.to_dict())
                exchange_ids.append(exchange.id)

        matching_prompt = build_matching_prompt(reqs, view)
        relevant, exchanges = self.gateway.complete_structured(
            matching_prompt, partial(parse_matching_response, reqs=reqs))
        persist(exchanges)

        feedback_prompt = build_feedback_prompt(relevant, view)
        feedback, exchanges = self.gateway.complete_structured(
            feedback_prompt, parse_feedback_response)
        persist(exchanges)

        warning = None
        faq = FaqList(entries=())
        faq_prompt = build_faq_prompt(feedback, relevant, view)
        try:
            faq, exchanges = self.gateway.complete_structured(faq_prompt, parse_faq_response)
            persist(exchanges)
        except StructuredOutputFailure as exc:
            persist(exc.exchanges)
            warning = "faq_unavailable"

        record = FeedbackRecord(
            id=_new_id("fb"),
            submission_id=submission.id,
            relationship=relationship,
            relevant_requirement_ids=tuple(
                item.matched_id for item in relevant.items if item.matched_id is not None
            ),
            feedback=feedback.text,
            faq=tuple({"question": e.question, "answer": e.answer} for e in faq.entries),
            exchange_ids=tuple(exchange_ids),
            status="ai_only",
            warning=warning,
            created_at=_now(),
        )
        self.store.put("feedback", record.id, record.to_dict())
        return record

    def get_feedback(self, feedback_id: str) -> FeedbackRecord:
        doc = self.store.get("feedback", feedback_id)
        if doc is None:
            raise UnknownFeedback(feedback_id)
        return FeedbackRecord.from_dict(doc)

    # -- discussion ------------------------------------------------------------

    def post_discussion(self, feedback_id: str, author_role: str,
                        body: str) -> DiscussionMessage:
        record = self.get_feedback(feedback_id)
        if author_role not in AUTHOR_ROLES:
            raise InvalidRole(f"author role must be one of {AUTHOR_ROLES}")
        if not body or not body.strip():
            raise EmptyMessage("discussion messages need a body")
        message = DiscussionMessage(id=_new_id("msg"), feedback_id=feedback_id,
                                    author_role=author_role, body=body, created_at=_now())
        self.store.put("discussions", message.id, message.to_dict())
        if author_role == "staff" and record.status != "discussed":
            doc = record.to_dict()
            doc["status"] = "discussed"
            self.store.put("feedback", record.id, doc)
        return message

    def discussion(self, feedback_id: str) -> list[DiscussionMessage]:
        self.get_feedback(feedback_id)
        messages = [DiscussionMessage.from_dict(doc)
                    for doc in self.store.list("discussions")
                    if doc["feedback_id"] == feedback_id]
        messages.sort(key=lambda m: m.created_at)
        return messages

    # -- history ----------------------------------------------------------------

    def get_history(self, project_id: str) -> dict:
        """Everything that happened in a project, each list in time order."""
        self.get_project(project_id)
        submissions = [doc for doc in self.store.list("submissions")
                       if doc["project_id"] == project_id]
        submissions.sort(key=lambda d: d["created_at"])
        submission_ids = {doc["id"] for doc in submissions}
        feedback = [doc for doc in self.store.list("feedback")
                    if doc["submission_id"] in submission_ids]
        feedback.sort(key=lambda d: d["created_at"])
        feedback_ids = {doc["id"] for doc in feedback}
        discussions = [doc for doc in self.store.list("discussions")
                       if doc["feedback_id"] in feedback_ids]
        discussions.sort(key=lambda d: d["created_at"])
        return {"submissions": submissions, "feedback": feedback,
                "discussions": discussions}
