"""HTTP surface over the feedback service.

Errors come back as problem-details JSON: ``{"code", "message", "detail"}``
with a matching 4xx/5xx status. The diagram endpoint returns DOT text for
client-side layout; everything else is JSON.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from . import requirements as reqs_mod
from .dot import UnrenderableView
from .gateway import GatewayError, StructuredOutputFailure
from .prune import UnknownRelationship
from .service import (
    EmptyMessage,
    FeedbackInProgress,
    FeedbackService,
    InvalidRole,
    ParseFailed,
    UnknownFeedback,
    UnknownParent,
    UnknownProject,
    UnknownSubmission,
)


class SubmissionBody(BaseModel):
    text: str
    parent: str | None = None


class FeedbackBody(BaseModel):
    relationship: str


class DiscussionBody(BaseModel):
    role: str
    body: str


def _problem(status: int, code: str, message: str, detail=None) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"code": code, "message": message, "detail": detail})


def create_app(service: FeedbackService) -> FastAPI:
    app = FastAPI(title="erd-mentor", docs_url=None, redoc_url=None)
    # the workbench is served separately and talks to us cross-origin
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])

    @app.exception_handler(ParseFailed)
    async def _parse_failed(request: Request, exc: ParseFailed):
        detail = [{"line": e.line, "column": e.column, "message": e.message, "code": e.code}
                  for e in exc.errors]
        return _problem(422, "parse_failed", "the submitted text does not parse", detail)

    @app.exception_handler(UnknownProject)
    @app.exception_handler(UnknownSubmission)
    @app.exception_handler(UnknownParent)
    @app.exception_handler(UnknownFeedback)
    @app.exception_handler(UnknownRelationship)
    async def _not_found(request: Request, exc: Exception):
        code = {
            UnknownProject: "unknown_project",
            UnknownSubmission: "unknown_submission",
            UnknownParent: "unknown_parent",
            UnknownFeedback: "unknown_feedback",
            UnknownRelationship: "unknown_relationship",
        }[type(exc)]
        return _problem(404, code, str(exc.args[0]) if exc.args else code)

    @app.exception_handler(FeedbackInProgress)
    async def _busy(request: Request, exc: FeedbackInProgress):
        return _problem(409, "feedback_in_progress",
                        "a feedback request for this submission is already running")

    @app.exception_handler(StructuredOutputFailure)
    async def _llm_unparseable(request: Request, exc: StructuredOutputFailure):
        return _problem(502, "llm_failure", str(exc))

    @app.exception_handler(GatewayError)
    async def _llm_error(request: Request, exc: GatewayError):
        return _problem(502, "llm_error", str(exc))

    @app.exception_handler(reqs_mod.MalformedDocument)
    @app.exception_handler(reqs_mod.DuplicateId)
    @app.exception_handler(reqs_mod.EmptyDescription)
    @app.exception_handler(InvalidRole)
    @app.exception_handler(EmptyMessage)
    @app.exception_handler(UnrenderableView)
    @app.exception_handler(ValueError)
    async def _bad_request(request: Request, exc: Exception):
        return _problem(422, "invalid_request", str(exc))

    @app.post("/projects", status_code=201)
    def create_project(body: dict):
        project = service.create_project(json.dumps(body))
        return project.to_dict()

    @app.get("/projects/{project_id}")
    def get_project(project_id: str):
        return service.get_project(project_id).to_dict()

    @app.post("/projects/{project_id}/submissions", status_code=201)
    def create_submission(project_id: str, body: SubmissionBody):
        submission, violations = service.submit_erd(project_id, body.text, body.parent)
        return {
            "submission": submission.to_dict(),
            "violations": [
                {"code": v.code, "location": v.location, "message": v.message}
                for v in violations
            ],
        }

    @app.get("/submissions/{submission_id}/relationships")
    def get_relationships(submission_id: str):
        return {"relationships": service.relationships(submission_id)}

    @app.get("/submissions/{submission_id}/diagram.dot")
    def get_diagram(submission_id: str, relationship: str | None = None):
        return PlainTextResponse(service.diagram_dot(submission_id, relationship))

    @app.post("/submissions/{submission_id}/feedback", status_code=201)
    def request_feedback(submission_id: str, body: FeedbackBody):
        return service.request_feedback(submission_id, body.relationship).to_dict()

    @app.get("/feedback/{feedback_id}")
    def get_feedback(feedback_id: str):
        record = service.get_feedback(feedback_id)
        discussion = [m.to_dict() for m in service.discussion(feedback_id)]
        return {**record.to_dict(), "discussion": discussion}

    @app.post("/feedback/{feedback_id}/discussion", status_code=201)
    def post_discussion(feedback_id: str, body: DiscussionBody):
        return service.post_discussion(feedback_id, body.role, body.body).to_dict()

    @app.get("/projects/{project_id}/history")
    def get_history(project_id: str):
        return service.get_history(project_id)

    return app
