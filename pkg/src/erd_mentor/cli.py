"""Command line entry points.

``erd-mentor feedback`` runs the whole pipeline once without a server:
requirements file + ERD file + relationship name in, feedback and FAQ out.
Exit codes: 0 success, 2 the ERD text does not parse, 3 the LLM backend
failed. ``erd-mentor eval`` turns a label CSV into the per-category metrics
report. ``erd-mentor serve`` starts the HTTP API.
"""

from __future__ import annotations

import json
import sys

import click

from .evaluation import LabelFormatError, compute_metrics, load_labels, render_report
from .gateway import GatewayError, LlmConfig, LlmGateway, MockBackend, HttpChatBackend
from .service import FeedbackService, ParseFailed
from .store import DocumentStore

EXIT_PARSE_ERROR = 2
EXIT_LLM_FAILURE = 3


def _build_gateway(mock: str | None) -> LlmGateway:
    if mock is not None:
        return LlmGateway(MockBackend.from_file(mock), LlmConfig())
    config = LlmConfig.from_env()
    if not config.endpoint:
        raise click.ClickException(
            "no LLM endpoint configured; set ERD_MENTOR_LLM_ENDPOINT or pass --mock")
    return LlmGateway(HttpChatBackend(config.endpoint, config.api_key_var), config)


@click.group()
def main():
    """Feedback workbench for entity-relationship design exercises."""


@main.command()
@click.option("--requirements", "requirements_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Requirements JSON file.")
@click.option("--erd", "erd_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="ERD grammar text file.")
@click.option("--relationship", required=True, help="Relationship to get feedback on.")
@click.option("--mock", "mock_path", type=click.Path(exists=True, dir_okay=False),
              help="Mock script file; replaces the live LLM backend.")
@click.option("--json", "as_json", is_flag=True, help="Print the full record as JSON.")
def feedback(requirements_path: str, erd_path: str, relationship: str,
             mock_path: str | None, as_json: bool):
    """Generate feedback plus FAQ for one relationship of an ERD file."""
    with open(requirements_path, "r", encoding="utf-8") as handle:
        requirements_text = handle.read()
    with open(erd_path, "r", encoding="utf-8") as handle:
        erd_text = handle.read()

    service = FeedbackService(DocumentStore(":memory:"), _build_gateway(mock_path))
    project = service.create_project(requirements_text)
    try:
        submission, violations = service.submit_erd(project.id, erd_text)
    except ParseFailed as exc:
        for error in exc.errors:
            click.echo(f"{erd_path}:{error.line}:{error.column}: {error.message}", err=True)
        sys.exit(EXIT_PARSE_ERROR)
    for violation in violations:
        click.echo(f"note: {violation.code}: {violation.message}", err=True)

    try:
        record = service.request_feedback(submission.id, relationship)
    except KeyError as exc:
        raise click.ClickException(f"unknown relationship {exc.args[0]!r}") from exc
    except GatewayError as exc:
        click.echo(f"LLM failure: {exc}", err=True)
        sys.exit(EXIT_LLM_FAILURE)

    if as_json:
        click.echo(json.dumps(record.to_dict(), indent=2))
        return
    click.echo("Feedback")
    click.echo("--------")
    click.echo(record.feedback)
    if record.faq:
        click.echo("")
        click.echo("FAQ")
        click.echo("---")
        for entry in record.faq:
            click.echo(f"Q: {entry['question']}")
            click.echo(f"A: {entry['answer']}")
    elif record.warning == "faq_unavailable":
        click.echo("")
        click.echo("FAQ unavailable for this feedback.")


@main.command("eval")
@click.option("--labels", "labels_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Label CSV file.")
@click.option("--labeler", default=None, help="Restrict to one labeler's labels.")
@click.option("--majority", is_flag=True, help="Majority vote across labelers.")
def eval_command(labels_path: str, labeler: str | None, majority: bool):
    """Render the per-category precision/recall/F1 report from a label CSV."""
    with open(labels_path, "r", encoding="utf-8") as handle:
        text = handle.read()
    try:
        labels = load_labels(text)
        metrics = compute_metrics(labels, labeler=labeler, majority=majority)
    except (LabelFormatError, ValueError) as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(render_report(metrics), nl=False)


@main.command()
@click.option("--store", "store_path", default="erd_mentor.db", show_default=True,
              help="SQLite file backing the document store.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--mock", "mock_path", type=click.Path(exists=True, dir_okay=False),
              help="Mock script file; replaces the live LLM backend.")
def serve(store_path: str, host: str, port: int, mock_path: str | None):
    """Run the HTTP API server."""
    import uvicorn

    from .api import create_app

    service = FeedbackService(DocumentStore(store_path), _build_gateway(mock_path))
    uvicorn.run(create_app(service), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
