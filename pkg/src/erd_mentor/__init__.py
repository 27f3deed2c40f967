"""erd-mentor: LLM-backed feedback for entity-relationship design exercises."""

from .model import (
    AttributeDecl,
    EntityDecl,
    ERDSchema,
    MalformedDocument,
    Participation,
    RelationshipDecl,
    SchemaMismatch,
    SpecializationDecl,
    UnionDecl,
    Violation,
    from_json,
    to_json,
    validate,
)
from .dot import UnrenderableView, to_dot
from .parser import ParseError, ParseResult, SourceSpan, format, parse
from .prune import PrunedView, UnknownRelationship, list_relationships, prune
from .requirements import RequirementItem, RequirementSet, load_requirements, student_view

__version__ = "0.1.0"

__all__ = [
    "AttributeDecl",
    "EntityDecl",
    "ERDSchema",
    "MalformedDocument",
    "ParseError",
    "ParseResult",
    "Participation",
    "PrunedView",
    "RelationshipDecl",
    "RequirementItem",
    "RequirementSet",
    "SchemaMismatch",
    "SourceSpan",
    "SpecializationDecl",
    "UnionDecl",
    "UnknownRelationship",
    "UnrenderableView",
    "Violation",
    "format",
    "from_json",
    "list_relationships",
    "load_requirements",
    "parse",
    "prune",
    "student_view",
    "to_dot",
    "to_json",
    "validate",
    "__version__",
]
