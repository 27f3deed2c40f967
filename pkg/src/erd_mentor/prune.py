"""Isolate one relationship plus just enough surrounding context.

Feedback is generated per relationship, but a bare relationship can read as
incomplete: when its two entities also share another relationship, or sit in
a specialization or union, a reviewer (human or model) expects to see that
structure. The pruned view therefore starts from the focus relationship and
its participants, then does exactly one round of context extension. No
fixpoint is computed; chasing context transitively would usually rebuild the
whole diagram and defeat the point of isolating.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import ERDSchema


class UnknownRelationship(KeyError):
    """The requested focus relationship is not declared in the schema."""


@dataclass(frozen=True)
class PrunedView:
    """A relationship-centred sub-diagram.

    ``included_reason`` maps ``kind:name`` keys (``entity:Patient``,
    ``relationship:HasRecord``, ...) to why each element is present:
    ``focus``, ``participant``, ``shared_relationship``,
    ``specialization_context`` or ``union_context``.
    """

    focus: str
    schema: ERDSchema
    included_reason: dict[str, str]


def list_relationships(source: ERDSchema) -> list[str]:
    """Relationship names in declaration order."""
    return [rel.name for rel in source.relationships]


def prune(source: ERDSchema, relationship: str) -> PrunedView:
    """Build the context-extended view around one relationship.

    Core step: the focus relationship and its participating entities (with
    all their attributes). Extension step, applied once against the core
    participant set E0: (a) other relationships whose participants all lie
    in E0; (b) specializations touching E0, pulling in their superclass and
    subcategory entity declarations; (c) unions, likewise. Entities added by
    (b) or (c) do not trigger another pass of (a).
    """
    focus = source.relationship(relationship)
    if focus is None:
        raise UnknownRelationship(relationship)

    reasons: dict[str, str] = {f"relationship:{focus.name}": "focus"}
    core_entities = {part.entity for part in focus.participants}
    for name in core_entities:
        reasons[f"entity:{name}"] = "participant"

    included_rels = {focus.name}
    for rel in source.relationships:
        if rel.name in included_rels:
            continue
        legs = {part.entity for part in rel.participants}
        if legs <= core_entities:
            included_rels.add(rel.name)
            reasons[f"relationship:{rel.name}"] = "shared_relationship"

    included_specs: set[str] = set()
    context_entities: set[str] = set()
    for index, spec in enumerate(source.specializations):
        members = {spec.name, *spec.subcategories}
        if members & core_entities:
            included_specs.add(index)
            reasons[f"specialization:{spec.name}"] = "specialization_context"
            for name in members - core_entities:
                context_entities.add(name)
                reasons.setdefault(f"entity:{name}", "specialization_context")

    included_unions: set[str] = set()
    for index, union in enumerate(source.unions):
        members = {union.name, *union.sources}
        if members & core_entities:
            included_unions.add(index)
            reasons[f"union:{union.name}"] = "union_context"
            for name in members - core_entities:
                context_entities.add(name)
                reasons.setdefault(f"entity:{name}", "union_context")

    wanted_entities = core_entities | context_entities
    pruned = ERDSchema(
        entities=tuple(e for e in source.entities if e.name in wanted_entities),
        relationships=tuple(r for r in source.relationships if r.name in included_rels),
        specializations=tuple(
            s for i, s in enumerate(source.specializations) if i in included_specs
        ),
        unions=tuple(u for i, u in enumerate(source.unions) if i in included_unions),
    )
    return PrunedView(focus=relationship, schema=pruned, included_reason=reasons)
