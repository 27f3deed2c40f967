"""In-memory model for extended entity-relationship diagrams.

The model is deliberately permissive: anything a student can express in the
text grammar can be represented here, including diagrams that break design
rules (missing keys, dangling references, ...). Those problems are reported
by :func:`validate` as data, never as exceptions, so that flawed diagrams can
still travel through the feedback pipeline. Construction only rejects values
that make the structure itself meaningless (unknown kinds, bad identifiers,
a binary relationship with one participant, ...).

All types are frozen dataclasses; instances are immutable and hashable and
can be shared freely across threads.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Any, Sequence

ATTRIBUTE_KINDS = ("simple", "key", "partial_key", "derived", "multivalued", "composite")
ENTITY_STRENGTHS = ("strong", "weak")
CARDINALITIES = ("1", "N", "M")
SPECIALIZATION_CONSTRAINTS = ("disjoint", "overlapping", "total", "partial")

IDENTIFIER_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*\Z")

#: Words with grammar meaning; they cannot be used as element names, otherwise
#: the canonical text form of a schema would not parse back.
RESERVED_WORDS = frozenset({
    "entity", "weak", "relationship", "identifying", "specialization",
    "union", "of", "as", "key", "partial_key", "derived", "multivalued",
    "total", "partial", "disjoint", "overlapping",
})


class MalformedDocument(Exception):
    """Raised by :func:`from_json` when the input is not JSON at all."""


class SchemaMismatch(Exception):
    """Raised by :func:`from_json` for JSON that is not a diagram document.

    Carries a JSON-pointer-style ``path`` locating the offending value.
    """

    def __init__(self, path: str, message: str):
        super().__init__(f"{path or '/'}: {message}")
        self.path = path
        self.message = message


def _check_name(name: Any, what: str) -> None:
    if not isinstance(name, str) or not name:
        raise ValueError(f"{what} name must be a non-empty string")
    if not IDENTIFIER_RE.match(name):
        raise ValueError(f"invalid {what} name {name!r}")
    if name in RESERVED_WORDS:
        raise ValueError(f"{what} name {name!r} is a reserved word")


@dataclass(frozen=True)
class AttributeDecl:
    """One attribute; ``children`` is non-empty exactly for composites."""

    name: str
    kind: str = "simple"
    children: tuple["AttributeDecl", ...] = ()

    def __post_init__(self):
        _check_name(self.name, "attribute")
        if self.kind not in ATTRIBUTE_KINDS:
            raise ValueError(f"unknown attribute kind {self.kind!r}")
        object.__setattr__(self, "children", tuple(self.children))
        if self.kind == "composite":
            if not self.children:
                raise ValueError(f"composite attribute {self.name!r} needs component attributes")
            for child in self.children:
                if child.kind in ("key", "partial_key"):
                    raise ValueError(
                        f"component {child.name!r} of composite {self.name!r} may not be a key"
                    )
        elif self.children:
            raise ValueError(f"attribute {self.name!r} has components but is not composite")


@dataclass(frozen=True)
class EntityDecl:
    name: str
    strength: str = "strong"
    attributes: tuple[AttributeDecl, ...] = ()

    def __post_init__(self):
        _check_name(self.name, "entity")
        if self.strength not in ENTITY_STRENGTHS:
            raise ValueError(f"unknown entity strength {self.strength!r}")
        object.__setattr__(self, "attributes", tuple(self.attributes))


@dataclass(frozen=True)
class Participation:
    """One leg of a relationship; ``role`` distinguishes recursive legs."""

    entity: str
    cardinality: str
    role: str | None = None
    total: bool = False

    def __post_init__(self):
        _check_name(self.entity, "participant entity")
        if self.role is not None:
            _check_name(self.role, "participant role")
        if self.cardinality not in CARDINALITIES:
            raise ValueError(f"cardinality must be one of {CARDINALITIES}, got {self.cardinality!r}")


@dataclass(frozen=True)
class RelationshipDecl:
    name: str
    participants: tuple[Participation, ...]
    identifying: bool = False
    attributes: tuple[AttributeDecl, ...] = ()

    def __post_init__(self):
        _check_name(self.name, "relationship")
        object.__setattr__(self, "participants", tuple(self.participants))
        object.__setattr__(self, "attributes", tuple(self.attributes))
        if not 2 <= len(self.participants) <= 3:
            raise ValueError(
                f"relationship {self.name!r} needs 2 or 3 participants, got {len(self.participants)}"
            )


@dataclass(frozen=True)
class SpecializationDecl:
    """Superclass/subclass structure; ``name`` is the superclass entity."""

    name: str
    subcategories: tuple[str, ...]
    constraints: tuple[str, ...] = ()

    def __post_init__(self):
        _check_name(self.name, "specialization superclass")
        object.__setattr__(self, "subcategories", tuple(self.subcategories))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if not self.subcategories:
            raise ValueError(f"specialization of {self.name!r} needs at least one subcategory")
        for sub in self.subcategories:
            _check_name(sub, "subcategory")
        for constraint in self.constraints:
            if constraint not in SPECIALIZATION_CONSTRAINTS:
                raise ValueError(f"unknown specialization constraint {constraint!r}")


@dataclass(frozen=True)
class UnionDecl:
    """Category entity ``name`` drawing its members from ``sources``."""

    name: str
    sources: tuple[str, ...]

    def __post_init__(self):
        _check_name(self.name, "union category")
        object.__setattr__(self, "sources", tuple(self.sources))
        if len(self.sources) < 2:
            raise ValueError(f"union {self.name!r} needs at least two source entities")
        for source in self.sources:
            _check_name(source, "union source")


@dataclass(frozen=True)
class ERDSchema:
    entities: tuple[EntityDecl, ...] = ()
    relationships: tuple[RelationshipDecl, ...] = ()
    specializations: tuple[SpecializationDecl, ...] = ()
    unions: tuple[UnionDecl, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entities", tuple(self.entities))
        object.__setattr__(self, "relationships", tuple(self.relationships))
        object.__setattr__(self, "specializations", tuple(self.specializations))
        object.__setattr__(self, "unions", tuple(self.unions))

    def entity(self, name: str) -> EntityDecl | None:
        """First declared entity with this name, or None."""
        for entity in self.entities:
            if entity.name == name:
                return entity
        return None

    def relationship(self, name: str) -> RelationshipDecl | None:
        """First declared relationship with this name, or None."""
        for rel in self.relationships:
            if rel.name == name:
                return rel
        return None


@dataclass(frozen=True)
class Violation:
    """One structural problem found by :func:`validate`."""

    code: str
    location: str
    message: str


#: code -> one-line description of every rule validate() can report.
VALIDATION_RULES = {
    "DuplicateEntityName": "two entities share a name",
    "DuplicateRelationshipName": "two relationships share a name",
    "DuplicateAttributeName": "two sibling attributes share a name",
    "DuplicateParticipant": "a relationship lists the same (entity, role) twice",
    "UnresolvedEntity": "a reference names no declared entity",
    "StrongEntityMissingKey": "a strong entity with attributes has no key",
    "StrongEntityHasPartialKey": "a strong entity declares a partial key",
    "WeakEntityHasKey": "a weak entity declares a key",
    "WeakEntityExtraPartialKey": "a weak entity declares more than one partial key",
    "WeakEntityNotIdentified": "a weak entity has no total participation in an identifying relationship",
    "IdentifyingWithoutWeakTotal": "an identifying relationship has no totally-participating weak entity",
    "SpecializationConstraintConflict": "a specialization mixes exclusive constraints",
    "DuplicateSubcategory": "a specialization lists a subcategory twice",
    "DuplicateUnionSource": "a union lists a source entity twice",
}


def _sibling_duplicates(attrs: Sequence[AttributeDecl], location: str, out: list[Violation]) -> None:
    seen: set[str] = set()
    for attr in attrs:
        if attr.name in seen:
            out.append(Violation(
                "DuplicateAttributeName", location,
                f"attribute {attr.name!r} declared more than once in {location}",
            ))
        seen.add(attr.name)
        if attr.children:
            _sibling_duplicates(attr.children, f"{location}/{attr.name}", out)


def validate(schema: ERDSchema) -> list[Violation]:
    """Report every structural and referential problem in the schema.

    Total over anything the parser accepts; an empty list means the diagram
    is internally consistent. Agreement with the problem requirements is out
    of scope here, that judgement belongs to the feedback pipeline.
    """
    out: list[Violation] = []
    entity_names: set[str] = set()
    for entity in schema.entities:
        loc = f"entity {entity.name}"
        if entity.name in entity_names:
            out.append(Violation("DuplicateEntityName", loc,
                                 f"entity {entity.name!r} declared more than once"))
        entity_names.add(entity.name)
        _sibling_duplicates(entity.attributes, loc, out)
        keys = [a for a in entity.attributes if a.kind == "key"]
        partials = [a for a in entity.attributes if a.kind == "partial_key"]
        if entity.strength == "strong":
            if entity.attributes and not keys:
                out.append(Violation("StrongEntityMissingKey", loc,
                                     f"strong entity {entity.name!r} has no key attribute"))
            for attr in partials:
                out.append(Violation("StrongEntityHasPartialKey", loc,
                                     f"strong entity {entity.name!r} declares partial key {attr.name!r}"))
        else:
            for attr in keys:
                out.append(Violation("WeakEntityHasKey", loc,
                                     f"weak entity {entity.name!r} declares key {attr.name!r}; "
                                     "a weak entity carries a partial key instead"))
            for attr in partials[1:]:
                out.append(Violation("WeakEntityExtraPartialKey", loc,
                                     f"weak entity {entity.name!r} declares a second partial key {attr.name!r}"))

    rel_names: set[str] = set()
    for rel in schema.relationships:
        loc = f"relationship {rel.name}"
        if rel.name in rel_names:
            out.append(Violation("DuplicateRelationshipName", loc,
                                 f"relationship {rel.name!r} declared more than once"))
        rel_names.add(rel.name)
        _sibling_duplicates(rel.attributes, loc, out)
        seen_legs: set[tuple[str, str | None]] = set()
        for part in rel.participants:
            if part.entity not in entity_names:
                out.append(Violation("UnresolvedEntity", f"{loc}/participant {part.entity}",
                                     f"participant {part.entity!r} names no declared entity"))
            leg = (part.entity, part.role)
            if leg in seen_legs:
                role = f" as {part.role}" if part.role else ""
                out.append(Violation("DuplicateParticipant", loc,
                                     f"participant {part.entity!r}{role} listed twice"))
            seen_legs.add(leg)
        if rel.identifying:
            anchored = any(
                part.total
                and (owner := schema.entity(part.entity)) is not None
                and owner.strength == "weak"
                for part in rel.participants
            )
            if not anchored:
                out.append(Violation("IdentifyingWithoutWeakTotal", loc,
                                     f"identifying relationship {rel.name!r} has no weak entity "
                                     "with total participation"))

    for entity in schema.entities:
        if entity.strength != "weak":
            continue
        identified = any(
            rel.identifying and any(p.entity == entity.name and p.total for p in rel.participants)
            for rel in schema.relationships
        )
        if not identified:
            out.append(Violation("WeakEntityNotIdentified", f"entity {entity.name}",
                                 f"weak entity {entity.name!r} does not participate totally in "
                                 "any identifying relationship"))

    for spec in schema.specializations:
        loc = f"specialization {spec.name}"
        if spec.name not in entity_names:
            out.append(Violation("UnresolvedEntity", loc,
                                 f"superclass {spec.name!r} names no declared entity"))
        seen_subs: set[str] = set()
        for sub in spec.subcategories:
            if sub not in entity_names:
                out.append(Violation("UnresolvedEntity", f"{loc}/subcategory {sub}",
                                     f"subcategory {sub!r} names no declared entity"))
            if sub in seen_subs:
                out.append(Violation("DuplicateSubcategory", loc,
                                     f"subcategory {sub!r} listed twice"))
            seen_subs.add(sub)
        given = set(spec.constraints)
        for first, second in (("disjoint", "overlapping"), ("total", "partial")):
            if first in given and second in given:
                out.append(Violation("SpecializationConstraintConflict", loc,
                                     f"constraints {first!r} and {second!r} are mutually exclusive"))

    for union in schema.unions:
        loc = f"union {union.name}"
        if union.name not in entity_names:
            out.append(Violation("UnresolvedEntity", loc,
                                 f"union category {union.name!r} names no declared entity"))
        seen_sources: set[str] = set()
        for source in union.sources:
            if source not in entity_names:
                out.append(Violation("UnresolvedEntity", f"{loc}/source {source}",
                                     f"union source {source!r} names no declared entity"))
            if source in seen_sources:
                out.append(Violation("DuplicateUnionSource", loc,
                                     f"source {source!r} listed twice"))
            seen_sources.add(source)

    return out


# ---------------------------------------------------------------------------
# canonical JSON form
# ---------------------------------------------------------------------------

def _attribute_to_obj(attr: AttributeDecl) -> dict[str, Any]:
    obj: dict[str, Any] = {"name": attr.name, "type": attr.kind}
    if attr.children:
        obj["attributes"] = [_attribute_to_obj(child) for child in attr.children]
    return obj


def _schema_to_obj(schema: ERDSchema) -> dict[str, Any]:
    obj: dict[str, Any] = {
        "entities": [
            {
                "name": entity.name,
                "type": entity.strength,
                "attributes": [_attribute_to_obj(a) for a in entity.attributes],
            }
            for entity in schema.entities
        ],
        "relationships": [],
    }
    for rel in schema.relationships:
        rel_obj: dict[str, Any] = {
            "name": rel.name,
            "type": "identifying" if rel.identifying else "non-identifying",
            "participants": [],
        }
        for part in rel.participants:
            part_obj: dict[str, Any] = {"entity": part.entity}
            if part.role is not None:
                part_obj["role"] = part.role
            part_obj["cardinality"] = part.cardinality
            part_obj["participation"] = "total" if part.total else "partial"
            rel_obj["participants"].append(part_obj)
        if rel.attributes:
            rel_obj["attributes"] = [_attribute_to_obj(a) for a in rel.attributes]
        obj["relationships"].append(rel_obj)
    if schema.specializations:
        obj["specializations"] = [
            {
                "name": spec.name,
                "subcategories": [{"name": sub} for sub in spec.subcategories],
                "type": list(spec.constraints),
            }
            for spec in schema.specializations
        ]
    if schema.unions:
        obj["unions"] = [
            {"name": union.name, "sources": [{"name": source} for source in union.sources]}
            for union in schema.unions
        ]
    return obj


def to_json(schema: ERDSchema) -> str:
    """Canonical JSON text for a schema; equal schemas give equal bytes.

    Key names spell out what each value is (attributes, cardinality,
    participation, ...) so a language model reading the document gets the
    structure without needing the drawing.
    """
    return json.dumps(_schema_to_obj(schema), indent=2)


def _expect(condition: bool, path: str, message: str) -> None:
    if not condition:
        raise SchemaMismatch(path, message)


def _expect_keys(obj: dict, path: str, required: Sequence[str], optional: Sequence[str] = ()) -> None:
    for key in required:
        _expect(key in obj, f"{path}/{key}", f"missing required key {key!r}")
    for key in obj:
        _expect(key in required or key in optional, f"{path}/{key}", f"unknown key {key!r}")


def _attribute_from_obj(obj: Any, path: str) -> AttributeDecl:
    _expect(isinstance(obj, dict), path, "expected an attribute object")
    _expect_keys(obj, path, ("name", "type"), ("attributes",))
    children = ()
    if "attributes" in obj:
        _expect(isinstance(obj["attributes"], list), f"{path}/attributes", "expected a list")
        children = tuple(
            _attribute_from_obj(child, f"{path}/attributes/{i}")
            for i, child in enumerate(obj["attributes"])
        )
    try:
        return AttributeDecl(name=obj["name"], kind=obj["type"], children=children)
    except ValueError as exc:
        raise SchemaMismatch(path, str(exc)) from exc


def _entity_from_obj(obj: Any, path: str) -> EntityDecl:
    _expect(isinstance(obj, dict), path, "expected an entity object")
    _expect_keys(obj, path, ("name", "type", "attributes"))
    _expect(isinstance(obj["attributes"], list), f"{path}/attributes", "expected a list")
    attrs = tuple(
        _attribute_from_obj(a, f"{path}/attributes/{i}") for i, a in enumerate(obj["attributes"])
    )
    try:
        return EntityDecl(name=obj["name"], strength=obj["type"], attributes=attrs)
    except ValueError as exc:
        raise SchemaMismatch(path, str(exc)) from exc


def _participant_from_obj(obj: Any, path: str) -> Participation:
    _expect(isinstance(obj, dict), path, "expected a participant object")
    _expect_keys(obj, path, ("entity", "cardinality", "participation"), ("role",))
    participation = obj["participation"]
    _expect(participation in ("total", "partial"), f"{path}/participation",
            f"expected 'total' or 'partial', got {participation!r}")
    try:
        return Participation(
            entity=obj["entity"],
            cardinality=obj["cardinality"],
            role=obj.get("role"),
            total=participation == "total",
        )
    except ValueError as exc:
        raise SchemaMismatch(path, str(exc)) from exc


def _relationship_from_obj(obj: Any, path: str) -> RelationshipDecl:
    _expect(isinstance(obj, dict), path, "expected a relationship object")
    _expect_keys(obj, path, ("name", "type", "participants"), ("attributes",))
    _expect(obj["type"] in ("identifying", "non-identifying"), f"{path}/type",
            f"expected 'identifying' or 'non-identifying', got {obj['type']!r}")
    _expect(isinstance(obj["participants"], list), f"{path}/participants", "expected a list")
    participants = tuple(
        _participant_from_obj(p, f"{path}/participants/{i}")
        for i, p in enumerate(obj["participants"])
    )
    attrs = ()
    if "attributes" in obj:
        _expect(isinstance(obj["attributes"], list), f"{path}/attributes", "expected a list")
        attrs = tuple(
            _attribute_from_obj(a, f"{path}/attributes/{i}") for i, a in enumerate(obj["attributes"])
        )
    try:
        return RelationshipDecl(
            name=obj["name"],
            identifying=obj["type"] == "identifying",
            participants=participants,
            attributes=attrs,
        )
    except ValueError as exc:
        raise SchemaMismatch(path, str(exc)) from exc


def _named_list(obj: Any, path: str) -> tuple[str, ...]:
    _expect(isinstance(obj, list), path, "expected a list")
    names = []
    for i, item in enumerate(obj):
        _expect(isinstance(item, dict), f"{path}/{i}", "expected an object")
        _expect_keys(item, f"{path}/{i}", ("name",))
        names.append(item["name"])
    return tuple(names)


def _specialization_from_obj(obj: Any, path: str) -> SpecializationDecl:
    _expect(isinstance(obj, dict), path, "expected a specialization object")
    _expect_keys(obj, path, ("name", "subcategories", "type"))
    _expect(isinstance(obj["type"], list), f"{path}/type", "expected a list of constraints")
    try:
        return SpecializationDecl(
            name=obj["name"],
            subcategories=_named_list(obj["subcategories"], f"{path}/subcategories"),
            constraints=tuple(obj["type"]),
        )
    except ValueError as exc:
        raise SchemaMismatch(path, str(exc)) from exc


def _union_from_obj(obj: Any, path: str) -> UnionDecl:
    _expect(isinstance(obj, dict), path, "expected a union object")
    _expect_keys(obj, path, ("name", "sources"))
    try:
        return UnionDecl(name=obj["name"], sources=_named_list(obj["sources"], f"{path}/sources"))
    except ValueError as exc:
        raise SchemaMismatch(path, str(exc)) from exc


def from_json(text: str) -> ERDSchema:
    """Rebuild a schema from its canonical JSON form.

    ``from_json(to_json(s))`` is structurally equal to ``s``. Raises
    :class:`MalformedDocument` for non-JSON input and :class:`SchemaMismatch`
    (with a JSON-pointer path) for anything shaped wrong.
    """
    try:
        obj = json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise MalformedDocument(f"not a JSON document: {exc}") from exc
    _expect(isinstance(obj, dict), "", "expected a JSON object at the top level")
    _expect_keys(obj, "", ("entities", "relationships"), ("specializations", "unions"))
    _expect(isinstance(obj["entities"], list), "/entities", "expected a list")
    _expect(isinstance(obj["relationships"], list), "/relationships", "expected a list")
    entities = tuple(
        _entity_from_obj(e, f"/entities/{i}") for i, e in enumerate(obj["entities"])
    )
    relationships = tuple(
        _relationship_from_obj(r, f"/relationships/{i}") for i, r in enumerate(obj["relationships"])
    )
    specializations: tuple[SpecializationDecl, ...] = ()
    if "specializations" in obj:
        _expect(isinstance(obj["specializations"], list), "/specializations", "expected a list")
        specializations = tuple(
            _specialization_from_obj(s, f"/specializations/{i}")
            for i, s in enumerate(obj["specializations"])
        )
    unions: tuple[UnionDecl, ...] = ()
    if "unions" in obj:
        _expect(isinstance(obj["unions"], list), "/unions", "expected a list")
        unions = tuple(_union_from_obj(u, f"/unions/{i}") for i, u in enumerate(obj["unions"]))
    return ERDSchema(
        entities=entities,
        relationships=relationships,
        specializations=specializations,
        unions=unions,
    )
