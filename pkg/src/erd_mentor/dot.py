"""Graphviz DOT export for schemas and pruned views.

Drawing conventions (frozen by the golden files):

* entity: box, weak entities get ``peripheries=2``
* relationship: diamond, identifying relationships get ``peripheries=2``
* attribute: ellipse; key labels are underlined; partial keys combine the
  underlined label with a dashed outline (DOT has no dashed underline);
  derived attributes use a dashed outline alone; multivalued use
  ``peripheries=2``; composite attributes link to their component ellipses
* participation: one undirected edge labeled with the cardinality,
  ``penwidth=2`` for total participation
* specialization: circle labeled ``d``/``o`` between superclass and
  subcategories; union: circle labeled ``U`` between sources and category

Output is deterministic: declaration order in, byte-equal text out.
"""

from __future__ import annotations

import re
from xml.sax.saxutils import escape as _xml_escape

from .model import AttributeDecl, ERDSchema, validate

_BARE_ID_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_DOT_KEYWORDS = frozenset({"node", "edge", "graph", "digraph", "subgraph", "strict"})


class UnrenderableView(Exception):
    """The view contains dangling references and cannot be drawn."""


class _IdAllocator:
    """Hands out unique DOT node ids, preferring the element's own name."""

    def __init__(self):
        self._taken: set[str] = set()

    def allocate(self, preferred: str) -> str:
        candidate = preferred
        serial = 1
        while candidate in self._taken:
            serial += 1
            candidate = f"{preferred}_{serial}"
        self._taken.add(candidate)
        return candidate


def _render_id(node_id: str) -> str:
    if _BARE_ID_RE.match(node_id) and node_id.lower() not in _DOT_KEYWORDS:
        return node_id
    escaped = node_id.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def _label(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"')
    return f'label="{escaped}"'


def _underlined_label(text: str) -> str:
    return f"label=<<u>{_xml_escape(text)}</u>>"


def _attribute_node(attr: AttributeDecl) -> str:
    parts = ["shape=ellipse"]
    if attr.kind == "multivalued":
        parts.append("peripheries=2")
    if attr.kind in ("derived", "partial_key"):
        parts.append("style=dashed")
    if attr.kind in ("key", "partial_key"):
        parts.append(_underlined_label(attr.name))
    else:
        parts.append(_label(attr.name))
    return ", ".join(parts)


def to_dot(view) -> str:
    """Render a schema (or a pruned view's schema) as a DOT digraph.

    Raises :class:`UnrenderableView` when the diagram has unresolved entity
    references; every other validation problem still renders, students need
    to see what they actually drew.
    """
    schema: ERDSchema = getattr(view, "schema", view)
    dangling = [v for v in validate(schema) if v.code == "UnresolvedEntity"]
    if dangling:
        raise UnrenderableView(
            "diagram has dangling references: " + "; ".join(v.message for v in dangling)
        )

    ids = _IdAllocator()
    lines: list[str] = []

    def emit_attributes(owner_id: str, attrs) -> None:
        for attr in attrs:
            attr_id = ids.allocate(f"{owner_id}_{attr.name}")
            lines.append(f"  {_render_id(attr_id)} [{_attribute_node(attr)}];")
            lines.append(f"  {_render_id(owner_id)} -> {_render_id(attr_id)} [dir=none];")
            emit_attributes(attr_id, attr.children)

    entity_ids: dict[str, str] = {}
    for entity in schema.entities:
        entity_id = ids.allocate(entity.name)
        entity_ids.setdefault(entity.name, entity_id)
        shape = "shape=box, peripheries=2" if entity.strength == "weak" else "shape=box"
        lines.append(f"  {_render_id(entity_id)} [{shape}, {_label(entity.name)}];")
        emit_attributes(entity_id, entity.attributes)

    for rel in schema.relationships:
        rel_id = ids.allocate(rel.name)
        shape = "shape=diamond, peripheries=2" if rel.identifying else "shape=diamond"
        lines.append(f"  {_render_id(rel_id)} [{shape}, {_label(rel.name)}];")
        emit_attributes(rel_id, rel.attributes)
        for part in rel.participants:
            attrs = [_label(part.cardinality), "dir=none"]
            if part.total:
                attrs.append("penwidth=2")
            target = entity_ids[part.entity]
            lines.append(f"  {_render_id(rel_id)} -> {_render_id(target)} [{', '.join(attrs)}];")

    for spec in schema.specializations:
        spec_id = ids.allocate(f"spec_{spec.name}")
        if "disjoint" in spec.constraints:
            mark = "d"
        elif "overlapping" in spec.constraints:
            mark = "o"
        else:
            mark = ""
        lines.append(f"  {_render_id(spec_id)} [shape=circle, {_label(mark)}];")
        super_attrs = ["dir=none"]
        if "total" in spec.constraints:
            super_attrs.append("penwidth=2")
        super_id = entity_ids[spec.name]
        lines.append(f"  {_render_id(super_id)} -> {_render_id(spec_id)} [{', '.join(super_attrs)}];")
        for sub in spec.subcategories:
            lines.append(f"  {_render_id(spec_id)} -> {_render_id(entity_ids[sub])} [dir=none];")

    for union in schema.unions:
        union_id = ids.allocate(f"union_{union.name}")
        lines.append(f"  {_render_id(union_id)} [shape=circle, {_label('U')}];")
        for source in union.sources:
            lines.append(f"  {_render_id(entity_ids[source])} -> {_render_id(union_id)} [dir=none];")
        lines.append(f"  {_render_id(union_id)} -> {_render_id(entity_ids[union.name])} [dir=none];")

    if not lines:
        return "digraph erd { }\n"
    return "digraph erd {\n" + "\n".join(lines) + "\n}\n"
