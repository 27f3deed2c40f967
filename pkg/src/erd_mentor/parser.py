"""Parser and pretty-printer for the student-facing ERD text grammar.

Grammar (EBNF)::

    schema      := { entity | relationship | specialization | union } ;
    entity      := [ "weak" ] "entity" IDENT "{" attrs "}" ;
    attrs       := attr { ";" attr } [ ";" ] ;
    attr        := [ "key" | "partial_key" | "derived" | "multivalued" ]
                   IDENT [ "(" attrs ")" ] ;
    relationship:= [ "identifying" ] "relationship" IDENT
                   "(" participant { "," participant } ")" [ "{" attrs "}" ] ;
    participant := IDENT [ "as" IDENT ] CARD [ "total" ] ;
    CARD        := "1" | "N" | "M" ;
    specialization := "specialization" "of" IDENT "{" IDENT { "," IDENT } "}"
                      [ "[" constraint { "," constraint } "]" ] ;
    constraint  := "disjoint" | "overlapping" | "total" | "partial" ;
    union       := "union" IDENT "of" "{" IDENT { "," IDENT } "}" ;

Identifiers are ``[A-Za-z_][A-Za-z0-9_-]*`` and case-sensitive; grammar
keywords are reserved and cannot name elements. ``#`` starts a comment that
runs to the end of the line. Attribute lists tolerate a trailing ``;`` and
may be empty. An attribute with a parenthesized component list is composite
and cannot also carry a kind keyword.

The parser never raises on student input: every problem becomes a
:class:`ParseError` with a 1-based position, and recovery skips to the next
top-level keyword so one bad declaration does not hide the rest. Duplicate
entity or relationship names are parse errors (the rest of the pipeline
needs those namespaces unambiguous); every other design mistake is left for
``model.validate`` to report.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    AttributeDecl,
    EntityDecl,
    ERDSchema,
    Participation,
    RelationshipDecl,
    RESERVED_WORDS,
    SpecializationDecl,
    UnionDecl,
)

_KIND_KEYWORDS = ("key", "partial_key", "derived", "multivalued")
_DECL_KEYWORDS = frozenset({"weak", "entity", "identifying", "relationship", "specialization", "union"})
_CONSTRAINT_KEYWORDS = ("disjoint", "overlapping", "total", "partial")


@dataclass(frozen=True)
class ParseError:
    line: int
    column: int
    message: str
    code: str


@dataclass(frozen=True)
class SourceSpan:
    """Character offsets (start inclusive, end exclusive) of one declaration."""

    start: int
    end: int


@dataclass(frozen=True)
class SpanRecord:
    kind: str  # entity | relationship | specialization | union
    name: str
    span: SourceSpan


@dataclass(frozen=True)
class ParseResult:
    schema: ERDSchema
    spans: tuple[SpanRecord, ...]
    errors: tuple[ParseError, ...]

    @property
    def ok(self) -> bool:
        return not self.errors


@dataclass(frozen=True)
class _Token:
    kind: str  # ident | keyword | number | punct | eof
    text: str
    offset: int
    line: int
    column: int


_PUNCT = "{}()[];,"


def _lex(text: str) -> tuple[list[_Token], list[ParseError]]:
    tokens: list[_Token] = []
    errors: list[ParseError] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch in " \t\r":
            i, col = i + 1, col + 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
                col += 1
            continue
        if ch in _PUNCT:
            tokens.append(_Token("punct", ch, i, line, col))
            i, col = i + 1, col + 1
            continue
        if ch.isdigit():
            start, start_col = i, col
            while i < n and text[i].isdigit():
                i, col = i + 1, col + 1
            tokens.append(_Token("number", text[start:i], start, line, start_col))
            continue
        if ch.isalpha() or ch == "_":
            start, start_col = i, col
            while i < n and (text[i].isalnum() or text[i] in "_-"):
                i, col = i + 1, col + 1
            word = text[start:i]
            kind = "keyword" if word in RESERVED_WORDS else "ident"
            tokens.append(_Token(kind, word, start, line, start_col))
            continue
        errors.append(ParseError(line, col, f"illegal character {ch!r}", "illegal_character"))
        i, col = i + 1, col + 1
    tokens.append(_Token("eof", "", n, line, col))
    return tokens, errors


class _SkipDeclaration(Exception):
    """Internal signal: abandon the current declaration and resynchronize."""


class _Parser:
    def __init__(self, text: str):
        self.tokens, lex_errors = _lex(text)
        self.errors: list[ParseError] = list(lex_errors)
        self.pos = 0
        self.entities: list[EntityDecl] = []
        self.relationships: list[RelationshipDecl] = []
        self.specializations: list[SpecializationDecl] = []
        self.unions: list[UnionDecl] = []
        self.spans: list[SpanRecord] = []
        self.taken_names: dict[str, set[str]] = {"entity": set(), "relationship": set()}

    # -- token plumbing ----------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at_punct(self, ch: str) -> bool:
        tok = self.peek()
        return tok.kind == "punct" and tok.text == ch

    def at_keyword(self, *words: str) -> bool:
        tok = self.peek()
        return tok.kind == "keyword" and tok.text in words

    def error(self, tok: _Token, message: str, code: str) -> None:
        self.errors.append(ParseError(tok.line, tok.column, message, code))

    def fail(self, tok: _Token, message: str, code: str) -> None:
        self.error(tok, message, code)
        raise _SkipDeclaration

    def expect_punct(self, ch: str) -> _Token:
        tok = self.peek()
        if not self.at_punct(ch):
            found = tok.text or "end of input"
            self.fail(tok, f"expected {ch!r}, found {found!r}", "unexpected_token")
        return self.advance()

    def expect_keyword(self, word: str) -> _Token:
        tok = self.peek()
        if not self.at_keyword(word):
            found = tok.text or "end of input"
            self.fail(tok, f"expected keyword {word!r}, found {found!r}", "unexpected_token")
        return self.advance()

    def expect_ident(self, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != "ident":
            if tok.kind == "keyword":
                self.fail(tok, f"{tok.text!r} is a reserved word and cannot name {what}",
                          "reserved_word")
            found = tok.text or "end of input"
            self.fail(tok, f"expected {what} name, found {found!r}", "expected_name")
        return self.advance()

    def synchronize(self) -> None:
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                return
            if tok.kind == "keyword" and tok.text in _DECL_KEYWORDS:
                return
            self.advance()

    # -- grammar -----------------------------------------------------------

    def run(self) -> ParseResult:
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                break
            try:
                if self.at_keyword("weak", "entity"):
                    self.entity_decl()
                elif self.at_keyword("identifying", "relationship"):
                    self.relationship_decl()
                elif self.at_keyword("specialization"):
                    self.specialization_decl()
                elif self.at_keyword("union"):
                    self.union_decl()
                else:
                    found = tok.text or "end of input"
                    self.fail(tok, f"expected a declaration, found {found!r}", "unexpected_token")
            except _SkipDeclaration:
                self.synchronize()
        schema = ERDSchema(
            entities=tuple(self.entities),
            relationships=tuple(self.relationships),
            specializations=tuple(self.specializations),
            unions=tuple(self.unions),
        )
        return ParseResult(schema=schema, spans=tuple(self.spans), errors=tuple(self.errors))

    def end_offset(self) -> int:
        last = self.tokens[self.pos - 1] if self.pos else self.tokens[0]
        return last.offset + len(last.text)

    def claim_name(self, kind: str, tok: _Token) -> None:
        if tok.text in self.taken_names[kind]:
            self.fail(tok, f"duplicate {kind} name {tok.text!r}", "duplicate_name")
        self.taken_names[kind].add(tok.text)

    def entity_decl(self) -> None:
        start = self.peek().offset
        weak = bool(self.at_keyword("weak") and self.advance())
        self.expect_keyword("entity")
        name_tok = self.expect_ident("an entity")
        self.claim_name("entity", name_tok)
        self.expect_punct("{")
        attrs = self.attr_list(closing="}")
        self.expect_punct("}")
        try:
            entity = EntityDecl(name=name_tok.text, strength="weak" if weak else "strong",
                                attributes=attrs)
        except ValueError as exc:
            self.fail(name_tok, str(exc), "bad_declaration")
        self.entities.append(entity)
        self.spans.append(SpanRecord("entity", name_tok.text, SourceSpan(start, self.end_offset())))

    def attr_list(self, closing: str) -> tuple[AttributeDecl, ...]:
        attrs: list[AttributeDecl] = []
        if self.at_punct(closing):
            return ()
        while True:
            attrs.append(self.attr())
            if self.at_punct(";"):
                self.advance()
                if self.at_punct(closing):
                    break  # trailing separator
                continue
            break
        return tuple(attrs)

    def attr(self) -> AttributeDecl:
        kind = "simple"
        kind_tok = None
        if self.at_keyword(*_KIND_KEYWORDS):
            kind_tok = self.advance()
            kind = kind_tok.text
        name_tok = self.expect_ident("an attribute")
        children: tuple[AttributeDecl, ...] = ()
        if self.at_punct("("):
            self.advance()
            children = self.attr_list(closing=")")
            self.expect_punct(")")
            if not children:
                self.fail(name_tok, f"composite attribute {name_tok.text!r} has no components",
                          "empty_composite")
            if kind_tok is not None:
                self.fail(kind_tok,
                          f"attribute {name_tok.text!r} has components, so it is composite "
                          f"and cannot be {kind}", "composite_kind")
            for child in children:
                if child.kind in ("key", "partial_key"):
                    self.fail(name_tok,
                              f"component {child.name!r} of composite {name_tok.text!r} "
                              "may not be a key", "composite_key")
            kind = "composite"
        return AttributeDecl(name=name_tok.text, kind=kind, children=children)

    def relationship_decl(self) -> None:
        start = self.peek().offset
        identifying = bool(self.at_keyword("identifying") and self.advance())
        self.expect_keyword("relationship")
        name_tok = self.expect_ident("a relationship")
        self.claim_name("relationship", name_tok)
        self.expect_punct("(")
        participants = [self.participant()]
        while self.at_punct(","):
            self.advance()
            participants.append(self.participant())
        self.expect_punct(")")
        if len(participants) < 2:
            self.fail(name_tok, f"relationship {name_tok.text!r} needs at least 2 participants",
                      "arity")
        if len(participants) > 3:
            self.fail(name_tok, f"relationship {name_tok.text!r} has {len(participants)} "
                      "participants; at most 3 (ternary) are allowed", "arity")
        attrs: tuple[AttributeDecl, ...] = ()
        if self.at_punct("{"):
            self.advance()
            attrs = self.attr_list(closing="}")
            self.expect_punct("}")
        try:
            rel = RelationshipDecl(name=name_tok.text, identifying=identifying,
                                   participants=tuple(participants), attributes=attrs)
        except ValueError as exc:
            self.fail(name_tok, str(exc), "bad_declaration")
        self.relationships.append(rel)
        self.spans.append(SpanRecord("relationship", name_tok.text,
                                     SourceSpan(start, self.end_offset())))

    def participant(self) -> Participation:
        entity_tok = self.expect_ident("a participant entity")
        role = None
        if self.at_keyword("as"):
            self.advance()
            role = self.expect_ident("a participant role").text
        card_tok = self.peek()
        if (card_tok.kind == "number" and card_tok.text == "1") or (
                card_tok.kind == "ident" and card_tok.text in ("N", "M")):
            self.advance()
        else:
            found = card_tok.text or "end of input"
            self.fail(card_tok, f"malformed cardinality {found!r}; expected 1, N or M",
                      "malformed_cardinality")
        total = False
        if self.at_keyword("total"):
            self.advance()
            total = True
        return Participation(entity=entity_tok.text, cardinality=card_tok.text,
                             role=role, total=total)

    def ident_list(self, what: str, separator: str = ",") -> list[_Token]:
        names = [self.expect_ident(what)]
        while self.at_punct(separator):
            self.advance()
            names.append(self.expect_ident(what))
        return names

    def specialization_decl(self) -> None:
        start = self.peek().offset
        self.expect_keyword("specialization")
        self.expect_keyword("of")
        name_tok = self.expect_ident("a superclass entity")
        self.expect_punct("{")
        subs = self.ident_list("a subcategory")
        self.expect_punct("}")
        constraints: list[str] = []
        if self.at_punct("["):
            self.advance()
            while True:
                tok = self.peek()
                if self.at_keyword(*_CONSTRAINT_KEYWORDS):
                    constraints.append(self.advance().text)
                else:
                    found = tok.text or "end of input"
                    self.fail(tok, f"unknown specialization constraint {found!r}",
                              "unknown_constraint")
                if self.at_punct(","):
                    self.advance()
                    continue
                break
            self.expect_punct("]")
        try:
            spec = SpecializationDecl(name=name_tok.text,
                                      subcategories=tuple(t.text for t in subs),
                                      constraints=tuple(constraints))
        except ValueError as exc:
            self.fail(name_tok, str(exc), "bad_declaration")
        self.specializations.append(spec)
        self.spans.append(SpanRecord("specialization", name_tok.text,
                                     SourceSpan(start, self.end_offset())))

    def union_decl(self) -> None:
        start = self.peek().offset
        self.expect_keyword("union")
        name_tok = self.expect_ident("a union category")
        self.expect_keyword("of")
        self.expect_punct("{")
        sources = self.ident_list("a source entity")
        self.expect_punct("}")
        if len(sources) < 2:
            self.fail(name_tok, f"union {name_tok.text!r} needs at least two source entities",
                      "arity")
        try:
            union = UnionDecl(name=name_tok.text, sources=tuple(t.text for t in sources))
        except ValueError as exc:
            self.fail(name_tok, str(exc), "bad_declaration")
        self.unions.append(union)
        self.spans.append(SpanRecord("union", name_tok.text, SourceSpan(start, self.end_offset())))


def parse(text: str) -> ParseResult:
    """Parse grammar text into a schema.

    ``result.ok`` means the whole input was understood and every declaration
    carries a source span. With errors present, ``result.schema`` still holds
    the declarations that did parse, which is useful for diagnostics but not
    considered an accepted submission.
    """
    return _Parser(text).run()


def _format_attr(attr: AttributeDecl) -> str:
    if attr.kind == "composite":
        return f"{attr.name}({'; '.join(_format_attr(c) for c in attr.children)})"
    prefix = "" if attr.kind == "simple" else f"{attr.kind} "
    return f"{prefix}{attr.name}"


def _format_attrs_block(attrs: tuple[AttributeDecl, ...]) -> str:
    if not attrs:
        return "{ }"
    return "{ " + "; ".join(_format_attr(a) for a in attrs) + " }"


def _format_participant(part: Participation) -> str:
    pieces = [part.entity]
    if part.role is not None:
        pieces.append(f"as {part.role}")
    pieces.append(part.cardinality)
    if part.total:
        pieces.append("total")
    return " ".join(pieces)


def format(schema: ERDSchema) -> str:
    """Canonical text form; ``parse(format(s)).schema == s`` for any valid schema."""
    lines: list[str] = []
    for entity in schema.entities:
        prefix = "weak " if entity.strength == "weak" else ""
        lines.append(f"{prefix}entity {entity.name} {_format_attrs_block(entity.attributes)}")
    for rel in schema.relationships:
        prefix = "identifying " if rel.identifying else ""
        participants = ", ".join(_format_participant(p) for p in rel.participants)
        line = f"{prefix}relationship {rel.name} ({participants})"
        if rel.attributes:
            line += f" {_format_attrs_block(rel.attributes)}"
        lines.append(line)
    for spec in schema.specializations:
        line = f"specialization of {spec.name} {{ {', '.join(spec.subcategories)} }}"
        if spec.constraints:
            line += f" [{', '.join(spec.constraints)}]"
        lines.append(line)
    for union in schema.unions:
        lines.append(f"union {union.name} of {{ {', '.join(union.sources)} }}")
    if not lines:
        return ""
    return "\n".join(lines) + "\n"
