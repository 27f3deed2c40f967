import random

from hypothesis import given, settings
from hypothesis import strategies as st

from erd_mentor.model import ERDSchema
from erd_mentor.parser import format as format_schema
from erd_mentor.parser import parse
from conftest import GOLDEN_DIR
from randgen import random_schema


class TestHospitalFixture:
    def test_structure(self, hospital_schema):
        assert [e.name for e in hospital_schema.entities] == ["Patient", "HealthRecord"]
        assert [r.name for r in hospital_schema.relationships] == ["HasRecord"]

    def test_patient_attributes(self, hospital_schema):
        patient = hospital_schema.entity("Patient")
        assert patient.strength == "strong"
        assert [(a.name, a.kind) for a in patient.attributes] == [
            ("id", "key"), ("name", "simple"), ("address", "simple"),
            ("phone_number", "simple"),
        ]

    def test_health_record_attributes(self, hospital_schema):
        record = hospital_schema.entity("HealthRecord")
        assert record.strength == "weak"
        assert [(a.name, a.kind) for a in record.attributes] == [
            ("record_id", "partial_key"), ("disease", "simple"), ("date", "simple"),
            ("status", "simple"), ("description", "simple"),
        ]

    def test_relationship(self, hospital_schema):
        has_record = hospital_schema.relationship("HasRecord")
        assert has_record.identifying
        legs = [(p.entity, p.cardinality, p.total) for p in has_record.participants]
        assert legs == [("Patient", "1", False), ("HealthRecord", "N", True)]

    def test_spans_cover_declarations(self, hospital_source):
        result = parse(hospital_source)
        assert [s.name for s in result.spans] == ["Patient", "HealthRecord", "HasRecord"]
        for record in result.spans:
            snippet = hospital_source[record.span.start:record.span.end]
            assert record.name in snippet
        offsets = [(s.span.start, s.span.end) for s in result.spans]
        for (_, prev_end), (start, _) in zip(offsets, offsets[1:]):
            assert prev_end <= start  # non-overlapping, in order


def test_empty_input():
    result = parse("")
    assert result.ok
    assert result.schema == ERDSchema()
    assert result.spans == ()


def test_comments_and_trailing_separators():
    result = parse(
        "# people\n"
        "entity A { key id; }  # trailing separator fine\n"
        "entity B { key id }\n"
    )
    assert result.ok
    assert [e.name for e in result.schema.entities] == ["A", "B"]


def test_single_participant_is_an_error():
    result = parse("entity Patient { key id }\nrelationship HasRecord (Patient 1)\n")
    assert not result.ok
    [error] = result.errors
    assert error.code == "arity"
    assert "at least 2" in error.message


def test_four_participants_is_an_error():
    result = parse("entity A { key id }\nrelationship R (A 1, A N, A M, A 1)\n")
    assert [e.code for e in result.errors] == ["arity"]


def test_malformed_cardinality():
    result = parse("entity A { key id }\nrelationship R (A 7, A N)\n")
    [error] = result.errors
    assert error.code == "malformed_cardinality"
    assert error.line == 2


def test_duplicate_entity_name():
    result = parse("entity A { key id }\nentity A { key id }\n")
    [error] = result.errors
    assert error.code == "duplicate_name"
    assert len(result.schema.entities) == 1


def test_duplicate_relationship_name():
    result = parse("entity A { key id }\nrelationship R (A 1, A N)\nrelationship R (A 1, A M)\n")
    assert [e.code for e in result.errors] == ["duplicate_name"]


def test_reserved_word_as_name():
    result = parse("entity union { key id }\n")
    assert result.errors
    assert result.errors[0].code == "reserved_word"


def test_unbalanced_braces_at_eof():
    result = parse("entity A { key id; name\n")
    assert not result.ok
    assert all(error.line >= 1 and error.column >= 1 for error in result.errors)


def test_unknown_constraint():
    result = parse("entity A { key id }\nentity B { key id }\n"
                   "specialization of A { B } [sideways]\n")
    [error] = result.errors
    assert error.code == "unknown_constraint"


def test_union_needs_two_sources():
    result = parse("entity A { key id }\nentity B { key id }\nunion B of { A }\n")
    [error] = result.errors
    assert error.code == "arity"


def test_composite_cannot_carry_kind_keyword():
    result = parse("entity A { key addr(street; city) }\n")
    [error] = result.errors
    assert error.code == "composite_kind"


def test_composite_component_cannot_be_key():
    result = parse("entity A { addr(key street) }\n")
    [error] = result.errors
    assert error.code == "composite_key"


def test_nested_composites_parse():
    result = parse("entity A { key id; addr(street(number; name); city) }\n")
    assert result.ok
    addr = result.schema.entity("A").attributes[1]
    assert addr.kind == "composite"
    assert addr.children[0].kind == "composite"


def test_recursive_relationship_roles():
    result = parse("entity Employee { key id }\n"
                   "relationship Supervises (Employee as boss 1, Employee as report N)\n")
    assert result.ok
    legs = result.schema.relationship("Supervises").participants
    assert [(p.entity, p.role) for p in legs] == [("Employee", "boss"), ("Employee", "report")]


def test_error_recovery_reports_multiple_errors():
    result = parse(
        "entity A { key id }\n"
        "relationship R (A 7, A N)\n"
        "entity ( { }\n"
        "entity B { key id }\n"
    )
    assert len(result.errors) == 2
    assert [e.name for e in result.schema.entities] == ["A", "B"]


def test_error_positions_inside_input():
    text = "entity A { key id }\nrelationship ? (A 1, A N)\n"
    result = parse(text)
    assert result.errors
    lines = text.split("\n")
    for error in result.errors:
        assert 1 <= error.line <= len(lines)
        assert 1 <= error.column <= len(lines[error.line - 1]) + 1
        assert error.message


def test_cardinality_letters_can_name_entities():
    result = parse("entity N { key id }\nentity M { key id }\nrelationship R (N N, M 1)\n")
    assert result.ok
    legs = result.schema.relationship("R").participants
    assert [(p.entity, p.cardinality) for p in legs] == [("N", "N"), ("M", "1")]


def test_golden_format(hospital_schema):
    assert format_schema(hospital_schema) == (GOLDEN_DIR / "hospital.txt").read_text()


def test_format_empty_schema():
    assert format_schema(ERDSchema()) == ""


def test_format_matches_fixture_source(hospital_schema, hospital_source):
    # the shipped fixture is already in canonical form
    assert format_schema(hospital_schema) == hospital_source


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_parse_format_identity(seed):
    schema = random_schema(random.Random(seed))
    result = parse(format_schema(schema))
    assert result.ok, result.errors
    assert result.schema == schema


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet=st.characters(codec="utf-8"), max_size=200))
def test_parse_is_total(text):
    result = parse(text)  # must never raise
    for error in result.errors:
        assert error.line >= 1 and error.column >= 1
