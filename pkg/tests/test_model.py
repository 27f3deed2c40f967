import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from erd_mentor.model import (
    AttributeDecl,
    EntityDecl,
    ERDSchema,
    MalformedDocument,
    Participation,
    RelationshipDecl,
    SchemaMismatch,
    SpecializationDecl,
    UnionDecl,
    VALIDATION_RULES,
    from_json,
    to_json,
    validate,
)
from randgen import random_schema


def entity(name, strength="strong", attrs=()):
    return EntityDecl(name=name, strength=strength, attributes=tuple(attrs))


def rel(name, legs, identifying=False, attrs=()):
    return RelationshipDecl(
        name=name,
        identifying=identifying,
        participants=tuple(Participation(entity=e, cardinality=c, total=t) for e, c, t in legs),
        attributes=tuple(attrs),
    )


class TestConstruction:
    def test_unknown_attribute_kind_rejected(self):
        with pytest.raises(ValueError):
            AttributeDecl("x", kind="mystery")

    def test_reserved_word_rejected_as_name(self):
        with pytest.raises(ValueError):
            EntityDecl(name="entity")

    def test_bad_identifier_rejected(self):
        with pytest.raises(ValueError):
            EntityDecl(name="1badname")
        with pytest.raises(ValueError):
            EntityDecl(name="")

    def test_composite_needs_children(self):
        with pytest.raises(ValueError):
            AttributeDecl("address", kind="composite")

    def test_children_only_on_composite(self):
        child = AttributeDecl("street")
        with pytest.raises(ValueError):
            AttributeDecl("address", kind="key", children=(child,))

    def test_composite_child_may_not_be_key(self):
        with pytest.raises(ValueError):
            AttributeDecl("address", kind="composite",
                          children=(AttributeDecl("street", kind="key"),))

    def test_relationship_arity_bounds(self):
        one = (("A", "1", False),)
        four = (("A", "1", False),) * 4
        with pytest.raises(ValueError):
            rel("R", one)
        with pytest.raises(ValueError):
            rel("R", four)

    def test_bad_cardinality(self):
        with pytest.raises(ValueError):
            Participation(entity="A", cardinality="2")

    def test_union_needs_two_sources(self):
        with pytest.raises(ValueError):
            UnionDecl(name="U", sources=("A",))

    def test_specialization_needs_subcategories(self):
        with pytest.raises(ValueError):
            SpecializationDecl(name="S", subcategories=())

    def test_unknown_constraint_rejected(self):
        with pytest.raises(ValueError):
            SpecializationDecl(name="S", subcategories=("A",), constraints=("sideways",))


class TestValidate:
    def test_hospital_fixture_is_clean(self, hospital_schema):
        assert validate(hospital_schema) == []

    def test_unresolved_participant(self):
        schema = ERDSchema(
            entities=(entity("Patient"),),
            relationships=(rel("HasRecord", (("Patient", "1", False), ("Docter", "N", False))),),
        )
        codes = [v.code for v in validate(schema)]
        assert "UnresolvedEntity" in codes
        [violation] = [v for v in validate(schema) if v.code == "UnresolvedEntity"]
        assert "Docter" in violation.location

    def test_weak_entity_with_key_via_parser_fixture(self):
        from erd_mentor.parser import parse

        result = parse("weak entity W { key id }\n"
                       "entity A { key id }\n"
                       "identifying relationship R (A 1, W N total)\n")
        assert result.ok
        codes = [v.code for v in validate(result.schema)]
        assert codes == ["WeakEntityHasKey"]

    def test_validate_never_raises_on_random_schemas(self):
        rng = random.Random(20240917)
        for _ in range(100):
            validate(random_schema(rng))


# one breaking fixture and one clean fixture per validation rule
A = entity("A", attrs=[AttributeDecl("id", "key")])
B = entity("B", attrs=[AttributeDecl("bid", "key")])
W = entity("W", strength="weak", attrs=[AttributeDecl("pid", "partial_key")])
IDENT_REL = rel("Owns", (("A", "1", False), ("W", "N", True)), identifying=True)

RULE_FIXTURES = {
    "DuplicateEntityName": (
        ERDSchema(entities=(A, entity("A"))),
        ERDSchema(entities=(A, B)),
    ),
    "DuplicateRelationshipName": (
        ERDSchema(entities=(A, B), relationships=(
            rel("R", (("A", "1", False), ("B", "N", False))),
            rel("R", (("B", "1", False), ("A", "N", False))),
        )),
        ERDSchema(entities=(A, B), relationships=(
            rel("R", (("A", "1", False), ("B", "N", False))),
            rel("S", (("B", "1", False), ("A", "N", False))),
        )),
    ),
    "DuplicateAttributeName": (
        ERDSchema(entities=(entity("A", attrs=[AttributeDecl("id", "key"), AttributeDecl("id")]),)),
        ERDSchema(entities=(A,)),
    ),
    "DuplicateParticipant": (
        ERDSchema(entities=(A, B), relationships=(
            rel("R", (("A", "1", False), ("A", "N", False))),)),
        ERDSchema(entities=(A, B), relationships=(
            RelationshipDecl("R", participants=(
                Participation("A", "1", role="boss"),
                Participation("A", "N", role="minion"),
            )),)),
    ),
    "UnresolvedEntity": (
        ERDSchema(entities=(A,), unions=(UnionDecl("A", sources=("X", "Y")),)),
        ERDSchema(entities=(A, B, entity("C")),
                  unions=(UnionDecl("C", sources=("A", "B")),)),
    ),
    "StrongEntityMissingKey": (
        ERDSchema(entities=(entity("A", attrs=[AttributeDecl("x")]),)),
        ERDSchema(entities=(entity("NoAttrs"), A)),
    ),
    "StrongEntityHasPartialKey": (
        ERDSchema(entities=(entity("A", attrs=[AttributeDecl("id", "key"),
                                               AttributeDecl("p", "partial_key")]),)),
        ERDSchema(entities=(A,)),
    ),
    "WeakEntityHasKey": (
        ERDSchema(entities=(A, entity("V", strength="weak", attrs=[AttributeDecl("id", "key")])),
                  relationships=(rel("R", (("A", "1", False), ("V", "N", True)), identifying=True),)),
        ERDSchema(entities=(A, W), relationships=(IDENT_REL,)),
    ),
    "WeakEntityExtraPartialKey": (
        ERDSchema(entities=(A, entity("V", strength="weak",
                                      attrs=[AttributeDecl("p1", "partial_key"),
                                             AttributeDecl("p2", "partial_key")])),
                  relationships=(rel("R", (("A", "1", False), ("V", "N", True)), identifying=True),)),
        ERDSchema(entities=(A, W), relationships=(IDENT_REL,)),
    ),
    "WeakEntityNotIdentified": (
        ERDSchema(entities=(A, W)),
        ERDSchema(entities=(A, W), relationships=(IDENT_REL,)),
    ),
    "IdentifyingWithoutWeakTotal": (
        ERDSchema(entities=(A, B), relationships=(
            rel("R", (("A", "1", False), ("B", "N", False)), identifying=True),)),
        ERDSchema(entities=(A, W), relationships=(IDENT_REL,)),
    ),
    "SpecializationConstraintConflict": (
        ERDSchema(entities=(A, B),
                  specializations=(SpecializationDecl("A", ("B",),
                                                      ("disjoint", "overlapping")),)),
        ERDSchema(entities=(A, B),
                  specializations=(SpecializationDecl("A", ("B",), ("disjoint", "total")),)),
    ),
    "DuplicateSubcategory": (
        ERDSchema(entities=(A, B), specializations=(SpecializationDecl("A", ("B", "B")),)),
        ERDSchema(entities=(A, B), specializations=(SpecializationDecl("A", ("B",)),)),
    ),
    "DuplicateUnionSource": (
        ERDSchema(entities=(A, B, entity("C")), unions=(UnionDecl("C", ("A", "A")),)),
        ERDSchema(entities=(A, B, entity("C")), unions=(UnionDecl("C", ("A", "B")),)),
    ),
}


def test_rule_table_is_complete():
    assert set(RULE_FIXTURES) == set(VALIDATION_RULES)


@pytest.mark.parametrize("code", sorted(VALIDATION_RULES))
def test_rule_positive_and_negative(code):
    breaking, clean = RULE_FIXTURES[code]
    assert code in [v.code for v in validate(breaking)], f"{code} not reported"
    assert code not in [v.code for v in validate(clean)], f"{code} falsely reported"


HOSPITAL_STAFF_FRAGMENT = """
"specializations": [{
  "name": "Hospital_staff",
  "subcategories": [
    {"name": "Nurse"},
    {"name": "Physician"} ],
  "type": ["disjoint"]
}]
"""


class TestToJson:
    def test_specialization_fragment_byte_for_byte_modulo_whitespace(self):
        schema = ERDSchema(
            entities=(entity("Hospital_staff"), entity("Nurse"), entity("Physician")),
            specializations=(SpecializationDecl("Hospital_staff", ("Nurse", "Physician"),
                                                ("disjoint",)),),
        )
        expected = json.loads("{" + HOSPITAL_STAFF_FRAGMENT + "}")["specializations"]
        actual = json.loads(to_json(schema))["specializations"]
        compact = dict(separators=(",", ":"), sort_keys=False)
        assert json.dumps(actual, **compact) == json.dumps(expected, **compact)

    def test_empty_schema(self):
        assert json.loads(to_json(ERDSchema())) == {"entities": [], "relationships": []}
        assert "specializations" not in to_json(ERDSchema())

    def test_golden_hospital(self, hospital_schema):
        from conftest import GOLDEN_DIR

        assert to_json(hospital_schema) + "\n" == (GOLDEN_DIR / "hospital.json").read_text()

    def test_byte_stable(self, hospital_schema):
        assert to_json(hospital_schema) == to_json(hospital_schema)

    def test_descriptive_key_names(self, hospital_schema):
        doc = json.loads(to_json(hospital_schema))
        participant = doc["relationships"][0]["participants"][0]
        assert set(participant) == {"entity", "cardinality", "participation"}

    def test_role_serialized_when_present(self):
        schema = ERDSchema(
            entities=(A,),
            relationships=(RelationshipDecl("Manages", participants=(
                Participation("A", "1", role="boss"),
                Participation("A", "N", role="minion"),
            )),),
        )
        doc = json.loads(to_json(schema))
        assert doc["relationships"][0]["participants"][0]["role"] == "boss"


class TestFromJson:
    def test_round_trip_hospital(self, hospital_schema):
        assert from_json(to_json(hospital_schema)) == hospital_schema

    def test_type_clash_reports_pointer(self):
        with pytest.raises(SchemaMismatch) as err:
            from_json('{"entities": 5, "relationships": []}')
        assert err.value.path == "/entities"

    def test_not_json(self):
        with pytest.raises(MalformedDocument):
            from_json("this is prose")

    def test_unknown_key_rejected_with_path(self):
        with pytest.raises(SchemaMismatch) as err:
            from_json('{"entities": [], "relationships": [], "extras": []}')
        assert err.value.path == "/extras"

    def test_fragment_in_minimal_document(self):
        doc = ('{"entities": [{"name": "Hospital_staff", "type": "strong", "attributes": []},'
               ' {"name": "Nurse", "type": "strong", "attributes": []},'
               ' {"name": "Physician", "type": "strong", "attributes": []}],'
               ' "relationships": [],' + HOSPITAL_STAFF_FRAGMENT + "}")
        schema = from_json(doc)
        assert schema.specializations == (
            SpecializationDecl("Hospital_staff", ("Nurse", "Physician"), ("disjoint",)),
        )

    def test_bad_nested_value_path(self):
        doc = ('{"entities": [{"name": "A", "type": "strong",'
               ' "attributes": [{"name": "x", "type": "sparkly"}]}], "relationships": []}')
        with pytest.raises(SchemaMismatch) as err:
            from_json(doc)
        assert err.value.path == "/entities/0/attributes/0"


@settings(max_examples=150, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_json_round_trip_property(seed):
    schema = random_schema(random.Random(seed))
    assert from_json(to_json(schema)) == schema
