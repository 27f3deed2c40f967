import random

import pytest

from erd_mentor.model import validate
from erd_mentor.parser import parse
from erd_mentor.prune import PrunedView, UnknownRelationship, list_relationships, prune
from randgen import random_schema


def names(decls):
    return [d.name for d in decls]


class TestIsolatedRelationship:
    def test_hospital_has_record(self, hospital_schema):
        view = prune(hospital_schema, "HasRecord")
        assert names(view.schema.entities) == ["Patient", "HealthRecord"]
        assert names(view.schema.relationships) == ["HasRecord"]
        assert view.schema.specializations == ()
        assert view.schema.unions == ()
        assert view.focus == "HasRecord"

    def test_reasons(self, hospital_schema):
        view = prune(hospital_schema, "HasRecord")
        assert view.included_reason == {
            "relationship:HasRecord": "focus",
            "entity:Patient": "participant",
            "entity:HealthRecord": "participant",
        }

    def test_attributes_never_pruned(self, hospital_schema):
        view = prune(hospital_schema, "HasRecord")
        patient = view.schema.entity("Patient")
        assert len(patient.attributes) == 4


class TestContextExtension:
    def test_specialization_context(self, extended_schema):
        view = prune(extended_schema, "Treats")
        assert set(names(view.schema.entities)) == {
            "Patient", "Physician", "Hospital_staff", "Nurse"}
        assert names(view.schema.relationships) == ["Treats"]
        assert names(view.schema.specializations) == ["Hospital_staff"]
        # entities pulled in by the specialization carry the context reason
        assert view.included_reason["entity:Hospital_staff"] == "specialization_context"
        assert view.included_reason["entity:Nurse"] == "specialization_context"
        assert view.included_reason["specialization:Hospital_staff"] == "specialization_context"
        # HasRecord's legs are not both in the core set, so it stays out
        assert "HealthRecord" not in names(view.schema.entities)

    def test_shared_relationship_included(self):
        source = parse(
            "entity A { key id }\n"
            "entity B { key id }\n"
            "relationship R1 (A 1, B N)\n"
            "relationship R2 (A M, B M)\n"
        ).schema
        view = prune(source, "R1")
        assert names(view.schema.relationships) == ["R1", "R2"]
        assert view.included_reason["relationship:R1"] == "focus"
        assert view.included_reason["relationship:R2"] == "shared_relationship"

    def test_recursive_relationship_shares(self):
        source = parse(
            "entity E { key id }\n"
            "entity F { key id }\n"
            "relationship R1 (E 1, F N)\n"
            "relationship Self (E as a 1, E as b N)\n"
        ).schema
        view = prune(source, "R1")
        assert "Self" in names(view.schema.relationships)

    def test_ternary_with_outside_leg_excluded(self):
        source = parse(
            "entity A { key id }\n"
            "entity B { key id }\n"
            "entity C { key id }\n"
            "relationship R1 (A 1, B N)\n"
            "relationship T (A 1, B 1, C 1)\n"
        ).schema
        view = prune(source, "R1")
        assert names(view.schema.relationships) == ["R1"]
        assert "C" not in names(view.schema.entities)

    def test_union_context(self):
        source = parse(
            "entity Person { key id }\n"
            "entity Bank { key id }\n"
            "entity Owner { key id }\n"
            "entity Car { key vin }\n"
            "relationship Owns (Owner 1, Car N)\n"
            "union Owner of { Person, Bank }\n"
        ).schema
        view = prune(source, "Owns")
        assert set(names(view.schema.entities)) == {"Owner", "Car", "Person", "Bank"}
        assert names(view.schema.unions) == ["Owner"]
        assert view.included_reason["entity:Person"] == "union_context"
        assert view.included_reason["union:Owner"] == "union_context"

    def test_context_entities_do_not_trigger_more_relationships(self, extended_schema):
        # Nurse arrives via the specialization; a relationship touching only
        # context entities must stay excluded (single round, no fixpoint)
        source = parse(
            "entity Patient { key id }\n"
            "entity Physician { key id }\n"
            "entity Nurse { key id }\n"
            "entity Hospital_staff { key sid }\n"
            "specialization of Hospital_staff { Nurse, Physician }\n"
            "relationship Treats (Physician 1, Patient N)\n"
            "relationship Assists (Nurse 1, Physician N)\n"
        ).schema
        view = prune(source, "Treats")
        assert "Assists" not in names(view.schema.relationships)
        assert "Nurse" in names(view.schema.entities)


class TestProperties:
    def test_unknown_relationship(self, hospital_schema):
        with pytest.raises(UnknownRelationship):
            prune(hospital_schema, "Foo")

    def test_subgraph_and_closure_on_random_schemas(self):
        rng = random.Random(424242)
        for _ in range(300):
            source = random_schema(rng, min_relationships=1)
            focus = rng.choice(source.relationships).name
            view = prune(source, focus)
            assert_subgraph(view, source)
            assert_participant_closure(view)
            focus_reasons = [r for r in view.included_reason.values() if r == "focus"]
            assert focus_reasons == ["focus"]

    def test_idempotent_when_extension_stable(self, extended_schema):
        first = prune(extended_schema, "Treats")
        second = prune(first.schema, "Treats")
        assert second.schema == first.schema

    def test_idempotent_on_isolated_core(self, hospital_schema):
        first = prune(hospital_schema, "HasRecord")
        second = prune(first.schema, "HasRecord")
        assert second.schema == first.schema


def assert_subgraph(view: PrunedView, source) -> None:
    for entity in view.schema.entities:
        assert entity in source.entities
    for rel in view.schema.relationships:
        assert rel in source.relationships
    for spec in view.schema.specializations:
        assert spec in source.specializations
    for union in view.schema.unions:
        assert union in source.unions


def assert_participant_closure(view: PrunedView) -> None:
    included = {entity.name for entity in view.schema.entities}
    for rel in view.schema.relationships:
        for leg in rel.participants:
            assert leg.entity in included
    for spec in view.schema.specializations:
        assert spec.name in included
        assert set(spec.subcategories) <= included
    for union in view.schema.unions:
        assert union.name in included
        assert set(union.sources) <= included


class TestListRelationships:
    def test_hospital(self, hospital_schema):
        assert list_relationships(hospital_schema) == ["HasRecord"]

    def test_empty(self):
        from erd_mentor.model import ERDSchema

        assert list_relationships(ERDSchema()) == []

    def test_declaration_order(self):
        source = parse(
            "entity A { key id }\n"
            "relationship Zeta (A 1, A N)\n"
            "relationship Alpha (A 1, A N)\n"
            "relationship Mid (A 1, A N)\n"
        ).schema
        assert list_relationships(source) == ["Zeta", "Alpha", "Mid"]


def test_validation_agnostic(hospital_schema):
    # pruning must work on flawed diagrams too; it never consults validate
    source = parse(
        "entity A { x }\n"           # strong entity without key
        "weak entity W { key id }\n"  # weak entity with a key
        "relationship R (A 1, W N)\n"
    ).schema
    assert validate(source) != []
    view = prune(source, "R")
    assert set(d.name for d in view.schema.entities) == {"A", "W"}
