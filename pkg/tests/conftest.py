import json
from pathlib import Path

import pytest

from erd_mentor.gateway import LlmConfig, LlmGateway, MockBackend
from erd_mentor.parser import parse
from erd_mentor.requirements import load_requirements
from erd_mentor.service import FeedbackService
from erd_mentor.store import DocumentStore

DATA_DIR = Path(__file__).parent / "data"
GOLDEN_DIR = Path(__file__).parent / "golden"

# hospital fixture with context extensions: a second relationship sharing the
# Patient entity, plus a staffing specialization
EXTENDED_SOURCE = """\
entity Patient { key id; name; address; phone_number }
weak entity HealthRecord { partial_key record_id; disease; date; status; description }
identifying relationship HasRecord (Patient 1, HealthRecord N total)
entity Hospital_staff { key staff_id; staff_name }
entity Nurse { }
entity Physician { }
specialization of Hospital_staff { Nurse, Physician } [disjoint]
relationship Treats (Physician 1, Patient N)
"""


@pytest.fixture(scope="session")
def hospital_source() -> str:
    return (DATA_DIR / "hospital.erd").read_text()


@pytest.fixture(scope="session")
def hospital_schema(hospital_source):
    result = parse(hospital_source)
    assert result.ok, result.errors
    return result.schema


@pytest.fixture(scope="session")
def flawed_source() -> str:
    return (DATA_DIR / "hospital_flawed.erd").read_text()


@pytest.fixture(scope="session")
def flawed_schema(flawed_source):
    result = parse(flawed_source)
    assert result.ok, result.errors
    return result.schema


@pytest.fixture(scope="session")
def extended_schema():
    result = parse(EXTENDED_SOURCE)
    assert result.ok, result.errors
    return result.schema


@pytest.fixture(scope="session")
def requirements_text() -> str:
    return (DATA_DIR / "requirements_hospital.json").read_text()


@pytest.fixture(scope="session")
def requirement_set(requirements_text):
    with pytest.warns(UserWarning):
        return load_requirements(requirements_text)


@pytest.fixture(scope="session")
def mock_script() -> dict:
    return json.loads((DATA_DIR / "mock_pipeline.json").read_text())


def make_gateway(script: dict, **config_overrides) -> LlmGateway:
    config = LlmConfig(**config_overrides)
    return LlmGateway(MockBackend(script), config, sleep=lambda _: None)


def make_service(script: dict, **config_overrides) -> FeedbackService:
    return FeedbackService(DocumentStore(":memory:"), make_gateway(script, **config_overrides))


@pytest.fixture()
def pipeline_service(mock_script) -> FeedbackService:
    return make_service(mock_script)
