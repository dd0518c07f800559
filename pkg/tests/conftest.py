import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from trc_toolkit.querygen import build_instance

PELIKAN_CONTEXT = (
    "Jaroslav Pelikan worked for Valparaiso University from January 1946 to January 1949. "
    "Jaroslav Pelikan worked for Concordia Seminary from January 1949 to January 1953."
)

PELIKAN_RECORD = {
    "id": "pelikan-1",
    "question": "Which employer did Jaroslav Pelikan work for before Concordia Seminary?",
    "subject": "Jaroslav Pelikan",
    "relation": "employer",
    "fact_context": PELIKAN_CONTEXT,
    "answer": "Valparaiso University",
}

PELIKAN_QUERY_ABSOLUTE = "Which employer did Jaroslav Pelikan work for right before January 1949?"
PELIKAN_QUERY_CHRONOLOGICAL = "Which employer did Jaroslav Pelikan work for right before Concordia Seminary?"
PELIKAN_PATHWAY_TIME = (
    "because jaroslav pelikan worked for concordia seminary from january 1949 "
    "to january 1953, and right before january 1949, jaroslav pelikan worked "
    "for valparaiso university."
)
PELIKAN_PATHWAY_EVENT = (
    "because jaroslav pelikan worked for concordia seminary from january 1949 "
    "to january 1953, and right before concordia seminary, jaroslav pelikan "
    "worked for valparaiso university."
)


@pytest.fixture
def pelikan_record():
    return dict(PELIKAN_RECORD)


@pytest.fixture
def pelikan_instance():
    return build_instance(dict(PELIKAN_RECORD))


@pytest.fixture(scope="session")
def synthetic_dataset():
    """A ~200-instance dataset built from a seeded synthetic KB."""
    from synthkb import make_dataset

    instances, _ = make_dataset(60, seed=11)
    assert len(instances) >= 200
    return instances[:200]
