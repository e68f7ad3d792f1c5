import numpy as np
import pytest

from approvalmaps import Election


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def small_election():
    # 3 candidates, 2 voters: approvals {0,1} and {0}
    return Election(3, (frozenset({0, 1}), frozenset({0})))


@pytest.fixture
def pabulib_text():
    return (
        "META\n"
        "key;value\n"
        "description;synthetic fixture\n"
        "country;Testland\n"
        "unit;district 9\n"
        "PROJECTS\n"
        "project_id;cost;name\n"
        "P1;1000;Park\n"
        "P2;500;Bench\n"
        "VOTES\n"
        "voter_id;vote\n"
        "V1;P1,P2\n"
        "V2;P2\n"
    )
