import pytest

from bellcert.scenario import CHSH_SCENARIO


@pytest.fixture
def chsh_scenario():
    return CHSH_SCENARIO
