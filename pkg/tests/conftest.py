import pytest

import settings
from scenarios import preset


@pytest.fixture
def samples_dir():
    return settings.SAMPLE_PROJECTS_DIR


@pytest.fixture
def egs_baseline():
    return preset('egs', 'baseline')


@pytest.fixture
def wells_baseline():
    return preset('wells', 'baseline')


@pytest.fixture
def gshp_baseline():
    return preset('gshp', 'baseline')
