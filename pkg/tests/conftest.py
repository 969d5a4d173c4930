import numpy as np
import pytest

from biostego.pipeline import run_pipeline
from biostego.synthetic import enrollment_print, impostor_print, six_termination_print


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def enrollment_image():
    return enrollment_print()[0]


@pytest.fixture(scope="session")
def impostor_image():
    return impostor_print()[0]


@pytest.fixture(scope="session")
def six_termination_image():
    return six_termination_print()[0]


@pytest.fixture(scope="session")
def enrollment_result(enrollment_image):
    return run_pipeline(enrollment_image, user_id="alice")


@pytest.fixture(scope="session")
def impostor_result(impostor_image):
    return run_pipeline(impostor_image, user_id="mallory")


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
