import time

import pytest

from automizer.grouprep import InputGroupA
from automizer.realize import run_pipeline


@pytest.fixture(scope="session")
def c2_run():
    """One full pipeline execution shared by every test that needs it."""
    t0 = time.time()
    cert = run_pipeline(InputGroupA.from_name("C2"))
    return cert, time.time() - t0


@pytest.fixture(scope="session")
def c2_cert(c2_run):
    return c2_run[0]
