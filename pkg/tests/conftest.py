import pytest

from concatft.codes import build_rm15, build_steane, concatenate
from concatft.gadgets import GADGET_BUILDERS, build_exrec


@pytest.fixture(scope="session")
def steane():
    return build_steane()


@pytest.fixture(scope="session")
def rm15():
    return build_rm15()


@pytest.fixture(scope="session")
def layout(steane, rm15):
    return concatenate(steane, rm15)


@pytest.fixture(scope="session")
def exrecs(layout):
    return {name: build_exrec(build(layout)) for name, build in GADGET_BUILDERS.items()}
