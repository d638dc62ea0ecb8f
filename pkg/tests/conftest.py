import pytest

from multisink.gluing import GluingSpec, assemble


@pytest.fixture(scope="session")
def two_sink_19():
    return assemble(GluingSpec.parse("P,M,P,M"), 1.9)


@pytest.fixture(scope="session")
def two_sink_125():
    return assemble(GluingSpec.parse("P,M,P,M"), 1.25)


@pytest.fixture(scope="session")
def four_minus_15():
    return assemble(GluingSpec.parse("M,M,M,M"), 1.5)


@pytest.fixture(scope="session")
def shear_15():
    return assemble(GluingSpec.parse("P,P"), 1.5)
