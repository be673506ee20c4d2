import pytest

from mubtools.biunimodular import assemble_bases, newton_census


@pytest.fixture(scope="session")
def census6():
    """One full N=6 multistart census, shared across the suite."""
    return newton_census(6, restarts=20000, seed=11)


@pytest.fixture(scope="session")
def assembled6(census6):
    return assemble_bases(census6)
