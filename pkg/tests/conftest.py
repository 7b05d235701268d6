import pytest

from qformula.samples import formula_corpus


@pytest.fixture(scope="session")
def corpus():
    """110 seeded random formulas shared by the heavier suites."""
    return formula_corpus(110)
