import pytest
from clbench.formula import parse_formula
from clbench.game import Copycat, default_pairing, run_counterstrategy

GOLDEN = "?~P | !P"


@pytest.fixture(scope="session")
def golden_formula():
    return parse_formula(GOLDEN)


@pytest.fixture(scope="session")
def golden_run(golden_formula):
    f = golden_formula
    return run_counterstrategy(f, Copycat(f, default_pairing(f)), 2)
