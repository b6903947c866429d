import pytest
from hypothesis import settings

from glsov.chain import ChainSpec
from glsov.yangian import build_monodromy

settings.register_profile("glsov", deadline=None, max_examples=40)
settings.load_profile("glsov")

DEFINING = dict(N=3, L=2, A=1, S=1, theta=["0", "1/3"], z=[2, 3, 5])


@pytest.fixture(scope="session")
def defining_spec():
    return ChainSpec(**DEFINING)


@pytest.fixture(scope="session")
def defining_m(defining_spec):
    return build_monodromy(defining_spec)


@pytest.fixture(scope="session")
def n2s2_m():
    return build_monodromy(ChainSpec(2, 2, S=2))


ACCEPTANCE: dict = {}


@pytest.fixture
def criterion():
    """Record one acceptance line: criterion(k, ok, detail)."""
    def record(k, ok, detail):
        line = f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE[k] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
