from __future__ import annotations

import pytest

from bwspin2.clifford import alternative_basis, build_dirac_basis
from bwspin2.derive import DerivationContext

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def basis():
    return build_dirac_basis()


@pytest.fixture(scope="session")
def alt_basis():
    return alternative_basis()


@pytest.fixture(scope="session")
def ctx(basis):
    return DerivationContext.symbolic(basis)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
