from __future__ import annotations

from pathlib import Path

import pytest

import contractcase as cc
from caselib import develop_case

FIXTURES = Path(__file__).parent / "fixtures"
EX_PATH = FIXTURES / "ex.cbd"


@pytest.fixture(scope="session")
def ex_source() -> str:
    return EX_PATH.read_text(encoding="utf-8")


@pytest.fixture
def ex_structure(ex_source) -> cc.SpecificationStructure:
    return cc.parse(ex_source, file=str(EX_PATH))


@pytest.fixture
def ex_case(ex_structure) -> cc.AssuranceCase:
    return cc.build_case(ex_structure)


@pytest.fixture
def developed_case(ex_case) -> cc.AssuranceCase:
    return develop_case(ex_case, axioms=("M_Csys__A1",))
