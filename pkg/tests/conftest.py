import json
from pathlib import Path

import pytest

import twistlab as tl

FIXTURE_DIR = Path(__file__).parent / "fixtures"

FINITE_FIXTURES = ["z2-swap", "z2-1234", "s3-natural", "z4-regular", "pauli-z2z2"]
ALL_FIXTURES = FINITE_FIXTURES + ["z2-trivial-scalars", "free2-trivial"]


def fixture_path(name: str) -> Path:
    return FIXTURE_DIR / f"{name}.json"


_CACHE: dict = {}


def load_fixture(name: str) -> "tl.SystemDescription":
    """Parse once per session so every test shares the same group/algebra
    object identities."""
    if name not in _CACHE:
        _CACHE[name] = tl.parse_description(fixture_path(name))
    return _CACHE[name]


@pytest.fixture(scope="session")
def free2_system():
    return load_fixture("free2-trivial").system


@pytest.fixture(scope="session")
def free2_x(free2_system):
    g = free2_system.group
    a = g.generator(0)
    return tl.CrossedElement.from_terms(free2_system, [(a, 1.0), (tl.inv(a), 1.0)])


@pytest.fixture(scope="session", params=FINITE_FIXTURES)
def finite_fixture(request):
    return load_fixture(request.param)
