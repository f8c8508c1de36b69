"""Shared fixtures: YAML case tables, settings isolation, the field corpus."""

from pathlib import Path

import numpy as np
import pytest
import yaml

from bseries_toolkit.catalog import get_field
from bseries_toolkit.config import get_settings, set_overrides

CASES_DIR = Path(__file__).parent / "cases"
TABLEAU_DIR = Path(__file__).parent.parent / "tableaux"

CORPUS = ["poly1d", "linear2d", "lotka", "pendulum"]


def load_cases(path: Path) -> dict[str, dict]:
    """Cases from one YAML file, keyed by id."""
    with open(path) as f:
        data = yaml.safe_load(f) or []
    return {case["id"]: case for case in data}


@pytest.fixture(scope="session")
def cases() -> dict[str, dict[str, dict]]:
    """All case files under tests/cases, keyed by file stem and then by id."""
    return {path.stem: load_cases(path) for path in sorted(CASES_DIR.glob("*.yaml"))}


@pytest.fixture(scope="session")
def tableau_dir() -> Path:
    return TABLEAU_DIR


@pytest.fixture(autouse=True)
def fresh_settings():
    set_overrides()
    yield
    set_overrides()
    get_settings.cache_clear()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture(params=CORPUS)
def corpus_field(request):
    return get_field(request.param)
