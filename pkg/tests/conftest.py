"""Shared fixtures: parsed models and fully derived systems for the bundled examples."""

from pathlib import Path

import pytest

from ddw.parser import parse_model, parse_solution
from ddw.pipeline import DerivedSystem, run_pipeline

ROOT = Path(__file__).resolve().parent.parent
MODELS = ROOT / "models"
GOLDEN = Path(__file__).resolve().parent / "golden"


def load_model(name: str):
    """Parse one of the bundled model files by stem."""
    path = MODELS / (name + ".lag")
    return parse_model(path.read_text(encoding="utf-8"), name)


@pytest.fixture(scope="session")
def palatini_model():
    return load_model("maxwell_palatini")


@pytest.fixture(scope="session")
def palatini_system(palatini_model) -> DerivedSystem:
    return run_pipeline(palatini_model)


@pytest.fixture(scope="session")
def standard_model():
    return load_model("maxwell_standard")


@pytest.fixture(scope="session")
def standard_system(standard_model) -> DerivedSystem:
    return run_pipeline(standard_model)


@pytest.fixture(scope="session")
def scalar_system() -> DerivedSystem:
    return run_pipeline(load_model("scalar_field"))


@pytest.fixture(scope="session")
def mechanics_system() -> DerivedSystem:
    return run_pipeline(load_model("mechanics"))


@pytest.fixture(scope="session")
def plane_wave_solution():
    path = MODELS / "plane_wave.sol"
    return parse_solution(path.read_text(encoding="utf-8"))
