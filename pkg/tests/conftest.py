from __future__ import annotations

import json
from pathlib import Path

import pytest

from snowrank.corpus import load_labels, load_posts

GOLDEN_DIR = Path(__file__).parent / "data" / "golden"


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return GOLDEN_DIR


@pytest.fixture(scope="session")
def toy_corpus():
    return load_posts(GOLDEN_DIR / "toy_posts.jsonl")


@pytest.fixture(scope="session")
def toy_labels():
    return load_labels(GOLDEN_DIR / "toy_labels.csv")


@pytest.fixture(scope="session")
def golden_auto_record_text() -> str:
    return (GOLDEN_DIR / "golden_auto_record.json").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def golden_interactive() -> dict:
    return json.loads((GOLDEN_DIR / "golden_interactive.json").read_text(encoding="utf-8"))
