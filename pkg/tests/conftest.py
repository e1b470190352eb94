from __future__ import annotations

from pathlib import Path

import pytest

from readalong.ingest import parse_layout

CORPUS_DIR = Path(__file__).parent / "data" / "corpus"
COMMANDS_DIR = Path(__file__).parent / "data" / "commands"
GOLDEN_DIR = Path(__file__).parent / "data" / "golden"

CORPUS_IDS = ("doc-stream", "doc-scan", "doc-ambig")


def corpus_path(doc_id: str) -> Path:
    return CORPUS_DIR / f"{doc_id}.json"


@pytest.fixture(scope="session")
def corpus_documents():
    return {doc_id: parse_layout(corpus_path(doc_id).read_bytes()) for doc_id in CORPUS_IDS}


@pytest.fixture(scope="session")
def stream_doc(corpus_documents):
    return corpus_documents["doc-stream"]


@pytest.fixture(scope="session")
def scan_doc(corpus_documents):
    return corpus_documents["doc-scan"]


@pytest.fixture(scope="session")
def ambig_doc(corpus_documents):
    return corpus_documents["doc-ambig"]
