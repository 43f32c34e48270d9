"""Shared fixtures: bundled data, fixture files, and compiled machines.

Compiled machines are session-scoped; they are immutable and repeat
across many tests, and session FSM compilation is the expensive part.
"""

from __future__ import annotations

import json
import pathlib

import pytest

from toolgate.fsm.bytedfa import ByteDfa
from toolgate.linker import build_session_fsm, builtin_scaffold
from toolgate.schema import ToolInventory, parse_inventory
from toolgate.vocab import Vocabulary, load_vocab

HERE = pathlib.Path(__file__).resolve().parent
FIXTURES = HERE / "fixtures"
GOLDEN = HERE / "golden"
DATA = HERE.parent / "src" / "toolgate" / "data"


def fixture_path(name: str) -> pathlib.Path:
    return FIXTURES / name


def read_fixture(name: str) -> bytes:
    return (FIXTURES / name).read_bytes()


def read_golden(name: str):
    return json.loads((GOLDEN / name).read_text())


@pytest.fixture(scope="session")
def vocab512() -> Vocabulary:
    return load_vocab((DATA / "vocab512.json").read_bytes())


@pytest.fixture(scope="session")
def micro_vocab() -> Vocabulary:
    return load_vocab(read_fixture("vocab_micro.json"))


@pytest.fixture(scope="session")
def tools10() -> ToolInventory:
    return parse_inventory((DATA / "tools10.json").read_bytes())


@pytest.fixture(scope="session")
def flight_inventory() -> ToolInventory:
    return parse_inventory(read_fixture("flight_search.json"))


@pytest.fixture(scope="session")
def micro_inventory() -> ToolInventory:
    return parse_inventory(read_fixture("micro_pair.json"))


@pytest.fixture(scope="session")
def kamel234() -> ToolInventory:
    return parse_inventory(read_fixture("kamel234.json"))


@pytest.fixture(scope="session")
def react_session(tools10, vocab512):
    return build_session_fsm(tools10, vocab512, builtin_scaffold("react"))


@pytest.fixture(scope="session")
def flight_session(flight_inventory, vocab512):
    return build_session_fsm(flight_inventory, vocab512, builtin_scaffold("react"))


def brute_force_mask(dfa: ByteDfa, byte_state: int, vocab: Vocabulary) -> set[int]:
    """Reference mask: token id is permitted iff its byte expansion walks
    to a live state; eos is permitted iff the state itself accepts.

    Independent of the compiler: plain per-token byte walks.
    """
    permitted: set[int] = set()
    for tid, expansion in enumerate(vocab.expansions):
        if tid == vocab.eos_id:
            if byte_state in dfa.accepting:
                permitted.add(tid)
            continue
        state: int | None = byte_state
        for byte in expansion:
            state = dfa.transitions[state].get(byte)
            if state is None:
                break
        if state is not None:
            permitted.add(tid)
    return permitted
