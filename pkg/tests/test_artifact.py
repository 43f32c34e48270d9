"""Artifact serialization: byte-stable, self-validating, reloadable."""

import base64
import json

import pytest

from toolgate.errors import (
    ArtifactFormatError,
    ArtifactVersionError,
    FingerprintMismatch,
)
from toolgate.fsm.artifact import (
    dumps_artifact,
    load_artifact,
    loads_artifact,
    save_artifact,
)
from toolgate.vocab import tokenize_greedy


def tampered(data: bytes, **changes):
    doc = json.loads(data)
    for key, value in changes.items():
        node = doc
        parts = key.split(".")
        for p in parts[:-1]:
            node = node[p]
        node[parts[-1]] = value
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()


def test_dump_load_dump_byte_identity(react_session):
    first = dumps_artifact(react_session)
    second = dumps_artifact(loads_artifact(first))
    assert first == second


def test_save_and_load(tmp_path, react_session):
    path = tmp_path / "session.fsm.json"
    save_artifact(str(path), react_session)
    loaded = load_artifact(str(path))
    assert dumps_artifact(loaded) == path.read_bytes()


def test_loaded_machine_behaves_identically(react_session, vocab512):
    loaded = loads_artifact(dumps_artifact(react_session))
    fsm_a, fsm_b = react_session.fsm, loaded.fsm
    assert fsm_a.transitions == fsm_b.transitions
    assert fsm_a.masks == fsm_b.masks
    assert fsm_a.accepting == fsm_b.accepting
    assert fsm_a.start == fsm_b.start
    assert loaded.tool_leaves == react_session.tool_leaves
    # byte-level provenance is not serialized
    assert set(fsm_b.byte_origin) == {-1}
    text = (b"Thought: x\nAction: noop\nAction Input: {}\n")
    ids = tokenize_greedy(vocab512, text) + [vocab512.eos_id]
    assert fsm_b.walk(ids) in fsm_b.accepting


def test_loaded_vocab_and_inventory_round_trip(react_session):
    loaded = loads_artifact(dumps_artifact(react_session))
    assert loaded.vocab.fingerprint() == react_session.vocab.fingerprint()
    assert loaded.inventory.names == react_session.inventory.names
    assert loaded.scaffold.segments == react_session.scaffold.segments


def test_version_gate(react_session):
    data = tampered(dumps_artifact(react_session), format_version=2)
    with pytest.raises(ArtifactVersionError):
        loads_artifact(data)


def test_expected_fingerprint_checked(react_session):
    data = dumps_artifact(react_session)
    good = react_session.vocab.fingerprint()
    assert loads_artifact(data, expect_fingerprint=good) is not None
    with pytest.raises(FingerprintMismatch):
        loads_artifact(data, expect_fingerprint="deadbeef")


def test_embedded_vocab_tamper_detected(react_session):
    doc = json.loads(dumps_artifact(react_session))
    tokens = doc["vocab"]["tokens"]
    tokens[300] = base64.b64encode(b"EVIL").decode()
    data = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    with pytest.raises(ArtifactFormatError):
        loads_artifact(data)


def test_mask_tamper_detected(react_session):
    doc = json.loads(dumps_artifact(react_session))
    blob = bytearray(base64.b64decode(doc["fsm"]["masks"]))
    blob[len(blob) // 2] ^= 0x01
    doc["fsm"]["masks"] = base64.b64encode(bytes(blob)).decode()
    data = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    with pytest.raises(ArtifactFormatError):
        loads_artifact(data)


def test_truncated_transition_blob_detected(react_session):
    doc = json.loads(dumps_artifact(react_session))
    blob = base64.b64decode(doc["fsm"]["transitions"])[:-4]
    doc["fsm"]["transitions"] = base64.b64encode(blob).decode()
    data = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    with pytest.raises(ArtifactFormatError):
        loads_artifact(data)


def test_not_json_rejected():
    with pytest.raises(ArtifactFormatError):
        loads_artifact(b"\x00\x01binary junk")
    with pytest.raises(ArtifactFormatError):
        loads_artifact(b"[1,2,3]")


def test_missing_field_rejected(react_session):
    doc = json.loads(dumps_artifact(react_session))
    del doc["fsm"]["masks"]
    data = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    with pytest.raises(ArtifactFormatError):
        loads_artifact(data)


def test_start_state_range_checked(react_session):
    data = tampered(dumps_artifact(react_session), **{"fsm.start": 10**6})
    with pytest.raises(ArtifactFormatError):
        loads_artifact(data)
