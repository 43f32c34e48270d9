"""Compiled-session artifact: one self-contained, deterministic JSON file.

Layout (format_version 1): vocabulary, inventory (canonical form),
scaffold, and the token machine as a base64 blob of little-endian u32
(state, token, next) triples sorted by (state, token), plus the packed
mask table as one concatenated base64 blob.  Keys are sorted and the
separators fixed, so identical inputs serialize byte-identically; the
only non-reproducible number (build time) is deliberately left out.

Loading re-validates everything it can cheaply: format version, the
fingerprint against the embedded vocabulary, and that the mask table is
exactly the bit-image of the transition table.
"""

from __future__ import annotations

import base64
import json

import numpy as np

from toolgate.errors import (
    ArtifactError,
    ArtifactFormatError,
    ArtifactVersionError,
    FingerprintMismatch,
)
from toolgate.fsm.tokenfsm import TokenFsm, pack_mask
from toolgate.linker import SessionFsm, parse_scaffold
from toolgate.schema import parse_inventory, tool_to_raw
from toolgate.vocab import load_vocab

FORMAT_VERSION = 1


def dumps_artifact(sess: SessionFsm) -> bytes:
    fsm = sess.fsm
    triples: list[int] = []
    for state, row in enumerate(fsm.transitions):
        for token in sorted(row):
            triples.extend((state, token, row[token]))
    blob = np.asarray(triples, dtype="<u4").tobytes()
    doc = {
        "format_version": FORMAT_VERSION,
        "vocab_fingerprint": sess.vocab.fingerprint(),
        "vocab": {
            "tokens": [
                base64.b64encode(e).decode("ascii") for e in sess.vocab.expansions
            ],
            "eos": sess.vocab.eos_id,
            "byte_fallback": sess.vocab.byte_fallback,
        },
        "inventory": [tool_to_raw(t) for t in sess.inventory],
        "scaffold": sess.scaffold.to_raw(),
        "fsm": {
            "vocab_size": fsm.vocab_size,
            "eos_id": fsm.eos_id,
            "state_count": fsm.n_states,
            "start": fsm.start,
            "accepting": sorted(fsm.accepting),
            "transitions": base64.b64encode(blob).decode("ascii"),
            "masks": base64.b64encode(b"".join(fsm.masks)).decode("ascii"),
            "free_text_states": sorted(fsm.free_text_states),
        },
        "tool_leaves": dict(sorted(sess.tool_leaves.items())),
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("ascii")


def loads_artifact(data: bytes, expect_fingerprint: str | None = None) -> SessionFsm:
    try:
        doc = json.loads(data)
    except ValueError as e:
        raise ArtifactFormatError(f"not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise ArtifactFormatError("top level must be an object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ArtifactVersionError(version, FORMAT_VERSION)
    try:
        vocab = load_vocab(json.dumps(doc["vocab"]).encode("utf-8"))
        inventory = parse_inventory(json.dumps(doc["inventory"]))
        scaffold = parse_scaffold(json.dumps(doc["scaffold"]))
        raw = doc["fsm"]
        state_count = raw["state_count"]
        vocab_size = raw["vocab_size"]
        eos_id = raw["eos_id"]
        start = raw["start"]
        accepting = frozenset(raw["accepting"])
        free_text = frozenset(raw["free_text_states"])
        blob = base64.b64decode(raw["transitions"])
        mask_blob = base64.b64decode(raw["masks"])
        tool_leaves = dict(doc["tool_leaves"])
    except ArtifactError:
        raise
    except Exception as e:
        raise ArtifactFormatError(f"artifact is missing or corrupts a field: {e}") from None

    stored = doc.get("vocab_fingerprint")
    if stored != vocab.fingerprint():
        raise ArtifactFormatError("embedded vocabulary does not match its fingerprint")
    if expect_fingerprint is not None and stored != expect_fingerprint:
        raise FingerprintMismatch(expect_fingerprint, stored)
    if vocab_size != vocab.size or eos_id != vocab.eos_id:
        raise ArtifactFormatError("fsm header disagrees with the embedded vocabulary")
    if not isinstance(state_count, int) or not (0 <= start < state_count):
        raise ArtifactFormatError("start state out of range")

    if len(blob) % 12 != 0:
        raise ArtifactFormatError("transition blob length is not a multiple of 12")
    triples = np.frombuffer(blob, dtype="<u4").reshape(-1, 3)
    transitions: list[dict[int, int]] = [{} for _ in range(state_count)]
    for state, token, nxt in triples.tolist():
        if state >= state_count or nxt >= state_count or token >= vocab_size:
            raise ArtifactFormatError("transition triple out of range")
        transitions[state][token] = nxt

    mask_width = (vocab_size + 7) // 8
    if len(mask_blob) != state_count * mask_width:
        raise ArtifactFormatError("mask table has the wrong size")
    masks = tuple(
        mask_blob[i * mask_width : (i + 1) * mask_width] for i in range(state_count)
    )
    for state, row in enumerate(transitions):
        if pack_mask(row.keys(), vocab_size) != masks[state]:
            raise ArtifactFormatError(f"mask of state {state} does not match its transitions")

    fsm = TokenFsm(
        vocab_size=vocab_size,
        eos_id=eos_id,
        start=start,
        accepting=accepting,
        transitions=tuple(transitions),
        masks=masks,
        free_text_states=free_text,
        byte_origin=tuple([-1] * state_count),
        build_millis=0.0,
    )
    return SessionFsm(fsm, vocab, inventory, scaffold, tool_leaves)


def save_artifact(path: str, sess: SessionFsm) -> None:
    with open(path, "wb") as fh:
        fh.write(dumps_artifact(sess))


def load_artifact(path: str, expect_fingerprint: str | None = None) -> SessionFsm:
    with open(path, "rb") as fh:
        return loads_artifact(fh.read(), expect_fingerprint)
