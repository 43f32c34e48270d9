"""Token vocabulary: dense id -> byte expansion table plus greedy tokenizer.

File format is a single JSON object:

    {"tokens": ["<base64>", ...], "eos": <index>, "byte_fallback": <bool>}

Ids are the list positions, so the table is dense by construction.
"""

from __future__ import annotations

import base64
import binascii
import hashlib
import json
import struct
from dataclasses import dataclass, field

from toolgate.errors import EmptyExpansion, MalformedVocab, MissingEos, Untokenizable


class _TrieNode:
    __slots__ = ("children", "token_ids")

    def __init__(self) -> None:
        self.children: dict[int, _TrieNode] = {}
        self.token_ids: list[int] = []


@dataclass
class Vocabulary:
    expansions: tuple[bytes, ...]
    eos_id: int
    byte_fallback: bool
    _trie: _TrieNode | None = field(default=None, repr=False, compare=False)
    _fingerprint: str | None = field(default=None, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.expansions)

    @property
    def size(self) -> int:
        return len(self.expansions)

    def trie(self) -> _TrieNode:
        """Byte trie over all expansions; node.token_ids holds ids ending there."""
        if self._trie is None:
            root = _TrieNode()
            for tid, exp in enumerate(self.expansions):
                node = root
                for b in exp:
                    nxt = node.children.get(b)
                    if nxt is None:
                        nxt = _TrieNode()
                        node.children[b] = nxt
                    node = nxt
                node.token_ids.append(tid)
            self._trie = root
        return self._trie

    def fingerprint(self) -> str:
        """sha256 over a length-prefixed dump of the table; stable across runs."""
        if self._fingerprint is None:
            h = hashlib.sha256()
            h.update(struct.pack("<I", len(self.expansions)))
            for exp in self.expansions:
                h.update(struct.pack("<I", len(exp)))
                h.update(exp)
            h.update(struct.pack("<I", self.eos_id))
            h.update(b"\x01" if self.byte_fallback else b"\x00")
            self._fingerprint = h.hexdigest()
        return self._fingerprint

    def to_json(self) -> bytes:
        doc = {
            "tokens": [base64.b64encode(e).decode("ascii") for e in self.expansions],
            "eos": self.eos_id,
            "byte_fallback": self.byte_fallback,
        }
        return json.dumps(doc, separators=(",", ":"), sort_keys=True).encode("ascii")


def _validate(expansions: tuple[bytes, ...], eos_id: int, byte_fallback: bool) -> None:
    if not expansions:
        raise MalformedVocab("empty token list")
    for tid, exp in enumerate(expansions):
        if len(exp) == 0:
            raise EmptyExpansion(tid)
    if not isinstance(eos_id, int) or isinstance(eos_id, bool):
        raise MalformedVocab("eos must be an integer index")
    if not (0 <= eos_id < len(expansions)):
        raise MalformedVocab(f"eos index {eos_id} out of range")
    if byte_fallback:
        singles = {e[0] for e in expansions if len(e) == 1}
        if len(singles) < 256:
            missing = next(b for b in range(256) if b not in singles)
            raise MalformedVocab(
                f"byte_fallback declared but single-byte token {missing:#04x} is missing"
            )


def make_vocab(expansions: list[bytes], eos_id: int, byte_fallback: bool = False) -> Vocabulary:
    exps = tuple(bytes(e) for e in expansions)
    _validate(exps, eos_id, byte_fallback)
    return Vocabulary(exps, eos_id, byte_fallback)


def load_vocab(document: bytes | str) -> Vocabulary:
    if isinstance(document, str):
        document = document.encode("utf-8")
    try:
        doc = json.loads(document)
    except ValueError as e:
        raise MalformedVocab(f"not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise MalformedVocab("top level must be an object")
    if "tokens" not in doc or not isinstance(doc["tokens"], list):
        raise MalformedVocab("missing or non-list 'tokens'")
    if "eos" not in doc:
        raise MissingEos()
    expansions = []
    for i, entry in enumerate(doc["tokens"]):
        if not isinstance(entry, str):
            raise MalformedVocab(f"token {i} is not a base64 string")
        try:
            expansions.append(base64.b64decode(entry, validate=True))
        except (binascii.Error, ValueError):
            raise MalformedVocab(f"token {i} is not valid base64") from None
    eos_id = doc["eos"]
    byte_fallback = bool(doc.get("byte_fallback", False))
    exps = tuple(expansions)
    _validate(exps, eos_id, byte_fallback)
    return Vocabulary(exps, eos_id, byte_fallback)


def tokenize_greedy(vocab: Vocabulary, data: bytes | str) -> list[int]:
    """Longest-match tokenization; ties on expansion go to the lowest id.

    Raises Untokenizable with the byte offset where no token matches.
    """
    if isinstance(data, str):
        data = data.encode("utf-8")
    root = vocab.trie()
    out: list[int] = []
    pos = 0
    n = len(data)
    while pos < n:
        node = root
        best_id = -1
        best_len = 0
        depth = 0
        while pos + depth < n:
            node = node.children.get(data[pos + depth])
            if node is None:
                break
            depth += 1
            if node.token_ids:
                best_id = node.token_ids[0]
                best_len = depth
        if best_id < 0:
            raise Untokenizable(pos)
        out.append(best_id)
        pos += best_len
    return out


def detokenize(vocab: Vocabulary, token_ids: list[int]) -> bytes:
    return b"".join(vocab.expansions[t] for t in token_ids)
