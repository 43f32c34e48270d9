"""Stitch tool machines into one session machine behind a scaffold.

A scaffold is a flat segment list: fixed literals, anchored free-text
regions, one tool selection, one argument object, and a final terminal
marker.  The whole session compiles into a single byte machine (tool
names fan out into a trie by determinization; each name continues
through the shared terminator literal into that tool's own argument
machine), which then goes through the ordinary token compiler.  Free
text follows the forced-anchor rule: any byte except the anchor's first
byte keeps the region open, and from the anchor's first byte on the
remaining anchor bytes are the only permitted continuation.

Scaffold config files are JSON lists; the two built-ins cover the
common cases:

* "react":  Thought/Action/Action Input lines, JSON argument object;
* "call":   bare `name(v1, v2)` with positional arguments.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import ClassVar

from toolgate.errors import InexpressibleName, MalformedScaffold
from toolgate.fsm.bytedfa import ByteDfa, Frag, NfaBuilder, determinize
from toolgate.fsm.tokenfsm import TokenFsm, compile_token_fsm
from toolgate.schema import ToolInventory
from toolgate.vocab import Vocabulary, tokenize_greedy

_IDENT_BYTES = frozenset(b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")

DEFAULT_NAME_TERMINATOR = "\nAction Input: "


@dataclass(frozen=True)
class Literal:
    kind: ClassVar[str] = "literal"
    text: str


@dataclass(frozen=True)
class FreeText:
    kind: ClassVar[str] = "free_text"
    anchor: str


@dataclass(frozen=True)
class ToolSelect:
    kind: ClassVar[str] = "tool_select"


@dataclass(frozen=True)
class ArgObject:
    kind: ClassVar[str] = "arg_object"
    style: str = "json"


@dataclass(frozen=True)
class Terminal:
    kind: ClassVar[str] = "terminal"


Segment = Literal | FreeText | ToolSelect | ArgObject | Terminal


@dataclass(frozen=True)
class ScaffoldSpec:
    segments: tuple[Segment, ...]
    name: str = "custom"

    def __post_init__(self) -> None:
        _validate_segments(self.segments)

    @property
    def name_terminator(self) -> str:
        idx = next(i for i, s in enumerate(self.segments) if s.kind == "tool_select")
        seg = self.segments[idx + 1]
        assert isinstance(seg, Literal)
        return seg.text

    def to_raw(self) -> list:
        out: list[dict] = []
        for seg in self.segments:
            if isinstance(seg, Literal):
                out.append({"literal": seg.text})
            elif isinstance(seg, FreeText):
                out.append({"free_text_until": seg.anchor})
            elif isinstance(seg, ToolSelect):
                out.append({"tool_select": True})
            elif isinstance(seg, ArgObject):
                out.append({"arg_object": seg.style})
            else:
                out.append({"terminal": True})
        return out


def _validate_segments(segments: tuple[Segment, ...]) -> None:
    if not segments:
        raise MalformedScaffold("scaffold has no segments")
    kinds = [s.kind for s in segments]
    for kind in ("tool_select", "arg_object", "terminal"):
        if kinds.count(kind) != 1:
            raise MalformedScaffold(f"scaffold needs exactly one {kind} segment")
    if kinds[-1] != "terminal":
        raise MalformedScaffold("terminal must be the last segment")
    sel = kinds.index("tool_select")
    if sel + 2 >= len(segments) or kinds[sel + 1] != "literal" or kinds[sel + 2] != "arg_object":
        raise MalformedScaffold(
            "tool_select must be followed by a terminator literal and the arg_object"
        )
    term = segments[sel + 1]
    assert isinstance(term, Literal)
    if not term.text:
        raise MalformedScaffold("name terminator literal must be non-empty")
    if term.text.encode("utf-8")[0] in _IDENT_BYTES:
        raise MalformedScaffold(
            "name terminator must not start with an identifier byte"
        )
    for seg in segments:
        if isinstance(seg, Literal) and not seg.text:
            raise MalformedScaffold("literal segments must be non-empty")
        if isinstance(seg, FreeText) and not seg.anchor:
            raise MalformedScaffold("free_text segments need a non-empty anchor")
        if isinstance(seg, ArgObject) and seg.style not in ("json", "positional"):
            raise MalformedScaffold(f"unknown arg_object style {seg.style!r}")


def builtin_scaffold(name: str) -> ScaffoldSpec:
    if name == "react":
        return ScaffoldSpec(
            (
                Literal("Thought: "),
                FreeText("\nAction: "),
                ToolSelect(),
                Literal(DEFAULT_NAME_TERMINATOR),
                ArgObject("json"),
                Literal("\n"),
                Terminal(),
            ),
            name="react",
        )
    if name == "call":
        return ScaffoldSpec(
            (ToolSelect(), Literal("("), ArgObject("positional"), Literal(")"), Terminal()),
            name="call",
        )
    raise MalformedScaffold(f"unknown built-in scaffold {name!r}")


def parse_scaffold(document: bytes | str, name: str = "custom") -> ScaffoldSpec:
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    try:
        doc = json.loads(document)
    except ValueError as e:
        raise MalformedScaffold(f"not valid JSON: {e}") from None
    if not isinstance(doc, list):
        raise MalformedScaffold("scaffold document must be a list")
    segments: list[Segment] = []
    for i, entry in enumerate(doc):
        if not isinstance(entry, dict) or len(entry) != 1:
            raise MalformedScaffold(f"segment {i}: must be a one-key object")
        key, value = next(iter(entry.items()))
        if key == "literal" and isinstance(value, str):
            segments.append(Literal(value))
        elif key == "free_text_until" and isinstance(value, str):
            segments.append(FreeText(value))
        elif key == "tool_select" and value is True:
            segments.append(ToolSelect())
        elif key == "arg_object":
            if value is True:
                segments.append(ArgObject("json"))
            elif value in ("json", "positional"):
                segments.append(ArgObject(value))
            else:
                raise MalformedScaffold(f"segment {i}: bad arg_object value {value!r}")
        elif key == "terminal" and value is True:
            segments.append(Terminal())
        else:
            raise MalformedScaffold(f"segment {i}: unknown segment {key!r}")
    return ScaffoldSpec(tuple(segments), name=name)


def load_scaffold(spec: str) -> ScaffoldSpec:
    """Built-in name or a path to a scaffold JSON file."""
    if spec in ("react", "call"):
        return builtin_scaffold(spec)
    with open(spec, "rb") as fh:
        return parse_scaffold(fh.read(), name=spec)


# --- session machine ---

@dataclass
class SessionFsm:
    fsm: TokenFsm
    vocab: Vocabulary
    inventory: ToolInventory
    scaffold: ScaffoldSpec
    tool_leaves: dict[str, int]
    # byte-level source machine; None when the session came from an artifact
    dfa: ByteDfa | None = None

    @property
    def canonical_prefixes(self) -> dict[str, bytes]:
        """Shortest transcript prefix selecting each tool (free text = bare anchor)."""
        out = {}
        for tool in self.inventory:
            parts: list[bytes] = []
            for seg in self.scaffold.segments:
                if isinstance(seg, Literal):
                    parts.append(seg.text.encode("utf-8"))
                elif isinstance(seg, FreeText):
                    parts.append(seg.anchor.encode("utf-8"))
                elif isinstance(seg, ToolSelect):
                    parts.append(tool.name.encode("utf-8"))
                else:
                    break
            out[tool.name] = b"".join(parts)
        return out


def _session_dfa(inventory: ToolInventory, scaffold: ScaffoldSpec) -> ByteDfa:
    nb = NfaBuilder()
    frags: list[Frag] = []
    segments = scaffold.segments
    i = 0
    while i < len(segments):
        seg = segments[i]
        if isinstance(seg, Literal):
            frags.append(nb.lit(seg.text.encode("utf-8")))
            i += 1
        elif isinstance(seg, FreeText):
            frags.append(nb.free_text(seg.anchor.encode("utf-8")))
            i += 1
        elif isinstance(seg, ToolSelect):
            term = segments[i + 1]
            arg = segments[i + 2]
            assert isinstance(term, Literal) and isinstance(arg, ArgObject)
            term_bytes = term.text.encode("utf-8")
            branches = []
            for tool in inventory:
                head = nb.lit(tool.name.encode("utf-8") + term_bytes)
                if arg.style == "json":
                    body = nb.object_value(tool.params)
                else:
                    body = nb.positional_values(tool.params, tool.name)
                branches.append(nb.concat(head, body))
            frags.append(nb.alt(*branches))
            i += 3
        elif isinstance(seg, Terminal):
            i += 1
        else:
            raise AssertionError(seg)
    whole = nb.concat(*frags) if frags else nb.epsilon()
    dfa, _ = determinize(nb, whole.start, [whole.end])
    return dfa


def build_session_fsm(
    inventory: ToolInventory, vocab: Vocabulary, scaffold: ScaffoldSpec
) -> SessionFsm:
    if len(inventory) == 0:
        raise MalformedScaffold("cannot link an empty inventory")
    dfa = _session_dfa(inventory, scaffold)
    fsm = compile_token_fsm(dfa, vocab, eos_gate=True)
    token_of_byte = {b: t for t, b in enumerate(fsm.byte_origin) if b >= 0}
    sess = SessionFsm(fsm, vocab, inventory, scaffold, {}, dfa)
    leaves: dict[str, int] = {}
    for name, prefix in sess.canonical_prefixes.items():
        byte_state = dfa.walk(prefix)
        if byte_state is not None and byte_state in token_of_byte:
            leaves[name] = token_of_byte[byte_state]
    sess.tool_leaves = leaves
    return sess


# --- name trie ---

@dataclass
class NameTrie:
    """Token-level trie over `name + terminator` for every tool.

    States are machine states (shared prefixes merged by construction);
    each accepting state is the leaf of exactly one tool.
    """

    fsm: TokenFsm
    leaves: dict[int, str]

    @property
    def root(self) -> int:
        return self.fsm.start

    @property
    def leaf_count(self) -> int:
        return len(self.leaves)

    def walk(self, token_ids) -> int | None:
        return self.fsm.walk(token_ids)

    def name_at(self, state: int) -> str | None:
        return self.leaves.get(state)


def build_name_trie(
    inventory: ToolInventory,
    vocab: Vocabulary,
    terminator: str = DEFAULT_NAME_TERMINATOR,
) -> NameTrie:
    if len(inventory) == 0:
        raise MalformedScaffold("cannot build a name trie for an empty inventory")
    term = terminator.encode("utf-8")
    nb = NfaBuilder()
    branches = []
    tags: dict[int, str] = {}
    for tool in inventory:
        frag = nb.lit(tool.name.encode("utf-8") + term)
        tags[frag.end] = tool.name
        branches.append(frag)
    whole = nb.alt(*branches)
    dfa, state_tags = determinize(nb, whole.start, list(tags), tags)
    fsm = compile_token_fsm(dfa, vocab, eos_gate=False)

    leaves: dict[int, str] = {}
    for tstate in fsm.accepting:
        byte_state = fsm.byte_origin[tstate]
        names = state_tags[byte_state]
        assert len(names) == 1, f"leaf {tstate} is shared by {sorted(names)}"
        leaves[tstate] = next(iter(names))

    # every tool must actually be reachable at the token level
    for tool in inventory:
        try:
            ids = tokenize_greedy(vocab, tool.name.encode("utf-8") + term)
        except Exception:
            raise InexpressibleName(tool.name) from None
        state = fsm.walk(ids)
        if state is None or leaves.get(state) != tool.name:
            raise InexpressibleName(tool.name)
    return NameTrie(fsm, leaves)
