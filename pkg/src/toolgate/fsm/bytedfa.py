"""Byte-level machines for the canonical call surface.

Grammar fragments are assembled as an epsilon-NFA (Thompson style, one
start and one end per fragment), then subset construction yields a
deterministic machine over bytes.  Dead and unreachable states are
pruned; there is no minimization pass, determinism plus pruning is all
the downstream token compiler needs.

The value languages are deliberately narrow:

* strings escape only \\" and \\\\ and never contain raw control bytes
  (anything >= 0x20 is fine, so non-ASCII UTF-8 passes through);
* integers have no leading zeros ("0" itself is fine);
* numbers are JSON-style decimals with optional fraction/exponent;
* whitespace exists in exactly one place: one optional space after ':'
  and after ','.

Argument objects admit parameters in documentation order with optional
ones skippable, which the NFA encodes as two junction rails per
parameter (no entry emitted yet / at least one emitted) so separators
land exactly between entries.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

from toolgate.errors import UnsupportedFeature
from toolgate.schema import ParamSpec, ParamType, ToolSchema

_DIGITS = tuple(b"0123456789")
_NONZERO = tuple(b"123456789")
# every byte allowed raw inside a string: >= 0x20, minus '"' and '\'
_STRING_RAW = tuple(b for b in range(0x20, 0x100) if b not in (0x22, 0x5C))


class Frag(NamedTuple):
    start: int
    end: int


@dataclass(frozen=True)
class ByteDfa:
    """Deterministic, pruned byte machine (partial transition function)."""

    transitions: tuple[dict[int, int], ...]
    start: int
    accepting: frozenset[int]

    @property
    def n_states(self) -> int:
        return len(self.transitions)

    def step(self, state: int, byte: int) -> int | None:
        return self.transitions[state].get(byte)

    def walk(self, data: bytes, state: int | None = None) -> int | None:
        """Final state after consuming data, or None on a dead byte."""
        s = self.start if state is None else state
        for b in data:
            nxt = self.transitions[s].get(b)
            if nxt is None:
                return None
            s = nxt
        return s

    def accepts(self, data: bytes) -> bool:
        s = self.walk(data)
        return s is not None and s in self.accepting

    def shortest_accepting_suffix(self, state: int) -> bytes | None:
        """Shortest byte string leading from state to acceptance (BFS)."""
        if state in self.accepting:
            return b""
        seen = {state}
        queue: deque[tuple[int, bytes]] = deque([(state, b"")])
        while queue:
            s, path = queue.popleft()
            for byte in sorted(self.transitions[s]):
                nxt = self.transitions[s][byte]
                if nxt in seen:
                    continue
                suffix = path + bytes([byte])
                if nxt in self.accepting:
                    return suffix
                seen.add(nxt)
                queue.append((nxt, suffix))
        return None


class NfaBuilder:
    """Epsilon-NFA under construction; fragments are (start, end) pairs."""

    def __init__(self) -> None:
        self.eps: list[list[int]] = []
        self.edges: list[dict[int, list[int]]] = []

    def state(self) -> int:
        self.eps.append([])
        self.edges.append({})
        return len(self.eps) - 1

    def add_eps(self, a: int, b: int) -> None:
        self.eps[a].append(b)

    def add_edge(self, a: int, byte: int, b: int) -> None:
        self.edges[a].setdefault(byte, []).append(b)

    # --- combinators ---

    def lit(self, data: bytes) -> Frag:
        start = self.state()
        cur = start
        for byte in data:
            nxt = self.state()
            self.add_edge(cur, byte, nxt)
            cur = nxt
        return Frag(start, cur)

    def byte_class(self, byteset: Iterable[int]) -> Frag:
        start = self.state()
        end = self.state()
        for byte in byteset:
            self.add_edge(start, byte, end)
        return Frag(start, end)

    def concat(self, *frags: Frag) -> Frag:
        assert frags
        for a, b in zip(frags, frags[1:]):
            self.add_eps(a.end, b.start)
        return Frag(frags[0].start, frags[-1].end)

    def alt(self, *frags: Frag) -> Frag:
        assert frags
        start = self.state()
        end = self.state()
        for f in frags:
            self.add_eps(start, f.start)
            self.add_eps(f.end, end)
        return Frag(start, end)

    # opt/plus/star allocate fresh boundary states: a fragment's exposed
    # start/end must stay loop-free or a later opt() skip edge would leak
    # into the loop body (e.g. "04" sneaking through an optional ".digits").

    def opt(self, frag: Frag) -> Frag:
        start = self.state()
        end = self.state()
        self.add_eps(start, frag.start)
        self.add_eps(frag.end, end)
        self.add_eps(start, end)
        return Frag(start, end)

    def plus(self, frag: Frag) -> Frag:
        start = self.state()
        end = self.state()
        self.add_eps(start, frag.start)
        self.add_eps(frag.end, end)
        self.add_eps(frag.end, frag.start)
        return Frag(start, end)

    def star(self, frag: Frag) -> Frag:
        start = self.state()
        end = self.state()
        self.add_eps(start, frag.start)
        self.add_eps(frag.end, end)
        self.add_eps(start, end)
        self.add_eps(frag.end, frag.start)
        return Frag(start, end)

    def epsilon(self) -> Frag:
        s = self.state()
        return Frag(s, s)

    # --- grammar fragments ---

    def integer(self) -> Frag:
        sign = self.opt(self.lit(b"-"))
        zero = self.lit(b"0")
        lead = self.byte_class(_NONZERO)
        tail = self.star(self.byte_class(_DIGITS))
        body = self.alt(zero, self.concat(lead, tail))
        return self.concat(sign, body)

    def number(self) -> Frag:
        frac = self.opt(self.concat(self.lit(b"."), self.plus(self.byte_class(_DIGITS))))
        exp = self.opt(
            self.concat(
                self.byte_class(b"eE"),
                self.opt(self.byte_class(b"+-")),
                self.plus(self.byte_class(_DIGITS)),
            )
        )
        return self.concat(self.integer(), frac, exp)

    def string(self) -> Frag:
        start = self.state()
        mid = self.state()
        esc = self.state()
        end = self.state()
        self.add_edge(start, 0x22, mid)
        for byte in _STRING_RAW:
            self.add_edge(mid, byte, mid)
        self.add_edge(mid, 0x5C, esc)
        self.add_edge(esc, 0x22, mid)
        self.add_edge(esc, 0x5C, mid)
        self.add_edge(mid, 0x22, end)
        return Frag(start, end)

    def quoted_literal(self, text: str) -> Frag:
        data = text.encode("utf-8").replace(b"\\", b"\\\\").replace(b'"', b'\\"')
        return self.lit(b'"' + data + b'"')

    def free_text(self, anchor: bytes) -> Frag:
        """Anything without anchor[0], then the anchor verbatim.

        Once the anchor's first byte appears the rest is forced; that is
        what lets the token masks steer generation out of prose.
        """
        assert anchor
        hub = self.state()
        for byte in range(256):
            if byte != anchor[0]:
                self.add_edge(hub, byte, hub)
        cur = hub
        for byte in anchor:
            nxt = self.state()
            self.add_edge(cur, byte, nxt)
            cur = nxt
        return Frag(hub, cur)

    def value(self, ptype: ParamType) -> Frag:
        if ptype.kind == "string":
            return self.string()
        if ptype.kind == "integer":
            return self.integer()
        if ptype.kind == "number":
            return self.number()
        if ptype.kind == "boolean":
            return self.alt(self.lit(b"true"), self.lit(b"false"))
        if ptype.kind == "enum":
            return self.alt(*[self.quoted_literal(lit) for lit in ptype.literals])
        if ptype.kind == "object":
            return self.object_value(ptype.children)
        if ptype.kind == "array":
            assert ptype.element is not None
            sep = self.concat(self.lit(b","), self.opt(self.lit(b" ")))
            first = self.value(ptype.element)
            rest = self.star(self.concat(sep, self.value(ptype.element)))
            return self.concat(
                self.lit(b"["), self.opt(self.concat(first, rest)), self.lit(b"]")
            )
        raise AssertionError(ptype.kind)

    def param_entry(self, p: ParamSpec) -> Frag:
        head = self.lit(b'"' + p.name.encode("utf-8") + b'":')
        return self.concat(head, self.opt(self.lit(b" ")), self.value(p.type))

    def object_value(self, params: tuple[ParamSpec, ...]) -> Frag:
        """'{' + ordered entries with skippable optionals + '}'."""
        open_brace = self.lit(b"{")
        # rail0: nothing emitted yet; rail1: at least one entry emitted
        rail0 = open_brace.end
        rail1: int | None = None
        for p in params:
            n0 = self.state()
            n1 = self.state()
            entry0 = self.param_entry(p)
            self.add_eps(rail0, entry0.start)
            self.add_eps(entry0.end, n1)
            if rail1 is not None:
                sep = self.concat(self.lit(b","), self.opt(self.lit(b" ")))
                entry1 = self.param_entry(p)
                self.add_eps(rail1, sep.start)
                self.add_eps(sep.end, entry1.start)
                self.add_eps(entry1.end, n1)
            if not p.required:
                self.add_eps(rail0, n0)
                if rail1 is not None:
                    self.add_eps(rail1, n1)
            rail0, rail1 = n0, n1
        close = self.lit(b"}")
        self.add_eps(rail0, close.start)
        if rail1 is not None:
            self.add_eps(rail1, close.start)
        return Frag(open_brace.start, close.end)

    def positional_values(self, params: tuple[ParamSpec, ...], path: str) -> Frag:
        """Ordered bare values; optionals must be trailing (no way to mark a gap)."""
        required_after = False
        for p in reversed(params):
            if p.required:
                required_after = True
            elif required_after:
                raise UnsupportedFeature(
                    f"{path}.{p.name}",
                    "optional parameter before a required one in positional style",
                )
        if not params:
            return self.epsilon()
        suffix: Frag | None = None
        tail_optional = False  # may the suffix built so far be omitted entirely
        for p in reversed(params):
            v = self.value(p.type)
            if suffix is None:
                frag = v
            else:
                sep = self.concat(self.lit(b","), self.opt(self.lit(b" ")))
                rest = self.concat(sep, suffix)
                if tail_optional:
                    rest = self.opt(rest)
                frag = self.concat(v, rest)
            suffix = frag
            tail_optional = not p.required
        assert suffix is not None
        if tail_optional:
            suffix = self.opt(suffix)
        return suffix


def determinize(
    nb: NfaBuilder,
    start: int,
    accepts: Iterable[int],
    tags: Mapping[int, object] | None = None,
) -> tuple[ByteDfa, tuple[frozenset, ...]]:
    """Subset construction plus dead/unreachable pruning.

    Returns the DFA and, per DFA state, the set of tags carried by NFA
    states inside its subset (used to identify per-tool leaves).
    """
    accept_set = frozenset(accepts)
    tags = tags or {}

    eps = nb.eps

    def closure(states: Iterable[int]) -> frozenset[int]:
        seen = set(states)
        stack = list(seen)
        while stack:
            s = stack.pop()
            for t in eps[s]:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return frozenset(seen)

    start_set = closure([start])
    index: dict[frozenset[int], int] = {start_set: 0}
    order: list[frozenset[int]] = [start_set]
    trans: list[dict[int, int]] = [{}]
    queue: deque[frozenset[int]] = deque([start_set])
    while queue:
        subset = queue.popleft()
        sid = index[subset]
        moves: dict[int, set[int]] = {}
        for s in subset:
            for byte, targets in nb.edges[s].items():
                moves.setdefault(byte, set()).update(targets)
        for byte in sorted(moves):
            target = closure(moves[byte])
            tid = index.get(target)
            if tid is None:
                tid = len(order)
                index[target] = tid
                order.append(target)
                trans.append({})
                queue.append(target)
            trans[sid][byte] = tid

    accepting = {i for i, subset in enumerate(order) if subset & accept_set}

    # prune states that cannot reach acceptance
    reverse: list[list[int]] = [[] for _ in order]
    for sid, edges in enumerate(trans):
        for tid in edges.values():
            reverse[tid].append(sid)
    alive: set[int] = set(accepting)
    stack = list(accepting)
    while stack:
        s = stack.pop()
        for p in reverse[s]:
            if p not in alive:
                alive.add(p)
                stack.append(p)
    if 0 not in alive:
        raise ValueError("machine accepts nothing")

    # canonical renumbering: BFS from start over ascending bytes
    renum: dict[int, int] = {0: 0}
    bfs: deque[int] = deque([0])
    while bfs:
        sid = bfs.popleft()
        for byte in sorted(trans[sid]):
            tid = trans[sid][byte]
            if tid in alive and tid not in renum:
                renum[tid] = len(renum)
                bfs.append(tid)

    new_trans: list[dict[int, int]] = [{} for _ in renum]
    new_tags: list[frozenset] = [frozenset() for _ in renum]
    for old, new in renum.items():
        new_trans[new] = {
            byte: renum[tid] for byte, tid in sorted(trans[old].items()) if tid in alive
        }
        new_tags[new] = frozenset(tags[s] for s in order[old] if s in tags)
    new_accepting = frozenset(renum[s] for s in accepting if s in renum)

    dfa = ByteDfa(tuple(new_trans), 0, new_accepting)
    return dfa, tuple(new_tags)


# --- public single-shot builders ---

def build_literal_dfa(data: bytes) -> ByteDfa:
    nb = NfaBuilder()
    frag = nb.lit(data)
    dfa, _ = determinize(nb, frag.start, [frag.end])
    return dfa


def build_value_dfa(ptype: ParamType) -> ByteDfa:
    nb = NfaBuilder()
    frag = nb.value(ptype)
    dfa, _ = determinize(nb, frag.start, [frag.end])
    return dfa


def build_param_machine(param: ParamSpec) -> ByteDfa:
    nb = NfaBuilder()
    frag = nb.param_entry(param)
    dfa, _ = determinize(nb, frag.start, [frag.end])
    return dfa


def build_tool_call_dfa(schema: ToolSchema) -> ByteDfa:
    nb = NfaBuilder()
    frag = nb.object_value(schema.params)
    dfa, _ = determinize(nb, frag.start, [frag.end])
    return dfa
