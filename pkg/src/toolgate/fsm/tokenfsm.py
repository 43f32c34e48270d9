"""Token-level machine compiled from a byte machine and a vocabulary.

For every byte state the whole vocabulary trie is walked against the
byte transitions (pruning on the first undefined byte), so a token edge
exists exactly when the token's full expansion is walkable.  Tokens may
freely span grammar-fragment boundaries; nothing here knows where one
parameter ends and the next begins.

The eos token is reserved as the termination gate: it never rides its
byte expansion.  Byte-accepting states get a single eos edge into one
shared accept state, which is the machine's only accepting state (when
the gate is enabled), so "finished" always means "eos was just emitted".

Per-state masks are packed little-endian (bit i of token i lives in
byte i >> 3 at bit position i & 7), `mask_bytes` in the stats is the
whole table.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass

from toolgate.errors import InexpressibleGrammar
from toolgate.fsm.bytedfa import ByteDfa
from toolgate.vocab import Vocabulary


def pack_mask(token_ids, vocab_size: int) -> bytes:
    out = bytearray((vocab_size + 7) // 8)
    for tid in token_ids:
        out[tid >> 3] |= 1 << (tid & 7)
    return bytes(out)


def mask_contains(mask: bytes, token_id: int) -> bool:
    return bool(mask[token_id >> 3] & (1 << (token_id & 7)))


def mask_popcount(mask: bytes) -> int:
    return int.from_bytes(mask, "little").bit_count()


@dataclass(frozen=True)
class TokenFsm:
    vocab_size: int
    eos_id: int
    start: int
    accepting: frozenset[int]
    transitions: tuple[dict[int, int], ...]
    masks: tuple[bytes, ...]
    free_text_states: frozenset[int]
    # token state -> originating byte state (-1 for the shared accept state)
    byte_origin: tuple[int, ...]
    build_millis: float = 0.0

    @property
    def n_states(self) -> int:
        return len(self.transitions)

    def step(self, state: int, token_id: int) -> int | None:
        return self.transitions[state].get(token_id)

    def walk(self, token_ids, state: int | None = None) -> int | None:
        s = self.start if state is None else state
        for t in token_ids:
            nxt = self.transitions[s].get(t)
            if nxt is None:
                return None
            s = nxt
        return s


@dataclass(frozen=True)
class FsmStats:
    state_count: int
    transition_count: int
    mask_bytes: int
    build_millis: float

    def as_dict(self) -> dict:
        return {
            "state_count": self.state_count,
            "transition_count": self.transition_count,
            "mask_bytes": self.mask_bytes,
            "build_millis": self.build_millis,
        }


def fsm_stats(fsm: TokenFsm) -> FsmStats:
    return FsmStats(
        state_count=fsm.n_states,
        transition_count=sum(len(t) for t in fsm.transitions),
        mask_bytes=sum(len(m) for m in fsm.masks),
        build_millis=fsm.build_millis,
    )


def _diagnose_blocked(dfa: ByteDfa, forward: set[int]) -> InexpressibleGrammar:
    """Pick the reachable byte state nearest to acceptance and show what
    byte string the vocabulary would have needed to realize."""
    dist: dict[int, int] = {s: 0 for s in dfa.accepting}
    queue = deque(dfa.accepting)
    reverse: dict[int, list[int]] = {}
    for sid, edges in enumerate(dfa.transitions):
        for tid in edges.values():
            reverse.setdefault(tid, []).append(sid)
    while queue:
        s = queue.popleft()
        for p in reverse.get(s, ()):
            if p not in dist:
                dist[p] = dist[s] + 1
                queue.append(p)
    candidates = [s for s in forward if s in dist]
    state = min(candidates, key=lambda s: (dist[s], s)) if candidates else dfa.start
    sample = dfa.shortest_accepting_suffix(state) or b""
    return InexpressibleGrammar(state, sample)


def compile_token_fsm(
    dfa: ByteDfa, vocab: Vocabulary, *, eos_gate: bool = True
) -> TokenFsm:
    t0 = time.perf_counter()
    n = dfa.n_states
    eos = vocab.eos_id
    root = vocab.trie()
    dfa_trans = dfa.transitions

    edges: list[dict[int, int]] = [{} for _ in range(n)]
    for s in range(n):
        out = edges[s]
        stack = [(root, s)]
        while stack:
            node, ds = stack.pop()
            row = dfa_trans[ds]
            for byte, child in node.children.items():
                nds = row.get(byte)
                if nds is None:
                    continue
                for tid in child.token_ids:
                    if tid != eos:
                        out[tid] = nds
                if child.children:
                    stack.append((child, nds))

    accept_state = n
    if eos_gate:
        for s in dfa.accepting:
            edges[s][eos] = accept_state
        accepting_raw = {accept_state}
        n_total = n + 1
    else:
        accepting_raw = set(dfa.accepting)
        n_total = n

    # forward reachability over token edges
    forward: set[int] = {dfa.start}
    queue: deque[int] = deque([dfa.start])
    while queue:
        s = queue.popleft()
        if s == accept_state:
            continue
        for t in edges[s].values():
            if t not in forward:
                forward.add(t)
                queue.append(t)

    # backward from accepting
    reverse: list[list[int]] = [[] for _ in range(n_total)]
    for sid in range(n):
        for tid in edges[sid].values():
            reverse[tid].append(sid)
    alive = set(accepting_raw)
    stack2 = list(accepting_raw)
    while stack2:
        s = stack2.pop()
        for p in reverse[s]:
            if p not in alive:
                alive.add(p)
                stack2.append(p)

    keep = forward & alive
    if dfa.start not in keep:
        raise _diagnose_blocked(dfa, forward)

    # canonical renumbering: BFS from start, ascending token ids
    renum: dict[int, int] = {dfa.start: 0}
    bfs: deque[int] = deque([dfa.start])
    while bfs:
        s = bfs.popleft()
        if s == accept_state:
            continue
        for tid in sorted(edges[s]):
            t = edges[s][tid]
            if t in keep and t not in renum:
                renum[t] = len(renum)
                bfs.append(t)

    vsize = vocab.size
    transitions: list[dict[int, int]] = [{} for _ in renum]
    byte_origin: list[int] = [0] * len(renum)
    for old, new in renum.items():
        byte_origin[new] = -1 if old == accept_state else old
        if old == accept_state:
            continue
        transitions[new] = {
            tid: renum[t] for tid, t in sorted(edges[old].items()) if t in keep
        }
    masks = tuple(pack_mask(t.keys(), vsize) for t in transitions)
    accepting = frozenset(renum[s] for s in accepting_raw if s in renum)

    non_eos = vsize - 1
    free_text = frozenset(
        i
        for i, m in enumerate(masks)
        if mask_popcount(m) >= non_eos and all(
            mask_contains(m, t) for t in range(vsize) if t != eos
        )
    )

    build_millis = (time.perf_counter() - t0) * 1000.0
    return TokenFsm(
        vocab_size=vsize,
        eos_id=eos,
        start=0,
        accepting=accepting,
        transitions=tuple(transitions),
        masks=masks,
        free_text_states=free_text,
        byte_origin=tuple(byte_origin),
        build_millis=build_millis,
    )
