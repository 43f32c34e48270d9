"""Deterministic stub models and the counter-based RNG behind them.

The RNG is splitmix64 in counter form: draw n is the scramble of
seed + (n+1) * GOLDEN, and a uniform double is (draw >> 11) / 2**53.
No hidden state beyond the counter, so any consumer (including the
TypeScript bindings) can reproduce a stream from (seed, index) alone.
Everything here sticks to IEEE-754 add/mul/div; no transcendentals.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """splitmix64 finalizer on a 64-bit value (pure-int reference path)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MUL1) & MASK64
    z = ((z ^ (z >> 27)) * _MUL2) & MASK64
    return (z ^ (z >> 31)) & MASK64


def derive_seed(root: int, domain: int) -> int:
    """Independent stream seed for a (root seed, domain tag) pair.

    Domain 1 is the model stream, domain 2 the policy stream.
    """
    return mix64((root + domain * GOLDEN) & MASK64)


def uniform_block(seed: int, start: int, n: int) -> np.ndarray:
    """Draws start..start+n-1 of the stream as doubles in [0, 1)."""
    idx = np.arange(start + 1, start + n + 1, dtype=np.uint64)
    z = np.uint64(seed & MASK64) + idx * np.uint64(GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MUL1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MUL2)
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * 2.0**-53


def unit_double(seed: int, index: int) -> float:
    """Pure-int mirror of uniform_block for single draws and goldens."""
    return (mix64((seed + (index + 1) * GOLDEN) & MASK64) >> 11) * 2.0**-53


class DrawStream:
    """Stateful cursor over the counter stream."""

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self.counter = 0

    def uniforms(self, n: int) -> np.ndarray:
        block = uniform_block(self.seed, self.counter, n)
        self.counter += n
        return block

    def uniform(self) -> float:
        u = unit_double(self.seed, self.counter)
        self.counter += 1
        return u


class RandomLogit:
    """Pseudo-random distribution per step, flat-Dirichlet flavored:
    V uniforms normalized by their ascending-order sum.

    Draw window for a prefix of length k is [k*V, (k+1)*V), so the
    distribution depends only on (seed, len(prefix)) and replays exactly
    anywhere the stream is implemented.
    """

    session_exclusive = False

    def __init__(self, seed: int, vocab_size: int):
        self.seed = seed & MASK64
        self.vocab_size = vocab_size

    def next_distribution(self, prefix) -> np.ndarray:
        n = self.vocab_size
        us = uniform_block(self.seed, len(prefix) * n, n)
        total = float(np.cumsum(us)[-1])
        return us / total


class ScriptedStub:
    """Replays a fixed token list: all mass on the scripted token for the
    current position, then on eos once the script runs out."""

    session_exclusive = False

    def __init__(self, token_ids, vocab_size: int, eos_id: int):
        self.script = list(token_ids)
        for tid in self.script:
            if not 0 <= tid < vocab_size:
                raise ValueError(f"scripted token id {tid} outside vocabulary")
        self.vocab_size = vocab_size
        self.eos_id = eos_id

    def next_distribution(self, prefix) -> np.ndarray:
        k = len(prefix)
        tid = self.script[k] if k < len(self.script) else self.eos_id
        dist = np.zeros(self.vocab_size)
        dist[tid] = 1.0
        return dist


class AdversarialStub:
    """All mass on one invalid token for the current machine state.

    Walks the prefix through the machine to find the state, so it must
    not be shared across concurrently running sessions (the incremental
    walk cache assumes append-only prefixes).
    """

    session_exclusive = True

    def __init__(self, seed: int, fsm):
        self.seed = seed & MASK64
        self.fsm = fsm
        self._walked = 0
        self._state: int | None = fsm.start
        self._invalid_cache: dict[int, np.ndarray] = {}

    def _state_for(self, prefix) -> int | None:
        if self._walked > len(prefix):
            self._walked = 0
            self._state = self.fsm.start
        s = self._state
        for t in prefix[self._walked:]:
            if s is None:
                break
            s = self.fsm.transitions[s].get(t)
        self._walked = len(prefix)
        self._state = s
        return s

    def _invalid_ids(self, state: int) -> np.ndarray:
        cached = self._invalid_cache.get(state)
        if cached is None:
            mask = self.fsm.masks[state]
            bits = np.unpackbits(
                np.frombuffer(mask, dtype=np.uint8),
                count=self.fsm.vocab_size,
                bitorder="little",
            )
            cached = np.nonzero(bits == 0)[0]
            self._invalid_cache[state] = cached
        return cached

    def next_distribution(self, prefix) -> np.ndarray:
        n = self.fsm.vocab_size
        dist = np.zeros(n)
        state = self._state_for(prefix)
        invalid = self._invalid_ids(state) if state is not None else np.arange(n)
        if len(invalid) == 0:
            dist[:] = 1.0 / n
            return dist
        draw = mix64((self.seed + (len(prefix) + 1) * GOLDEN) & MASK64)
        dist[int(invalid[draw % len(invalid)])] = 1.0
        return dist
