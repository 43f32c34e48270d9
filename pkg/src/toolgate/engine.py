"""Guided decoding loop: mask, renormalize, sample, transition.

The model proposes a distribution over the whole vocabulary; the
machine's per-state mask zeroes everything that cannot extend a valid
call, the remainder is renormalized so permitted tokens keep their
relative odds, and the sampled token moves the machine forward.  A
session is finished exactly when the machine sits in an accepting
state, i.e. the eos gate was just taken.

When the model puts literally zero mass on every permitted token the
step falls back to a uniform distribution over the mask (and counts the
event) instead of dying: a hard stop would make completion depend on
model whims, which is the failure mode this package exists to remove.
mask_distribution itself stays strict and raises ZeroMassSupport so
library users can choose their own treatment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np

from toolgate import kernels
from toolgate.errors import SessionFinished, StepLimitExceeded, ZeroMassSupport
from toolgate.fsm.tokenfsm import TokenFsm, pack_mask
from toolgate.stubs import DrawStream, derive_seed

DEFAULT_STEP_LIMIT = 512


class LanguageModel(Protocol):
    def next_distribution(self, prefix: Sequence[int]) -> np.ndarray: ...


def mask_distribution(
    p: np.ndarray, mask: bytes, out: np.ndarray | None = None, state: int = -1
) -> np.ndarray:
    """Renormalized distribution over the mask; permitted tokens keep
    their probability ratios (one multiply by the reciprocal permitted
    mass).  Raises ZeroMassSupport when that mass is zero."""
    if out is None:
        out = np.empty_like(p)
    total = kernels.renorm_masked(p, mask, out)
    if total == 0.0:
        raise ZeroMassSupport(state)
    return out


# --- sampling policies ---

class Greedy:
    """Highest renormalized probability, lowest id on ties."""

    name = "greedy"

    def pick(self, q: np.ndarray, mask: bytes) -> int:
        return int(np.argmax(q))


class Temperature:
    """Cumulative-scan sampling; t == 1.0 never touches pow."""

    def __init__(self, t: float, seed: int):
        if t <= 0.0:
            raise ValueError("temperature must be positive")
        self.t = t
        self.stream = DrawStream(seed)
        self.name = f"temp:{t:g}"

    def pick(self, q: np.ndarray, mask: bytes) -> int:
        if self.t != 1.0:
            w = np.power(q, 1.0 / self.t)
            total = float(np.cumsum(w)[-1])
            w = w / total
        else:
            w = q
        return int(kernels.cum_pick(w, mask, self.stream.uniform()))


class TopK:
    """Keep the k most likely permitted tokens, renormalize, scan-sample.
    Ties break toward lower ids."""

    def __init__(self, k: int, seed: int):
        if k < 1:
            raise ValueError("k must be at least 1")
        self.k = k
        self.stream = DrawStream(seed)
        self.name = f"topk:{k}"

    def pick(self, q: np.ndarray, mask: bytes) -> int:
        n = q.shape[0]
        bits = np.unpackbits(
            np.frombuffer(mask, dtype=np.uint8), count=n, bitorder="little"
        )
        permitted = np.nonzero(bits)[0]
        ranked = permitted[np.lexsort((permitted, -q[permitted]))][: self.k]
        w = np.zeros_like(q)
        w[ranked] = q[ranked]
        total = float(np.cumsum(w)[-1])
        if total == 0.0:
            w[ranked] = 1.0 / len(ranked)
        else:
            w = w / total
        kmask = pack_mask(ranked.tolist(), n)
        return int(kernels.cum_pick(w, kmask, self.stream.uniform()))


def make_policy(spec: str, root_seed: int):
    """Policy from its CLI spelling: greedy | temp:<t> | topk:<k>.

    Stochastic policies draw from the domain-2 stream of the root seed.
    """
    if spec == "greedy":
        return Greedy()
    kind, _, arg = spec.partition(":")
    if kind == "temp" and arg:
        return Temperature(float(arg), derive_seed(root_seed, 2))
    if kind == "topk" and arg:
        return TopK(int(arg), derive_seed(root_seed, 2))
    raise ValueError(f"unknown policy {spec!r}")


# --- sessions ---

@dataclass
class DecodeSession:
    fsm: TokenFsm
    step_limit: int = DEFAULT_STEP_LIMIT
    state: int = field(init=False)
    tokens: list[int] = field(init=False, default_factory=list)
    zero_mass_fallbacks: int = field(init=False, default=0)
    _buf: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.state = self.fsm.start
        self._buf = np.empty(self.fsm.vocab_size)

    @property
    def finished(self) -> bool:
        return self.state in self.fsm.accepting

    @property
    def step_count(self) -> int:
        return len(self.tokens)


def _checked_distribution(p: np.ndarray, vocab_size: int) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if p.shape != (vocab_size,):
        raise ValueError(f"model distribution has shape {p.shape}, expected ({vocab_size},)")
    total = float(np.sum(p))
    if not np.isfinite(total) or abs(total - 1.0) > 1e-6 or float(np.min(p)) < 0.0:
        raise ValueError("model distribution is not a probability vector")
    return p


def step(session: DecodeSession, model: LanguageModel, policy) -> int:
    """One guided step; returns the emitted token id."""
    if session.finished:
        raise SessionFinished("cannot step a finished session")
    if session.step_count >= session.step_limit:
        raise StepLimitExceeded(session.step_limit, list(session.tokens))
    fsm = session.fsm
    p = _checked_distribution(model.next_distribution(session.tokens), fsm.vocab_size)
    mask = fsm.masks[session.state]
    total = kernels.renorm_masked(p, mask, session._buf)
    q = session._buf
    if total == 0.0:
        # uniform over the permitted set; see module docstring
        session.zero_mass_fallbacks += 1
        bits = np.unpackbits(
            np.frombuffer(mask, dtype=np.uint8),
            count=fsm.vocab_size,
            bitorder="little",
        )
        count = int(bits.sum())
        if count == 0:
            raise ZeroMassSupport(session.state)
        np.divide(bits, count, out=q)
    token = policy.pick(q, mask)
    nxt = fsm.step(session.state, token)
    if nxt is None:
        raise AssertionError(f"policy picked non-permitted token {token}")
    session.tokens.append(token)
    session.state = nxt
    return token


def run_to_completion(session: DecodeSession, model: LanguageModel, policy) -> list[int]:
    """Step until the eos gate is taken; raises StepLimitExceeded (with
    the partial output attached) if the limit arrives first."""
    while not session.finished:
        step(session, model, policy)
    return list(session.tokens)


def accepts(fsm: TokenFsm, token_ids) -> bool:
    """Does the machine accept exactly this token sequence?"""
    s = fsm.walk(token_ids)
    return s is not None and s in fsm.accepting
