"""numpy implementations of the hot ops.

Kept bitwise-compatible with the Cython kernels: cumsum is sequential
(same addition order as a C loop), adding the 0.0 of a masked-out slot
never changes a finite total, and normalization is one multiply by the
reciprocal, so each element rounds once in both backends.
"""

from __future__ import annotations

import numpy as np


def renorm_masked(p: np.ndarray, mask: bytes, out: np.ndarray) -> float:
    """Zero out tokens not in the packed mask, renormalize into out.

    Returns the pre-normalization permitted mass; 0.0 means the caller
    has a zero-mass situation and out is all zeros.
    """
    n = p.shape[0]
    bits = np.unpackbits(
        np.frombuffer(mask, dtype=np.uint8), count=n, bitorder="little"
    )
    np.multiply(p, bits, out=out)
    total = float(np.cumsum(out)[-1])
    if total > 0.0:
        np.multiply(out, 1.0 / total, out=out)
    else:
        out[:] = 0.0
    return total


def cum_pick(q: np.ndarray, mask: bytes, u: float) -> int:
    """First index whose cumulative mass exceeds u; clamps to the last
    permitted token when u lands beyond the (rounded) total."""
    c = np.cumsum(q)
    idx = int(np.searchsorted(c, u, side="right"))
    if idx < q.shape[0]:
        return idx
    top = int.from_bytes(mask, "little").bit_length() - 1
    return top if top >= 0 else -1
