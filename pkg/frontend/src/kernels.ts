/**
 * The per-step hot operations, kept bitwise-identical to the Python
 * backends: selection multiplies each probability by its 0/1 mask bit,
 * the permitted mass accumulates strictly left to right, and
 * normalization is one multiply by the reciprocal of that mass.  JS
 * numbers are IEEE-754 doubles, so every intermediate rounds exactly
 * like the C and numpy code paths.
 *
 * Masks are packed little-endian: token id i lives at bit (i & 7) of
 * byte (i >> 3).
 */

/** True when token id i is set in the packed mask. */
export function maskContains(mask: Uint8Array, tokenId: number): boolean {
  return (mask[tokenId >> 3] & (1 << (tokenId & 7))) !== 0;
}

/** Number of permitted tokens in the mask. */
export function maskCount(mask: Uint8Array): number {
  let count = 0;
  for (let i = 0; i < mask.length; i++) {
    let b = mask[i];
    while (b) {
      b &= b - 1;
      count++;
    }
  }
  return count;
}

/** Token ids set in the mask, ascending. */
export function maskIds(mask: Uint8Array, vocabSize: number): number[] {
  const out: number[] = [];
  for (let i = 0; i < vocabSize; i++) {
    if ((mask[i >> 3] >> (i & 7)) & 1) {
      out.push(i);
    }
  }
  return out;
}

/**
 * Zero out tokens absent from the mask and renormalize into out, so the
 * permitted tokens keep their probability ratios.
 *
 * Returns the pre-normalization permitted mass; 0.0 means out is all
 * zeros and the caller has a zero-mass situation to handle.
 */
export function renormMasked(p: Float64Array, mask: Uint8Array, out: Float64Array): number {
  const n = p.length;
  let total = 0.0;
  for (let i = 0; i < n; i++) {
    const v = p[i] * ((mask[i >> 3] >> (i & 7)) & 1);
    out[i] = v;
    total += v;
  }
  if (total > 0.0) {
    const rt = 1.0 / total;
    for (let i = 0; i < n; i++) {
      out[i] = out[i] * rt;
    }
  } else {
    out.fill(0.0);
  }
  return total;
}

/**
 * First index whose running cumulative mass strictly exceeds u; clamps
 * to the highest permitted token when rounding leaves the total at or
 * below u (e.g. u drawn arbitrarily close to 1).
 */
export function cumPick(q: Float64Array, mask: Uint8Array, u: number): number {
  let c = 0.0;
  for (let i = 0; i < q.length; i++) {
    c = c + q[i];
    if (c > u) {
      return i;
    }
  }
  for (let i = q.length - 1; i >= 0; i--) {
    if (mask[i >> 3] & (1 << (i & 7))) {
      return i;
    }
  }
  return -1;
}
