/**
 * Counter-form splitmix64, the same stream the Python engine draws from.
 *
 * Draw n of a stream is the splitmix64 scramble of seed + (n+1) * GOLDEN
 * in wrapping 64-bit arithmetic, and a uniform double is the top 53 bits
 * over 2^53.  There is no hidden state: (seed, index) fully determines
 * every draw, which is what lets a transcript produced here replay
 * bit-for-bit against one produced by the Python CLI.
 */

const MASK64 = (1n << 64n) - 1n;

export const GOLDEN = 0x9e3779b97f4a7c15n;
const MUL1 = 0xbf58476d1ce4e5b9n;
const MUL2 = 0x94d049bb133111ebn;

/** splitmix64 finalizer on a 64-bit value. */
export function mix64(z: bigint): bigint {
  z &= MASK64;
  z = ((z ^ (z >> 30n)) * MUL1) & MASK64;
  z = ((z ^ (z >> 27n)) * MUL2) & MASK64;
  return (z ^ (z >> 31n)) & MASK64;
}

/**
 * Independent stream seed for a (root seed, domain tag) pair.
 *
 * Domain 1 is the model stream, domain 2 the policy stream.
 */
export function deriveSeed(root: bigint, domain: bigint): bigint {
  return mix64((root + domain * GOLDEN) & MASK64);
}

/** Draw `index` of the stream as a double in [0, 1). */
export function unitDouble(seed: bigint, index: number): number {
  const z = mix64((seed + BigInt(index + 1) * GOLDEN) & MASK64);
  // z >> 11 fits in 53 bits, so the conversion to double is exact
  return Number(z >> 11n) * 2 ** -53;
}

/** Draws start..start+n-1 of the stream as a dense block. */
export function uniformBlock(seed: bigint, start: number, n: number): Float64Array {
  const out = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    out[i] = unitDouble(seed, start + i);
  }
  return out;
}

/** Stateful cursor over the counter stream. */
export class DrawStream {
  readonly seed: bigint;
  counter = 0;

  constructor(seed: bigint) {
    this.seed = seed & MASK64;
  }

  uniform(): number {
    return unitDouble(this.seed, this.counter++);
  }

  uniforms(n: number): Float64Array {
    const block = uniformBlock(this.seed, this.counter, n);
    this.counter += n;
    return block;
  }
}
