/**
 * Guided decoding over a loaded token machine: mask, renormalize,
 * sample, transition.
 *
 * Two calling styles are supported.  Engine-samples: hand step() a
 * model and a policy and let the session draw the token.  Caller-
 * samples: ask for maskedDistribution(), sample however you like, and
 * advance() with the chosen token.  Either way the machine only ever
 * moves along permitted edges, so a finished session spells a
 * syntactically valid transcript by construction.
 *
 * When the model puts literally zero mass on every permitted token,
 * step() falls back to a uniform distribution over the mask and counts
 * the event instead of dying; maskedDistribution() stays strict and
 * throws ZeroMass so library callers can pick their own treatment.
 */

import { detokenize, type SessionArtifact, type TokenMachine, loadArtifact } from "./artifact.js";
import {
  DimensionMismatch,
  ForbiddenToken,
  InvalidDistribution,
  SessionFinished,
  StepLimitExceeded,
  ZeroMass,
} from "./errors.js";
import { cumPick, maskContains, renormMasked } from "./kernels.js";
import { DrawStream, deriveSeed } from "./rng.js";

export const DEFAULT_STEP_LIMIT = 512;

export interface LanguageModel {
  /** Distribution over the whole vocabulary for the next position. */
  nextDistribution(prefix: readonly number[]): Float64Array;
}

export interface SamplingPolicy {
  readonly name: string;
  /** Pick a token from a renormalized distribution over the mask. */
  pick(q: Float64Array, mask: Uint8Array): number;
}

/** Highest renormalized probability, lowest id on ties. */
export class Greedy implements SamplingPolicy {
  readonly name = "greedy";

  pick(q: Float64Array, _mask: Uint8Array): number {
    let best = 0;
    for (let i = 1; i < q.length; i++) {
      if (q[i] > q[best]) {
        best = i;
      }
    }
    return best;
  }
}

/**
 * Cumulative-scan sampling.  t == 1.0 never touches pow and replays
 * bit-for-bit against the Python engine; other temperatures depend on
 * the platform's pow and are only reproducible within rounding.
 */
export class Temperature implements SamplingPolicy {
  readonly name: string;
  readonly t: number;
  readonly stream: DrawStream;

  constructor(t: number, seed: bigint) {
    if (!(t > 0)) {
      throw new RangeError("temperature must be positive");
    }
    this.t = t;
    this.stream = new DrawStream(seed);
    this.name = `temp:${t}`;
  }

  pick(q: Float64Array, mask: Uint8Array): number {
    let w = q;
    if (this.t !== 1.0) {
      w = new Float64Array(q.length);
      let total = 0.0;
      for (let i = 0; i < q.length; i++) {
        const v = Math.pow(q[i], 1.0 / this.t);
        w[i] = v;
        total += v;
      }
      for (let i = 0; i < w.length; i++) {
        w[i] = w[i] / total;
      }
    }
    return cumPick(w, mask, this.stream.uniform());
  }
}

/**
 * Keep the k most likely permitted tokens, renormalize, scan-sample.
 * Ties break toward lower ids.
 */
export class TopK implements SamplingPolicy {
  readonly name: string;
  readonly k: number;
  readonly stream: DrawStream;

  constructor(k: number, seed: bigint) {
    if (!Number.isInteger(k) || k < 1) {
      throw new RangeError("k must be at least 1");
    }
    this.k = k;
    this.stream = new DrawStream(seed);
    this.name = `topk:${k}`;
  }

  pick(q: Float64Array, mask: Uint8Array): number {
    const permitted: number[] = [];
    for (let i = 0; i < q.length; i++) {
      if (maskContains(mask, i)) {
        permitted.push(i);
      }
    }
    // descending probability, ascending id on ties
    permitted.sort((a, b) => q[b] - q[a] || a - b);
    const ranked = permitted.slice(0, this.k);
    const w = new Float64Array(q.length);
    let total = 0.0;
    for (const tid of ranked) {
      w[tid] = q[tid];
    }
    for (let i = 0; i < w.length; i++) {
      total += w[i];
    }
    if (total === 0.0) {
      for (const tid of ranked) {
        w[tid] = 1.0 / ranked.length;
      }
    } else {
      for (let i = 0; i < w.length; i++) {
        w[i] = w[i] / total;
      }
    }
    const kmask = new Uint8Array(mask.length);
    for (const tid of ranked) {
      kmask[tid >> 3] |= 1 << (tid & 7);
    }
    return cumPick(w, kmask, this.stream.uniform());
  }
}

/**
 * Policy from its CLI spelling: greedy | temp:<t> | topk:<k>.
 * Stochastic policies draw from the domain-2 stream of the root seed.
 */
export function makePolicy(spec: string, rootSeed: bigint): SamplingPolicy {
  if (spec === "greedy") {
    return new Greedy();
  }
  const sep = spec.indexOf(":");
  const kind = sep < 0 ? spec : spec.slice(0, sep);
  const arg = sep < 0 ? "" : spec.slice(sep + 1);
  if (kind === "temp" && arg !== "") {
    const t = Number(arg);
    if (Number.isFinite(t)) {
      return new Temperature(t, deriveSeed(rootSeed, 2n));
    }
  }
  if (kind === "topk" && arg !== "") {
    const k = Number(arg);
    if (Number.isInteger(k)) {
      return new TopK(k, deriveSeed(rootSeed, 2n));
    }
  }
  throw new RangeError(`unknown policy ${JSON.stringify(spec)}`);
}

function checkedDistribution(p: Float64Array, vocabSize: number): Float64Array {
  if (!(p instanceof Float64Array)) {
    throw new InvalidDistribution("model distribution must be a Float64Array");
  }
  if (p.length !== vocabSize) {
    throw new DimensionMismatch(vocabSize, p.length);
  }
  let total = 0.0;
  let min = Infinity;
  for (let i = 0; i < p.length; i++) {
    total += p[i];
    if (p[i] < min) {
      min = p[i];
    }
  }
  if (!Number.isFinite(total) || Math.abs(total - 1.0) > 1e-6 || min < 0.0) {
    throw new InvalidDistribution("model distribution is not a probability vector");
  }
  return p;
}

export interface SessionOptions {
  stepLimit?: number;
}

/** One decoding session over a token machine. */
export class DecodeSession {
  readonly machine: TokenMachine;
  readonly stepLimit: number;
  readonly tokens: number[] = [];
  state: number;
  zeroMassFallbacks = 0;
  private readonly buf: Float64Array;

  constructor(machine: TokenMachine, options: SessionOptions = {}) {
    this.machine = machine;
    this.stepLimit = options.stepLimit ?? DEFAULT_STEP_LIMIT;
    this.state = machine.start;
    this.buf = new Float64Array(machine.vocabSize);
  }

  get finished(): boolean {
    return this.machine.accepting.has(this.state);
  }

  get stepCount(): number {
    return this.tokens.length;
  }

  /** Packed permitted-token bitset for the current state. */
  get mask(): Uint8Array {
    return this.machine.masks[this.state];
  }

  /**
   * Caller-samples style, strict: the renormalized distribution over
   * the current mask, written into `out` when given.  Throws ZeroMass
   * when no permitted token carries any mass.
   */
  maskedDistribution(p: Float64Array, out?: Float64Array): Float64Array {
    if (this.finished) {
      throw new SessionFinished("cannot extend a finished session");
    }
    checkedDistribution(p, this.machine.vocabSize);
    const target = out ?? new Float64Array(this.machine.vocabSize);
    if (target.length !== this.machine.vocabSize) {
      throw new DimensionMismatch(this.machine.vocabSize, target.length, "output buffer");
    }
    const total = renormMasked(p, this.mask, target);
    if (total === 0.0) {
      throw new ZeroMass(this.state);
    }
    return target;
  }

  /** Caller-samples style: commit a token the caller picked. */
  advance(tokenId: number): void {
    if (this.finished) {
      throw new SessionFinished("cannot extend a finished session");
    }
    if (this.stepCount >= this.stepLimit) {
      throw new StepLimitExceeded(this.stepLimit, [...this.tokens]);
    }
    const next = this.machine.transitions[this.state].get(tokenId);
    if (next === undefined) {
      throw new ForbiddenToken(this.state, tokenId);
    }
    this.tokens.push(tokenId);
    this.state = next;
  }

  /**
   * Engine-samples style: one guided step.  Zero permitted mass falls
   * back to a uniform distribution over the mask (counted in
   * zeroMassFallbacks) so completion never depends on model whims.
   * Returns the emitted token id.
   */
  step(model: LanguageModel, policy: SamplingPolicy): number {
    if (this.finished) {
      throw new SessionFinished("cannot step a finished session");
    }
    if (this.stepCount >= this.stepLimit) {
      throw new StepLimitExceeded(this.stepLimit, [...this.tokens]);
    }
    const p = checkedDistribution(model.nextDistribution(this.tokens), this.machine.vocabSize);
    const mask = this.mask;
    const total = renormMasked(p, mask, this.buf);
    if (total === 0.0) {
      this.zeroMassFallbacks++;
      let count = 0;
      for (let i = 0; i < this.machine.vocabSize; i++) {
        count += (mask[i >> 3] >> (i & 7)) & 1;
      }
      if (count === 0) {
        throw new ZeroMass(this.state);
      }
      for (let i = 0; i < this.machine.vocabSize; i++) {
        this.buf[i] = ((mask[i >> 3] >> (i & 7)) & 1) / count;
      }
    }
    const token = policy.pick(this.buf, mask);
    const next = this.machine.transitions[this.state].get(token);
    if (next === undefined) {
      throw new ForbiddenToken(this.state, token);
    }
    this.tokens.push(token);
    this.state = next;
    return token;
  }

  /**
   * Step until the eos gate is taken; throws StepLimitExceeded (with
   * the partial output attached) if the budget arrives first.
   */
  run(model: LanguageModel, policy: SamplingPolicy): number[] {
    while (!this.finished) {
      this.step(model, policy);
    }
    return [...this.tokens];
  }
}

/** Does the machine accept exactly this token sequence? */
export function accepts(machine: TokenMachine, tokenIds: readonly number[]): boolean {
  let state = machine.start;
  for (const tid of tokenIds) {
    const next = machine.transitions[state].get(tid);
    if (next === undefined) {
      return false;
    }
    state = next;
  }
  return machine.accepting.has(state);
}

/** A loaded artifact plus the conveniences most callers want. */
export class BoundEngine {
  readonly artifact: SessionArtifact;

  constructor(artifact: SessionArtifact) {
    this.artifact = artifact;
  }

  static fromJson(data: string | Uint8Array, options?: { expectFingerprint?: string }): BoundEngine {
    return new BoundEngine(loadArtifact(data, options));
  }

  get machine(): TokenMachine {
    return this.artifact.machine;
  }

  newSession(options: SessionOptions = {}): DecodeSession {
    return new DecodeSession(this.artifact.machine, options);
  }

  /** Concatenated byte expansion of a token sequence. */
  detokenize(tokenIds: readonly number[]): Uint8Array {
    return detokenize(this.artifact.vocab, tokenIds);
  }

  /** Transcript text: body tokens decoded as UTF-8, trailing eos dropped. */
  text(tokenIds: readonly number[]): string {
    const body =
      tokenIds.length > 0 && tokenIds[tokenIds.length - 1] === this.artifact.machine.eosId
        ? tokenIds.slice(0, -1)
        : tokenIds;
    return new TextDecoder("utf-8", { fatal: false }).decode(this.detokenize(body));
  }
}
