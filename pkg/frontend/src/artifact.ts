/**
 * Loader for compiled-session artifacts (format_version 1).
 *
 * An artifact is one self-contained JSON document: the vocabulary, the
 * tool inventory and scaffold in their canonical raw forms, the token
 * machine as a base64 blob of little-endian u32 (state, token, next)
 * triples plus one concatenated packed-mask blob, and the tool-name
 * leaf states.  Loading re-validates everything that is cheap to check:
 * the format version, the fingerprint against the embedded vocabulary,
 * and that the mask table is exactly the bit-image of the transition
 * table.
 */

import { createHash } from "node:crypto";

import {
  ArtifactFormatError,
  FingerprintMismatch,
  VersionMismatch,
} from "./errors.js";

export const FORMAT_VERSION = 1;

export interface Vocabulary {
  /** Dense id -> byte expansion table; ids are the positions. */
  expansions: Uint8Array[];
  eosId: number;
  byteFallback: boolean;
}

export interface TokenMachine {
  vocabSize: number;
  eosId: number;
  stateCount: number;
  start: number;
  accepting: Set<number>;
  /** Per-state token id -> next state. */
  transitions: Map<number, number>[];
  /** Per-state packed permitted-token bitset, little-endian bit order. */
  masks: Uint8Array[];
  freeTextStates: Set<number>;
}

export interface SessionArtifact {
  vocabFingerprint: string;
  vocab: Vocabulary;
  machine: TokenMachine;
  /** Tool name -> machine state reached right after spelling that name. */
  toolLeaves: Map<string, number>;
  /** Tool documentation exactly as embedded; kept raw for round-tripping. */
  inventory: unknown;
  /** Scaffold segments exactly as embedded. */
  scaffold: unknown;
}

export interface LoadOptions {
  /** Require the embedded vocabulary to carry exactly this fingerprint. */
  expectFingerprint?: string;
}

const BASE64_RE = /^[A-Za-z0-9+/]*={0,2}$/;

function decodeBase64(value: unknown, what: string): Uint8Array {
  if (typeof value !== "string" || value.length % 4 !== 0 || !BASE64_RE.test(value)) {
    throw new ArtifactFormatError(`${what} is not valid base64`);
  }
  return new Uint8Array(Buffer.from(value, "base64"));
}

/**
 * sha256 over a length-prefixed dump of the vocabulary table; the same
 * digest the Python side computes, so fingerprints can be pinned across
 * the two implementations.
 */
export function vocabFingerprint(vocab: Vocabulary): string {
  const h = createHash("sha256");
  const le32 = Buffer.alloc(4);
  le32.writeUInt32LE(vocab.expansions.length, 0);
  h.update(le32);
  for (const exp of vocab.expansions) {
    const len = Buffer.alloc(4);
    len.writeUInt32LE(exp.length, 0);
    h.update(len);
    h.update(exp);
  }
  const eos = Buffer.alloc(4);
  eos.writeUInt32LE(vocab.eosId, 0);
  h.update(eos);
  h.update(Buffer.from([vocab.byteFallback ? 1 : 0]));
  return h.digest("hex");
}

function parseVocab(raw: unknown): Vocabulary {
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new ArtifactFormatError("vocab must be an object");
  }
  const doc = raw as Record<string, unknown>;
  if (!Array.isArray(doc.tokens) || doc.tokens.length === 0) {
    throw new ArtifactFormatError("vocab has a missing or empty token list");
  }
  const expansions = doc.tokens.map((entry, i) => {
    const bytes = decodeBase64(entry, `vocab token ${i}`);
    if (bytes.length === 0) {
      throw new ArtifactFormatError(`vocab token ${i} has an empty expansion`);
    }
    return bytes;
  });
  const eosId = doc.eos;
  if (typeof eosId !== "number" || !Number.isInteger(eosId) || eosId < 0 || eosId >= expansions.length) {
    throw new ArtifactFormatError("vocab eos index is missing or out of range");
  }
  return { expansions, eosId, byteFallback: Boolean(doc.byte_fallback) };
}

/** Packed little-endian bitset over the keys of a transition row. */
function packMask(tokenIds: Iterable<number>, vocabSize: number): Uint8Array {
  const mask = new Uint8Array((vocabSize + 7) >> 3);
  for (const tid of tokenIds) {
    mask[tid >> 3] |= 1 << (tid & 7);
  }
  return mask;
}

function bytesEqual(a: Uint8Array, b: Uint8Array): boolean {
  if (a.length !== b.length) return false;
  for (let i = 0; i < a.length; i++) {
    if (a[i] !== b[i]) return false;
  }
  return true;
}

export function loadArtifact(data: string | Uint8Array, options: LoadOptions = {}): SessionArtifact {
  const text = typeof data === "string" ? data : new TextDecoder().decode(data);
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (e) {
    throw new ArtifactFormatError(`not valid JSON: ${(e as Error).message}`);
  }
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    throw new ArtifactFormatError("top level must be an object");
  }
  const root = doc as Record<string, unknown>;
  if (root.format_version !== FORMAT_VERSION) {
    throw new VersionMismatch(root.format_version, FORMAT_VERSION);
  }

  const vocab = parseVocab(root.vocab);
  const fsm = root.fsm;
  if (typeof fsm !== "object" || fsm === null || Array.isArray(fsm)) {
    throw new ArtifactFormatError("fsm section must be an object");
  }
  const raw = fsm as Record<string, unknown>;
  const stateCount = raw.state_count;
  const vocabSize = raw.vocab_size;
  const eosId = raw.eos_id;
  const start = raw.start;
  if (
    typeof stateCount !== "number" ||
    typeof vocabSize !== "number" ||
    typeof eosId !== "number" ||
    typeof start !== "number"
  ) {
    throw new ArtifactFormatError("fsm header fields must be integers");
  }
  if (!Array.isArray(raw.accepting) || !Array.isArray(raw.free_text_states)) {
    throw new ArtifactFormatError("fsm accepting / free_text_states must be lists");
  }
  const blob = decodeBase64(raw.transitions, "transition blob");
  const maskBlob = decodeBase64(raw.masks, "mask blob");
  if (typeof root.tool_leaves !== "object" || root.tool_leaves === null || Array.isArray(root.tool_leaves)) {
    throw new ArtifactFormatError("tool_leaves must be an object");
  }
  if (!("inventory" in root) || !("scaffold" in root)) {
    throw new ArtifactFormatError("artifact is missing the inventory or scaffold");
  }

  const stored = root.vocab_fingerprint;
  const computed = vocabFingerprint(vocab);
  if (stored !== computed) {
    throw new ArtifactFormatError("embedded vocabulary does not match its fingerprint");
  }
  if (options.expectFingerprint !== undefined && stored !== options.expectFingerprint) {
    throw new FingerprintMismatch(options.expectFingerprint, stored);
  }
  if (vocabSize !== vocab.expansions.length || eosId !== vocab.eosId) {
    throw new ArtifactFormatError("fsm header disagrees with the embedded vocabulary");
  }
  if (!Number.isInteger(stateCount) || !Number.isInteger(start) || start < 0 || start >= stateCount) {
    throw new ArtifactFormatError("start state out of range");
  }

  if (blob.length % 12 !== 0) {
    throw new ArtifactFormatError("transition blob length is not a multiple of 12");
  }
  const view = new DataView(blob.buffer, blob.byteOffset, blob.byteLength);
  const transitions: Map<number, number>[] = Array.from({ length: stateCount }, () => new Map());
  for (let off = 0; off < blob.length; off += 12) {
    const state = view.getUint32(off, true);
    const token = view.getUint32(off + 4, true);
    const next = view.getUint32(off + 8, true);
    if (state >= stateCount || next >= stateCount || token >= vocabSize) {
      throw new ArtifactFormatError("transition triple out of range");
    }
    transitions[state].set(token, next);
  }

  const maskWidth = (vocabSize + 7) >> 3;
  if (maskBlob.length !== stateCount * maskWidth) {
    throw new ArtifactFormatError("mask table has the wrong size");
  }
  const masks: Uint8Array[] = [];
  for (let s = 0; s < stateCount; s++) {
    const mask = maskBlob.subarray(s * maskWidth, (s + 1) * maskWidth);
    if (!bytesEqual(packMask(transitions[s].keys(), vocabSize), mask)) {
      throw new ArtifactFormatError(`mask of state ${s} does not match its transitions`);
    }
    masks.push(mask);
  }

  const accepting = new Set<number>();
  for (const s of raw.accepting as unknown[]) {
    if (typeof s !== "number" || s < 0 || s >= stateCount) {
      throw new ArtifactFormatError("accepting state out of range");
    }
    accepting.add(s);
  }
  const freeTextStates = new Set<number>();
  for (const s of raw.free_text_states as unknown[]) {
    if (typeof s !== "number" || s < 0 || s >= stateCount) {
      throw new ArtifactFormatError("free-text state out of range");
    }
    freeTextStates.add(s);
  }
  const toolLeaves = new Map<string, number>();
  for (const [name, leaf] of Object.entries(root.tool_leaves as Record<string, unknown>)) {
    if (typeof leaf !== "number" || leaf < 0 || leaf >= stateCount) {
      throw new ArtifactFormatError(`tool leaf for ${name} out of range`);
    }
    toolLeaves.set(name, leaf);
  }

  return {
    vocabFingerprint: stored as string,
    vocab,
    machine: {
      vocabSize,
      eosId,
      stateCount,
      start,
      accepting,
      transitions,
      masks,
      freeTextStates,
    },
    toolLeaves,
    inventory: root.inventory,
    scaffold: root.scaffold,
  };
}

/** Concatenated byte expansion of a token sequence. */
export function detokenize(vocab: Vocabulary, tokenIds: readonly number[]): Uint8Array {
  let length = 0;
  for (const tid of tokenIds) {
    length += vocab.expansions[tid].length;
  }
  const out = new Uint8Array(length);
  let off = 0;
  for (const tid of tokenIds) {
    out.set(vocab.expansions[tid], off);
    off += vocab.expansions[tid].length;
  }
  return out;
}
