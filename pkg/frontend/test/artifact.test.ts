import { beforeAll, describe, expect, it } from "vitest";

import { loadArtifact, vocabFingerprint } from "../src/artifact.js";
import {
  ArtifactFormatError,
  FingerprintMismatch,
  VersionMismatch,
} from "../src/errors.js";
import { compileArtifact, makeTempDir, readText } from "./helpers.js";

let artifactText: string;

beforeAll(() => {
  artifactText = readText(compileArtifact(makeTempDir("artifact")));
});

/** Re-serialize the artifact with one mutation applied to the parsed document. */
function tampered(mutate: (doc: Record<string, any>) => void): string {
  const doc = JSON.parse(artifactText);
  mutate(doc);
  return JSON.stringify(doc);
}

describe("loadArtifact", () => {
  it("loads a CLI-compiled artifact and wires the tables together", () => {
    const art = loadArtifact(artifactText);
    expect(art.vocab.expansions.length).toBe(512);
    expect(art.machine.vocabSize).toBe(512);
    expect(art.machine.eosId).toBe(art.vocab.eosId);
    expect(art.machine.stateCount).toBeGreaterThan(0);
    expect(art.machine.transitions.length).toBe(art.machine.stateCount);
    expect(art.machine.masks.length).toBe(art.machine.stateCount);
    expect(art.machine.accepting.size).toBeGreaterThan(0);
    expect(art.toolLeaves.size).toBe(10);
    expect(art.vocabFingerprint).toBe(vocabFingerprint(art.vocab));
    for (const leaf of art.toolLeaves.values()) {
      expect(leaf).toBeGreaterThanOrEqual(0);
      expect(leaf).toBeLessThan(art.machine.stateCount);
    }
  });

  it("gives accepting states an empty mask and no outgoing edges", () => {
    const art = loadArtifact(artifactText);
    for (const s of art.machine.accepting) {
      expect(art.machine.transitions[s].size).toBe(0);
      expect(art.machine.masks[s].every((b) => b === 0)).toBe(true);
    }
  });

  it("accepts bytes as input", () => {
    const art = loadArtifact(new TextEncoder().encode(artifactText));
    expect(art.machine.vocabSize).toBe(512);
  });

  it("honors an expected fingerprint", () => {
    const art = loadArtifact(artifactText);
    expect(() => loadArtifact(artifactText, { expectFingerprint: art.vocabFingerprint })).not.toThrow();
    expect(() => loadArtifact(artifactText, { expectFingerprint: "deadbeef" })).toThrow(FingerprintMismatch);
  });

  it("rejects an unknown format version", () => {
    expect(() => loadArtifact(tampered((d) => (d.format_version = 2)))).toThrow(VersionMismatch);
    try {
      loadArtifact(tampered((d) => delete d.format_version));
      expect.unreachable();
    } catch (e) {
      expect(e).toBeInstanceOf(VersionMismatch);
      expect((e as VersionMismatch).expected).toBe(1);
    }
  });

  it("rejects a vocabulary that no longer matches its fingerprint", () => {
    expect(() =>
      loadArtifact(
        tampered((d) => {
          d.vocab.tokens[3] = d.vocab.tokens[4];
        }),
      ),
    ).toThrow(ArtifactFormatError);
  });

  it("rejects a flipped mask bit", () => {
    expect(() =>
      loadArtifact(
        tampered((d) => {
          const blob = Buffer.from(d.fsm.masks, "base64");
          blob[0] ^= 1;
          d.fsm.masks = blob.toString("base64");
        }),
      ),
    ).toThrow(/mask of state/);
  });

  it("rejects a truncated transition blob", () => {
    expect(() =>
      loadArtifact(
        tampered((d) => {
          const blob = Buffer.from(d.fsm.transitions, "base64");
          d.fsm.transitions = blob.subarray(0, blob.length - 4).toString("base64");
        }),
      ),
    ).toThrow(/multiple of 12/);
  });

  it("rejects out-of-range header values", () => {
    expect(() => loadArtifact(tampered((d) => (d.fsm.start = d.fsm.state_count)))).toThrow(/start state/);
    expect(() => loadArtifact(tampered((d) => (d.fsm.vocab_size = 8)))).toThrow(/disagrees/);
  });

  it("rejects structural junk", () => {
    expect(() => loadArtifact("not json")).toThrow(ArtifactFormatError);
    expect(() => loadArtifact("[1,2,3]")).toThrow(ArtifactFormatError);
    expect(() => loadArtifact(tampered((d) => delete d.fsm))).toThrow(ArtifactFormatError);
    expect(() => loadArtifact(tampered((d) => (d.fsm.masks = "@@@not-base64@@@")))).toThrow(/base64/);
  });
});
