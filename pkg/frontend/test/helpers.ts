/**
 * Shared plumbing for the binding tests: every fixture artifact is
 * produced by the Python CLI, so the tests exercise the real interface
 * boundary instead of a reimplementation of the compiler.
 */

import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";

export const repoRoot = fileURLToPath(new URL("../..", import.meta.url));
export const dataDir = join(repoRoot, "src", "toolgate", "data");
export const goldenDir = join(repoRoot, "tests", "golden");

export function makeTempDir(label: string): string {
  return mkdtempSync(join(tmpdir(), `toolgate-bindings-${label}-`));
}

export function cli(args: string[]): string {
  return execFileSync("python3", ["-m", "toolgate.cli", ...args], {
    encoding: "utf-8",
    stdio: ["ignore", "pipe", "pipe"],
  });
}

/** Compile the ten-tool fixture against the 512-token vocabulary. */
export function compileArtifact(dir: string, scaffold = "react"): string {
  const out = join(dir, "artifact.json");
  cli([
    "compile",
    "--schemas",
    join(dataDir, "tools10.json"),
    "--vocab",
    join(dataDir, "vocab512.json"),
    "--scaffold",
    scaffold,
    "--out",
    out,
  ]);
  return out;
}

export function readText(path: string): string {
  return readFileSync(path, "utf-8");
}
