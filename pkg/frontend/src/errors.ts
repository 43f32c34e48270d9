/**
 * Typed error family for the bindings.  Everything the loader or the
 * engine can throw subclasses BindingsError, so callers can catch the
 * whole family or `instanceof`-match one cause.
 */

export class BindingsError extends Error {
  constructor(message: string) {
    super(message);
    this.name = new.target.name;
  }
}

/** The artifact declares a format_version this build does not read. */
export class VersionMismatch extends BindingsError {
  constructor(
    readonly found: unknown,
    readonly expected: number,
  ) {
    super(`artifact format_version ${String(found)} is not the supported ${expected}`);
  }
}

/**
 * The artifact is structurally broken: missing fields, undecodable
 * base64, or tables that disagree with each other.
 */
export class ArtifactFormatError extends BindingsError {}

/** The embedded vocabulary's fingerprint is not the one the caller pinned. */
export class FingerprintMismatch extends BindingsError {
  constructor(
    readonly expected: string,
    readonly found: string,
  ) {
    super(`vocabulary fingerprint ${found} does not match expected ${expected}`);
  }
}

/** A caller-supplied array has the wrong length for this machine. */
export class DimensionMismatch extends BindingsError {
  constructor(
    readonly expected: number,
    readonly found: number,
    what = "distribution",
  ) {
    super(`${what} has length ${found}, the machine expects ${expected}`);
  }
}

/** The values of a caller-supplied distribution do not form a probability vector. */
export class InvalidDistribution extends BindingsError {}

/** The session already took the eos gate; there is nothing left to decode. */
export class SessionFinished extends BindingsError {}

/** No permitted token carries any probability mass (strict renormalization). */
export class ZeroMass extends BindingsError {
  constructor(readonly state: number) {
    super(`no probability mass on any permitted token in state ${state}`);
  }
}

/** advance() was handed a token the current state does not permit. */
export class ForbiddenToken extends BindingsError {
  constructor(
    readonly state: number,
    readonly tokenId: number,
  ) {
    super(`token ${tokenId} is not permitted in state ${state}`);
  }
}

/** run() hit its step budget before reaching an accepting state. */
export class StepLimitExceeded extends BindingsError {
  constructor(
    readonly limit: number,
    readonly partialTokens: number[],
  ) {
    super(`step limit of ${limit} reached before the session finished`);
  }
}
