export {
  FORMAT_VERSION,
  detokenize,
  loadArtifact,
  vocabFingerprint,
  type LoadOptions,
  type SessionArtifact,
  type TokenMachine,
  type Vocabulary,
} from "./artifact.js";
export {
  BoundEngine,
  DEFAULT_STEP_LIMIT,
  DecodeSession,
  Greedy,
  Temperature,
  TopK,
  accepts,
  makePolicy,
  type LanguageModel,
  type SamplingPolicy,
  type SessionOptions,
} from "./engine.js";
export {
  ArtifactFormatError,
  BindingsError,
  DimensionMismatch,
  FingerprintMismatch,
  ForbiddenToken,
  InvalidDistribution,
  SessionFinished,
  StepLimitExceeded,
  VersionMismatch,
  ZeroMass,
} from "./errors.js";
export { cumPick, maskContains, maskCount, maskIds, renormMasked } from "./kernels.js";
export { RandomLogit, ScriptedModel } from "./models.js";
export { MaskLogitsProcessor, createLogitsProcessor, type LogitsProcessor, type ProcessorOptions } from "./processor.js";
export { DrawStream, GOLDEN, deriveSeed, mix64, uniformBlock, unitDouble } from "./rng.js";
