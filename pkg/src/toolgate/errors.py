"""Exception taxonomy shared across the package.

Everything raised on bad input derives from ToolgateError so the CLI can
map it to a usage/input exit code without enumerating modules.
"""

from __future__ import annotations


class ToolgateError(Exception):
    pass


# --- tool documentation ---

class MalformedDocument(ToolgateError):
    pass


class UnsupportedFeature(ToolgateError):
    def __init__(self, path: str, feature: str):
        super().__init__(f"{path}: unsupported feature: {feature}")
        self.path = path
        self.feature = feature


class DuplicateName(ToolgateError):
    def __init__(self, path: str):
        super().__init__(f"duplicate name at {path}")
        self.path = path


# --- vocabulary ---

class MalformedVocab(ToolgateError):
    pass


class EmptyExpansion(MalformedVocab):
    def __init__(self, token_id: int):
        super().__init__(f"token {token_id} has an empty byte expansion")
        self.token_id = token_id


class MissingEos(MalformedVocab):
    def __init__(self) -> None:
        super().__init__("vocabulary declares no eos token")


class Untokenizable(ToolgateError):
    def __init__(self, offset: int):
        super().__init__(f"no token matches input at byte offset {offset}")
        self.offset = offset


# --- compilation ---

class InexpressibleGrammar(ToolgateError):
    """The vocabulary cannot realize some required byte sequence."""

    def __init__(self, state: int, sample_required_bytes: bytes):
        super().__init__(
            "vocabulary cannot express required bytes %r from state %d"
            % (sample_required_bytes, state)
        )
        self.state = state
        self.sample_required_bytes = sample_required_bytes


class InexpressibleName(ToolgateError):
    def __init__(self, name: str):
        super().__init__(f"tool name {name!r} cannot be tokenized by this vocabulary")
        self.name = name


class MalformedScaffold(ToolgateError):
    pass


# --- artifacts ---

class ArtifactError(ToolgateError):
    pass


class ArtifactFormatError(ArtifactError):
    pass


class ArtifactVersionError(ArtifactError):
    def __init__(self, found: object, supported: int):
        super().__init__(f"artifact format version {found!r} (supported: {supported})")
        self.found = found
        self.supported = supported


class FingerprintMismatch(ArtifactError):
    def __init__(self, expected: str, found: str):
        super().__init__(
            f"vocabulary fingerprint mismatch: expected {expected}, found {found}"
        )
        self.expected = expected
        self.found = found


# --- decoding ---

class ZeroMassSupport(ToolgateError):
    """Every permitted token has zero model probability."""

    def __init__(self, state: int):
        super().__init__(f"model assigns zero mass to every permitted token in state {state}")
        self.state = state


class SessionFinished(ToolgateError):
    pass


class StepLimitExceeded(ToolgateError):
    def __init__(self, limit: int, partial_tokens: list[int]):
        super().__init__(f"no accepting state reached within {limit} steps")
        self.limit = limit
        self.partial_tokens = partial_tokens
