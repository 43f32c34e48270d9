"""Hand-written validator for tool-call text.

This is the independent arbiter used by tests and the CLI: a recursive
descent parser over raw bytes that shares no code with the FSM compiler.
It checks the same canonical surface the compiler targets:

* argument objects are JSON-shaped, parameters in documentation order,
  required ones all present, at most one space after ':' and ',';
* strings know exactly two escapes (\\" and \\\\) and reject unescaped
  control bytes; integers have no leading zeros; numbers are JSON-style;
* a session transcript is literals, anchored free text, a tool name, and
  one argument object, in scaffold order.

Verdicts carry the byte offset of the first violation.  Offset/class
choices for situations the grammar merely rejects (e.g. enum mismatch)
are pinned here and in the test suite: name problems at tool selection
are NameError; unknown/out-of-order/missing parameters, wrong value
kinds, and enum mismatches are ArgumentError; structural breakage
(punctuation, truncation, bad escapes, control bytes, trailing data) is
FormatError.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from toolgate.schema import ParamSpec, ParamType, ToolInventory, ToolSchema


class Verdict(enum.Enum):
    VALID = "Valid"
    NAME_ERROR = "NameError"
    ARGUMENT_ERROR = "ArgumentError"
    FORMAT_ERROR = "FormatError"


@dataclass(frozen=True)
class ValidationReport:
    verdict: Verdict
    offset: int | None = None
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.verdict == Verdict.VALID

    def as_dict(self) -> dict:
        return {"verdict": self.verdict.value, "offset": self.offset, "message": self.message}


class _Fail(Exception):
    def __init__(self, verdict: Verdict, offset: int, message: str):
        self.report = ValidationReport(verdict, offset, message)


def _fmt(offset: int, message: str) -> _Fail:
    return _Fail(Verdict.FORMAT_ERROR, offset, message)


def _arg(offset: int, message: str) -> _Fail:
    return _Fail(Verdict.ARGUMENT_ERROR, offset, message)


_DIGITS = frozenset(b"0123456789")
_IDENT_BYTES = frozenset(b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")

# first byte that can start a value of each scalar kind
_STARTERS = {
    "string": frozenset(b'"'),
    "enum": frozenset(b'"'),
    "integer": frozenset(b"-0123456789"),
    "number": frozenset(b"-0123456789"),
    "boolean": frozenset(b"tf"),
    "object": frozenset(b"{"),
    "array": frozenset(b"["),
}


class _Parser:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def peek(self) -> int:
        if self.pos >= len(self.data):
            return -1
        return self.data[self.pos]

    def take(self) -> int:
        b = self.peek()
        if b < 0:
            raise _fmt(len(self.data), "unexpected end of input")
        self.pos += 1
        return b

    def expect(self, byte: int, what: str) -> None:
        b = self.peek()
        if b != byte:
            off = self.pos if b >= 0 else len(self.data)
            raise _fmt(off, f"expected {what}")
        self.pos += 1

    def skip_one_space(self) -> None:
        if self.peek() == 0x20:
            self.pos += 1

    # --- values ---

    def string_content(self) -> bytes:
        """Body of a string value; opening quote already consumed."""
        out = bytearray()
        while True:
            b = self.take()
            if b == 0x22:
                return bytes(out)
            if b == 0x5C:
                esc = self.take()
                if esc not in (0x22, 0x5C):
                    raise _fmt(self.pos - 1, "unsupported escape")
                out.append(esc)
            elif b < 0x20:
                raise _fmt(self.pos - 1, "unescaped control byte in string")
            else:
                out.append(b)

    def digits_run(self) -> int:
        n = 0
        while self.peek() in _DIGITS:
            self.pos += 1
            n += 1
        return n

    def integer_body(self) -> None:
        """Digits of an integer; optional '-' already consumed."""
        b = self.peek()
        if b == 0x30:  # '0' terminates: no leading zeros
            self.pos += 1
            return
        if b not in _DIGITS:
            off = self.pos if b >= 0 else len(self.data)
            raise _fmt(off, "expected digit")
        self.digits_run()

    def value(self, ptype: ParamType, structural: bool = False) -> None:
        """One value of the given type.

        A first byte that cannot start the type is an ArgumentError (the
        model filled the slot with the wrong kind of value) unless
        `structural` marks this as a fixed grammar position, where it is
        a FormatError instead.
        """
        start = self.pos
        b = self.peek()
        if b not in _STARTERS[ptype.kind]:
            off = start if b >= 0 else len(self.data)
            if structural:
                raise _fmt(off, f"expected {ptype.kind} value")
            raise _arg(off, f"value does not start a {ptype.kind}")
        if ptype.kind in ("string", "enum"):
            self.pos += 1
            content = self.string_content()
            if ptype.kind == "enum" and content.decode("utf-8", "replace") not in ptype.literals:
                raise _arg(start, "value is not one of the enum literals")
            return
        if ptype.kind in ("integer", "number"):
            if b == 0x2D:
                self.pos += 1
            self.integer_body()
            if ptype.kind == "number":
                if self.peek() == 0x2E:  # '.'
                    self.pos += 1
                    if self.digits_run() == 0:
                        raise _fmt(self.pos, "expected digit after '.'")
                if self.peek() in (0x65, 0x45):  # e / E
                    self.pos += 1
                    if self.peek() in (0x2B, 0x2D):
                        self.pos += 1
                    if self.digits_run() == 0:
                        raise _fmt(self.pos, "expected exponent digit")
            return
        if ptype.kind == "boolean":
            lit = b"true" if b == 0x74 else b"false"
            for expected in lit:
                got = self.take()
                if got != expected:
                    raise _fmt(self.pos - 1, "malformed boolean literal")
            return
        if ptype.kind == "object":
            self.object_body(ptype.children)
            return
        if ptype.kind == "array":
            assert ptype.element is not None
            self.pos += 1
            if self.peek() == 0x5D:  # ']'
                self.pos += 1
                return
            while True:
                self.value(ptype.element)
                nxt = self.take()
                if nxt == 0x5D:
                    return
                if nxt != 0x2C:
                    raise _fmt(self.pos - 1, "expected ',' or ']'")
                self.skip_one_space()

    # --- argument objects ---

    def object_body(self, params: tuple[ParamSpec, ...]) -> None:
        """'{' entries '}' with documentation-order matching."""
        self.expect(0x7B, "'{'")
        idx = 0
        entries = 0
        while True:
            b = self.peek()
            if b == 0x7D:  # '}'
                for p in params[idx:]:
                    if p.required:
                        raise _arg(self.pos, f"missing required parameter {p.name!r}")
                self.pos += 1
                return
            if entries > 0:
                if b != 0x2C:
                    off = self.pos if b >= 0 else len(self.data)
                    raise _fmt(off, "expected ',' or '}'")
                self.pos += 1
                self.skip_one_space()
            name_start = self.pos
            self.expect(0x22, "parameter name")
            name = bytearray()
            while True:
                nb = self.take()
                if nb == 0x22:
                    break
                name.append(nb)
            wanted = name.decode("utf-8", "replace")
            j = idx
            while j < len(params) and params[j].name != wanted:
                if params[j].required:
                    raise _arg(
                        name_start,
                        f"expected required parameter {params[j].name!r}, got {wanted!r}",
                    )
                j += 1
            if j == len(params):
                raise _arg(name_start, f"parameter {wanted!r} unknown, duplicate, or out of order")
            self.expect(0x3A, "':'")
            self.skip_one_space()
            self.value(params[j].type)
            idx = j + 1
            entries += 1

    def positional_body(self, params: tuple[ParamSpec, ...], stop_byte: int | None) -> None:
        """Comma-separated values in documentation order, optionals only at the tail."""
        for i, p in enumerate(params):
            b = self.peek()
            at_stop = (b < 0 and stop_byte is None) or (stop_byte is not None and b == stop_byte)
            if at_stop:
                for rest in params[i:]:
                    if rest.required:
                        raise _arg(
                            self.pos if b >= 0 else len(self.data),
                            f"missing required parameter {rest.name!r}",
                        )
                return
            if i > 0:
                self.expect(0x2C, "','")
                self.skip_one_space()
            self.value(p.type)


def _run(data: bytes | str, fn) -> ValidationReport:
    if isinstance(data, str):
        data = data.encode("utf-8")
    p = _Parser(data)
    try:
        fn(p)
    except _Fail as f:
        return f.report
    if p.pos != len(p.data):
        return ValidationReport(Verdict.FORMAT_ERROR, p.pos, "trailing data")
    return ValidationReport(Verdict.VALID)


def validate_call_text(schema: ToolSchema, call_text: bytes | str) -> ValidationReport:
    """Validate one argument object (no tool name, no scaffold) against a schema."""
    return _run(call_text, lambda p: p.object_body(schema.params))


def validate_value_text(ptype: ParamType, text: bytes | str) -> ValidationReport:
    """Validate a bare value of the given type.

    Class rules match the in-object behavior: a first byte that cannot
    start a value of this kind is ArgumentError, breakage further in is
    FormatError.
    """
    return _run(text, lambda p: p.value(ptype))


def validate_session_text(
    inventory: ToolInventory, segments, text: bytes | str
) -> ValidationReport:
    """Validate a whole scaffolded transcript (sans eos token).

    `segments` is a linker scaffold: objects with a `kind` attribute in
    {"literal", "free_text", "tool_select", "arg_object", "terminal"} and
    the fields the kind implies.  Free text follows the forced-anchor
    rule: the anchor's first byte never occurs except as the start of a
    complete anchor.
    """

    def walk(p: _Parser) -> None:
        selected: ToolSchema | None = None
        for si, seg in enumerate(segments):
            if seg.kind == "literal":
                lit = seg.text.encode("utf-8")
                for k, expected in enumerate(lit):
                    got = p.peek()
                    if got != expected:
                        off = p.pos if got >= 0 else len(p.data)
                        raise _fmt(off, f"expected literal {seg.text!r}")
                    p.pos += 1
            elif seg.kind == "free_text":
                anchor = seg.anchor.encode("utf-8")
                first = anchor[0]
                while p.peek() not in (first, -1):
                    p.pos += 1
                for expected in anchor:
                    got = p.peek()
                    if got != expected:
                        off = p.pos if got >= 0 else len(p.data)
                        raise _fmt(off, "free text never completes its anchor")
                    p.pos += 1
            elif seg.kind == "tool_select":
                start = p.pos
                run = bytearray()
                while p.peek() in _IDENT_BYTES:
                    run.append(p.data[p.pos])
                    p.pos += 1
                name = run.decode("utf-8", "replace")
                if name not in inventory:
                    raise _Fail(Verdict.NAME_ERROR, start, f"unknown tool {name!r}")
                selected = inventory[name]
            elif seg.kind == "arg_object":
                if selected is None:
                    raise _fmt(p.pos, "argument object before any tool selection")
                if seg.style == "json":
                    p.object_body(selected.params)
                else:
                    stop = None
                    nxt = segments[si + 1] if si + 1 < len(segments) else None
                    if nxt is not None and nxt.kind == "literal":
                        stop = nxt.text.encode("utf-8")[0]
                    p.positional_body(selected.params, stop)
            elif seg.kind == "terminal":
                if p.pos != len(p.data):
                    raise _fmt(p.pos, "trailing data")
            else:
                raise AssertionError(f"unknown segment kind {seg.kind!r}")

    return _run(text, walk)
