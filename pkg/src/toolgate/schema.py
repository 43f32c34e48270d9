"""Tool documentation model: parse API docs into typed schemas.

Two input formats are understood:

* ``simple-json``: a list of ``{"tool_name", "description", "params"}``
  entries where each param is ``{"name", "type", "required", "description"}``
  plus an optional ``"example"``.  Types are ``"string" | "integer" |
  "number" | "boolean"`` or one of the tagged forms ``{"enum": [...]}`` /
  ``{"object": [<params>]}`` / ``{"array": <type>}``.
* ``openapi-subset``: a narrow slice of OpenAPI 3 (post operations with a
  JSON-object request body).  Anything outside the slice raises
  UnsupportedFeature rather than being guessed at.

Documentation order of parameters is preserved; it is the canonical
argument order everywhere downstream.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from toolgate.errors import DuplicateName, MalformedDocument, UnsupportedFeature

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_INTEGER = re.compile(r"-?(0|[1-9][0-9]*)\Z")
_NUMBER = re.compile(r"-?(0|[1-9][0-9]*)(\.[0-9]+)?([eE][+-]?[0-9]+)?\Z")

SCALAR_KINDS = ("string", "integer", "number", "boolean")


@dataclass(frozen=True)
class ParamType:
    """Tagged union over the supported value languages."""

    kind: str
    literals: tuple[str, ...] = ()
    children: tuple["ParamSpec", ...] = ()
    element: "ParamType | None" = None

    @property
    def depth(self) -> int:
        if self.kind == "object":
            return 1 + max(c.type.depth for c in self.children)
        if self.kind == "array":
            assert self.element is not None
            return 1 + self.element.depth
        return 1


STRING = ParamType("string")
INTEGER = ParamType("integer")
NUMBER = ParamType("number")
BOOLEAN = ParamType("boolean")


def enum_type(literals: list[str] | tuple[str, ...]) -> ParamType:
    return ParamType("enum", literals=tuple(literals))


def object_type(children: list["ParamSpec"] | tuple["ParamSpec", ...]) -> ParamType:
    return ParamType("object", children=tuple(children))


def array_type(element: ParamType) -> ParamType:
    return ParamType("array", element=element)


@dataclass(frozen=True)
class ParamSpec:
    name: str
    type: ParamType
    required: bool
    description: str
    example: str | None = None


@dataclass(frozen=True)
class ToolSchema:
    name: str
    description: str
    params: tuple[ParamSpec, ...]

    @property
    def max_depth(self) -> int:
        return max((p.type.depth for p in self.params), default=0)


@dataclass(frozen=True)
class ToolInventory:
    tools: tuple[ToolSchema, ...]
    _by_name: dict[str, ToolSchema] = field(
        default_factory=dict, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        self._by_name.update({t.name: t for t in self.tools})

    def __len__(self) -> int:
        return len(self.tools)

    def __iter__(self):
        return iter(self.tools)

    def __getitem__(self, name: str) -> ToolSchema:
        return self._by_name[name]

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.tools)


# --- validation helpers ---

def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise MalformedDocument(msg)


def _check_name(name: object, path: str) -> str:
    _require(isinstance(name, str), f"{path}: name must be a string")
    assert isinstance(name, str)
    if not _IDENT.match(name):
        raise MalformedDocument(f"{path}: {name!r} is not a valid identifier")
    return name


def _check_example(ptype: ParamType, example: str, path: str) -> None:
    """Examples must lex in the param's value language.

    For string/enum the example is raw content (it gets quoted when
    rendered); for every other kind it is value-language text.
    """
    if ptype.kind == "string":
        if any(b < 0x20 for b in example.encode("utf-8")):
            raise UnsupportedFeature(path, "control character in string example")
        return
    if ptype.kind == "enum":
        if example not in ptype.literals:
            raise MalformedDocument(f"{path}: example {example!r} not among enum literals")
        return
    if ptype.kind == "integer":
        _require(bool(_INTEGER.match(example)), f"{path}: example {example!r} is not an integer")
        return
    if ptype.kind == "number":
        _require(bool(_NUMBER.match(example)), f"{path}: example {example!r} is not a number")
        return
    if ptype.kind == "boolean":
        _require(example in ("true", "false"), f"{path}: example {example!r} is not a boolean")
        return
    # object / array examples are value-language text; the validation
    # oracle is the arbiter.  Late import: the oracle depends on this module.
    from toolgate import oracle

    report = oracle.validate_value_text(ptype, example)
    if report.verdict != oracle.Verdict.VALID:
        raise MalformedDocument(
            f"{path}: example does not parse as a {ptype.kind} value "
            f"({report.message} at byte {report.offset})"
        )


def _parse_type(raw: object, path: str) -> ParamType:
    if isinstance(raw, str):
        if raw in SCALAR_KINDS:
            return ParamType(raw)
        raise UnsupportedFeature(path, f"type keyword {raw!r}")
    if isinstance(raw, dict):
        if len(raw) != 1:
            raise MalformedDocument(f"{path}: composite type must have exactly one tag")
        tag, payload = next(iter(raw.items()))
        if tag == "enum":
            _require(isinstance(payload, list) and payload, f"{path}: enum needs a non-empty list")
            literals = []
            for i, lit in enumerate(payload):
                _require(isinstance(lit, str), f"{path}.enum[{i}]: literal must be a string")
                if any(b < 0x20 for b in lit.encode("utf-8")):
                    raise UnsupportedFeature(f"{path}.enum[{i}]", "control character in enum literal")
                literals.append(lit)
            if len(set(literals)) != len(literals):
                raise DuplicateName(f"{path}.enum")
            return enum_type(literals)
        if tag == "object":
            _require(isinstance(payload, list) and payload, f"{path}: object needs a non-empty param list")
            return object_type(_parse_params(payload, path))
        if tag == "array":
            return array_type(_parse_type(payload, f"{path}[]"))
        raise UnsupportedFeature(path, f"type tag {tag!r}")
    raise MalformedDocument(f"{path}: type must be a string or a one-key object")


def _parse_params(raw: object, path: str) -> tuple[ParamSpec, ...]:
    _require(isinstance(raw, list), f"{path}: params must be a list")
    assert isinstance(raw, list)
    out: list[ParamSpec] = []
    seen: set[str] = set()
    for i, entry in enumerate(raw):
        ppath = f"{path}.params[{i}]"
        _require(isinstance(entry, dict), f"{ppath}: must be an object")
        for key in ("name", "type", "required", "description"):
            _require(key in entry, f"{ppath}: missing {key!r}")
        name = _check_name(entry["name"], ppath)
        if name in seen:
            raise DuplicateName(f"{path}.{name}")
        seen.add(name)
        ppath = f"{path}.{name}"
        ptype = _parse_type(entry["type"], ppath)
        _require(isinstance(entry["required"], bool), f"{ppath}: required must be a boolean")
        _require(isinstance(entry["description"], str), f"{ppath}: description must be a string")
        example = entry.get("example")
        if example is not None:
            _require(isinstance(example, str), f"{ppath}: example must be a string")
            _check_example(ptype, example, ppath)
        unknown = set(entry) - {"name", "type", "required", "description", "example"}
        if unknown:
            raise UnsupportedFeature(ppath, f"unknown field {sorted(unknown)[0]!r}")
        out.append(ParamSpec(name, ptype, entry["required"], entry["description"], example))
    return tuple(out)


def _parse_simple(doc: object) -> ToolInventory:
    _require(isinstance(doc, list), "top level must be a list of tools")
    assert isinstance(doc, list)
    tools: list[ToolSchema] = []
    seen: set[str] = set()
    for i, entry in enumerate(doc):
        path = f"tools[{i}]"
        _require(isinstance(entry, dict), f"{path}: must be an object")
        for key in ("tool_name", "description", "params"):
            _require(key in entry, f"{path}: missing {key!r}")
        name = _check_name(entry["tool_name"], path)
        if name in seen:
            raise DuplicateName(name)
        seen.add(name)
        _require(isinstance(entry["description"], str), f"{name}: description must be a string")
        unknown = set(entry) - {"tool_name", "description", "params"}
        if unknown:
            raise UnsupportedFeature(name, f"unknown field {sorted(unknown)[0]!r}")
        tools.append(ToolSchema(name, entry["description"], _parse_params(entry["params"], name)))
    return ToolInventory(tuple(tools))


# --- openapi subset ---

def _openapi_type(node: object, path: str, required_names: set[str] | None = None) -> ParamType:
    _require(isinstance(node, dict), f"{path}: schema node must be an object")
    assert isinstance(node, dict)
    for bad in ("$ref", "oneOf", "anyOf", "allOf", "not", "additionalProperties"):
        if bad in node:
            raise UnsupportedFeature(path, bad)
    kind = node.get("type")
    if kind in SCALAR_KINDS:
        if "enum" in node:
            _require(kind == "string", f"{path}: enum is only supported on strings")
            return _parse_type({"enum": node["enum"]}, path)
        return ParamType(kind)
    if kind == "object":
        props = node.get("properties")
        _require(isinstance(props, dict) and props, f"{path}: object needs properties")
        req = node.get("required", [])
        _require(isinstance(req, list), f"{path}: required must be a list")
        children = []
        for pname, pnode in props.items():
            cpath = f"{path}.{pname}"
            _check_name(pname, cpath)
            _require(isinstance(pnode, dict), f"{cpath}: must be an object")
            ptype = _openapi_type(pnode, cpath)
            example = pnode.get("example")
            if example is not None:
                _require(isinstance(example, str), f"{cpath}: example must be a string")
                _check_example(ptype, example, cpath)
            children.append(
                ParamSpec(pname, ptype, pname in req, pnode.get("description", ""), example)
            )
        if len({c.name for c in children}) != len(children):
            raise DuplicateName(path)
        return object_type(children)
    if kind == "array":
        items = node.get("items")
        _require(items is not None, f"{path}: array needs items")
        return array_type(_openapi_type(items, f"{path}[]"))
    raise UnsupportedFeature(path, f"schema type {kind!r}")


def _parse_openapi(doc: object) -> ToolInventory:
    _require(isinstance(doc, dict), "top level must be an object")
    assert isinstance(doc, dict)
    paths = doc.get("paths")
    _require(isinstance(paths, dict) and paths, "missing or empty 'paths'")
    tools: list[ToolSchema] = []
    seen: set[str] = set()
    for route, ops in paths.items():
        path = f"paths.{route}"
        _require(isinstance(ops, dict), f"{path}: must be an object")
        for method, op in ops.items():
            opath = f"{path}.{method}"
            if method != "post":
                raise UnsupportedFeature(opath, f"method {method!r}")
            _require(isinstance(op, dict), f"{opath}: must be an object")
            name = op.get("operationId")
            if name is None:
                raise UnsupportedFeature(opath, "missing operationId")
            name = _check_name(name, opath)
            if name in seen:
                raise DuplicateName(name)
            seen.add(name)
            try:
                media = op["requestBody"]["content"]["application/json"]["schema"]
            except (KeyError, TypeError):
                raise UnsupportedFeature(opath, "operation without a JSON request body") from None
            body = _openapi_type(media, name)
            if body.kind != "object":
                raise UnsupportedFeature(name, "request body is not an object schema")
            tools.append(ToolSchema(name, op.get("summary", ""), body.children))
    return ToolInventory(tuple(tools))


def parse_inventory(document: bytes | str, format: str = "simple-json") -> ToolInventory:
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    try:
        doc = json.loads(document)
    except ValueError as e:
        raise MalformedDocument(f"not valid JSON: {e}") from None
    if format == "simple-json":
        return _parse_simple(doc)
    if format == "openapi-subset":
        return _parse_openapi(doc)
    raise MalformedDocument(f"unknown document format {format!r}")


# --- canonical serialization (round-trips through parse_inventory) ---

def _type_to_raw(ptype: ParamType) -> object:
    if ptype.kind in SCALAR_KINDS:
        return ptype.kind
    if ptype.kind == "enum":
        return {"enum": list(ptype.literals)}
    if ptype.kind == "object":
        return {"object": [_param_to_raw(c) for c in ptype.children]}
    if ptype.kind == "array":
        assert ptype.element is not None
        return {"array": _type_to_raw(ptype.element)}
    raise AssertionError(ptype.kind)


def _param_to_raw(p: ParamSpec) -> dict:
    raw: dict = {
        "name": p.name,
        "type": _type_to_raw(p.type),
        "required": p.required,
        "description": p.description,
    }
    if p.example is not None:
        raw["example"] = p.example
    return raw


def tool_to_raw(tool: ToolSchema) -> dict:
    return {
        "tool_name": tool.name,
        "description": tool.description,
        "params": [_param_to_raw(p) for p in tool.params],
    }


def serialize_inventory(inv: ToolInventory) -> str:
    """Canonical simple-json text: fixed key order, two-space indent."""
    return json.dumps([tool_to_raw(t) for t in inv.tools], indent=2, ensure_ascii=False)


def serialize_tool(tool: ToolSchema) -> str:
    return json.dumps(tool_to_raw(tool), indent=2, ensure_ascii=False)
