"""Compressed documentation rendering and token accounting.

The compressed form is what goes in front of the model: a numbered
entry per tool, a one-line description, and one `- name: description`
line per parameter with `(Optional)` / `(Example: v)` annotations.
Braces, quotes, and type words stay out; the machine enforces types, so
spending prompt tokens on them buys nothing.  Nested parameters appear
as dotted paths.

`data/rewrite_instructions.txt` carries the instruction block for
having a model rewrite verbose API docs into this shape.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass

from toolgate.schema import ParamSpec, ToolInventory, ToolSchema, serialize_tool
from toolgate.vocab import Vocabulary, tokenize_greedy


def _param_lines(params: tuple[ParamSpec, ...], prefix: str, out: list[str]) -> None:
    for p in params:
        path = f"{prefix}{p.name}"
        desc = p.description.strip().rstrip(".")
        pieces = [desc] if desc else []
        if not p.required:
            pieces.append("(Optional)")
        if p.example is not None:
            pieces.append(f"(Example: {p.example})")
        body = " ".join(pieces)
        out.append(f"   - {path}: {body}." if body else f"   - {path}:.")
        if p.type.kind == "object":
            _param_lines(p.type.children, f"{path}.", out)
        elif p.type.kind == "array" and p.type.element is not None:
            if p.type.element.kind == "object":
                _param_lines(p.type.element.children, f"{path}.", out)


def render_entry(tool: ToolSchema, index: int) -> str:
    """One numbered entry; index is 1-based."""
    desc = tool.description.strip().rstrip(".")
    lines = [f"{index}. {tool.name}", ""]
    lines.append(f"   Description: {desc}." if desc else "   Description:.")
    if tool.params:
        lines.append("   Parameters:")
        _param_lines(tool.params, "", lines)
    else:
        lines.append("   Parameters: (none)")
    return "\n".join(lines)


def render_compressed(inventory: ToolInventory) -> str:
    return "\n\n".join(render_entry(t, i + 1) for i, t in enumerate(inventory))


@dataclass(frozen=True)
class PromptStats:
    names: tuple[str, ...]
    raw_tokens: tuple[int, ...]
    compressed_tokens: tuple[int, ...]

    @property
    def mean_raw(self) -> float:
        return sum(self.raw_tokens) / len(self.raw_tokens) if self.raw_tokens else 0.0

    @property
    def mean_compressed(self) -> float:
        if not self.compressed_tokens:
            return 0.0
        return sum(self.compressed_tokens) / len(self.compressed_tokens)

    @property
    def mean_ratio(self) -> float:
        return self.mean_compressed / self.mean_raw if self.raw_tokens else 0.0

    def rows(self):
        for name, raw, comp in zip(self.names, self.raw_tokens, self.compressed_tokens):
            yield name, raw, comp, comp / raw


def token_stats(inventory: ToolInventory, vocab: Vocabulary) -> PromptStats:
    """Per-tool token counts: canonical raw JSON doc vs compressed entry."""
    names = []
    raw_counts = []
    comp_counts = []
    for i, tool in enumerate(inventory):
        names.append(tool.name)
        raw_counts.append(len(tokenize_greedy(vocab, serialize_tool(tool))))
        comp_counts.append(len(tokenize_greedy(vocab, render_entry(tool, i + 1))))
    return PromptStats(tuple(names), tuple(raw_counts), tuple(comp_counts))


def rewrite_instructions() -> str:
    """Instruction block for rewriting verbose API docs into the compressed shape."""
    ref = importlib.resources.files("toolgate").joinpath("data/rewrite_instructions.txt")
    return ref.read_text(encoding="utf-8")
