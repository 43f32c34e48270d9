"""toolgate: compile tool documentation into token-level machines and
gate generation with them, so every emitted call parses.

The pieces, bottom to top: `schema` parses tool docs, `vocab` holds the
token table, `fsm` builds byte machines and compiles them against a
vocabulary, `linker` stitches per-tool machines into a scaffolded
session, `engine` runs the guided decode loop, `oracle` is the
independent judge, `prompt` renders compressed docs, `cli` fronts it
all.
"""

__version__ = "0.1.0"

from toolgate.engine import (
    DecodeSession,
    Greedy,
    Temperature,
    TopK,
    accepts,
    mask_distribution,
    run_to_completion,
    step,
)
from toolgate.fsm.artifact import load_artifact, loads_artifact, dumps_artifact, save_artifact
from toolgate.fsm.bytedfa import (
    ByteDfa,
    build_literal_dfa,
    build_param_machine,
    build_tool_call_dfa,
    build_value_dfa,
)
from toolgate.fsm.tokenfsm import FsmStats, TokenFsm, compile_token_fsm, fsm_stats
from toolgate.linker import (
    NameTrie,
    ScaffoldSpec,
    SessionFsm,
    build_name_trie,
    build_session_fsm,
    builtin_scaffold,
    parse_scaffold,
)
from toolgate.oracle import ValidationReport, Verdict, validate_call_text, validate_session_text
from toolgate.prompt import render_compressed, token_stats
from toolgate.schema import (
    ParamSpec,
    ParamType,
    ToolInventory,
    ToolSchema,
    parse_inventory,
    serialize_inventory,
)
from toolgate.vocab import Vocabulary, detokenize, load_vocab, tokenize_greedy

__all__ = [
    "__version__",
    "ByteDfa",
    "DecodeSession",
    "FsmStats",
    "Greedy",
    "NameTrie",
    "ParamSpec",
    "ParamType",
    "ScaffoldSpec",
    "SessionFsm",
    "Temperature",
    "TokenFsm",
    "ToolInventory",
    "ToolSchema",
    "TopK",
    "ValidationReport",
    "Verdict",
    "Vocabulary",
    "accepts",
    "build_literal_dfa",
    "build_name_trie",
    "build_param_machine",
    "build_session_fsm",
    "build_tool_call_dfa",
    "build_value_dfa",
    "builtin_scaffold",
    "compile_token_fsm",
    "detokenize",
    "dumps_artifact",
    "fsm_stats",
    "load_artifact",
    "load_vocab",
    "loads_artifact",
    "mask_distribution",
    "parse_inventory",
    "parse_scaffold",
    "render_compressed",
    "run_to_completion",
    "save_artifact",
    "serialize_inventory",
    "step",
    "token_stats",
    "tokenize_greedy",
    "validate_call_text",
    "validate_session_text",
]
