from toolgate.fsm.bytedfa import (
    ByteDfa,
    NfaBuilder,
    build_literal_dfa,
    build_param_machine,
    build_tool_call_dfa,
    build_value_dfa,
    determinize,
)
from toolgate.fsm.tokenfsm import (
    FsmStats,
    TokenFsm,
    compile_token_fsm,
    fsm_stats,
    mask_contains,
    mask_popcount,
    pack_mask,
)

__all__ = [
    "ByteDfa",
    "FsmStats",
    "NfaBuilder",
    "TokenFsm",
    "build_literal_dfa",
    "build_param_machine",
    "build_tool_call_dfa",
    "build_value_dfa",
    "compile_token_fsm",
    "determinize",
    "fsm_stats",
    "mask_contains",
    "mask_popcount",
    "pack_mask",
]
