"""Independent validator: verdict classes and first-violation offsets.

The exact class and offset for each situation is part of the contract;
these tests pin them so the FSM side and the CLI can rely on them.
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toolgate.linker import builtin_scaffold
from toolgate.oracle import (
    Verdict,
    validate_call_text,
    validate_session_text,
    validate_value_text,
)
from toolgate.schema import (
    BOOLEAN,
    INTEGER,
    NUMBER,
    STRING,
    array_type,
    enum_type,
)


@pytest.fixture(scope="module")
def flight(flight_inventory):
    return flight_inventory["flight_search"]


def verdict_of(schema, text):
    return validate_call_text(schema, text).verdict


def test_valid_flight_calls(flight):
    ok = validate_call_text(flight, b'{"from": "LAX", "to": "JFK", "adult": 2}')
    assert ok.verdict == Verdict.VALID and ok.offset is None
    with_opt = b'{"from": "LAX", "to": "JFK", "adult": 2, "type": "economy"}'
    assert verdict_of(flight, with_opt) == Verdict.VALID
    tight = b'{"from":"LAX","to":"JFK","adult":2}'
    assert verdict_of(flight, tight) == Verdict.VALID


def test_wrong_value_kind_is_argument_error_at_value(flight):
    rep = validate_call_text(flight, b'{"from": "LAX", "to": "JFK", "adult": "two"}')
    assert rep.verdict == Verdict.ARGUMENT_ERROR
    assert rep.offset == 38  # first byte of the offending value


def test_canonical_order_violation_is_argument_error(flight):
    rep = validate_call_text(flight, b'{"to": "JFK", "from": "LAX", "adult": 2}')
    assert rep.verdict == Verdict.ARGUMENT_ERROR
    assert rep.offset == 1


def test_missing_required_is_argument_error_at_closing_brace(flight):
    rep = validate_call_text(flight, b'{"from": "LAX", "to": "JFK"}')
    assert rep.verdict == Verdict.ARGUMENT_ERROR
    assert rep.offset == 27


def test_unknown_parameter_is_argument_error(flight):
    rep = validate_call_text(flight, b'{"from": "LAX", "to": "JFK", "adult": 2, "pet": "cat"}')
    assert rep.verdict == Verdict.ARGUMENT_ERROR


def test_duplicate_parameter_is_argument_error(flight):
    rep = validate_call_text(flight, b'{"from": "LAX", "from": "SFO", "to": "JFK", "adult": 2}')
    assert rep.verdict == Verdict.ARGUMENT_ERROR


def test_truncation_is_format_error_at_end(flight):
    text = b'{"from": "LAX", "to": "JF'
    rep = validate_call_text(flight, text)
    assert rep.verdict == Verdict.FORMAT_ERROR
    assert rep.offset == len(text)


def test_trailing_data_is_format_error(flight):
    text = b'{"from": "LAX", "to": "JFK", "adult": 2} '
    rep = validate_call_text(flight, text)
    assert rep.verdict == Verdict.FORMAT_ERROR
    assert rep.offset == 40


def test_double_space_after_separator_is_argument_error_at_value(flight):
    # one optional space is consumed; the second space sits where the
    # value must start, so it reads as a wrong-kind value byte
    rep = validate_call_text(flight, b'{"from":  "LAX", "to": "JFK", "adult": 2}')
    assert rep.verdict == Verdict.ARGUMENT_ERROR
    assert rep.offset == 9


# --- value languages ---

def val(ptype, text):
    return validate_value_text(ptype, text).verdict


def test_string_values():
    assert val(STRING, b'"hi there"') == Verdict.VALID
    assert val(STRING, b'"with \\" quote and \\\\ slash"') == Verdict.VALID
    assert val(STRING, b'""') == Verdict.VALID
    assert val(STRING, b'"tab\tbyte"') == Verdict.FORMAT_ERROR
    assert val(STRING, b'"bad \\n escape"') == Verdict.FORMAT_ERROR
    assert val(STRING, b'"unclosed') == Verdict.FORMAT_ERROR
    assert val(STRING, b"bare") == Verdict.ARGUMENT_ERROR


def test_integer_values():
    assert val(INTEGER, b"0") == Verdict.VALID
    assert val(INTEGER, b"-37") == Verdict.VALID
    assert val(INTEGER, b"04") == Verdict.FORMAT_ERROR  # leading zero
    assert val(INTEGER, b"-") == Verdict.FORMAT_ERROR
    assert val(INTEGER, b'"2"') == Verdict.ARGUMENT_ERROR  # wrong kind at first byte


def test_number_values():
    for good in (b"0", b"-0", b"120.5", b"1e7", b"1E+07", b"-2.5e-3"):
        assert val(NUMBER, good) == Verdict.VALID, good
    for bad in (b"04", b"1.", b"1e", b"1e+", b"00", b"-00E0034"):
        assert val(NUMBER, bad) == Verdict.FORMAT_ERROR, bad
    assert val(NUMBER, b".5") == Verdict.ARGUMENT_ERROR  # '.' cannot start a number


def test_boolean_values():
    assert val(BOOLEAN, b"true") == Verdict.VALID
    assert val(BOOLEAN, b"false") == Verdict.VALID
    assert val(BOOLEAN, b"tru") == Verdict.FORMAT_ERROR
    assert val(BOOLEAN, b"1") == Verdict.ARGUMENT_ERROR


def test_enum_values():
    cabins = enum_type(["economy", "business"])
    assert val(cabins, b'"economy"') == Verdict.VALID
    rep = validate_value_text(cabins, b'"premium"')
    assert rep.verdict == Verdict.ARGUMENT_ERROR
    assert rep.offset == 0  # flagged at the value start


def test_array_values():
    ints = array_type(INTEGER)
    assert val(ints, b"[]") == Verdict.VALID
    assert val(ints, b"[1, 2, 3]") == Verdict.VALID
    assert val(ints, b"[1,2]") == Verdict.VALID
    # a trailing separator leaves ']' where an element must start:
    # wrong-kind byte at a value slot, hence ArgumentError
    assert val(ints, b"[1, ]") == Verdict.ARGUMENT_ERROR
    assert val(ints, b"[04]") == Verdict.FORMAT_ERROR
    assert val(ints, b'["x"]') == Verdict.ARGUMENT_ERROR


def test_nested_object_values(tools10):
    hotel = tools10["hotel_book"]
    ok = (b'{"city": "Rome", "nights": 3, '
          b'"guest": {"name": "Ada Lovelace", "loyalty": "gold"}}')
    assert verdict_of(hotel, ok) == Verdict.VALID
    skip_inner_opt = b'{"city": "Rome", "nights": 3, "guest": {"name": "Ada"}}'
    assert verdict_of(hotel, skip_inner_opt) == Verdict.VALID
    bad_inner = b'{"city": "Rome", "nights": 3, "guest": {"loyalty": "gold"}}'
    assert verdict_of(hotel, bad_inner) == Verdict.ARGUMENT_ERROR


def test_array_of_objects(tools10):
    meet = tools10["schedule_meeting"]
    ok = (b'{"title": "sync", '
          b'"attendees": [{"email": "a@b.c"}, {"email": "d@e.f"}]}')
    assert verdict_of(meet, ok) == Verdict.VALID


# --- session transcripts ---

REACT = builtin_scaffold("react").segments


def session(inventory, text):
    return validate_session_text(inventory, REACT, text)


def test_valid_react_transcript(tools10):
    text = (b"Thought: need flights\nAction: flight_search\n"
            b'Action Input: {"from": "LAX", "to": "JFK", "adult": 2}\n')
    assert session(tools10, text).verdict == Verdict.VALID


def test_empty_free_text_is_fine(tools10):
    text = (b"Thought: \nAction: noop\nAction Input: {}\n")
    assert session(tools10, text).verdict == Verdict.VALID


def test_unknown_tool_is_name_error(tools10):
    text = (b"Thought: hm\nAction: fight_search\n"
            b'Action Input: {"from": "LAX", "to": "JFK", "adult": 2}\n')
    rep = session(tools10, text)
    assert rep.verdict == Verdict.NAME_ERROR
    assert rep.offset == len(b"Thought: hm\nAction: ")


def test_missing_anchor_is_format_error(tools10):
    rep = session(tools10, b"Thought: rambling forever with no action")
    assert rep.verdict == Verdict.FORMAT_ERROR


def test_wrong_leading_literal_is_format_error(tools10):
    rep = session(tools10, b"Think: x\nAction: noop\nAction Input: {}\n")
    assert rep.verdict == Verdict.FORMAT_ERROR
    assert rep.offset == 2


def test_session_argument_error_offset_is_absolute(tools10):
    text = (b"Thought: x\nAction: flight_search\n"
            b'Action Input: {"to": "JFK", "from": "LAX", "adult": 2}\n')
    rep = session(tools10, text)
    assert rep.verdict == Verdict.ARGUMENT_ERROR
    prefix = b"Thought: x\nAction: flight_search\nAction Input: "
    assert rep.offset == len(prefix) + 1


def test_missing_terminal_newline_is_format_error(tools10):
    text = (b"Thought: x\nAction: noop\nAction Input: {}")
    assert session(tools10, text).verdict == Verdict.FORMAT_ERROR


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=-10**12, max_value=10**12))
def test_integer_language_matches_python_repr(n):
    assert val(INTEGER, str(n).encode()) == Verdict.VALID
