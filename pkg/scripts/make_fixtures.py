#!/usr/bin/env python3
"""Regenerate the checked-in fixture files.

Everything here is deterministic; running it twice produces identical
bytes.  Outputs:

    src/toolgate/data/vocab512.json    bundled 512-token fixture vocabulary
    src/toolgate/data/tools10.json     bundled 10-tool inventory
    tests/fixtures/flight_search.json  single-tool inventory
    tests/fixtures/kamel234.json       234-name inventory (39 bases x 6 hosts)
    tests/fixtures/vocab_micro.json    exactly 30 tokens, enough for micro_pair
    tests/fixtures/micro_pair.json     2-param enum schema with a finite language
    tests/fixtures/openapi_weather.json
    tests/fixtures/scaffold_react.json
    tests/golden/rng_golden.json       mixer / uniform anchors shared with the
                                       frontend test suite
"""

from __future__ import annotations

import json
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from toolgate.stubs import GOLDEN, MASK64, derive_seed, mix64, unit_double  # noqa: E402
from toolgate.vocab import make_vocab  # noqa: E402

DATA = ROOT / "src" / "toolgate" / "data"
FIXTURES = ROOT / "tests" / "fixtures"
GOLD = ROOT / "tests" / "golden"


def _write(path: pathlib.Path, payload: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(payload)
    print(f"wrote {path.relative_to(ROOT)} ({len(payload)} bytes)")


def _json(doc) -> bytes:
    return (json.dumps(doc, indent=2, sort_keys=False) + "\n").encode("utf-8")


# ---------------------------------------------------------------- vocab512

# Multi-byte fragments roughly shaped like a small BPE merge table: scaffold
# anchors with every prefix length, call-surface punctuation runs, common
# English chunks for the description text, and name fragments.  The anchor
# prefixes matter for run speed: each one gives a random walk another way to
# start leaving a free-text region.
FRAGMENTS = [
    # scaffold anchors and their prefixes
    "Thought: ", "Thought", "Though", "Thou",
    "\nA", "\nAc", "\nAct", "\nActi", "\nActio", "\nAction",
    "\nAction:", "\nAction: ", "\nAction Input: ", " Input: ", "Input",
    "Action", "action",
    # call surface punctuation
    '{"', '"}', '"}\n', '": ', '":', '", ', '",', ', ', ': ', ', "', ': "',
    '("', '")', '")\n', "('", "()", "[{", "}]", "}]\n", '["', '"]', '"]\n',
    "]}", "]}\n", "}\n", "],", "], ", 'omy"', '{}',
    # value literals
    "true", "false", "rue", "als", "alse", "null",
    # digit pairs that show up in examples
    "00", "10", "12", "20", "25", "30", "45", "50", "99",
    # three-space indent and bullet used by the compressed doc format
    "   ", "   - ", "- ", ".\n", ":\n", "\n\n",
    "Description: ", "Parameters:", "(Optional)", "(Example: ", ").",
    "(none)",
    # english chunks
    " the ", "the ", " of ", " to ", " and ", " for ", " in ", " a ",
    " is ", " an ", " or ", " by ", " with ", " per ", " one ",
    "tion", "ing ", "ing", "ion", "ent", "ate", "ers", "er ", "es ",
    "ed ", "ly ", "al ", "st ", "nt ", "re", "th", "ou", "ch", "sh",
    "qu", "ck", "ight", "ough",
    # words used by the bundled docs
    "search", "Search", "flight", "flights", "airport", "arriv", "depart",
    "code", "carrier", "date", "Date", "city", "City", "name", "Name",
    "price", "currency", "Currency", "amount", "Amount", "weather",
    "Weather", "forecast", "hotel", "Hotel", "book", "Book", "night",
    "guest", "Guest", "loyal", "breakfast", "news", "News", "topic",
    "head", "line", "stock", "Stock", "quote", "Quote", "symbol",
    "market", "trans", "late", "target", "language", "Language", "meet",
    "Meet", "sched", "title", "Title", "attend", "duration", "minute",
    "email", "Email", "address", "airline", "cabin", "class",
    "adult", "passenger", "count", "units", "metric", "imperial",
    "three", "letter", "ISO", "USD", "EUR", "GBP", "JPY", "IATA",
    "LAX", "JFK", "LHR", "Paris", "AAPL", "MSFT",
    "limit", "number", "results", "result", "articles", "article",
    "ticker", "text", "Text", "string", "value", "level", "total",
    "economy", "business", "first", "silver", "gold", "none",
    "world", "tech", "sports", "finance", "en", "fr", "de", "ja",
    "convert", "Convert", "conver", "sion", "rate", "Rate",
    "noop", "no_op", "nothing", "Does", "does", "returns", "Returns",
    "Retrieve", "retrieve", "Retrieves", "Look", "look", "up ",
    "Get", "get", "get_", "_for_", "_search", "_quote", "_book",
    "_convert", "_meeting", "quer", "query", "Query",
    # common words continued
    "and", "for", "the", "The", "that", "this", "are", "not",
    "all", "list", "List", "one", "two", "each", "when", "where",
    "status", "info", "data", "Data", "time", "Time", "zone",
    "day", "week", "year", "local", "full", "short", "long",
    "check", "checking", "departure", "arrival", "arrivals",
    "booking", "seat", "room", "rooms", "star", "cost", "fare",
    "iso", "format", "Format", "point", "max", "min",
]


def build_vocab512() -> bytes:
    singles = [bytes([b]) for b in range(256)]
    seen: set[bytes] = set(singles)
    multis: list[bytes] = []
    for frag in FRAGMENTS:
        raw = frag.encode("utf-8")
        if len(raw) < 2 or raw in seen:
            continue
        seen.add(raw)
        multis.append(raw)
    if len(multis) < 255:
        raise SystemExit(f"fragment list too short: {len(multis)} multis")
    multis = multis[:255]
    vocab = make_vocab(singles + multis + [b"</s>"], eos_id=511, byte_fallback=True)
    return vocab.to_json()


# ---------------------------------------------------------------- tools10

def p(name, type_, required, description, example=None):
    entry = {"name": name, "type": type_, "required": required,
             "description": description}
    if example is not None:
        entry["example"] = example
    return entry


TOOLS10 = [
    {
        "tool_name": "flight_search",
        "description": "Search for flights between two airports on a date.",
        "params": [
            p("from", "string", True, "Departure airport IATA code", "LAX"),
            p("to", "string", True, "Arrival airport IATA code", "JFK"),
            p("adult", "integer", True, "Number of adult passengers", "2"),
            p("type", "string", False, "Cabin class of the seat", "economy"),
        ],
    },
    {
        "tool_name": "airport_arrivals_for_flight_fare_search",
        "description": "Retrieves information about arriving flights.",
        "params": [
            p("airportcode", "string", True, "Airport code", "LHR"),
            p("carriercode", "string", False, "Airline carrier code"),
            p("date", "string", False, "Date for checking arrivals"),
        ],
    },
    {
        "tool_name": "get_weather",
        "description": "Look up the current weather report for a city.",
        "params": [
            p("city", "string", True, "City name to query", "Paris"),
            p("units", {"enum": ["metric", "imperial"]}, False,
              "Unit system for the readings", "metric"),
        ],
    },
    {
        "tool_name": "currency_convert",
        "description": "Convert an amount between two currencies at the spot rate.",
        "params": [
            p("amount", "number", True, "Amount of money to convert", "120.5"),
            p("src", {"enum": ["USD", "EUR", "GBP", "JPY"]}, True,
              "Source currency code"),
            p("dst", {"enum": ["USD", "EUR", "GBP", "JPY"]}, True,
              "Target currency code", "EUR"),
        ],
    },
    {
        "tool_name": "hotel_book",
        "description": "Book a hotel room for a guest in a city.",
        "params": [
            p("city", "string", True, "City where the hotel is located"),
            p("nights", "integer", True, "Number of nights to stay", "3"),
            p("guest", {"object": [
                p("name", "string", True, "Full name of the guest"),
                p("loyalty", {"enum": ["none", "silver", "gold"]}, False,
                  "Loyalty program tier"),
            ]}, True, "Guest details for the booking"),
            p("breakfast", "boolean", False, "Whether breakfast is included",
              "true"),
        ],
    },
    {
        "tool_name": "news_search",
        "description": "Search recent news articles by topic.",
        "params": [
            p("topics", {"array": {"enum": ["world", "tech", "sports",
                                            "finance"]}}, True,
              "Topics to include in the search", '["tech", "finance"]'),
            p("limit", "integer", False, "Maximum number of articles", "5"),
        ],
    },
    {
        "tool_name": "noop",
        "description": "Does nothing and returns immediately.",
        "params": [],
    },
    {
        "tool_name": "stock_quote",
        "description": "Fetch the latest market quote for stock symbols.",
        "params": [
            p("symbols", {"array": "string"}, True,
              "Ticker symbols to quote", '["AAPL", "MSFT"]'),
            p("extended", "boolean", False,
              "Include extended-hours trading data"),
        ],
    },
    {
        "tool_name": "translate",
        "description": "Translate a piece of text into a target language.",
        "params": [
            p("text", "string", True, "Text to translate"),
            p("target", {"enum": ["en", "fr", "de", "ja"]}, True,
              "Target language code", "fr"),
        ],
    },
    {
        "tool_name": "schedule_meeting",
        "description": "Schedule a meeting and invite the attendees.",
        "params": [
            p("title", "string", True, "Title of the meeting"),
            p("attendees", {"array": {"object": [
                p("email", "string", True, "Email address of the attendee"),
            ]}}, True, "People to invite"),
            p("duration", "integer", False, "Length in minutes", "30"),
        ],
    },
]

FLIGHT_SEARCH = [TOOLS10[0]]


# ---------------------------------------------------------------- kamel234

KAMEL_BASES = [
    "get_weather", "get_forecast", "search_flights", "search_hotels",
    "book_hotel", "cancel_booking", "get_exchange_rate", "convert_currency",
    "get_stock_quote", "search_news", "get_headlines", "translate_text",
    "detect_language", "get_timezone", "get_country_info",
    "search_restaurants", "get_recipe", "search_movies", "get_showtimes",
    "get_sports_scores", "get_league_table", "search_jobs",
    "get_salary_estimate", "get_traffic", "get_transit_routes",
    "search_products", "get_product_details", "track_package",
    "get_air_quality", "get_uv_index", "search_events", "get_event_details",
    "get_horoscope", "get_lottery_results", "search_podcasts",
    "get_episode_list", "get_definitions", "get_synonyms", "get_trivia",
]
KAMEL_HOSTS = [
    "travel_hub", "city_explorer", "market_watch", "sports_feed",
    "geo_lookup", "daily_brief",
]


def build_kamel234() -> list:
    assert len(KAMEL_BASES) == 39 and len(KAMEL_HOSTS) == 6
    tools = []
    for base in KAMEL_BASES:
        for host in KAMEL_HOSTS:
            tools.append({
                "tool_name": f"{base}_for_{host}",
                "description": f"{base.replace('_', ' ')} via the "
                               f"{host.replace('_', ' ')} service.",
                "params": [p("query", "string", True, "Free-form query text")],
            })
    assert len(tools) == 234
    return tools


# ------------------------------------------------------------- micro pair

# Exactly 30 tokens.  Byte-complete for the schema's surface: every byte the
# canonical language can produce is present as a single, so tokenization
# cannot get stuck, while the multi-byte tokens create overlapping paths that
# exercise determinization.
MICRO_TOKENS = [
    "{", "}", '"', "a", "b", ":", " ", ",", "x", "l", "o", "n", "g", "e",
    "r", "0", "2", "5",
    '{"', '"a": ', '"b": ', '"a":', '"b":', '": ', '", ', '"}', "ng", "er",
    "25",
]

MICRO_PAIR = [
    {
        "tool_name": "micro_pair",
        "description": "Two-parameter fixture with a finite value language.",
        "params": [
            p("a", {"enum": ["x", "longer"]}, True, "First switch"),
            p("b", {"enum": ["0", "255"]}, False, "Second switch"),
        ],
    },
]


def build_vocab_micro() -> bytes:
    raw = [t.encode("utf-8") for t in MICRO_TOKENS] + [b"</s>"]
    assert len(raw) == 30, len(raw)
    vocab = make_vocab(raw, eos_id=29, byte_fallback=False)
    return vocab.to_json()


# ------------------------------------------------------------- openapi

OPENAPI_WEATHER = {
    "openapi": "3.0.0",
    "info": {"title": "weather", "version": "1.0.0"},
    "paths": {
        "/weather/current": {
            "post": {
                "operationId": "current_weather",
                "summary": "Current conditions for a location.",
                "requestBody": {
                    "content": {
                        "application/json": {
                            "schema": {
                                "type": "object",
                                "required": ["city"],
                                "properties": {
                                    "city": {
                                        "type": "string",
                                        "description": "City name",
                                        "example": "Paris",
                                    },
                                    "units": {
                                        "type": "string",
                                        "enum": ["metric", "imperial"],
                                        "description": "Unit system",
                                    },
                                    "days": {
                                        "type": "integer",
                                        "description": "Forecast days",
                                        "example": "3",
                                    },
                                },
                            }
                        }
                    }
                },
            }
        }
    },
}

SCAFFOLD_REACT = [
    {"literal": "Thought: "},
    {"free_text_until": "\nAction: "},
    {"tool_select": True},
    {"literal": "\nAction Input: "},
    {"arg_object": "json"},
    {"literal": "\n"},
    {"terminal": True},
]


# ------------------------------------------------------------- rng golden

def build_rng_golden() -> dict:
    # Reference vector for the published 64-bit mixer: the first outputs of
    # the stream seeded with 0.  If these do not match, the generator (not
    # the golden file) is wrong.
    known = [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]
    for i, want in enumerate(known):
        got = mix64((0 + (i + 1) * GOLDEN) & MASK64)
        assert got == want, f"mixer mismatch at {i}: {got:#x} != {want:#x}"

    def draws(seed: int, count: int) -> list[str]:
        return [str(mix64((seed + (i + 1) * GOLDEN) & MASK64)) for i in range(count)]

    def uniforms(seed: int, offsets: list[int]) -> list[float]:
        return [unit_double(seed, i) for i in offsets]

    return {
        "mixer": [
            {"seed": "0", "draws": draws(0, 8)},
            {"seed": "1", "draws": draws(1, 8)},
            {"seed": str(derive_seed(7, 1)), "draws": draws(derive_seed(7, 1), 4)},
        ],
        "uniform": [
            {"seed": "0", "offsets": [0, 1, 2, 511, 512], "values": uniforms(0, [0, 1, 2, 511, 512])},
            {"seed": "42", "offsets": [0, 1, 2, 3], "values": uniforms(42, [0, 1, 2, 3])},
        ],
        "derive_seed": [
            {"root": "7", "domain": 1, "value": str(derive_seed(7, 1))},
            {"root": "7", "domain": 2, "value": str(derive_seed(7, 2))},
            {"root": "1000", "domain": 1, "value": str(derive_seed(1000, 1))},
        ],
    }


def main() -> None:
    _write(DATA / "vocab512.json", build_vocab512())
    _write(DATA / "tools10.json", _json(TOOLS10))
    _write(FIXTURES / "flight_search.json", _json(FLIGHT_SEARCH))
    _write(FIXTURES / "kamel234.json", _json(build_kamel234()))
    _write(FIXTURES / "vocab_micro.json", build_vocab_micro())
    _write(FIXTURES / "micro_pair.json", _json(MICRO_PAIR))
    _write(FIXTURES / "openapi_weather.json", _json(OPENAPI_WEATHER))
    _write(FIXTURES / "scaffold_react.json", _json(SCAFFOLD_REACT))
    _write(GOLD / "rng_golden.json", _json(build_rng_golden()))


if __name__ == "__main__":
    main()
