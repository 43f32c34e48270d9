"""Command line front end.

    toolgate compile   tool docs + vocabulary + scaffold -> artifact file
    toolgate validate  judge a call text / transcript with the oracle
    toolgate run       drive stub models through a compiled artifact
    toolgate render    compressed docs or token-count table

Exit codes: 0 success, 1 validation failure (invalid call text or a run
with a non-zero error rate), 2 usage or input errors.  TOOLGATE_LOG
sets log verbosity (DEBUG/INFO/WARNING/ERROR).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time

from toolgate import __version__
from toolgate.engine import DecodeSession, accepts, make_policy, run_to_completion
from toolgate.errors import StepLimitExceeded, ToolgateError
from toolgate.fsm.artifact import load_artifact, save_artifact
from toolgate.fsm.tokenfsm import fsm_stats
from toolgate.linker import build_session_fsm, load_scaffold
from toolgate.oracle import validate_call_text, validate_session_text
from toolgate.prompt import render_compressed, token_stats
from toolgate.schema import parse_inventory
from toolgate.stubs import AdversarialStub, RandomLogit, ScriptedStub, derive_seed
from toolgate.vocab import detokenize, load_vocab

log = logging.getLogger("toolgate")


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _echo_config(args: argparse.Namespace) -> None:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    cfg["version"] = __version__
    print("config " + json.dumps(cfg, sort_keys=True, default=str), file=sys.stderr)


def cmd_compile(args: argparse.Namespace) -> int:
    inventory = parse_inventory(_read(args.schemas), args.format)
    vocab = load_vocab(_read(args.vocab))
    scaffold = load_scaffold(args.scaffold)
    sess = build_session_fsm(inventory, vocab, scaffold)
    save_artifact(args.out, sess)
    print(json.dumps(fsm_stats(sess.fsm).as_dict(), sort_keys=True))
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    sess = load_artifact(args.artifact)
    data = _read(args.input)
    extra: dict = {}
    if args.tokens:
        try:
            ids = json.loads(data)
        except ValueError as e:
            raise ToolgateError(f"token input is not JSON: {e}") from None
        if not isinstance(ids, list) or not all(isinstance(t, int) for t in ids):
            raise ToolgateError("token input must be a JSON list of token ids")
        extra["accepted_by_fsm"] = accepts(sess.fsm, ids)
        body = ids[:-1] if ids and ids[-1] == sess.fsm.eos_id else ids
        data = detokenize(sess.vocab, body)
    if args.tool is not None:
        if args.tool not in sess.inventory:
            raise ToolgateError(f"unknown tool {args.tool!r}")
        report = validate_call_text(sess.inventory[args.tool], data)
    else:
        report = validate_session_text(sess.inventory, sess.scaffold.segments, data)
    print(json.dumps({**report.as_dict(), **extra}))
    return 0 if report.ok else 1


def _session_roots(args: argparse.Namespace) -> tuple[str, str | list[int], list[int]]:
    """Returns (model kind, payload, per-session root seeds)."""
    kind, _, arg = args.model.partition(":")
    if kind == "random" or kind == "adversarial":
        try:
            if ".." in arg:
                lo, _, hi = arg.partition("..")
                first, last = int(lo), int(hi)
                if last < first:
                    raise ToolgateError(f"bad seed range {arg!r}")
                roots = list(range(first, last + 1))
                if args.sessions is not None and args.sessions != len(roots):
                    raise ToolgateError("--sessions disagrees with the model seed range")
            else:
                base = int(arg) if arg else 0
                roots = [base + i for i in range(args.sessions or 1)]
        except ValueError:
            raise ToolgateError(f"bad model seed {arg!r}") from None
        return kind, "", [r + args.seed for r in roots]
    if kind == "script":
        if not arg:
            raise ToolgateError("script model needs a file: script:<path>")
        try:
            ids = json.loads(_read(arg))
        except ValueError as e:
            raise ToolgateError(f"script file is not JSON: {e}") from None
        if not isinstance(ids, list) or not all(isinstance(t, int) for t in ids):
            raise ToolgateError("script file must be a JSON list of token ids")
        roots = [args.seed + i for i in range(args.sessions or 1)]
        return kind, ids, roots
    raise ToolgateError(f"unknown model spec {args.model!r}")


def cmd_run(args: argparse.Namespace) -> int:
    sess_fsm = load_artifact(args.artifact)
    fsm, vocab = sess_fsm.fsm, sess_fsm.vocab
    kind, payload, roots = _session_roots(args)
    try:
        make_policy(args.policy, 0)
    except ValueError as e:
        raise ToolgateError(str(e)) from None

    out = sys.stdout if args.out is None else open(args.out, "w", encoding="utf-8")
    valid = invalid = zero_mass = 0
    try:
        for root in roots:
            if kind == "random":
                model = RandomLogit(derive_seed(root, 1), vocab.size)
            elif kind == "adversarial":
                model = AdversarialStub(derive_seed(root, 1), fsm)
            else:
                model = ScriptedStub(payload, vocab.size, vocab.eos_id)
            policy = make_policy(args.policy, root)
            session = DecodeSession(fsm, step_limit=args.step_limit)
            t0 = time.perf_counter()
            try:
                tokens = run_to_completion(session, model, policy)
            except StepLimitExceeded as e:
                tokens = e.partial_tokens
                log.info("session %d hit the step limit", root)
            wall = int((time.perf_counter() - t0) * 1e6)
            zero_mass += session.zero_mass_fallbacks
            body = tokens[:-1] if tokens and tokens[-1] == fsm.eos_id else tokens
            text = detokenize(vocab, body)
            report = validate_session_text(
                sess_fsm.inventory, sess_fsm.scaffold.segments, text
            )
            if report.ok:
                valid += 1
            else:
                invalid += 1
                log.info("session %d invalid: %s", root, report.as_dict())
            record = {
                "seed": root,
                "policy": args.policy,
                "token_ids": tokens,
                "text": text.decode("utf-8", "replace"),
                "verdict": report.verdict.value,
                "steps": len(tokens),
                "wall_micros": None if args.no_timings else wall,
            }
            out.write(json.dumps(record, ensure_ascii=True) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()

    n = len(roots)
    summary = {
        "sessions": n,
        "valid": valid,
        "invalid": invalid,
        "error_rate": invalid / n if n else 0.0,
        "zero_mass_fallbacks": zero_mass,
    }
    print(json.dumps(summary))
    return 0 if invalid == 0 else 1


def cmd_render(args: argparse.Namespace) -> int:
    inventory = parse_inventory(_read(args.schemas), args.format)
    print(render_compressed(inventory))
    if args.vocab is not None:
        vocab = load_vocab(_read(args.vocab))
        stats = token_stats(inventory, vocab)
        for name, raw, comp, ratio in stats.rows():
            print(f"{name}\t{raw}\t{comp}\t{ratio:.4f}")
        print(
            f"MEAN\t{stats.mean_raw:.2f}\t{stats.mean_compressed:.2f}"
            f"\t{stats.mean_ratio:.4f}"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toolgate", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="compile tool docs into an artifact")
    p.add_argument("--schemas", required=True, help="tool documentation file")
    p.add_argument("--format", default="simple-json", choices=["simple-json", "openapi-subset"])
    p.add_argument("--vocab", required=True, help="vocabulary file")
    p.add_argument("--scaffold", default="react", help="react | call | path to scaffold JSON")
    p.add_argument("--out", required=True, help="artifact output path")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("validate", help="oracle-check a transcript or call text")
    p.add_argument("artifact", help="compiled artifact file")
    p.add_argument("input", help="transcript / call text file ('-' for stdin)")
    p.add_argument("--tokens", action="store_true", help="input is a JSON list of token ids")
    p.add_argument("--tool", help="treat input as a bare argument object for this tool")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="drive stub models through an artifact")
    p.add_argument("artifact", help="compiled artifact file")
    p.add_argument("--model", required=True, help="random:<seed|a..b> | script:<file> | adversarial:<seed>")
    p.add_argument("--policy", default="temp:1.0", help="greedy | temp:<t> | topk:<k>")
    p.add_argument("--sessions", type=int, default=None)
    p.add_argument("--seed", type=int, default=0, help="offset added to every session root seed")
    p.add_argument("--step-limit", type=int, default=512)
    p.add_argument("--out", default=None, help="transcript file (default: stdout)")
    p.add_argument("--no-timings", action="store_true", help="write null wall_micros for byte-reproducible output")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("render", help="render compressed documentation")
    p.add_argument("--schemas", required=True)
    p.add_argument("--format", default="simple-json", choices=["simple-json", "openapi-subset"])
    p.add_argument("--vocab", help="also print the token-count table against this vocabulary")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("TOOLGATE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr)
    args = build_parser().parse_args(argv)
    _echo_config(args)
    try:
        return args.func(args)
    except ToolgateError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
