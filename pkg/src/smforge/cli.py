"""Command line front end.

Every subcommand reads JSON produced by this package (machines,
presentations) and writes canonical JSON, DOT, or plain text, so output
is byte-identical across runs.  Exit codes: 0 success or an affirmative
answer, 2 bad input, 3 a certified negative answer, 4 out of budget
with nothing certified either way.
"""

from __future__ import annotations

import argparse
import json
import sys

from .words import Word, WordError
from .machine import MachineError, input_configuration, parse_admissible, run
from .serialize import SerializeError, dumps_canonical, load_machine, machine_dumps
from .primitive import build_lr, build_rl
from .enhance import add_historical_sectors, compose, make_cyclic, pad_locked
from .encode import EncodeError, GroupPresentation, presentation_to_machine
from .group import (GroupError, computation_to_trapezium,
                    conjugator_from_accepting, machine_to_group,
                    trapezium_dumps, trapezium_to_dot, validate_trapezium)
from . import search

# 0 yes / 1 no / 2 bad input / 3 bound exhausted / 4 invariant violation.
OK, NEGATIVE, BAD_INPUT, BOUND, INVARIANT = 0, 1, 2, 3, 4

_ERRORS = (MachineError, WordError, SerializeError, EncodeError, GroupError,
           json.JSONDecodeError, FileNotFoundError)


def _emit(text: str, args) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _machine(args):
    return load_machine(args.machine)


def _start_config(m, args):
    if args.start is not None:
        return parse_admissible(m.hw, Word.from_tokens(args.start))
    inputs = [Word.from_tokens(t) for t in (args.input or [])]
    if len(inputs) < len(m.input_sectors):
        inputs += [Word()] * (len(m.input_sectors) - len(inputs))
    return input_configuration(m, tuple(inputs))


# -- construction subcommands -----------------------------------------------

def cmd_primitive(args) -> int:
    letters = [s for s in args.letters.split(",") if s]
    if not letters:
        raise MachineError("need at least one letter")
    build = build_lr if args.kind == "lr" else build_rl
    m = build(letters, **({"name": args.name} if args.name else {}))
    _emit(machine_dumps(m), args)
    return OK


def cmd_encode(args) -> int:
    p = GroupPresentation.load(args.presentation)
    _emit(machine_dumps(presentation_to_machine(p)), args)
    return OK


def _transform(fn):
    def go(args) -> int:
        _emit(machine_dumps(fn(_machine(args))), args)
        return OK
    return go


# The pipeline stages carry in-memory provenance that JSON does not keep,
# so each stage subcommand starts over from the base machine.
cmd_historical = _transform(add_historical_sectors)
cmd_pad = _transform(lambda m: pad_locked(add_historical_sectors(m)))
cmd_enhance = _transform(lambda m: compose(pad_locked(add_historical_sectors(m))))
cmd_cyclic = _transform(make_cyclic)


# -- running subcommands -----------------------------------------------------

def cmd_run(args) -> int:
    m = _machine(args)
    start = _start_config(m, args)
    comp = run(m, start, Word.from_tokens(args.history), strict=False)
    if args.format == "json":
        doc = {
            "schema_version": 1,
            "machine": m.name,
            "start": start.tokens(),
            "history": args.history,
            "ok": comp.ok,
            "configs": [c.tokens() for c in comp.configs],
            "failed_at": comp.failed_at,
            "reason": comp.reason,
        }
        _emit(dumps_canonical(doc), args)
    else:
        lines = [c.tokens() for c in comp.configs]
        if not comp.ok:
            lines.append(f"# failed at step {comp.failed_at}: {comp.reason}")
        _emit("\n".join(lines) + "\n", args)
    return OK if comp.ok else NEGATIVE


def cmd_tm(args) -> int:
    m = _machine(args)
    if (args.max_n is None) == (args.input is None and args.start is None):
        raise MachineError("pass either an input to decide or --max-n for "
                           "the time function table")
    if args.max_n is not None:
        tf = search.time_function(m, args.max_n, args.bound, method=args.method)
        doc = {
            "schema_version": 1,
            "machine": m.name,
            "bound": args.bound,
            "max_n": args.max_n,
            "method": args.method,
            "values": {str(n): tf.values[n] for n in sorted(tf.values)},
            "complete": {str(n): tf.complete[n] for n in sorted(tf.complete)},
            "rejected": [[w.tokens() for w in inputs] for inputs in tf.rejected],
        }
        _emit(dumps_canonical(doc), args)
        return OK if all(tf.complete.values()) else BOUND
    start = _start_config(m, args)
    res = search.tm_of_config(m, start, args.bound, method=args.method)
    doc = {
        "schema_version": 1,
        "machine": m.name,
        "start": start.tokens(),
        "bound": args.bound,
        "method": args.method,
        "status": res.status,
        "length": res.length,
        "history": res.history.tokens() if res.history is not None else None,
        "explored": res.explored,
    }
    _emit(dumps_canonical(doc), args)
    if res.found:
        return OK
    return NEGATIVE if res.status == search.UNREACHABLE else BOUND


# -- group subcommands -------------------------------------------------------

def cmd_present(args) -> int:
    mp = machine_to_group(_machine(args), strict=args.strict)
    _emit(mp.as_presentation().dumps(), args)
    return OK


def _computation(m, args):
    start = _start_config(m, args)
    comp = run(m, start, Word.from_tokens(args.history), strict=False)
    if not comp.ok:
        raise MachineError(
            f"history fails at step {comp.failed_at}: {comp.reason}")
    return comp


def cmd_trapezium(args) -> int:
    m = _machine(args)
    trap = computation_to_trapezium(m, _computation(m, args))
    try:
        validate_trapezium(trap)
    except GroupError as e:
        print(f"invariant violation: {e}", file=sys.stderr)
        return INVARIANT
    _emit(trapezium_to_dot(trap) if args.format == "dot"
          else trapezium_dumps(trap), args)
    return OK


def cmd_conjugator(args) -> int:
    m = _machine(args)
    comp = _computation(m, args)
    try:
        g = conjugator_from_accepting(m, comp)
    except GroupError as e:
        print(f"no conjugator: {e}", file=sys.stderr)
        return NEGATIVE
    if args.format == "json":
        doc = {
            "schema_version": 1,
            "machine": m.name,
            "start": comp.configs[0].tokens(),
            "end": comp.end.tokens(),
            "gamma": g.tokens(),
            "length": len(g),
        }
        _emit(dumps_canonical(doc), args)
    else:
        _emit(g.tokens() + "\n", args)
    return OK


# -- parser ------------------------------------------------------------------

def _add_output(p):
    p.add_argument("-o", "--output", metavar="FILE",
                   help="write here instead of stdout")


def _add_config_args(p):
    p.add_argument("--input", action="append", metavar="TOKENS",
                   help="input word, once per input sector")
    p.add_argument("--start", metavar="TOKENS",
                   help="full start configuration (overrides --input)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="smforge",
        description="S-machines, their groups, and the diagrams between them.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("primitive", help="build an LR or RL machine")
    p.add_argument("--kind", choices=["lr", "rl"], default="lr")
    p.add_argument("--letters", required=True, metavar="A,B,...")
    p.add_argument("--name")
    _add_output(p)
    p.set_defaults(func=cmd_primitive)

    p = sub.add_parser("encode", help="machine of a group presentation")
    p.add_argument("presentation", metavar="PRESENTATION.json")
    _add_output(p)
    p.set_defaults(func=cmd_encode)

    for name, fn, hlp in [
            ("historical", cmd_historical,
             "add history-recording sectors to a base machine"),
            ("pad", cmd_pad,
             "historical sectors plus locked padding, from a base machine"),
            ("enhance", cmd_enhance,
             "full pipeline from a base machine: historical, pad, compose"),
            ("cyclic", cmd_cyclic, "close a machine into a cyclic one")]:
        p = sub.add_parser(name, help=hlp)
        p.add_argument("machine", metavar="MACHINE.json")
        _add_output(p)
        p.set_defaults(func=fn)

    p = sub.add_parser("run", help="apply a history to a configuration")
    p.add_argument("machine", metavar="MACHINE.json")
    _add_config_args(p)
    p.add_argument("--history", required=True, metavar="TOKENS")
    p.add_argument("--format", choices=["json", "text"], default="json")
    _add_output(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("tm", help="acceptance search / time function")
    p.add_argument("machine", metavar="MACHINE.json")
    _add_config_args(p)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--max-n", type=int, dest="max_n",
                   help="tabulate TM(n) for n up to this instead")
    p.add_argument("--method", choices=["bfs", "meet"], default="bfs")
    _add_output(p)
    p.set_defaults(func=cmd_tm)

    p = sub.add_parser("present", help="presentation of the group M(S)")
    p.add_argument("machine", metavar="MACHINE.json")
    p.add_argument("--strict", action="store_true",
                   help="drop the part-0 relations")
    _add_output(p)
    p.set_defaults(func=cmd_present)

    p = sub.add_parser("trapezium", help="flatten a computation to a diagram")
    p.add_argument("machine", metavar="MACHINE.json")
    _add_config_args(p)
    p.add_argument("--history", required=True, metavar="TOKENS")
    p.add_argument("--format", choices=["json", "dot"], default="json")
    _add_output(p)
    p.set_defaults(func=cmd_trapezium)

    p = sub.add_parser("conjugator", help="side word conjugating end to start")
    p.add_argument("machine", metavar="MACHINE.json")
    _add_config_args(p)
    p.add_argument("--history", required=True, metavar="TOKENS")
    p.add_argument("--format", choices=["json", "text"], default="text")
    _add_output(p)
    p.set_defaults(func=cmd_conjugator)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
