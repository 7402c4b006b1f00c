"""JSON serialization for machines.

The format is canonical: dumps are sorted, indented, and end in a
newline, so equal machines produce byte-identical files.  Empty write
words are omitted, a domain equal to the whole sector alphabet is
written as "full", and a part carries ``"lock": true`` exactly when the
sector to its right has empty domain.
"""
from __future__ import annotations

import json
from pathlib import Path

import jsonschema

from smforge.machine import (
    Hardware,
    Machine,
    MachineError,
    RulePart,
    SRule,
    StatePart,
    make_rule,
)
from smforge.words import Word

SCHEMA_VERSION = 1


class SerializeError(ValueError):
    pass


_WORD = {"type": "string"}

MACHINE_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "name", "parts", "sector_alphabets", "rules"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "parts": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["name", "letters"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "letters": {"type": "array", "items": {"type": "string"},
                                "minItems": 1},
                    "start": {"type": "string"},
                    "end": {"type": "string"},
                },
            },
        },
        "sector_alphabets": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "string"}},
        },
        "input_sectors": {"type": "array", "items": {"type": "integer"}},
        "cyclic": {"type": "boolean"},
        "rules": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "parts"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "parts": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["from", "to"],
                            "additionalProperties": False,
                            "properties": {
                                "from": {"type": "string"},
                                "to": {"type": "string"},
                                "left": _WORD,
                                "right": _WORD,
                                "lock": {"type": "boolean"},
                            },
                        },
                    },
                    "domains": {
                        "type": "array",
                        "items": {
                            "anyOf": [
                                {"const": "full"},
                                {"type": "array", "items": {"type": "string"}},
                            ]
                        },
                    },
                },
            },
        },
    },
}


def dumps_canonical(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def machine_to_dict(m: Machine) -> dict:
    parts = [{"name": p.name,
              "letters": [a.name for a in p.letters],
              "start": p.start.name,
              "end": p.end.name}
             for p in m.parts]
    rules = []
    for r in m.rules:
        rps = []
        for i, rp in enumerate(r.parts):
            d = {"from": rp.frm.name, "to": rp.to.name}
            if rp.left:
                d["left"] = rp.left.tokens()
            if rp.right:
                d["right"] = rp.right.tokens()
            s = m.hw.right_sector(i)
            if s is not None and r.locked(s):
                d["lock"] = True
            rps.append(d)
        doms = []
        for s, dom in enumerate(r.domains):
            if dom == m.sector_alphabets[s]:
                doms.append("full")
            else:
                doms.append(sorted(a.name for a in dom))
        rules.append({"name": r.name, "parts": rps, "domains": doms})
    return {
        "schema_version": SCHEMA_VERSION,
        "name": m.name,
        "parts": parts,
        "sector_alphabets": [sorted(a.name for a in ab)
                             for ab in m.sector_alphabets],
        "input_sectors": list(m.input_sectors),
        "cyclic": m.cyclic,
        "rules": rules,
    }


def machine_from_dict(doc: dict) -> Machine:
    try:
        jsonschema.validate(doc, MACHINE_SCHEMA)
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "top level"
        raise SerializeError(f"invalid machine document at {where}: {e.message}")
    parts = [StatePart(p["name"], p["letters"], p.get("start"), p.get("end"))
             for p in doc["parts"]]
    hw = Hardware(parts, doc["sector_alphabets"],
                  doc.get("input_sectors", ()), doc.get("cyclic", False))
    rules = []
    for rd in doc["rules"]:
        if len(rd["parts"]) != hw.n_parts:
            raise SerializeError(
                f"rule {rd['name']!r} has {len(rd['parts'])} parts, "
                f"machine has {hw.n_parts}")
        rps = []
        locked = set()
        for i, pd in enumerate(rd["parts"]):
            rps.append(RulePart(pd["from"], pd["to"],
                                Word.from_tokens(pd.get("left", "")),
                                Word.from_tokens(pd.get("right", ""))))
            if pd.get("lock"):
                s = hw.right_sector(i)
                if s is None:
                    raise SerializeError(
                        f"rule {rd['name']!r}: part {i} has no sector to lock")
                locked.add(s)
        domains = rd.get("domains")
        if domains is None:
            domains = [[] if s in locked else "full" for s in range(hw.n_sectors)]
        elif len(domains) != hw.n_sectors:
            raise SerializeError(
                f"rule {rd['name']!r} has {len(domains)} domains, "
                f"machine has {hw.n_sectors} sectors")
        try:
            rule = make_rule(hw, rd["name"], rps, domains)
        except MachineError as e:
            raise SerializeError(str(e))
        for s in locked:
            if not rule.locked(s):
                raise SerializeError(
                    f"rule {rd['name']!r}: part marked lock but sector {s} "
                    f"has a nonempty domain")
        rules.append(rule)
    try:
        return Machine(doc["name"], hw, rules)
    except MachineError as e:
        raise SerializeError(str(e))


def machine_dumps(m: Machine) -> str:
    return dumps_canonical(machine_to_dict(m))


def save_machine(m: Machine, path) -> None:
    Path(path).write_text(machine_dumps(m))


def load_machine(path) -> Machine:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise SerializeError(f"not valid JSON: {e}")
    return machine_from_dict(doc)
