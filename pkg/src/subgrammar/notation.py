"""Importer for the compact system notation used in grammar write-ups::

    rank: start = clause | nominal_group | prepositional_phrase.
    nominal_group = class_name | individual_name.
    (OR class_name wh_nominal) = singular | plural.
    theme: (AND declarative located) = unmarked_theme | marked_theme.

A statement is an optional ``name:`` prefix, an entry (a type or a
parenthesized ``AND``/``OR`` form), ``=``, the outputs separated by ``|``,
and a closing period.  ``;`` starts a comment.  Unnamed systems are called
``system-N`` in order of appearance.
"""

from __future__ import annotations

import re
from typing import Iterator

from .errors import ParseError
from .lattice import And, Atom, Entry, Or, System, conjuncts, normalize_entry

_TOKEN = re.compile(r"\s*(?:(;[^\n]*)|([()=|.:])|([A-Za-z_][\w\-]*))")


def _tokens(text: str) -> Iterator[tuple[str, int, int]]:
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip() == "":
                return
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            skipped = text[pos:bad]
            if "\n" in skipped:
                line += skipped.count("\n")
                line_start = pos + skipped.rfind("\n") + 1
            raise ParseError(f"unexpected character {text[bad]!r}", line, bad - line_start + 1)
        start = m.start(2) if m.group(2) else m.start(3) if m.group(3) else m.end()
        skipped = text[pos:start]
        line += skipped.count("\n")
        if "\n" in skipped:
            line_start = pos + skipped.rfind("\n") + 1
        tok = m.group(2) or m.group(3)
        if tok:
            yield tok, line, start - line_start + 1
        pos = m.end()


class _Parser:
    def __init__(self, text: str):
        self.toks = list(_tokens(text))
        self.i = 0

    def peek(self, offset: int = 0):
        j = self.i + offset
        return self.toks[j] if j < len(self.toks) else (None, None, None)

    def take(self, expected: str | None = None) -> str:
        tok, line, col = self.peek()
        if tok is None:
            last = self.toks[-1] if self.toks else (None, 1, 1)
            raise ParseError(f"unexpected end of input (expected {expected or 'more'})", last[1], last[2])
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}", line, col)
        self.i += 1
        return tok

    def name(self) -> str:
        tok, line, col = self.peek()
        if tok is None or not re.match(r"[A-Za-z_]", tok):
            raise ParseError(f"expected a type name, found {tok!r}", line, col)
        self.i += 1
        return tok.lower()

    def entry(self) -> Entry:
        if self.peek()[0] == "(":
            self.take("(")
            op, line, col = self.peek()
            self.i += 1
            if op is None or op.upper() not in ("AND", "OR"):
                raise ParseError(f"expected AND or OR, found {op!r}", line, col)
            children = []
            while self.peek()[0] not in (")", None):
                children.append(self.entry())
            self.take(")")
            if not children:
                raise ParseError(f"empty {op.upper()} form", line, col)
            return And(tuple(children)) if op.upper() == "AND" else Or(tuple(children))
        return Atom(self.name())

    def statements(self) -> list[tuple[str | None, Entry, tuple[str, ...]]]:
        out = []
        while self.peek()[0] is not None:
            label = None
            if self.peek(1)[0] == ":":
                label = self.peek()[0]
                self.i += 2
            entry = self.entry()
            self.take("=")
            outputs = [self.name()]
            while self.peek()[0] == "|":
                self.take("|")
                outputs.append(self.name())
            self.take(".")
            out.append((label, entry, tuple(outputs)))
        return out


def parse_systems(text: str) -> list[System]:
    systems = []
    names: set[str] = set()
    for n, (label, entry, outputs) in enumerate(_Parser(text).statements(), start=1):
        name = label or f"system-{n}"
        if name in names:
            raise ParseError(f"duplicate system name {name!r}")
        names.add(name)
        systems.append(System(name, normalize_entry(entry), outputs))
    return systems


def format_entry(entry: Entry) -> str:
    terms = conjuncts(entry)

    def term(t):
        return t[0] if len(t) == 1 else "(AND " + " ".join(t) + ")"

    if len(terms) == 1:
        return term(terms[0])
    return "(OR " + " ".join(term(t) for t in terms) + ")"


def format_system(system: System) -> str:
    return f"{system.name}: {format_entry(system.entry)} = {' | '.join(system.outputs)}."
