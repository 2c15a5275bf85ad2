"""Deterministic top-down sentence generation.

Every constituent is produced by one traversal of the lattice: starting from
the root type, the first system (in definition order) whose entry is
satisfied and which has not fired yet is fired, its chooser picks an output,
and the chosen type's constraints are unified in.  When no system can fire,
the accumulated insertions become constituents: word-class fillers and
lexified functions are spelled from the lexicon, functions bound to other
concepts are generated recursively, and everything is linearized by the
ordering constraints.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Mapping

from .chooser import SELF, Action, CopyHub, Identify, InquiryRef, evaluate_chooser
from .errors import (
    BindingConflict,
    GenerationError,
    GrammarError,
    LexiconMiss,
    MissingAnswer,
    NoChoice,
    OrderCycle,
    UnboundFunction,
    UnificationFailure,
)
from .lattice import ConstraintSet, TypeLattice, entry_satisfied, filler_conflicts, unify_constraints


@dataclass(frozen=True)
class LexicalItem:
    id: str
    spelling: str
    word_classes: tuple[str, ...] = ()
    closed_class: bool = False
    spelling_before_vowel: str | None = None


Lexicon = Mapping[str, LexicalItem]


@dataclass
class SemanticSpec:
    """A concept graph plus the table of answers to the grammar's inquiries."""

    root: str
    concepts: dict[str, dict[str, str]]
    answers: dict[tuple[str, tuple[str, ...]], str]
    id: str | None = None

    def answer(self, inquiry: str, args: tuple[str, ...]) -> str:
        try:
            return self.answers[(inquiry, tuple(args))]
        except KeyError:
            raise MissingAnswer(inquiry, tuple(args)) from None

    def attribute(self, concept: str, attr: str) -> str:
        try:
            value = self.concepts[concept][attr]
        except KeyError:
            raise UnboundFunction(f"concept {concept} has no attribute {attr}") from None
        if value not in self.concepts:
            raise UnboundFunction(f"attribute {attr} of {concept} is {value!r}, not a concept")
        return value

    @classmethod
    def from_json(cls, obj: dict) -> "SemanticSpec":
        answers = {(name, tuple(args)): answer for name, args, answer in obj.get("answers", [])}
        return cls(obj["root"], {k: dict(v) for k, v in obj["concepts"].items()}, answers, obj.get("id"))

    def to_json(self) -> dict:
        out: dict = {}
        if self.id is not None:
            out["id"] = self.id
        out["root"] = self.root
        out["concepts"] = self.concepts
        out["answers"] = [[name, list(args), ans] for (name, args), ans in self.answers.items()]
        return out


class GenContext:
    """Per-constituent traversal state.

    Function labels are grouped into coreference classes (conflations and
    copyhubs); a concept binding belongs to a whole class.
    """

    def __init__(self, lattice: TypeLattice, spec: SemanticSpec, concept: str):
        self.lattice = lattice
        self.spec = spec
        self.concept = concept
        self.selected: set[str] = {lattice.root}
        self.accumulated: ConstraintSet = lattice.constraints_of(lattice.root)
        self.fired: list[str] = []
        self.trace: list[tuple[InquiryRef, tuple[str, ...], str]] = []
        self._parent: dict[str, str] = {}
        self._bound: dict[str, str] = {}
        self._absorb_conflations()

    def find(self, label: str) -> str:
        parent = self._parent.get(label, label)
        if parent == label:
            return label
        root = self.find(parent)
        self._parent[label] = root
        return root

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if rb < ra:
            ra, rb = rb, ra
        ca, cb = self._bound.get(ra), self._bound.get(rb)
        if ca is not None and cb is not None and ca != cb:
            raise BindingConflict(f"conflating {a} and {b} joins concepts {ca} and {cb}")
        self._parent[rb] = ra
        if ca is None and cb is not None:
            self._bound[ra] = cb
        self._bound.pop(rb, None)

    def binding(self, label: str) -> str | None:
        return self._bound.get(self.find(label))

    def bind(self, label: str, concept: str) -> None:
        root = self.find(label)
        current = self._bound.get(root)
        if current is not None and current != concept:
            raise BindingConflict(f"{label} is bound to {current}, cannot rebind to {concept}")
        self._bound[root] = concept

    def resolve(self, label: str) -> str:
        if label == SELF:
            return self.concept
        concept = self.binding(label)
        if concept is None:
            raise UnboundFunction(f"function {label} is not bound to a concept")
        return concept

    def apply(self, action: Action) -> None:
        if isinstance(action, Identify):
            if action.concept == SELF:
                target = self.concept
            else:
                target = self.spec.attribute(self.concept, action.concept)
            self.bind(action.function, target)
        elif isinstance(action, CopyHub):
            self.union(action.first, action.second)

    def _absorb_conflations(self) -> None:
        for pair in self.accumulated.conflations:
            a, *rest = sorted(pair)
            for b in rest:
                self.union(a, b)

    def add_type(self, t: str) -> None:
        self.selected.add(t)
        extra = self.lattice.constraints_of(t)
        if extra:
            self.accumulated = unify_constraints(self.accumulated, extra, self.lattice.owner)
            self._absorb_conflations()

    def classes(self) -> dict[str, tuple[str, ...]]:
        """Coreference classes over inserted functions, keyed by joined labels."""
        groups: dict[str, list[str]] = {}
        for label in self.accumulated.insertions:
            groups.setdefault(self.find(label), []).append(label)
        return {"/".join(sorted(ls)): tuple(sorted(ls)) for ls in groups.values()}


def traverse(lattice: TypeLattice, oracle, ctx: GenContext) -> GenContext:
    fired: set[str] = set()
    systems = list(lattice.systems.values())
    while True:
        system = next(
            (s for s in systems if s.name not in fired and entry_satisfied(s.entry, ctx.selected)),
            None,
        )
        if system is None:
            return ctx
        fired.add(system.name)
        ctx.fired.append(system.name)
        if system.chooser is None:
            raise NoChoice(f"system {system.name} has no chooser")
        outcome = evaluate_chooser(system.chooser, oracle, ctx, system.name)
        ctx.trace.extend(outcome.trace)
        if outcome.chosen not in system.outputs:
            raise NoChoice(f"chooser of {system.name} chose {outcome.chosen}, not an output")
        try:
            ctx.add_type(outcome.chosen)
        except UnificationFailure as exc:
            raise UnificationFailure(
                f"system {system.name} choosing {outcome.chosen}: {exc}", exc.label, exc.types
            ) from exc


@dataclass
class Constituent:
    labels: tuple[str, ...]
    filler_types: frozenset[str]
    concept: str | None = None
    spelling: str | None = None
    item: str | None = None
    word_types: frozenset[str] = frozenset()
    substructure: "FeatureStructure | None" = None


@dataclass
class FeatureStructure:
    concept: str
    selected: frozenset[str]
    fired: tuple[str, ...]
    trace: tuple[tuple[InquiryRef, tuple[str, ...], str], ...]
    accumulated: ConstraintSet
    functions: dict[str, Constituent] = field(default_factory=dict)
    order: tuple[str, ...] = ()

    def walk(self):
        yield self
        for key in self.order:
            sub = self.functions[key].substructure
            if sub is not None:
                yield from sub.walk()


def _literal(value: str) -> str | None:
    if len(value) >= 2 and value[0] == value[-1] == '"':
        return value[1:-1]
    return None


def _spell(lexicon: Lexicon, spec: SemanticSpec, labels, lexified: str | None, concept: str | None):
    if lexified is not None:
        literal = _literal(lexified)
        if literal is not None:
            return literal, None
        if lexified not in lexicon:
            raise LexiconMiss(f"lexical item {lexified} (for {'/'.join(labels)}) not in lexicon")
        return lexicon[lexified].spelling, lexified
    if concept is not None:
        attrs = spec.concepts.get(concept, {})
        if "lex" in attrs:
            item = attrs["lex"]
            if item not in lexicon:
                raise LexiconMiss(f"lexical item {item} (concept {concept}) not in lexicon")
            return lexicon[item].spelling, item
        if "name" in attrs:
            return attrs["name"], None
    raise LexiconMiss(f"no spelling source for word constituent {'/'.join(labels)}")


def _linearize(ctx: GenContext, classes: dict[str, tuple[str, ...]]) -> tuple[str, ...]:
    key_of = {label: key for key, labels in classes.items() for label in labels}
    succ: dict[str, set[str]] = {k: set() for k in classes}
    indeg = {k: 0 for k in classes}
    for a, b in sorted(ctx.accumulated.orderings):
        ka, kb = key_of.get(a), key_of.get(b)
        if ka is None or kb is None:
            continue
        if ka == kb:
            raise OrderCycle(f"{a} < {b} but both are the same constituent {ka}")
        if kb not in succ[ka]:
            succ[ka].add(kb)
            indeg[kb] += 1
    ready = [k for k, d in indeg.items() if d == 0]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        k = heapq.heappop(ready)
        order.append(k)
        for nxt in succ[k]:
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                heapq.heappush(ready, nxt)
    if len(order) != len(classes):
        stuck = sorted(k for k in classes if k not in order)
        raise OrderCycle(f"ordering constraints are cyclic among {', '.join(stuck)}")
    return tuple(order)


def generate_constituent(
    lattice: TypeLattice,
    lexicon: Lexicon,
    spec: SemanticSpec,
    concept: str,
    path: tuple[str, ...] = (),
) -> FeatureStructure:
    try:
        ctx = traverse(lattice, spec, GenContext(lattice, spec, concept))
        classes = ctx.classes()
        order = _linearize(ctx, classes)
    except GrammarError as exc:
        exc.path = path + exc.path
        raise

    acc = ctx.accumulated
    words = lattice.word_classes
    fs = FeatureStructure(
        concept=concept,
        selected=frozenset(ctx.selected),
        fired=tuple(ctx.fired),
        trace=tuple(ctx.trace),
        accumulated=acc,
        order=order,
    )
    for key in order:
        labels = classes[key]
        try:
            fillers = frozenset().union(*(acc.insertions[label] for label in labels))
            clashes = filler_conflicts(fillers, lattice.owner)
            if clashes:
                x, y = clashes[0]
                raise UnificationFailure(f"constituent {key} would be both {x} and {y}", key, (x, y))
            lexified = {acc.lexifications[label] for label in labels if label in acc.lexifications}
            if len(lexified) > 1:
                raise UnificationFailure(f"constituent {key} lexified as {sorted(lexified)}", key)
            bound = ctx.binding(labels[0])
            con = Constituent(labels, fillers, bound)
            if lexified or fillers & words:
                con.spelling, con.item = _spell(lexicon, spec, labels, next(iter(lexified), None), bound)
                con.word_types = frozenset(lattice.ancestors(fillers))
        except GrammarError as exc:
            exc.path = path + (key,) + exc.path
            raise
        if con.spelling is None and bound is not None:
            con.substructure = generate_constituent(lattice, lexicon, spec, bound, path + (key,))
        fs.functions[key] = con
    return fs


def tokens(fs: FeatureStructure) -> list[tuple[str, str | None]]:
    out: list[tuple[str, str | None]] = []
    for key in fs.order:
        con = fs.functions[key]
        if con.spelling is not None:
            out.append((con.spelling, con.item))
        elif con.substructure is not None:
            out.extend(tokens(con.substructure))
    return out


def assemble(toks: list[tuple[str, str | None]], lexicon: Lexicon) -> str:
    """Join word spellings into a sentence string.

    Words are separated by one space, the first letter is capitalized and a
    period is appended unless the text already ends in punctuation.
    """
    words = []
    for i, (text, item) in enumerate(toks):
        entry = lexicon.get(item) if item else None
        if entry is not None and entry.spelling_before_vowel and i + 1 < len(toks):
            nxt = toks[i + 1][0]
            if nxt[:1].lower() in "aeiou":
                text = entry.spelling_before_vowel
        words.append(text)
    text = " ".join(w for w in words if w)
    if not text:
        return ""
    text = text[0].upper() + text[1:]
    if not text.endswith((".", "?", "!")):
        text += "."
    return text


@dataclass(frozen=True)
class Realization:
    text: str
    used_types: frozenset[str]
    inquiry_log: dict[str, frozenset[str]]
    steps: int
    fired: int
    asked: int
    lexical_usage: frozenset[str]
    structure: FeatureStructure


def generate_sentence(lattice: TypeLattice, lexicon: Lexicon, spec: SemanticSpec) -> Realization:
    fs = generate_constituent(lattice, lexicon, spec, spec.root)
    used: set[str] = set()
    log: dict[str, set[str]] = {}
    items: set[str] = set()
    fired = asked = 0
    for node in fs.walk():
        used |= node.selected
        fired += len(node.fired)
        asked += len(node.trace)
        for ref, _, answer in node.trace:
            log.setdefault(ref.name, set()).add(answer)
        for con in node.functions.values():
            used |= con.word_types
            if con.item is not None:
                items.add(con.item)
    return Realization(
        text=assemble(tokens(fs), lexicon),
        used_types=frozenset(used),
        inquiry_log={k: frozenset(v) for k, v in sorted(log.items())},
        steps=fired + asked,
        fired=fired,
        asked=asked,
        lexical_usage=frozenset(items),
        structure=fs,
    )


__all__ = [
    "GenContext",
    "GenerationError",
    "LexicalItem",
    "Realization",
    "SemanticSpec",
    "assemble",
    "generate_constituent",
    "generate_sentence",
    "traverse",
]
