"""Grammar data model: systems over a type lattice, entry expressions and
realization constraints, plus the boolean and unification operations on them.

Entry expressions are kept in disjunctive normal form once a grammar is
loaded.  The canonical DNF value is an :class:`Or` of :class:`And` nodes of
:class:`Atom` leaves; ``EMPTY`` (an ``Or`` with no children) marks an entry
that can never be satisfied.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Mapping, Union

from .chooser import Ask, Choose, Chooser, Do, OutOfBoundsAction, iter_paths
from .errors import UnificationFailure

ROOT = "start"


# ---------------------------------------------------------------------------
# entry expressions


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class And:
    children: tuple["Entry", ...]


@dataclass(frozen=True)
class Or:
    children: tuple["Entry", ...]


Entry = Union[Atom, And, Or]
Conjuncts = tuple[tuple[str, ...], ...]

EMPTY = Or(())


def _dedup(items: Iterable[str]) -> tuple[str, ...]:
    return tuple(dict.fromkeys(items))


def _terms(expr: Entry) -> list[tuple[str, ...]]:
    if isinstance(expr, Atom):
        return [(expr.name,)]
    if isinstance(expr, Or):
        out: list[tuple[str, ...]] = []
        for child in expr.children:
            out.extend(_terms(child))
        return out
    if isinstance(expr, And):
        acc: list[tuple[str, ...]] = [()]
        for child in expr.children:
            acc = [left + right for left in acc for right in _terms(child)]
        return acc
    raise TypeError(f"not an entry expression: {expr!r}")


def from_conjuncts(terms: Iterable[Iterable[str]]) -> Or:
    return Or(tuple(And(tuple(Atom(a) for a in term)) for term in terms))


def conjuncts(expr: Entry) -> Conjuncts:
    """Conjunct atom tuples of an expression; normalizes if needed."""
    if isinstance(expr, Or) and all(
        isinstance(c, And) and all(isinstance(a, Atom) for a in c.children) for c in expr.children
    ):
        return tuple(tuple(a.name for a in c.children) for c in expr.children)
    return conjuncts(normalize_entry(expr))


def normalize_entry(expr: Entry) -> Or:
    """Rewrite ``expr`` into deduplicated, absorbed DNF.

    Conjuncts keep first-occurrence order, as do the atoms inside each one.
    A conjunct that is a strict superset of another is dropped (absorption).
    """
    terms: list[tuple[str, ...]] = []
    seen: set[frozenset[str]] = set()
    for term in _terms(expr):
        term = _dedup(term)
        key = frozenset(term)
        if key not in seen:
            seen.add(key)
            terms.append(term)
    keys = [frozenset(t) for t in terms]
    kept = [t for t, k in zip(terms, keys) if not any(other < k for other in keys)]
    return from_conjuncts(kept)


def entry_atoms(expr: Entry) -> tuple[str, ...]:
    return _dedup(a for term in conjuncts(expr) for a in term)


def is_simple(expr: Entry) -> bool:
    """True for an entry that is a single type (one conjunct, one atom)."""
    terms = conjuncts(expr)
    return len(terms) == 1 and len(terms[0]) == 1


def remove_unsatisfiable(entry: Entry, goal: Iterable[str]) -> Or:
    goal = set(goal)
    return from_conjuncts(t for t in conjuncts(entry) if all(a in goal for a in t))


def entry_satisfied(entry: Entry, selected: Iterable[str]) -> bool:
    selected = selected if isinstance(selected, (set, frozenset)) else set(selected)
    return any(all(a in selected for a in term) for term in conjuncts(entry))


def substitute(entry: Entry, old: str, new: str) -> Or:
    """Replace atom ``old`` by ``new`` everywhere, then renormalize."""
    terms = conjuncts(entry)
    return normalize_entry(from_conjuncts(tuple(new if a == old else a for a in t) for t in terms))


# ---------------------------------------------------------------------------
# realization constraints


def _pair(a: str, b: str) -> frozenset[str]:
    return frozenset((a, b))


@dataclass(frozen=True)
class ConstraintSet:
    """Feature insertions with filler restrictions, conflations, orderings
    and lexical selections attached to one grammatical type.

    An empty filler set stands for an unconstrained insertion.
    """

    insertions: Mapping[str, frozenset[str]] = field(default_factory=dict)
    conflations: frozenset[frozenset[str]] = frozenset()
    orderings: frozenset[tuple[str, str]] = frozenset()
    lexifications: Mapping[str, str] = field(default_factory=dict)

    @classmethod
    def build(cls, insert=None, conflate=(), order=(), lexify=None) -> "ConstraintSet":
        ins = {label: frozenset(fill) for label, fill in (insert or {}).items()}
        return cls(
            insertions=ins,
            conflations=frozenset(_pair(a, b) for a, b in conflate),
            orderings=frozenset((a, b) for a, b in order),
            lexifications=dict(lexify or {}),
        )

    def __bool__(self) -> bool:
        return bool(self.insertions or self.conflations or self.orderings or self.lexifications)

    def labels(self) -> set[str]:
        return set(self.insertions)

    def map_fillers(self, fn) -> "ConstraintSet":
        return replace(self, insertions={k: frozenset(fn(v)) for k, v in self.insertions.items()})


EMPTY_CONSTRAINTS = ConstraintSet()


def filler_conflicts(types: Iterable[str], owner: Mapping[str, str]) -> list[tuple[str, str]]:
    """Pairs of distinct types in ``types`` introduced by the same system."""
    by_system: dict[str, str] = {}
    clashes = []
    for t in sorted(types):
        system = owner.get(t)
        if system is None:
            continue
        if system in by_system:
            clashes.append((by_system[system], t))
        else:
            by_system[system] = t
    return clashes


def unify_constraints(
    a: ConstraintSet, b: ConstraintSet, owner: Mapping[str, str] | None = None
) -> ConstraintSet:
    """Merge two constraint sets.

    ``owner`` maps each type to the system introducing it; when given,
    a filler set that would hold two outputs of one system is rejected.
    """
    if not b:
        return a
    if not a:
        return b
    insertions = dict(a.insertions)
    for label, fill in b.insertions.items():
        merged = insertions.get(label, frozenset()) | fill
        if owner is not None:
            clashes = filler_conflicts(merged, owner)
            if clashes:
                x, y = clashes[0]
                raise UnificationFailure(
                    f"filler of {label} would be both {x} and {y} (siblings in system {owner[x]})",
                    label=label,
                    types=(x, y),
                )
        insertions[label] = merged
    lex = dict(a.lexifications)
    for label, item in b.lexifications.items():
        if label in lex and lex[label] != item:
            raise UnificationFailure(
                f"{label} lexified both as {lex[label]!r} and {item!r}",
                label=label,
                types=(),
            )
        lex[label] = item
    return ConstraintSet(
        insertions=insertions,
        conflations=a.conflations | b.conflations,
        orderings=a.orderings | b.orderings,
        lexifications=lex,
    )


# ---------------------------------------------------------------------------
# systems and the lattice


@dataclass(frozen=True)
class System:
    name: str
    entry: Or
    outputs: tuple[str, ...]
    chooser: Chooser | None = None


@dataclass(frozen=True)
class TypeLattice:
    systems: Mapping[str, System]
    constraints: Mapping[str, ConstraintSet] = field(default_factory=dict)
    root: str = ROOT
    word_type: str | None = None
    extracted: bool = False

    @cached_property
    def owner(self) -> dict[str, str]:
        owner: dict[str, str] = {}
        for s in self.systems.values():
            for t in s.outputs:
                owner.setdefault(t, s.name)
        return owner

    @cached_property
    def types(self) -> tuple[str, ...]:
        return _dedup([self.root, *(t for s in self.systems.values() for t in s.outputs)])

    @cached_property
    def root_systems(self) -> tuple[str, ...]:
        return tuple(
            s.name for s in self.systems.values() if conjuncts(s.entry) == ((self.root,),)
        )

    @property
    def root_system(self) -> str | None:
        return self.root_systems[0] if self.root_systems else None

    @cached_property
    def word_classes(self) -> frozenset[str]:
        """Types strictly below the designated word type."""
        if self.word_type is None:
            return frozenset()
        below: set[str] = set()
        frontier = {self.word_type}
        while frontier:
            nxt: set[str] = set()
            for s in self.systems.values():
                if set(entry_atoms(s.entry)) & frontier:
                    nxt.update(t for t in s.outputs if t not in below)
            below |= nxt
            frontier = nxt
        return frozenset(below)

    def constraints_of(self, t: str) -> ConstraintSet:
        return self.constraints.get(t, EMPTY_CONSTRAINTS)

    def ancestors(self, types: Iterable[str]) -> set[str]:
        """Upward closure through introducing systems with conjunctive entries."""
        out: set[str] = set()
        stack = list(types)
        while stack:
            t = stack.pop()
            if t in out:
                continue
            out.add(t)
            name = self.owner.get(t)
            if name is None:
                continue
            terms = conjuncts(self.systems[name].entry)
            if len(terms) == 1:
                stack.extend(terms[0])
        return out


def who_has_in_entry(lattice: TypeLattice, t: str) -> list[System]:
    return [s for s in lattice.systems.values() if t in entry_atoms(s.entry)]


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    code: str
    where: str
    message: str

    def __str__(self) -> str:
        return f"[{self.code}] {self.where}: {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    def add(self, code: str, where: str, message: str) -> None:
        self.violations.append(Violation(code, where, message))

    def __bool__(self) -> bool:
        return bool(self.violations)

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def format(self) -> str:
        return "\n".join(str(v) for v in self.violations) or "ok"


def _system_order(lattice: TypeLattice) -> list[str] | None:
    """Topological order of systems (entry types before outputs), or None on a cycle."""
    owner = lattice.owner
    deps = {
        s.name: {owner[a] for a in entry_atoms(s.entry) if a in owner}
        for s in lattice.systems.values()
    }
    order: list[str] = []
    done: set[str] = set()
    pending = dict(deps)
    while pending:
        ready = [n for n, d in pending.items() if d <= done]
        if not ready:
            return None
        for n in ready:
            order.append(n)
            done.add(n)
            del pending[n]
    return order


def validate_lattice(
    lattice: TypeLattice, lexicon=None, *, extracted: bool | None = None
) -> ValidationReport:
    """Check every structural invariant; an empty report means well-formed.

    ``extracted`` relaxes two rules for derived grammars: single-output
    systems are allowed, and chooser paths may end in an out-of-bounds mark
    instead of a choice.
    """
    if extracted is None:
        extracted = lattice.extracted
    report = ValidationReport()
    root = lattice.root
    seen_out: dict[str, str] = {}
    min_outputs = 1 if extracted else 2

    roots = lattice.root_systems
    if not roots:
        report.add("root", root, f"no system has entry {root}")
    elif len(roots) > 1 and not extracted:
        report.add("root", root, f"several systems have entry {root}: {', '.join(roots)}")

    for s in lattice.systems.values():
        where = f"system {s.name}"
        terms = conjuncts(s.entry)
        if not terms:
            report.add("empty entry", where, "entry can never be satisfied")
        if len(s.outputs) < min_outputs:
            report.add("too few outputs", where, f"{len(s.outputs)} output(s)")
        if len(set(s.outputs)) != len(s.outputs):
            report.add("repeated output", where, "outputs are not pairwise distinct")
        for t in s.outputs:
            if t == root:
                report.add("root output", where, f"{root} cannot be an output")
            if t in seen_out and seen_out[t] != s.name:
                report.add("duplicate output", where, f"{t} is also an output of {seen_out[t]}")
            seen_out.setdefault(t, s.name)
        atoms = entry_atoms(s.entry)
        for a in atoms:
            if a in s.outputs:
                report.add("self loop", where, f"{a} is both entry and output")
        if s.chooser is not None:
            _validate_chooser(report, s, extracted)

    defined = set(lattice.types)
    for s in lattice.systems.values():
        for a in entry_atoms(s.entry):
            if a not in defined:
                report.add("unreachable atom", f"system {s.name}", f"entry type {a} is not defined")

    if _system_order(lattice) is None:
        report.add("cycle", "systems", "entry/output dependencies are cyclic")

    owner = lattice.owner
    for t, cs in lattice.constraints.items():
        where = f"constraints of {t}"
        if t not in defined:
            report.add("undefined type", where, f"{t} is not a type of the grammar")
        labels = cs.labels()
        used = {x for pair in cs.conflations for x in pair}
        used |= {x for pair in cs.orderings for x in pair}
        used |= set(cs.lexifications)
        for label in sorted(used - labels):
            report.add("uninserted function", where, f"{label} is referenced but not inserted")
        for label, fill in cs.insertions.items():
            for f in sorted(fill):
                if f not in defined:
                    report.add("undefined type", where, f"filler {f} of {label} is not defined")
            for x, y in filler_conflicts(fill, owner):
                report.add("sibling filler", where, f"{label} filler holds siblings {x} and {y}")

    if lattice.word_type is not None and lattice.word_type not in defined:
        report.add("undefined type", "word type", f"{lattice.word_type} is not defined")

    chooser_users: dict[str, list[str]] = {}
    for s in lattice.systems.values():
        if s.chooser is not None and s.chooser.name:
            chooser_users.setdefault(s.chooser.name, []).append(s.name)
    for name, users in chooser_users.items():
        if len(users) > 1:
            report.add("shared chooser", f"chooser {name}", f"used by {', '.join(users)}")

    if lexicon is not None:
        ids: set[str] = set()
        for item in lexicon:
            if item.id in ids:
                report.add("duplicate item", f"lexicon {item.id}", "identifier repeated")
            ids.add(item.id)
            for wc in item.word_classes:
                if wc not in defined:
                    report.add("undefined type", f"lexicon {item.id}", f"word class {wc} not defined")
    return report


def _validate_chooser(report: ValidationReport, s: System, extracted: bool) -> None:
    where = f"chooser of {s.name}"
    stack = [s.chooser.root]
    while stack:
        node = stack.pop()
        if isinstance(node, Ask):
            if not node.branches:
                report.add("empty ask", where, f"ask {node.query} has no branches")
            answers = [a for a, _ in node.branches]
            if len(set(answers)) != len(answers):
                report.add("repeated branch", where, f"ask {node.query} repeats an answer")
            stack.extend(n for _, n in node.branches)
        elif isinstance(node, Do):
            for act in node.actions:
                if isinstance(act, Choose) and act.type not in s.outputs:
                    report.add("foreign choice", where, f"chooses {act.type}, not an output")
            if node.then is not None:
                stack.append(node.then)
    for _, actions in iter_paths(s.chooser):
        chosen = sum(isinstance(a, Choose) for a in actions)
        marked = any(isinstance(a, OutOfBoundsAction) for a in actions)
        if chosen == 1 or (marked and (extracted or chosen == 0)):
            continue
        if chosen == 0:
            report.add("no choice", where, "a path ends without a choose action")
        else:
            report.add("several choices", where, "a path performs more than one choose")

