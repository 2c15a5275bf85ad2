"""Subgrammar extraction.

Given the cumulative set of types a training run used (the goal types),
derive a smaller lattice that generates the same output on that domain:

* entries lose every conjunct mentioning a non-goal type;
* a depth-first walk from the root system restricts each system's outputs
  to goal types;
* a system with a single-type entry and a single surviving output cannot
  vary any more.  It is dropped, its output becomes a pseudotype, the
  pseudotype's constraints are raised onto the surviving type where the
  chain of such systems started, and its chooser actions move to the next
  surviving system below (or, at a dead end, onto the choice that selects
  the chain's start type);
* systems with complex entries are kept even when they no longer branch,
  so conjunctive inheritance stays consistent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .chooser import (
    Action,
    actions_toward,
    attach_to_choice,
    extend_chooser,
    mark_out_of_bounds,
    prune_chooser_by_responses,
)
from .errors import GrammarError, InvalidGoal, OutOfBounds, UnificationFailure
from .generator import LexicalItem, Lexicon, SemanticSpec, generate_sentence
from .lattice import (
    EMPTY_CONSTRAINTS,
    ConstraintSet,
    Entry,
    Or,
    System,
    TypeLattice,
    conjuncts,
    entry_atoms,
    is_simple,
    remove_unsatisfiable,
    substitute,
    unify_constraints,
)


@dataclass(frozen=True)
class GoalTypeSet:
    types: frozenset[str]
    provenance: str = ""
    sentences: int = 0

    def __contains__(self, t: str) -> bool:
        return t in self.types

    def __len__(self) -> int:
        return len(self.types)


def dnf_substitute(supertype: str, t: str, entry: Entry) -> Or:
    return substitute(entry, t, supertype)


@dataclass
class ExtractionReport:
    kept_systems: int = 0
    excised_types: dict[str, str] = field(default_factory=dict)
    raised_constraints: list[tuple[str, str]] = field(default_factory=list)
    percolated_actions: list[tuple[str, str]] = field(default_factory=list)
    unreachable_systems: list[str] = field(default_factory=list)
    dropped_systems: list[str] = field(default_factory=list)
    goal_size: int = 0
    full_size: int = 0
    sub_size: int = 0
    warnings: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "fullTypes": self.full_size,
            "goalTypes": self.goal_size,
            "subTypes": self.sub_size,
            "keptSystems": self.kept_systems,
            "excisedTypes": [[p, to] for p, to in self.excised_types.items()],
            "raisedConstraints": [list(x) for x in self.raised_constraints],
            "percolatedActions": [list(x) for x in self.percolated_actions],
            "unreachableSystems": self.unreachable_systems,
            "droppedSystems": self.dropped_systems,
            "warnings": self.warnings,
            "notes": self.notes,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    def format_table(self) -> str:
        pct = 100.0 * self.sub_size / self.full_size if self.full_size else 0.0
        lines = [
            f"types: full {self.full_size}  goal {self.goal_size}  sub {self.sub_size} ({pct:.0f}% of full)",
            f"kept systems: {self.kept_systems}",
            "",
            f"{'pseudotype':<20} {'raised onto':<20}",
        ]
        lines += [f"{p:<20} {to:<20}" for p, to in self.excised_types.items()]
        if self.percolated_actions:
            lines += ["", f"{'actions from':<20} {'moved to':<20}"]
            lines += [f"{a:<20} {b:<20}" for a, b in self.percolated_actions]
        if self.unreachable_systems:
            lines += ["", "unreachable: " + ", ".join(self.unreachable_systems)]
        if self.dropped_systems:
            lines += ["dropped: " + ", ".join(self.dropped_systems)]
        lines += [f"warning: {w}" for w in self.warnings]
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines) + "\n"


RAISE_NOTE = (
    "constraints inherited along a pseudotype path are unified into the path-start type "
    "once, after all outputs of the path's last system have been traversed"
)


class _Batch:
    __slots__ = ("system", "actions", "consumed")

    def __init__(self, system: str, actions: tuple[Action, ...]):
        self.system = system
        self.actions = actions
        self.consumed = False


class Extraction:
    """State of one extraction run; ``run`` performs the whole walk."""

    def __init__(
        self,
        lattice: TypeLattice,
        goal: GoalTypeSet | Iterable[str],
        responses: Mapping[str, Iterable[str]] | None = None,
    ):
        types = goal.types if isinstance(goal, GoalTypeSet) else frozenset(goal)
        undefined = sorted(t for t in types if t not in set(lattice.types))
        if undefined:
            raise InvalidGoal(f"goal types not defined in the grammar: {', '.join(undefined)}")
        if lattice.root not in types:
            raise InvalidGoal(f"goal types must include the root type {lattice.root}")
        self.g = lattice
        self.goal = types
        self.responses = responses
        self.revised = {
            name: remove_unsatisfiable(s.entry, types) for name, s in lattice.systems.items()
        }
        self.entries: dict[str, Or] = dict(self.revised)
        self.outputs: dict[str, tuple[str, ...]] = {}
        self.kept: list[str] = []
        self.constraints: dict[str, ConstraintSet] = dict(lattice.constraints)
        self.pseudo: dict[str, str] = {}
        self.prepend: dict[str, list[Action]] = {}
        self.deferred: list[tuple[str, str, tuple[Action, ...]]] = []
        self.report = ExtractionReport()

    # -- the walk

    def traverse_system(
        self,
        s: str,
        t: str,
        supertype: str,
        inherited: ConstraintSet,
        pending: tuple[_Batch, ...] = (),
    ) -> None:
        system = self.g.systems[s]
        inter = tuple(o for o in system.outputs if o in self.goal)
        if not inter or not conjuncts(self.revised[s]):
            return
        simple = is_simple(self.revised[s])
        if s in self.outputs:
            # already kept via another entry type: only rewrite and raise
            self.entries[s] = dnf_substitute(supertype, t, self.entries[s])
            self._raise(supertype, inherited, s)
            return
        if simple and len(inter) == 1:
            out = inter[0]
            actions = actions_toward(system.chooser, out)
            if actions is None:
                self.report.warnings.append(
                    f"system {s} kept with single output {out}: its chooser actions depend on inquiry answers"
                )
            else:
                self.pseudo[out] = supertype
                own = self.g.constraints_of(out)
                if own:
                    self.report.raised_constraints.append((out, supertype))
                constraints = self._unify(own, inherited, f"pseudotype {out}")
                batch = _Batch(s, actions)
                chain = pending + (batch,) if actions else pending
                self.traverse_type(out, supertype, constraints, chain)
                if actions and not batch.consumed:
                    self.deferred.append((s, supertype, actions))
                    batch.consumed = True
                return
        self.entries[s] = dnf_substitute(supertype, t, self.entries[s])
        self.outputs[s] = inter
        self.kept.append(s)
        if simple and supertype != t:
            for batch in pending:
                if not batch.consumed:
                    self.prepend.setdefault(s, []).extend(batch.actions)
                    self.report.percolated_actions.append((batch.system, s))
                    batch.consumed = True
        for o in inter:
            self.traverse_type(o, o, EMPTY_CONSTRAINTS, ())
        self._raise(supertype, inherited, s)

    def traverse_type(
        self,
        t: str,
        supertype: str,
        inherited: ConstraintSet,
        pending: tuple[_Batch, ...] = (),
    ) -> None:
        who = [name for name in self.g.systems if t in entry_atoms(self.entries[name])]
        for s in who:
            self.traverse_system(s, t, supertype, inherited, pending)
        # raised even when some system below exists: that system may have no
        # goal output, in which case nothing else would carry the constraints
        self._raise(supertype, inherited, t)

    # -- helpers

    def _unify(self, a: ConstraintSet, b: ConstraintSet, where: str) -> ConstraintSet:
        try:
            return unify_constraints(a, b, self.g.owner)
        except UnificationFailure as exc:
            raise UnificationFailure(f"raising constraints of {where}: {exc}", exc.label, exc.types) from exc

    def _raise(self, target: str, cs: ConstraintSet, where: str) -> None:
        if cs:
            if RAISE_NOTE not in self.report.notes:
                self.report.notes.append(RAISE_NOTE)
            self.constraints[target] = self._unify(
                self.constraints.get(target, EMPTY_CONSTRAINTS), cs, f"path through {where} onto {target}"
            )

    def _place_deferred(self, choosers: dict[str, object]) -> None:
        root = self.g.root
        for source, supertype, actions in self.deferred:
            if supertype == root:
                target = next(
                    (n for n in self.kept if conjuncts(self.entries[n]) == ((root,),)), None
                )
                if target is None or choosers.get(target) is None:
                    self.report.warnings.append(f"actions of {source} have no surviving chooser to move to")
                    continue
                choosers[target] = extend_chooser(choosers[target], actions)
            else:
                target = self.g.owner[supertype]
                if choosers.get(target) is None:
                    self.report.warnings.append(f"actions of {source} have no surviving chooser to move to")
                    continue
                choosers[target] = attach_to_choice(choosers[target], supertype, actions)
            self.report.percolated_actions.append((source, target))

    def run(self) -> tuple[TypeLattice, ExtractionReport]:
        g = self.g
        root_system = g.root_system
        if root_system is None:
            raise InvalidGoal(f"grammar has no system with entry {g.root}")
        self.traverse_system(root_system, g.root, g.root, EMPTY_CONSTRAINTS)

        kept = [n for n in g.systems if n in self.outputs]
        self.kept = kept
        choosers: dict[str, object] = {}
        for name in kept:
            base = g.systems[name].chooser
            extra = self.prepend.get(name, [])
            if base is None:
                if extra:
                    self.report.warnings.append(f"system {name} has no chooser to receive actions")
                choosers[name] = None
                continue
            choosers[name] = extend_chooser(base, extra)
        self._place_deferred(choosers)

        sub_types = [g.root] + [t for n in kept for t in self.outputs[n]]
        surviving = set(sub_types)
        systems: dict[str, System] = {}
        for name in kept:
            chooser = choosers[name]
            if chooser is not None:
                chooser = mark_out_of_bounds(chooser, self.outputs[name])
                if self.responses is not None:
                    chooser = prune_chooser_by_responses(chooser, self.responses, self.outputs[name])
            systems[name] = System(name, self.entries[name], self.outputs[name], chooser)

        def rename(fill: frozenset[str]) -> frozenset[str]:
            out = set()
            for f in fill:
                f = self.pseudo.get(f, f)
                if f in surviving:
                    out.add(f)
                else:
                    self.report.warnings.append(f"filler type {f} is not in the subgrammar; dropped")
            return frozenset(out)

        constraints = {}
        for t in sub_types:
            cs = self.constraints.get(t)
            if cs:
                constraints[t] = cs.map_fillers(rename)

        word_type = g.word_type if g.word_type in surviving else None
        sub = TypeLattice(systems, constraints, g.root, word_type, extracted=True)

        r = self.report
        r.kept_systems = len(systems)
        r.excised_types = dict(self.pseudo)
        r.unreachable_systems = [n for n in g.systems if not conjuncts(self.revised[n])]
        r.dropped_systems = [
            n for n in g.systems if n not in self.outputs and n not in r.unreachable_systems
        ]
        r.goal_size = len(self.goal)
        r.full_size = len(g.types)
        r.sub_size = len(sub.types)
        r.warnings = list(dict.fromkeys(r.warnings))
        return sub, r


def extract_subgrammar(
    lattice: TypeLattice,
    goal: GoalTypeSet | Iterable[str],
    responses: Mapping[str, Iterable[str]] | None = None,
) -> tuple[TypeLattice, ExtractionReport]:
    """Extract the subgrammar covering ``goal``.

    ``responses`` (inquiry name to observed answers) additionally prunes the
    surviving choosers to the answers seen in training.
    """
    return Extraction(lattice, goal, responses).run()


def extract_sublexicon(
    lexicon: Lexicon,
    sub_types: Iterable[str],
    usage: Iterable[str],
    aliases: Mapping[str, str] | None = None,
) -> dict[str, LexicalItem]:
    """Closed-class items survive iff used; open-class items iff one of their
    word classes survives.  ``aliases`` maps pseudotypes to the type that
    replaced them, and surviving items have their classes rewritten to match.
    """
    sub_types = set(sub_types)
    usage = set(usage)
    aliases = aliases or {}
    out: dict[str, LexicalItem] = {}
    for item_id, item in lexicon.items():
        classes = tuple(dict.fromkeys(aliases.get(c, c) for c in item.word_classes))
        classes = tuple(c for c in classes if c in sub_types)
        if item.closed_class:
            keep = item_id in usage
        else:
            keep = bool(classes)
        if keep:
            out[item_id] = LexicalItem(
                item.id, item.spelling, classes, item.closed_class, item.spelling_before_vowel
            )
    return out


# ---------------------------------------------------------------------------
# consistency


@dataclass(frozen=True)
class SentenceVerdict:
    index: int
    id: str | None
    status: str  # equal | mismatch | out-of-bounds | error
    full_text: str | None
    sub_text: str | None
    full_steps: int = 0
    sub_steps: int = 0
    types_ok: bool = True
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "id": self.id,
            "status": self.status,
            "full": self.full_text,
            "sub": self.sub_text,
            "fullSteps": self.full_steps,
            "subSteps": self.sub_steps,
            "typesOk": self.types_ok,
            "detail": self.detail,
        }


@dataclass
class ConsistencyReport:
    verdicts: list[SentenceVerdict]

    @property
    def all_equal(self) -> bool:
        return all(v.status == "equal" and v.types_ok for v in self.verdicts)

    def count(self, status: str) -> int:
        return sum(v.status == status for v in self.verdicts)

    @property
    def step_ratio(self) -> float:
        """Total sub steps over total full steps, on sentences both generated."""
        pairs = [(v.sub_steps, v.full_steps) for v in self.verdicts if v.status in ("equal", "mismatch")]
        full = sum(f for _, f in pairs)
        return sum(s for s, _ in pairs) / full if full else 1.0

    @property
    def mean_step_ratio(self) -> float:
        ratios = [v.sub_steps / v.full_steps for v in self.verdicts if v.status == "equal" and v.full_steps]
        return sum(ratios) / len(ratios) if ratios else 1.0

    def to_json(self) -> dict:
        return {
            "sentences": len(self.verdicts),
            "equal": self.count("equal"),
            "mismatch": self.count("mismatch"),
            "outOfBounds": self.count("out-of-bounds"),
            "errors": self.count("error"),
            "stepRatio": round(self.step_ratio, 6),
            "meanStepRatio": round(self.mean_step_ratio, 6),
            "verdicts": [v.to_json() for v in self.verdicts],
        }

    def format(self) -> str:
        lines = []
        for v in self.verdicts:
            mark = {"equal": "ok", "mismatch": "DIFF", "out-of-bounds": "OOB", "error": "ERR"}[v.status]
            if not v.types_ok and v.status == "equal":
                mark = "TYPES"
            lines.append(f"{v.index:>4} {mark:<5} {v.full_steps:>4} {v.sub_steps:>4}  {v.sub_text or v.detail}")
        lines.append(
            f"{self.count('equal')}/{len(self.verdicts)} equal, step ratio {self.step_ratio:.4f}"
        )
        return "\n".join(lines) + "\n"


def verify_consistency(
    full: TypeLattice,
    sub: TypeLattice,
    corpus: Iterable[SemanticSpec],
    lexicon: Lexicon,
    sub_lexicon: Lexicon | None = None,
) -> ConsistencyReport:
    sub_lexicon = lexicon if sub_lexicon is None else sub_lexicon
    excised = set(full.types) - set(sub.types)
    verdicts = []
    for i, spec in enumerate(corpus, start=1):
        try:
            a = generate_sentence(full, lexicon, spec)
        except GrammarError as exc:
            verdicts.append(SentenceVerdict(i, spec.id, "error", None, None, detail=f"full grammar: {exc}"))
            continue
        try:
            b = generate_sentence(sub, sub_lexicon, spec)
        except OutOfBounds as exc:
            verdicts.append(
                SentenceVerdict(i, spec.id, "out-of-bounds", a.text, None, a.steps, detail=str(exc))
            )
            continue
        except GrammarError as exc:
            verdicts.append(
                SentenceVerdict(i, spec.id, "error", a.text, None, a.steps, detail=f"subgrammar: {exc}")
            )
            continue
        status = "equal" if a.text == b.text else "mismatch"
        types_ok = b.used_types == a.used_types - excised
        verdicts.append(SentenceVerdict(i, spec.id, status, a.text, b.text, a.steps, b.steps, types_ok))
    return ConsistencyReport(verdicts)
