"""Chooser decision trees: the semantic interface that picks one output
type per system firing, and the rewrites applied to choosers when a grammar
is specialized (action percolation, out-of-bounds marking, response pruning).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Protocol, Union

from .errors import ChoosePercolated, MissingAnswer, NoBranch, NoChoice, OutOfBounds

SELF = "self"


# actions


@dataclass(frozen=True)
class Choose:
    type: str


@dataclass(frozen=True)
class Identify:
    function: str
    concept: str


@dataclass(frozen=True)
class CopyHub:
    first: str
    second: str


@dataclass(frozen=True)
class OutOfBoundsAction:
    reason: str


Action = Union[Choose, Identify, CopyHub, OutOfBoundsAction]


# nodes


@dataclass(frozen=True)
class Ask:
    query: str
    args: tuple[str, ...]
    branches: tuple[tuple[str, "Node"], ...]

    def branch(self, answer: str) -> "Node | None":
        for label, node in self.branches:
            if label == answer:
                return node
        return None


@dataclass(frozen=True)
class Do:
    actions: tuple[Action, ...]
    then: "Node | None" = None


Node = Union[Ask, Do]


@dataclass(frozen=True)
class Chooser:
    root: Node
    name: str = ""


@dataclass(frozen=True)
class InquiryRef:
    name: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class ChooserOutcome:
    chosen: str
    actions: tuple[Action, ...]
    trace: tuple[tuple[InquiryRef, tuple[str, ...], str], ...]


class Oracle(Protocol):
    def answer(self, inquiry: str, args: tuple[str, ...]) -> str: ...


class EvalContext(Protocol):
    def resolve(self, label: str) -> str: ...

    def apply(self, action: Action) -> None: ...


def evaluate_chooser(
    chooser: Chooser, oracle: Oracle, ctx: EvalContext, system: str | None = None
) -> ChooserOutcome:
    """Walk ``chooser`` from its root, asking each inquiry on the way once.

    Identify and copyhub actions are applied to ``ctx`` as they are passed,
    so later inquiries on the same path see their bindings.  The first
    ``choose`` on the path wins.
    """
    chosen: str | None = None
    actions: list[Action] = []
    trace: list[tuple[InquiryRef, tuple[str, ...], str]] = []
    node: Node | None = chooser.root
    while node is not None:
        if isinstance(node, Do):
            for act in node.actions:
                if isinstance(act, OutOfBoundsAction):
                    raise OutOfBounds(act.reason, system)
                if isinstance(act, Choose):
                    if chosen is None:
                        chosen = act.type
                else:
                    ctx.apply(act)
                actions.append(act)
            node = node.then
        else:
            args = tuple(ctx.resolve(a) for a in node.args)
            answer = oracle.answer(node.query, args)
            trace.append((InquiryRef(node.query, node.args), args, answer))
            nxt = node.branch(answer)
            if nxt is None:
                raise NoBranch(node.query, answer)
            node = nxt
    if chosen is None:
        raise NoChoice(f"chooser {chooser.name or system or '?'} ended without a choice")
    return ChooserOutcome(chosen, tuple(actions), tuple(trace))


def iter_paths(chooser: Chooser) -> Iterator[tuple[tuple[tuple[str, str], ...], tuple[Action, ...]]]:
    """Yield ``(asked, actions)`` for every root-to-leaf path."""

    def walk(node, asked, acts):
        if node is None:
            yield asked, acts
        elif isinstance(node, Do):
            yield from walk(node.then, asked, acts + node.actions)
        else:
            for answer, child in node.branches:
                yield from walk(child, asked + ((node.query, answer),), acts)

    yield from walk(chooser.root, (), ())


def first_choice(actions: Iterable[Action]) -> str | None:
    for act in actions:
        if isinstance(act, OutOfBoundsAction):
            return None
        if isinstance(act, Choose):
            return act.type
    return None


def actions_toward(chooser: Chooser | None, t: str) -> tuple[Action, ...] | None:
    """Non-choice actions performed on every path that selects ``t``.

    Returns ``None`` when different paths to ``t`` perform different actions,
    i.e. the actions depend on inquiry answers and cannot be detached from
    the tree.
    """
    if chooser is None:
        return ()
    found: set[tuple[Action, ...]] = set()
    for _, acts in iter_paths(chooser):
        if first_choice(acts) == t:
            found.add(tuple(a for a in acts if not isinstance(a, Choose)))
    if len(found) > 1:
        return None
    return next(iter(found), ())


def extend_chooser(base: Chooser, pending: Iterable[Action]) -> Chooser:
    pending = tuple(pending)
    if any(isinstance(a, Choose) for a in pending):
        raise ChoosePercolated("percolated actions may not contain a choose action")
    if not pending:
        return base
    return Chooser(Do(pending, base.root), base.name)


def _map_do(node: Node | None, fn) -> Node | None:
    if node is None:
        return None
    if isinstance(node, Do):
        return fn(Do(node.actions, _map_do(node.then, fn)))
    return Ask(node.query, node.args, tuple((a, _map_do(n, fn)) for a, n in node.branches))


def attach_to_choice(chooser: Chooser, t: str, actions: Iterable[Action]) -> Chooser:
    """Insert ``actions`` right after every ``choose t`` in the tree."""
    actions = tuple(actions)
    if not actions:
        return chooser

    def fix(node: Do) -> Do:
        if Choose(t) not in node.actions:
            return node
        out: list[Action] = []
        for act in node.actions:
            out.append(act)
            if act == Choose(t):
                out.extend(actions)
        return Do(tuple(out), node.then)

    return Chooser(_map_do(chooser.root, fix), chooser.name)


def _excise(actions: tuple[Action, ...], surviving: frozenset[str] | set[str]) -> tuple[Action, ...]:
    return tuple(
        OutOfBoundsAction(f"type {a.type} excised")
        if isinstance(a, Choose) and a.type not in surviving
        else a
        for a in actions
    )


def mark_out_of_bounds(chooser: Chooser, surviving: Iterable[str]) -> Chooser:
    surviving = frozenset(surviving)
    root = _map_do(chooser.root, lambda n: Do(_excise(n.actions, surviving), n.then))
    return Chooser(root, chooser.name)


def prune_chooser_by_responses(
    chooser: Chooser, observed: Mapping[str, Iterable[str]], surviving: Iterable[str]
) -> Chooser:
    """Cut branches for answers never observed in training.

    An ask left with a single live branch is replaced by that branch, so the
    inquiry is no longer issued.
    """
    surviving = frozenset(surviving)
    seen = {k: set(v) for k, v in observed.items()}

    def prune(node: Node | None) -> Node | None:
        if node is None:
            return None
        if isinstance(node, Do):
            return Do(_excise(node.actions, surviving), prune(node.then))
        live: list[tuple[str, Node]] = []
        branches: list[tuple[str, Node]] = []
        for answer, child in node.branches:
            if answer in seen.get(node.query, ()):
                kept = prune(child)
                live.append((answer, kept))
                branches.append((answer, kept))
            else:
                reason = f"response {answer} to {node.query} not observed"
                branches.append((answer, Do((OutOfBoundsAction(reason),))))
        if len(live) == 1:
            return live[0][1]
        return Ask(node.query, node.args, tuple(branches))

    return Chooser(prune(chooser.root), chooser.name)


def count_asks(chooser: Chooser) -> int:
    n = 0
    stack: list[Node | None] = [chooser.root]
    while stack:
        node = stack.pop()
        if isinstance(node, Ask):
            n += 1
            stack.extend(c for _, c in node.branches)
        elif isinstance(node, Do):
            stack.append(node.then)
    return n
