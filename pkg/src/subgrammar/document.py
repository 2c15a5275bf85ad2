"""Reading and writing grammar documents, corpora, goal-type lists and
response logs.

A grammar document is UTF-8 JSON::

    {"formatVersion": 1, "root": "start", "wordType": "word",
     "types": [...],
     "systems": [{"name": ..., "entry": "t" | {"and": [...]} | {"or": [...]},
                  "outputs": [...], "chooser": "name" | null}, ...],
     "choosers": {"name": node, ...},
     "constraints": {"type": {"insert": {...}, "conflate": [...],
                              "order": [...], "lexify": {...}}},
     "lexicon": [{"id": ..., "spelling": ..., "wordClasses": [...],
                  "closedClass": bool}, ...]}

Chooser nodes are ``{"ask": q, "args": [...], "branches": {answer: node}}``
or ``{"do": [action, ...], "then": node}``; actions are single-key objects
``{"choose": t}``, ``{"identify": [function, concept]}``,
``{"copyhub": [f1, f2]}`` or ``{"outOfBounds": reason}``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, Mapping

from .chooser import Action, Ask, Choose, Chooser, CopyHub, Do, Identify, Node, OutOfBoundsAction
from .errors import ParseError, ValidationError
from .generator import LexicalItem, SemanticSpec
from .lattice import And, Atom, ConstraintSet, Entry, Or, System, TypeLattice, conjuncts, normalize_entry, validate_lattice

FORMAT_VERSION = 1


def _norm(name: str) -> str:
    return name.strip().lower()


def _position(text: str, needle: str, nth: int = 0) -> tuple[int | None, int | None]:
    idx = -1
    for _ in range(nth + 1):
        idx = text.find(needle, idx + 1)
        if idx < 0:
            return None, None
    line = text.count("\n", 0, idx) + 1
    col = idx - (text.rfind("\n", 0, idx) + 1) + 1
    return line, col


def _no_duplicate_keys(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ParseError(f"duplicate key {k!r}")
        out[k] = v
    return out


# entries


def entry_from_json(obj: Any) -> Entry:
    if isinstance(obj, str):
        return Atom(_norm(obj))
    if isinstance(obj, dict) and len(obj) == 1:
        (op, children), = obj.items()
        if op.lower() in ("and", "or") and isinstance(children, list) and children:
            nodes = tuple(entry_from_json(c) for c in children)
            return And(nodes) if op.lower() == "and" else Or(nodes)
    raise ParseError(f"malformed entry expression {obj!r}")


def entry_to_json(entry: Entry) -> Any:
    terms = conjuncts(entry)

    def term(t):
        return t[0] if len(t) == 1 else {"and": list(t)}

    if len(terms) == 1:
        return term(terms[0])
    return {"or": [term(t) for t in terms]}


# choosers


def action_from_json(obj: Any) -> Action:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ParseError(f"malformed chooser action {obj!r}")
    (kind, arg), = obj.items()
    if kind == "choose" and isinstance(arg, str):
        return Choose(_norm(arg))
    if kind == "identify" and isinstance(arg, list) and len(arg) == 2:
        return Identify(arg[0], arg[1])
    if kind == "copyhub" and isinstance(arg, list) and len(arg) == 2:
        return CopyHub(arg[0], arg[1])
    if kind == "outOfBounds" and isinstance(arg, str):
        return OutOfBoundsAction(arg)
    raise ParseError(f"malformed chooser action {obj!r}")


def action_to_json(act: Action) -> dict:
    if isinstance(act, Choose):
        return {"choose": act.type}
    if isinstance(act, Identify):
        return {"identify": [act.function, act.concept]}
    if isinstance(act, CopyHub):
        return {"copyhub": [act.first, act.second]}
    return {"outOfBounds": act.reason}


def node_from_json(obj: Any) -> Node:
    if isinstance(obj, dict) and "ask" in obj:
        branches = obj.get("branches")
        if not isinstance(branches, dict) or not branches:
            raise ParseError(f"ask {obj['ask']!r} needs a non-empty branches object")
        return Ask(
            obj["ask"],
            tuple(obj.get("args", [])),
            tuple((str(k), node_from_json(v)) for k, v in branches.items()),
        )
    if isinstance(obj, dict) and "do" in obj:
        then = obj.get("then")
        return Do(
            tuple(action_from_json(a) for a in obj["do"]),
            node_from_json(then) if then is not None else None,
        )
    raise ParseError(f"malformed chooser node {obj!r}")


def node_to_json(node: Node) -> dict:
    if isinstance(node, Ask):
        return {
            "ask": node.query,
            "args": list(node.args),
            "branches": {a: node_to_json(n) for a, n in node.branches},
        }
    out: dict = {"do": [action_to_json(a) for a in node.actions]}
    if node.then is not None:
        out["then"] = node_to_json(node.then)
    return out


# constraints


def constraints_from_json(obj: Mapping[str, Any]) -> ConstraintSet:
    unknown = set(obj) - {"insert", "conflate", "order", "lexify"}
    if unknown:
        raise ParseError(f"unknown constraint keys {sorted(unknown)}")
    insert = {k: [_norm(t) for t in v] for k, v in obj.get("insert", {}).items()}
    return ConstraintSet.build(
        insert=insert,
        conflate=[tuple(p) for p in obj.get("conflate", [])],
        order=[tuple(p) for p in obj.get("order", [])],
        lexify=obj.get("lexify", {}),
    )


def constraints_to_json(cs: ConstraintSet) -> dict:
    out: dict = {}
    if cs.insertions:
        out["insert"] = {k: sorted(cs.insertions[k]) for k in sorted(cs.insertions)}
    if cs.conflations:
        out["conflate"] = sorted(sorted(p) * (2 if len(p) == 1 else 1) for p in cs.conflations)
    if cs.orderings:
        out["order"] = sorted(list(p) for p in cs.orderings)
    if cs.lexifications:
        out["lexify"] = {k: cs.lexifications[k] for k in sorted(cs.lexifications)}
    return out


# lexicon


def item_from_json(obj: Mapping[str, Any]) -> LexicalItem:
    try:
        return LexicalItem(
            id=obj["id"],
            spelling=obj["spelling"],
            word_classes=tuple(_norm(c) for c in obj.get("wordClasses", [])),
            closed_class=bool(obj.get("closedClass", False)),
            spelling_before_vowel=obj.get("spellingBeforeVowel"),
        )
    except KeyError as exc:
        raise ParseError(f"lexical item missing {exc.args[0]!r}: {obj!r}") from None


def item_to_json(item: LexicalItem) -> dict:
    out: dict = {"id": item.id, "spelling": item.spelling}
    if item.spelling_before_vowel:
        out["spellingBeforeVowel"] = item.spelling_before_vowel
    out["wordClasses"] = list(item.word_classes)
    out["closedClass"] = item.closed_class
    return out


# whole documents


def grammar_from_json(doc: Mapping[str, Any], text: str = "") -> tuple[TypeLattice, dict[str, LexicalItem]]:
    if doc.get("formatVersion") != FORMAT_VERSION:
        raise ParseError(f"unsupported formatVersion {doc.get('formatVersion')!r}")
    root = _norm(doc.get("root", "start"))
    choosers_doc = doc.get("choosers", {})
    systems: dict[str, System] = {}
    counts: dict[str, int] = {}
    for raw in doc.get("systems", []):
        try:
            name = raw["name"]
            outputs = tuple(_norm(o) for o in raw["outputs"])
            entry = normalize_entry(entry_from_json(raw["entry"]))
        except KeyError as exc:
            raise ParseError(f"system missing {exc.args[0]!r}: {raw!r}") from None
        if name in systems:
            line, col = _position(text, f'"{name}"', counts.get(name, 0) + 1)
            raise ParseError(f"duplicate system name {name!r}", line, col)
        counts[name] = counts.get(name, 0) + 1
        chooser = None
        ref = raw.get("chooser")
        if ref is not None:
            if ref not in choosers_doc:
                line, col = _position(text, f'"{ref}"')
                raise ParseError(f"system {name!r} refers to unknown chooser {ref!r}", line, col)
            chooser = Chooser(node_from_json(choosers_doc[ref]), ref)
        systems[name] = System(name, entry, outputs, chooser)

    constraints = {}
    for t, obj in doc.get("constraints", {}).items():
        constraints[_norm(t)] = constraints_from_json(obj)

    word_type = doc.get("wordType")
    lattice = TypeLattice(
        systems,
        constraints,
        root,
        _norm(word_type) if word_type else None,
        extracted=bool(doc.get("extracted", False)),
    )
    if "types" in doc:
        declared = [_norm(t) for t in doc["types"]]
        if len(set(declared)) != len(declared):
            raise ParseError("types list repeats a type")
        missing = [t for t in lattice.types if t not in set(declared)]
        if missing:
            raise ParseError(f"types introduced by systems but not declared: {', '.join(missing)}")
        extra = [t for t in declared if t not in set(lattice.types)]
        if extra:
            line, col = _position(text, f'"{extra[0]}"')
            raise ParseError(f"declared types no system introduces: {', '.join(extra)}", line, col)

    lexicon: dict[str, LexicalItem] = {}
    for raw in doc.get("lexicon", []):
        item = item_from_json(raw)
        if item.id in lexicon:
            raise ParseError(f"duplicate lexical item {item.id!r}")
        lexicon[item.id] = item
    return lattice, lexicon


def loads_grammar(text: str, validate: bool = True) -> tuple[TypeLattice, dict[str, LexicalItem]]:
    try:
        doc = json.loads(text, object_pairs_hook=_no_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise ParseError("grammar document must be a JSON object", 1, 1)
    lattice, lexicon = grammar_from_json(doc, text)
    if validate:
        report = validate_lattice(lattice, lexicon.values())
        if report:
            raise ValidationError(report)
    return lattice, lexicon


def load_grammar(path: str | Path, validate: bool = True) -> tuple[TypeLattice, dict[str, LexicalItem]]:
    return loads_grammar(Path(path).read_text(encoding="utf-8"), validate)


def grammar_to_json(lattice: TypeLattice, lexicon: Mapping[str, LexicalItem] | None = None) -> dict:
    doc: dict = {"formatVersion": FORMAT_VERSION}
    if lattice.extracted:
        doc["extracted"] = True
    doc["root"] = lattice.root
    if lattice.word_type:
        doc["wordType"] = lattice.word_type
    doc["types"] = list(lattice.types)
    systems = []
    choosers: dict[str, dict] = {}
    for s in lattice.systems.values():
        ref = None
        if s.chooser is not None:
            ref = s.chooser.name or s.name
            choosers[ref] = node_to_json(s.chooser.root)
        systems.append(
            {"name": s.name, "entry": entry_to_json(s.entry), "outputs": list(s.outputs), "chooser": ref}
        )
    doc["systems"] = systems
    doc["choosers"] = choosers
    doc["constraints"] = {
        t: constraints_to_json(lattice.constraints[t])
        for t in lattice.types
        if t in lattice.constraints and lattice.constraints[t]
    }
    doc["lexicon"] = [item_to_json(i) for i in (lexicon or {}).values()]
    return doc


def dumps_grammar(lattice: TypeLattice, lexicon: Mapping[str, LexicalItem] | None = None) -> str:
    return json.dumps(grammar_to_json(lattice, lexicon), indent=2, ensure_ascii=False) + "\n"


def save_grammar(lattice: TypeLattice, lexicon: Mapping[str, LexicalItem] | None, path: str | Path) -> None:
    Path(path).write_text(dumps_grammar(lattice, lexicon), encoding="utf-8")


# corpora and side files


def loads_corpus(text: str) -> list[SemanticSpec]:
    specs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            specs.append(SemanticSpec.from_json(json.loads(line)))
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, lineno, exc.colno) from None
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed semantic spec: {exc}", lineno, 1) from None
    return specs


def read_corpus(path: str | Path) -> list[SemanticSpec]:
    return loads_corpus(Path(path).read_text(encoding="utf-8"))


def dumps_corpus(specs: Iterable[SemanticSpec]) -> str:
    return "".join(json.dumps(s.to_json(), ensure_ascii=False) + "\n" for s in specs)


def write_goal_types(types: Iterable[str], path: str | Path) -> None:
    Path(path).write_text("".join(t + "\n" for t in sorted(types)), encoding="utf-8")


def read_goal_types(path: str | Path) -> frozenset[str]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return frozenset(_norm(l) for l in lines if l.strip() and not l.lstrip().startswith("#"))


def write_responses(responses: Mapping[str, Iterable[str]], usage: Iterable[str], path: str | Path) -> None:
    doc = {
        "responses": {k: sorted(v) for k, v in sorted(responses.items())},
        "lexicalUsage": sorted(usage),
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def read_responses(path: str | Path) -> tuple[dict[str, frozenset[str]], frozenset[str]]:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    responses = {k: frozenset(v) for k, v in doc.get("responses", {}).items()}
    return responses, frozenset(doc.get("lexicalUsage", []))
