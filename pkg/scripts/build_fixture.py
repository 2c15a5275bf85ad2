"""Regenerate the bundled biography fixture.

Writes ``src/subgrammar/data/biography.grammar.json`` (systems written in the
compact notation below, plus constraints, choosers and a small lexicon),
``biographies.jsonl`` (50 semantic specs) and ``out_of_domain.jsonl``.

    python scripts/build_fixture.py
"""

from __future__ import annotations

import json
import random
from pathlib import Path

from subgrammar.document import FORMAT_VERSION, entry_to_json
from subgrammar.notation import parse_systems

DATA = Path(__file__).resolve().parents[1] / "src" / "subgrammar" / "data"

SYSTEMS = """
; ranks
rank: start = clause | nominal_group | prepositional_phrase | word.

; clause
mood: clause = indicative | imperative.
indic: indicative = declarative | interrogative.
tense: indicative = past | present.
process: clause = relational | material | existential | mental.
relation: relational = attributive | identifying.
circumstance: clause = located | unlocated.
theme: (AND declarative located) = unmarked_theme | marked_theme.

; nominal group
ng_class: nominal_group = class_name | individual_name.
ng_wh: nominal_group = wh_nominal | nonwh_nominal.
number: (OR class_name wh_nominal) = singular | plural.
epithet: class_name = classified | unclassified.

; prepositional phrase
pp: prepositional_phrase = spatial | temporal.

; word classes
word_class: word = noun | verb | determiner | preposition | adjective.
noun_class: noun = common_noun | proper_noun.
adjective_class: adjective = classifying | qualitative.
verb_class: verb = lexical_verb | auxiliary.
"""


def ask(query, args, **branches):
    return {"ask": query, "args": list(args), "branches": branches}


def do(*actions, then=None):
    node = {"do": list(actions)}
    if then is not None:
        node["then"] = then
    return node


def choose(t):
    return {"choose": t}


def identify(function, concept):
    return {"identify": [function, concept]}


def copyhub(a, b):
    return {"copyhub": [a, b]}


CHOOSERS = {
    "rank": ask(
        "unit", ["self"],
        clause=do(choose("clause")),
        nominal_group=do(choose("nominal_group")),
        prepositional_phrase=do(choose("prepositional_phrase")),
        word=do(choose("word")),
    ),
    "mood": ask(
        "command", ["self"],
        no=do(choose("indicative"), identify("Process", "process")),
        yes=do(choose("imperative"), identify("Process", "process")),
    ),
    "indic": ask(
        "speechact", ["self"],
        statement=do(choose("declarative"), identify("Subject", "agent")),
        question=do(choose("interrogative"), identify("Subject", "agent")),
    ),
    "tense": ask("tense", ["Process"], past=do(choose("past")), present=do(choose("present"))),
    "process": ask(
        "process-kind", ["Process"],
        being=do(choose("relational")),
        doing=do(choose("material"), copyhub("Actor", "Subject")),
        existing=do(choose("existential"), identify("Existent", "agent")),
        sensing=do(choose("mental"), identify("Phenomenon", "phenomenon")),
    ),
    "relation": ask(
        "relation-kind", ["Process"],
        ascription=do(choose("attributive"), identify("Attribute", "attribute")),
        equation=do(choose("identifying"), identify("Identifier", "attribute")),
    ),
    "circumstance": ask(
        "setting", ["self"],
        yes=do(choose("located"), identify("Location", "place"), identify("Time", "time")),
        no=do(choose("unlocated")),
    ),
    "theme": ask(
        "time-focus", ["self"],
        no=do(choose("unmarked_theme")),
        yes=do(choose("marked_theme")),
    ),
    "ng_class": ask(
        "nominal-kind", ["self"],
        **{
            "class": do(choose("class_name"), identify("Thing", "self")),
            "individual": do(choose("individual_name"), identify("Thing", "self")),
        },
    ),
    "ng_wh": ask("wh", ["self"], no=do(choose("nonwh_nominal")), yes=do(choose("wh_nominal"))),
    "number": ask("plurality", ["Thing"], one=do(choose("singular")), many=do(choose("plural"))),
    "epithet": ask(
        "nationality-known", ["Thing"],
        yes=do(choose("classified"), identify("Classifier", "nationality")),
        no=do(choose("unclassified")),
    ),
    "pp": ask(
        "pp-kind", ["self"],
        place=do(choose("spatial"), identify("Minorprocess", "self"), identify("Range", "range")),
        time=do(choose("temporal"), identify("Minorprocess", "self"), identify("Range", "range")),
    ),
}

CONSTRAINTS = {
    "clause": {"insert": {"Process": ["lexical_verb"]}},
    "indicative": {"insert": {"Subject": []}},
    "declarative": {"order": [["Subject", "Process"]]},
    "interrogative": {"order": [["Process", "Subject"]]},
    "attributive": {
        "insert": {"Carrier": ["nominal_group"], "Attribute": ["nominal_group"]},
        "conflate": [["Carrier", "Subject"]],
        "order": [["Process", "Attribute"]],
    },
    "identifying": {
        "insert": {"Identified": ["nominal_group"], "Identifier": ["nominal_group"]},
        "conflate": [["Identified", "Subject"]],
        "order": [["Process", "Identifier"]],
    },
    "material": {"insert": {"Actor": ["nominal_group"]}, "conflate": [["Actor", "Subject"]]},
    "existential": {
        "insert": {"Subject": [], "Existent": ["nominal_group"]},
        "lexify": {"Subject": "there"},
        "order": [["Process", "Existent"]],
    },
    "mental": {
        "insert": {"Senser": ["nominal_group"], "Phenomenon": ["nominal_group"]},
        "conflate": [["Senser", "Subject"]],
        "order": [["Process", "Phenomenon"]],
    },
    "located": {
        "insert": {"Location": ["prepositional_phrase"], "Time": ["prepositional_phrase"]},
        "order": [["Process", "Location"]],
    },
    "unmarked_theme": {
        "insert": {"Theme": []},
        "conflate": [["Theme", "Subject"]],
        "order": [["Location", "Time"]],
    },
    "marked_theme": {
        "insert": {"Theme": []},
        "conflate": [["Theme", "Time"]],
        "order": [["Time", "Subject"]],
    },
    "nominal_group": {"insert": {"Thing": ["noun"]}},
    "class_name": {"insert": {"Thing": ["common_noun"], "Deictic": []}},
    "individual_name": {"insert": {"Thing": ["proper_noun"]}},
    "singular": {
        "insert": {"Deictic": ["determiner"]},
        "lexify": {"Deictic": "a"},
        "order": [["Deictic", "Thing"]],
    },
    "plural": {"order": [["Deictic", "Thing"]]},
    "classified": {
        "insert": {"Classifier": ["classifying"], "Deictic": []},
        "order": [["Classifier", "Thing"], ["Deictic", "Classifier"]],
    },
    "wh_nominal": {"insert": {"Wh": []}, "order": [["Wh", "Thing"]]},
    "prepositional_phrase": {
        "insert": {"Minorprocess": ["preposition"], "Range": ["nominal_group"]},
        "order": [["Minorprocess", "Range"]],
    },
}


def _close_insertions(cs: dict) -> dict:
    # every function mentioned by a constraint must be inserted, if only as top
    cs = {k: v for k, v in cs.items()}
    insert = dict(cs.get("insert", {}))
    mentioned = [x for pair in cs.get("conflate", []) + cs.get("order", []) for x in pair]
    mentioned += list(cs.get("lexify", {}))
    for label in mentioned:
        insert.setdefault(label, [])
    cs["insert"] = insert
    return {k: cs[k] for k in ("insert", "conflate", "order", "lexify") if k in cs}


CONSTRAINTS = {t: _close_insertions(cs) for t, cs in CONSTRAINTS.items()}


def item(id, spelling=None, classes=(), closed=False, before_vowel=None):
    out = {"id": id, "spelling": spelling or id}
    if before_vowel:
        out["spellingBeforeVowel"] = before_vowel
    out["wordClasses"] = list(classes)
    out["closedClass"] = closed
    return out


NOUNS = ["painter", "sculptor", "architect", "engraver", "illustrator", "etcher"]
NATIONALITIES = {
    "french": "French",
    "english": "English",
    "dutch": "Dutch",
    "italian": "Italian",
    "spanish": "Spanish",
    "american": "American",
}
VERBS = {"studied": "studied", "died": "died", "settled": "settled", "born": "was born", "worked": "worked"}

LEXICON = (
    [
        item("a", "a", ["determiner"], True, "an"),
        item("the", "the", ["determiner"], True),
        item("there", "there", ["noun"], True),
        item("in", "in", ["preposition"], True),
        item("at", "at", ["preposition"], True),
        item("on", "on", ["preposition"], True),
        item("was", "was", ["lexical_verb", "auxiliary"], True),
        item("is", "is", ["lexical_verb", "auxiliary"], True),
        item("were", "were", ["lexical_verb", "auxiliary"], True),
        item("he", "he", ["noun"], True),
        item("she", "she", ["noun"], True),
        item("it", "it", ["noun"], True),
        item("which", "which", ["noun", "determiner"], True),
        item("who", "who", ["noun"], True),
    ]
    + [item(n, n, ["common_noun"]) for n in NOUNS + ["portrait", "garden"]]
    + [item(k, v, ["classifying"]) for k, v in NATIONALITIES.items()]
    + [item("beautiful", "beautiful", ["qualitative"]), item("famous", "famous", ["qualitative"])]
    + [item(k, v, ["lexical_verb"]) for k, v in VERBS.items()]
    + [item("loved", "loved", ["lexical_verb"])]
)

ARTISTS = [
    "Monet", "Renoir", "Turner", "Constable", "Rembrandt", "Vermeer", "Goya", "Velazquez",
    "Whistler", "Sargent", "Cassatt", "Degas", "Manet", "Pissarro", "Sisley", "Morisot",
    "Hals", "Titian", "Canaletto", "Hopper",
]
PLACES = ["Paris", "London", "Madrid", "Rome", "Amsterdam", "Venice", "Delft", "Giverny", "Boston"]


class SpecBuilder:
    def __init__(self, sid):
        self.id = sid
        self.concepts = {}
        self.answers = []
        self.n = 0

    def fresh(self, stem):
        self.n += 1
        return f"{stem}{self.n}"

    def ans(self, query, args, answer):
        self.answers.append([query, list(args), answer])

    def name(self, text):
        c = self.fresh("n")
        self.concepts[c] = {"name": text}
        self.ans("unit", [c], "nominal_group")
        self.ans("nominal-kind", [c], "individual")
        self.ans("wh", [c], "no")
        return c

    def kind(self, noun, nationality=None):
        c = self.fresh("k")
        self.concepts[c] = {"lex": noun}
        self.ans("unit", [c], "nominal_group")
        self.ans("nominal-kind", [c], "class")
        self.ans("wh", [c], "no")
        self.ans("plurality", [c], "one")
        if nationality:
            nat = self.fresh("q")
            self.concepts[nat] = {"lex": nationality}
            self.concepts[c]["nationality"] = nat
            self.ans("nationality-known", [c], "yes")
        else:
            self.ans("nationality-known", [c], "no")
        return c

    def pp(self, prep, range_concept, kind):
        c = self.fresh("r")
        self.concepts[c] = {"lex": prep, "range": range_concept}
        self.ans("unit", [c], "prepositional_phrase")
        self.ans("pp-kind", [c], kind)
        return c

    def clause(self, verb, kind, agent, tense="past", attribute=None, place=None, year=None, marked=False):
        s = self.fresh("s")
        p = self.fresh("p")
        self.concepts[p] = {"lex": verb}
        self.concepts[s] = {"process": p, "agent": agent}
        self.ans("unit", [s], "clause")
        self.ans("command", [s], "no")
        self.ans("speechact", [s], "statement")
        self.ans("tense", [p], tense)
        self.ans("process-kind", [p], kind)
        if attribute is not None:
            self.concepts[s]["attribute"] = attribute
            self.ans("relation-kind", [p], "ascription")
        if place is not None:
            self.concepts[s]["place"] = self.pp("in", self.name(place), "place")
            self.concepts[s]["time"] = self.pp("in", self.name(str(year)), "time")
            self.ans("setting", [s], "yes")
            self.ans("time-focus", [s], "yes" if marked else "no")
        else:
            self.ans("setting", [s], "no")
        return s

    def done(self, root):
        return {"id": self.id, "root": root, "concepts": self.concepts, "answers": self.answers}


def biography(rng: random.Random, index: int) -> dict:
    b = SpecBuilder(f"bio-{index:02d}")
    artist = ARTISTS[index % len(ARTISTS)]
    noun = rng.choice(NOUNS)
    nat = rng.choice(list(NATIONALITIES))
    place = rng.choice(PLACES)
    year = rng.randint(1600, 1900)
    form = index % 10
    if form in (0, 5):
        # "Monet was a French painter."
        root = b.clause("was", "being", b.name(artist), attribute=b.kind(noun, nat))
    elif form == 1:
        # "Monet was a painter."
        root = b.clause("was", "being", b.name(artist), attribute=b.kind(noun))
    elif form in (2, 7):
        # "Monet was born in Paris in 1840."
        root = b.clause("born", "doing", b.name(artist), place=place, year=year)
    elif form in (3, 8):
        # "In 1871 Monet settled in London."
        verb = rng.choice(["settled", "studied", "worked", "died"])
        root = b.clause(verb, "doing", b.name(artist), place=place, year=year, marked=True)
    elif form == 4:
        # "Monet died."
        root = b.clause("died", "doing", b.name(artist))
    elif form == 6:
        # "There was a Dutch etcher in Delft in 1650."
        root = b.clause("was", "existing", b.kind(noun, nat), place=place, year=year)
    else:
        # "Monet is an English painter."
        root = b.clause("is", "being", b.name(artist), tense="present", attribute=b.kind(noun, nat))
    return b.done(root)


def out_of_domain() -> dict:
    b = SpecBuilder("ood-01")
    s = b.clause("loved", "sensing", b.name("Monet"))
    b.concepts[s]["phenomenon"] = b.name("Giverny")
    return b.done(s)


def grammar_document() -> dict:
    systems = parse_systems(SYSTEMS)
    types = ["start"] + [t for s in systems for t in s.outputs]
    return {
        "formatVersion": FORMAT_VERSION,
        "root": "start",
        "wordType": "word",
        "types": types,
        "systems": [
            {
                "name": s.name,
                "entry": entry_to_json(s.entry),
                "outputs": list(s.outputs),
                "chooser": s.name if s.name in CHOOSERS else None,
            }
            for s in systems
        ],
        "choosers": CHOOSERS,
        "constraints": {t: CONSTRAINTS[t] for t in types if t in CONSTRAINTS},
        "lexicon": LEXICON,
    }


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    doc = grammar_document()
    (DATA / "biography.grammar.json").write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    rng = random.Random(1994)
    specs = [biography(rng, i) for i in range(1, 51)]
    with open(DATA / "biographies.jsonl", "w", encoding="utf-8") as fh:
        for spec in specs:
            fh.write(json.dumps(spec) + "\n")
    with open(DATA / "out_of_domain.jsonl", "w", encoding="utf-8") as fh:
        fh.write(json.dumps(out_of_domain()) + "\n")


if __name__ == "__main__":
    main()
