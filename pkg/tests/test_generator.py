import pytest

from subgrammar.chooser import Ask, Choose, Chooser, Do, Identify
from subgrammar.errors import BindingConflict, LexiconMiss, MissingAnswer, OrderCycle, OutOfBounds
from subgrammar.generator import GenContext, LexicalItem, SemanticSpec, generate_sentence, traverse
from subgrammar.lattice import ConstraintSet, System, TypeLattice
from subgrammar.notation import parse_systems


def moser_spec():
    """Hand-built attributive clause: "Mary Moser was an English painter."."""
    answers = [
        ("unit", ["s"], "clause"),
        ("command", ["s"], "no"),
        ("speechact", ["s"], "statement"),
        ("tense", ["p"], "past"),
        ("process-kind", ["p"], "being"),
        ("relation-kind", ["p"], "ascription"),
        ("setting", ["s"], "no"),
        ("unit", ["moser"], "nominal_group"),
        ("nominal-kind", ["moser"], "individual"),
        ("wh", ["moser"], "no"),
        ("unit", ["painter"], "nominal_group"),
        ("nominal-kind", ["painter"], "class"),
        ("wh", ["painter"], "no"),
        ("plurality", ["painter"], "one"),
        ("nationality-known", ["painter"], "yes"),
    ]
    return SemanticSpec.from_json(
        {
            "id": "moser",
            "root": "s",
            "concepts": {
                "s": {"process": "p", "agent": "moser", "attribute": "painter"},
                "p": {"lex": "was"},
                "moser": {"name": "Mary Moser"},
                "painter": {"lex": "painter", "nationality": "eng"},
                "eng": {"lex": "english"},
            },
            "answers": [list(a) for a in answers],
        }
    )


# hand simulation of the fixture on moser_spec:
#   clause: rank mood indic tense process relation circumstance -> 7 fired, 7 asked
#   Subject (individual name): rank ng_class ng_wh -> 3 fired, 3 asked
#   Attribute (class name): rank ng_class ng_wh number epithet -> 5 fired, 5 asked
MOSER_STEPS = 14 + 6 + 10
MOSER_TYPES = {
    "start", "clause", "indicative", "declarative", "past", "relational", "attributive",
    "unlocated", "nominal_group", "individual_name", "nonwh_nominal", "class_name",
    "singular", "classified", "proper_noun", "common_noun", "noun", "word", "determiner",
    "lexical_verb", "verb", "classifying", "adjective",
}


def test_moser_sentence(fixture_grammar):
    g, lex = fixture_grammar
    r = generate_sentence(g, lex, moser_spec())
    assert r.text == "Mary Moser was an English painter."
    assert r.steps == MOSER_STEPS
    assert r.fired == 15 and r.asked == 15
    assert r.used_types == MOSER_TYPES
    assert "interrogative" not in r.used_types
    assert r.lexical_usage == {"was", "painter", "english", "a"}
    assert r.inquiry_log["speechact"] == {"statement"}


def test_determinism(fixture_grammar):
    g, lex = fixture_grammar
    a = generate_sentence(g, lex, moser_spec())
    b = generate_sentence(g, lex, moser_spec())
    assert (a.text, a.used_types, a.steps, a.inquiry_log) == (b.text, b.used_types, b.steps, b.inquiry_log)


def test_coreference_shares_one_constituent(fixture_grammar, corpus):
    g, lex = fixture_grammar
    spec = next(s for s in corpus if s.id == "bio-02")
    r = generate_sentence(g, lex, spec)
    assert r.text == "Turner was born in Madrid in 1611."
    keys = list(r.structure.functions)
    assert "Actor/Subject/Theme" in keys
    assert r.structure.order.index("Actor/Subject/Theme") < r.structure.order.index("Process")


def test_marked_theme_ordering(fixture_grammar, corpus):
    g, lex = fixture_grammar
    r = generate_sentence(g, lex, next(s for s in corpus if s.id == "bio-03"))
    assert r.text == "In 1774 Constable worked in Amsterdam."
    assert "Theme/Time" in r.structure.functions


def test_existential_lexified_subject(fixture_grammar, corpus):
    g, lex = fixture_grammar
    r = generate_sentence(g, lex, next(s for s in corpus if s.id == "bio-06"))
    assert r.text.startswith("There was a")
    assert "there" in r.lexical_usage


def test_missing_answer(fixture_grammar):
    g, lex = fixture_grammar
    spec = moser_spec()
    del spec.answers[("tense", ("p",))]
    with pytest.raises(MissingAnswer):
        generate_sentence(g, lex, spec)


def test_missing_answer_reports_path(fixture_grammar):
    g, lex = fixture_grammar
    spec = moser_spec()
    del spec.answers[("plurality", ("painter",))]
    with pytest.raises(MissingAnswer) as info:
        generate_sentence(g, lex, spec)
    assert info.value.path == ("Attribute",)


def ng_fragment():
    systems = parse_systems(
        """
        rank: start = nominal_group | word.
        ngc: nominal_group = class_name | individual_name.
        ngw: nominal_group = wh_nominal | nonwh_nominal.
        num: (OR class_name wh_nominal) = singular | plural.
        w: word = noun | determiner.
        """
    )
    choosers = {
        "rank": Chooser(Do((Choose("nominal_group"),))),
        "ngc": Chooser(Ask("kind", ("self",), (("class", Do((Choose("class_name"),))), ("ind", Do((Choose("individual_name"),)))))),
        "ngw": Chooser(Do((Choose("nonwh_nominal"),))),
        "num": Chooser(Do((Choose("singular"),))),
    }
    systems = {s.name: System(s.name, s.entry, s.outputs, choosers.get(s.name)) for s in systems}
    cs = {
        "nominal_group": ConstraintSet.build(insert={"Thing": ["noun"]}),
        "class_name": ConstraintSet.build(insert={"Thing": [], "Deictic": []}),
    }
    return TypeLattice(systems, cs, word_type="word")


def test_number_fires_after_class_name():
    g = ng_fragment()
    spec = SemanticSpec("x", {"x": {"lex": "dog"}}, {("kind", ("x",)): "class"})
    ctx = traverse(g, spec, GenContext(g, spec, "x"))
    assert ctx.fired == ["rank", "ngc", "ngw", "num"]
    assert ctx.selected == {"start", "nominal_group", "class_name", "nonwh_nominal", "singular"}
    spec2 = SemanticSpec("x", {"x": {"name": "Rex"}}, {("kind", ("x",)): "ind"})
    ctx = traverse(g, spec2, GenContext(g, spec2, "x"))
    assert "num" not in ctx.fired


def test_only_rank_system():
    g = TypeLattice({"rank": System("rank", parse_systems("start = a | b.")[0].entry, ("a", "b"), Chooser(Do((Choose("b"),))))})
    spec = SemanticSpec("x", {"x": {}}, {})
    assert traverse(g, spec, GenContext(g, spec, "x")).selected == {"start", "b"}


def _word_lattice(cs, chooser_actions=()):
    systems = parse_systems("rank: start = clause | word.\nw: word = noun | verb.")
    rank = System("rank", systems[0].entry, systems[0].outputs, Chooser(Do((Choose("clause"), *chooser_actions))))
    return TypeLattice({"rank": rank, "w": systems[1]}, {"clause": cs}, word_type="word")


def test_order_cycle_through_conflation():
    cs = ConstraintSet.build(
        insert={"A": ["noun"], "B": ["noun"], "C": ["noun"]},
        conflate=[("A", "C")],
        order=[("A", "B"), ("B", "C")],
    )
    lex = {"x": LexicalItem("x", "x", ("noun",))}
    spec = SemanticSpec("s", {"s": {"lex": "x"}}, {})
    with pytest.raises(OrderCycle):
        generate_sentence(_word_lattice(cs), lex, spec)


def test_lexicon_miss():
    cs = ConstraintSet.build(insert={"A": ["noun"]}, lexify={"A": "ghost"})
    with pytest.raises(LexiconMiss):
        generate_sentence(_word_lattice(cs), {}, SemanticSpec("s", {"s": {}}, {}))


def test_literal_lexification_and_single_constituent():
    cs = ConstraintSet.build(insert={"A": ["verb"]}, lexify={"A": '"hello"'})
    r = generate_sentence(_word_lattice(cs), {}, SemanticSpec("s", {"s": {}}, {}))
    assert r.text == "Hello."
    assert list(r.structure.functions) == ["A"]


def test_binding_conflict():
    cs = ConstraintSet.build(insert={"A": [], "B": []}, conflate=[("A", "B")])
    actions = (Identify("A", "self"), Identify("B", "other"))
    spec = SemanticSpec("s", {"s": {"other": "o"}, "o": {}}, {})
    with pytest.raises(BindingConflict):
        generate_sentence(_word_lattice(cs, actions), {}, spec)


def test_spec_json_round_trip():
    spec = moser_spec()
    again = SemanticSpec.from_json(spec.to_json())
    assert again == spec


def test_out_of_domain_spec_against_subgrammar(fixture_grammar, extracted, ood_corpus):
    g, lex = fixture_grammar
    sub, _, sub_lex = extracted
    assert generate_sentence(g, lex, ood_corpus[0]).text == "Monet loved Giverny."
    with pytest.raises(OutOfBounds):
        generate_sentence(sub, sub_lex, ood_corpus[0])
