import pytest

from subgrammar.chooser import (
    Ask,
    Choose,
    Chooser,
    CopyHub,
    Do,
    Identify,
    OutOfBoundsAction,
    actions_toward,
    attach_to_choice,
    count_asks,
    evaluate_chooser,
    extend_chooser,
    iter_paths,
    mark_out_of_bounds,
    prune_chooser_by_responses,
)
from subgrammar.errors import ChoosePercolated, MissingAnswer, NoBranch, NoChoice, OutOfBounds


class Table:
    def __init__(self, answers):
        self.answers = answers
        self.asked = []

    def answer(self, inquiry, args):
        self.asked.append((inquiry, args))
        try:
            return self.answers[inquiry]
        except KeyError:
            raise MissingAnswer(inquiry, args) from None


class Ctx:
    def __init__(self):
        self.bound = {}
        self.applied = []

    def resolve(self, label):
        return self.bound.get(label, label.lower())

    def apply(self, action):
        self.applied.append(action)
        if isinstance(action, Identify):
            self.bound[action.function] = action.concept


def speechact():
    return Chooser(
        Ask(
            "speechact",
            ("self",),
            (
                ("statement", Do((Choose("declarative"), Identify("Subject", "agent")))),
                ("question", Do((Choose("interrogative"), Identify("Subject", "agent")))),
            ),
        ),
        "indic",
    )


def test_single_leaf():
    out = evaluate_chooser(Chooser(Do((Choose("declarative"),))), Table({}), Ctx())
    assert out.chosen == "declarative"
    assert out.trace == ()


def test_fixture_chooser_statement(fixture_grammar):
    g, _ = fixture_grammar
    out = evaluate_chooser(g.systems["indic"].chooser, Table({"speechact": "statement"}), Ctx())
    assert out.chosen == "declarative"
    assert out.actions == (Choose("declarative"), Identify("Subject", "agent"))
    assert len(out.trace) == 1


def test_errors():
    with pytest.raises(MissingAnswer):
        evaluate_chooser(speechact(), Table({}), Ctx())
    with pytest.raises(NoBranch):
        evaluate_chooser(speechact(), Table({"speechact": "command"}), Ctx())
    with pytest.raises(NoChoice):
        evaluate_chooser(Chooser(Do((Identify("A", "b"),))), Table({}), Ctx())


def test_out_of_bounds_after_marking():
    marked = mark_out_of_bounds(speechact(), {"declarative"})
    assert evaluate_chooser(marked, Table({"speechact": "statement"}), Ctx()).chosen == "declarative"
    with pytest.raises(OutOfBounds) as info:
        evaluate_chooser(marked, Table({"speechact": "question"}), Ctx(), "indic")
    assert "interrogative" in info.value.reason
    assert info.value.system == "indic"


def test_first_choose_wins_and_bindings_visible():
    c = Chooser(
        Do(
            (Identify("Thing", "k1"),),
            Ask("plurality", ("Thing",), (("one", Do((Choose("singular"), Choose("plural")))),)),
        )
    )
    table = Table({"plurality": "one"})
    out = evaluate_chooser(c, table, Ctx())
    assert out.chosen == "singular"
    assert table.asked == [("plurality", ("k1",))]


def test_each_inquiry_asked_once_per_node():
    c = Chooser(Ask("a", (), (("x", Ask("b", (), (("y", Do((Choose("t"),))),))),)))
    table = Table({"a": "x", "b": "y"})
    out = evaluate_chooser(c, table, Ctx())
    assert len(out.trace) == len(table.asked) == 2


def test_extend_chooser():
    base = speechact()
    assert extend_chooser(base, []) is base
    ext = extend_chooser(base, [Identify("Process", "process")])
    for answer in ("statement", "question"):
        a = evaluate_chooser(base, Table({"speechact": answer}), Ctx())
        ctx = Ctx()
        b = evaluate_chooser(ext, Table({"speechact": answer}), ctx)
        assert a.chosen == b.chosen
        assert b.actions[0] == Identify("Process", "process")
        assert b.actions[1:] == a.actions
        assert ctx.applied[0] == Identify("Process", "process")
    with pytest.raises(ChoosePercolated):
        extend_chooser(base, [Choose("x")])


def test_actions_toward():
    assert actions_toward(speechact(), "declarative") == (Identify("Subject", "agent"),)
    assert actions_toward(None, "x") == ()
    split = Chooser(
        Ask(
            "q",
            (),
            (
                ("a", Do((Choose("t"), Identify("X", "one")))),
                ("b", Do((Choose("t"), Identify("X", "two")))),
            ),
        )
    )
    assert actions_toward(split, "t") is None


def test_attach_to_choice():
    c = Chooser(Ask("unit", (), (("c", Do((Choose("clause"),))), ("n", Do((Choose("ng"),))))))
    out = attach_to_choice(c, "clause", [CopyHub("A", "B")])
    paths = dict((asked[0][1], acts) for asked, acts in iter_paths(out))
    assert paths["c"] == (Choose("clause"), CopyHub("A", "B"))
    assert paths["n"] == (Choose("ng"),)


def test_mark_out_of_bounds_examples():
    c = speechact()
    assert mark_out_of_bounds(c, {"declarative", "interrogative"}) == c
    marked = mark_out_of_bounds(c, {"declarative"})
    assert count_asks(marked) == 1
    leaves = [acts for _, acts in iter_paths(marked)]
    assert leaves[1][0] == OutOfBoundsAction("type interrogative excised")
    for _, acts in iter_paths(mark_out_of_bounds(c, set())):
        assert isinstance(acts[0], OutOfBoundsAction)


def test_prune_by_responses():
    c = speechact()
    pruned = prune_chooser_by_responses(c, {"speechact": {"statement"}}, {"declarative", "interrogative"})
    assert pruned.root == Do((Choose("declarative"), Identify("Subject", "agent")))
    full = prune_chooser_by_responses(c, {"speechact": {"statement", "question"}}, {"declarative", "interrogative"})
    assert full == c
    cut = prune_chooser_by_responses(c, {"speechact": {"statement", "question"}}, {"declarative"})
    with pytest.raises(OutOfBounds):
        evaluate_chooser(cut, Table({"speechact": "question"}), Ctx())


def test_prune_keeps_unobserved_as_out_of_bounds():
    c = Chooser(
        Ask("k", (), (("a", Do((Choose("x"),))), ("b", Do((Choose("y"),))), ("c", Do((Choose("z"),)))))
    )
    pruned = prune_chooser_by_responses(c, {"k": {"a", "b"}}, {"x", "y", "z"})
    assert count_asks(pruned) == 1
    with pytest.raises(OutOfBounds):
        evaluate_chooser(pruned, Table({"k": "c"}), Ctx())
    assert evaluate_chooser(pruned, Table({"k": "b"}), Ctx()).chosen == "y"
