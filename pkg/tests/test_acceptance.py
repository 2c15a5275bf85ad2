"""Acceptance suite: nine criteria, each reported as one PASS/FAIL line in
the terminal summary (``pytest tests/test_acceptance.py``)."""

import functools
import random
import time

import pytest

from conftest import ACCEPTANCE_RESULTS
from oracle import maximal_selections
from subgrammar.cli import main
from subgrammar.document import dumps_corpus, dumps_grammar
from subgrammar.errors import OutOfBounds, UnificationFailure
from subgrammar.extractor import extract_subgrammar, verify_consistency
from subgrammar.generator import generate_sentence
from subgrammar.lattice import (
    And,
    Atom,
    ConstraintSet,
    Or,
    conjuncts,
    entry_atoms,
    entry_satisfied,
    normalize_entry,
    remove_unsatisfiable,
    unify_constraints,
)
from subgrammar.telemetry import collect_goal_types, growth_curve_csv, read_growth_curve
from subgrammar import fixture_path

# measured once on the bundled fixture and frozen
FULL_STEPS = 1710
SUB_STEPS = 1180


def criterion(number, title):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs)
            except BaseException:
                ACCEPTANCE_RESULTS[number] = (title, False, "")
                raise
            ACCEPTANCE_RESULTS[number] = (title, True, detail or "")

        return run

    return wrap


def _step_sums(report):
    return sum(v.full_steps for v in report.verdicts), sum(v.sub_steps for v in report.verdicts)


@criterion(1, "identity extraction")
def test_identity_extraction(fixture_grammar, corpus):
    g, lex = fixture_grammar
    t0 = time.perf_counter()
    sub, report = extract_subgrammar(g, g.types)
    result = verify_consistency(g, sub, corpus, lex)
    elapsed = time.perf_counter() - t0
    assert report.excised_types == {}
    assert list(sub.systems) == list(g.systems)
    assert result.count("equal") == len(corpus) == 50
    assert result.all_equal
    full, subs = _step_sums(result)
    assert subs == full and result.step_ratio == 1.0
    assert elapsed < 5.0
    return f"ratio 1.0, {elapsed:.2f}s"


@criterion(2, "equivalence under restriction")
def test_restriction(fixture_grammar, corpus, training, extracted):
    g, lex = fixture_grammar
    sub, report, sub_lex = extracted
    goal = training.goal.types
    assert set(sub.types) < goal
    assert "indicative" in report.excised_types
    result = verify_consistency(g, sub, corpus, lex, sub_lex)
    assert result.count("equal") == 50 and result.all_equal
    full, subs = _step_sums(result)
    assert (full, subs) == (FULL_STEPS, SUB_STEPS)
    assert result.step_ratio == SUB_STEPS / FULL_STEPS < 1.0
    return f"{len(g.types)} -> goal {len(goal)} -> sub {len(sub.types)}, ratio {subs}/{full} = {result.step_ratio:.4f}"


@criterion(3, "selection-set oracle")
def test_selection_sets(fixture_grammar, training, extracted):
    g, _ = fixture_grammar
    sub, report, _ = extracted
    assert len(g.types) <= 42
    t0 = time.perf_counter()
    full_sel = maximal_selections(g, training.goal.types)
    sub_sel = maximal_selections(sub)
    pseudo = set(report.excised_types)
    projected = {frozenset(s - pseudo) for s in full_sel}
    elapsed = time.perf_counter() - t0
    assert projected == sub_sel
    assert len({frozenset(s) for s in full_sel}) == len(projected)
    assert elapsed < 10.0
    return f"{len(sub_sel)} maximal selections, {elapsed:.3f}s"


@criterion(4, "idempotence")
def test_idempotence(extracted):
    sub, _, sub_lex = extracted
    again, report = extract_subgrammar(sub, sub.types)
    assert report.excised_types == {}
    assert dumps_grammar(again, sub_lex) == dumps_grammar(sub, sub_lex)


# -- DNF semantics

def _random_expr(rng, atoms, leaves):
    if leaves == 1:
        return Atom(rng.choice(atoms))
    k = rng.randint(1, min(3, leaves))
    sizes = [1] * k
    for _ in range(leaves - k):
        sizes[rng.randrange(k)] += 1
    children = tuple(_random_expr(rng, atoms, n) for n in sizes)
    return (And if rng.random() < 0.5 else Or)(children)


def _columns(atoms):
    """Bit-parallel truth table: bit i of column j is atom j's value in row i."""
    n = len(atoms)
    rows = 1 << n
    cols = {}
    for j, a in enumerate(atoms):
        mask = 0
        for i in range(rows):
            if i >> j & 1:
                mask |= 1 << i
        cols[a] = mask
    return cols, (1 << rows) - 1


def _table(expr, cols, full):
    if isinstance(expr, Atom):
        return cols[expr.name]
    vals = [_table(c, cols, full) for c in expr.children]
    if isinstance(expr, And):
        out = full
        for v in vals:
            out &= v
        return out
    out = 0
    for v in vals:
        out |= v
    return out


def _dnf_table(terms, cols, full):
    out = 0
    for term in terms:
        row = full
        for a in term:
            row &= cols[a]
        out |= row
    return out


@criterion(5, "DNF semantics")
def test_dnf_semantics():
    rng = random.Random(20240501)
    pool = [f"t{i}" for i in range(12)]
    checked = 0
    for _ in range(1000):
        atoms = rng.sample(pool, rng.randint(1, 12))
        expr = _random_expr(rng, atoms, rng.randint(1, 12))
        used = sorted(entry_atoms(normalize_entry(expr)) or atoms)
        used = sorted(set(used) | {a.name for a in _leaves(expr)})
        cols, full = _columns(used)
        norm = normalize_entry(expr)
        assert _dnf_table(conjuncts(norm), cols, full) == _table(expr, cols, full)
        assert normalize_entry(norm) == norm

        goal = set(rng.sample(used, rng.randint(0, len(used))))
        # satisfying subsets of goal: rows where every non-goal atom is false
        restricted = {a: (c if a in goal else 0) for a, c in cols.items()}
        expected = _table(expr, restricted, full)
        got = _dnf_table(conjuncts(remove_unsatisfiable(norm, goal)), restricted, full)
        assert got == expected
        for atom_set in _sample_subsets(rng, sorted(goal), 4):
            assert entry_satisfied(remove_unsatisfiable(norm, goal), atom_set) == _eval(expr, atom_set)
        checked += 1
    return f"{checked} expressions"


def _leaves(expr):
    if isinstance(expr, Atom):
        return [expr]
    return [leaf for c in expr.children for leaf in _leaves(c)]


def _eval(expr, true):
    if isinstance(expr, Atom):
        return expr.name in true
    vals = [_eval(c, true) for c in expr.children]
    return all(vals) if isinstance(expr, And) else any(vals)


def _sample_subsets(rng, items, n):
    return [{a for a in items if rng.random() < 0.5} for _ in range(n)]


# -- unification algebra

SYSTEMS = {"s1": ["a1", "a2", "a3"], "s2": ["b1", "b2"], "s3": ["c1", "c2", "c3"]}
OWNER = {t: s for s, ts in SYSTEMS.items() for t in ts}
LABELS = ["Subject", "Thing", "Deictic", "Process", "Theme"]


def _random_cs(rng, conflict_free):
    insert = {}
    for label in rng.sample(LABELS, rng.randint(0, 3)):
        fill = []
        for s, ts in SYSTEMS.items():
            if rng.random() < 0.4:
                fill.append(ts[0] if conflict_free else rng.choice(ts))
        insert[label] = fill
    labels = list(insert)
    conflate = [tuple(rng.sample(labels, 2)) for _ in range(rng.randint(0, 2))] if len(labels) > 1 else []
    order = [tuple(rng.sample(labels, 2)) for _ in range(rng.randint(0, 2))] if len(labels) > 1 else []
    lexify = {}
    if labels and rng.random() < 0.3:
        lexify[rng.choice(labels)] = "a" if conflict_free else rng.choice(["a", "the"])
    return ConstraintSet.build(insert, conflate, order, lexify)


def _try(a, b):
    try:
        return unify_constraints(a, b, OWNER)
    except UnificationFailure:
        return "fail"


@criterion(6, "constraint-unification algebra")
def test_unification_algebra():
    rng = random.Random(77)
    empty = ConstraintSet()
    successes = 0
    for i in range(1000):
        free = i % 2 == 0
        a, b, c = (_random_cs(rng, free) for _ in range(3))
        assert unify_constraints(a, empty, OWNER) == a == unify_constraints(empty, a, OWNER)
        ab, ba = _try(a, b), _try(b, a)
        assert ab == ba
        left = "fail" if ab == "fail" else _try(ab, c)
        bc = _try(b, c)
        right = "fail" if bc == "fail" else _try(a, bc)
        assert left == right
        successes += left != "fail"
    assert successes >= 500

    conflicts = 0
    for s, ts in SYSTEMS.items():
        for x in ts:
            for y in ts:
                if x == y:
                    continue
                for label in LABELS:
                    a = ConstraintSet.build({label: [x]})
                    b = ConstraintSet.build({label: [y]})
                    with pytest.raises(UnificationFailure):
                        unify_constraints(a, b, OWNER)
                    conflicts += 1
    for label in LABELS:
        a = ConstraintSet.build({label: []}, lexify={label: "a"})
        b = ConstraintSet.build({label: []}, lexify={label: "the"})
        with pytest.raises(UnificationFailure):
            unify_constraints(a, b, OWNER)
        conflicts += 1
    return f"{successes} consistent triples, {conflicts} conflicting pairs rejected"


@criterion(7, "growth-curve properties")
def test_growth_curve(fixture_grammar, corpus, training, tmp_path):
    g, lex = fixture_grammar
    counts = [n for _, n in training.series.points]
    assert all(x <= y for x, y in zip(counts, counts[1:]))
    assert counts[-1] <= len(g.types)
    doubled = collect_goal_types(g, lex, corpus + corpus)
    assert doubled.series.final() == training.series.final()
    assert doubled.goal.types == training.goal.types
    path = tmp_path / "curve.csv"
    path.write_text(growth_curve_csv(training.series))
    again = read_growth_curve(path.read_text())
    assert again == training.series
    reread = [n for _, n in again.points]
    assert all(x <= y for x, y in zip(reread, reread[1:]))
    return f"final {counts[-1]} types, flat after sentence {training.series.plateau()}"


@criterion(8, "chooser pruning safety")
def test_pruning_safety(fixture_grammar, corpus, ood_corpus, training, extracted, tmp_path, capsys):
    g, lex = fixture_grammar
    sub, _, sub_lex = extracted
    pruned, _ = extract_subgrammar(g, training.goal, training.responses)
    for spec in corpus:
        a = generate_sentence(sub, sub_lex, spec)
        b = generate_sentence(pruned, sub_lex, spec)
        assert a.text == b.text
        assert a.used_types == b.used_types
        assert b.steps <= a.steps
    for grammar in (sub, pruned):
        with pytest.raises(OutOfBounds):
            generate_sentence(grammar, sub_lex, ood_corpus[0])

    from subgrammar.document import save_grammar

    sub_path = tmp_path / "pruned.json"
    save_grammar(pruned, sub_lex, sub_path)
    specs = tmp_path / "mixed.jsonl"
    specs.write_text(dumps_corpus(corpus + ood_corpus))
    full_path = str(fixture_path("biography.grammar.json"))
    code = main(["generate", "-G", str(sub_path), "-s", str(specs), "--fallback", full_path])
    lines = capsys.readouterr().out.splitlines()
    assert code == 0
    assert len(lines) == len(corpus) + 1
    marked = [line for line in lines if line.startswith("[fallback] ")]
    assert marked == ["[fallback] " + generate_sentence(g, lex, ood_corpus[0]).text]
    return "50 specs unchanged, 1 out-of-domain spec regenerated"


@criterion(9, "sublexicon rule")
def test_sublexicon(fixture_grammar, training, extracted):
    g, lex = fixture_grammar
    sub, report, sub_lex = extracted
    sub_types = set(sub.types)
    for item_id, item in lex.items():
        if item.closed_class:
            assert (item_id in sub_lex) == (item_id in training.usage), item_id
        else:
            classes = {report.excised_types.get(c, c) for c in item.word_classes}
            assert (item_id in sub_lex) == bool(classes & sub_types), item_id
    for item_id, item in sub_lex.items():
        if not item.closed_class:
            assert set(item.word_classes) & sub_types, item_id
    removed = sorted(set(lex) - set(sub_lex))
    return f"{len(lex)} items, {len(removed)} removed"
