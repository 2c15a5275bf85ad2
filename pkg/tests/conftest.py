import pytest

from subgrammar import (
    collect_goal_types,
    extract_subgrammar,
    extract_sublexicon,
    fixture_path,
    load_grammar,
    read_corpus,
)


@pytest.fixture(scope="session")
def fixture_grammar():
    return load_grammar(fixture_path("biography.grammar.json"))


@pytest.fixture(scope="session")
def corpus():
    return read_corpus(fixture_path("biographies.jsonl"))


@pytest.fixture(scope="session")
def ood_corpus():
    return read_corpus(fixture_path("out_of_domain.jsonl"))


@pytest.fixture(scope="session")
def training(fixture_grammar, corpus):
    g, lex = fixture_grammar
    return collect_goal_types(g, lex, corpus, provenance="biographies.jsonl")


@pytest.fixture(scope="session")
def extracted(fixture_grammar, training):
    g, lex = fixture_grammar
    sub, report = extract_subgrammar(g, training.goal)
    sub_lex = extract_sublexicon(lex, sub.types, training.usage, report.excised_types)
    return sub, report, sub_lex


ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        title, ok, detail = ACCEPTANCE_RESULTS[number]
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
