"""Systemic-functional grammar lattices, a deterministic generator, and
corpus-driven subgrammar extraction."""

from importlib import resources
from pathlib import Path

from .chooser import (
    Ask,
    Choose,
    Chooser,
    CopyHub,
    Do,
    Identify,
    OutOfBoundsAction,
    evaluate_chooser,
    extend_chooser,
    mark_out_of_bounds,
    prune_chooser_by_responses,
)
from .document import (
    dumps_grammar,
    load_grammar,
    loads_corpus,
    loads_grammar,
    read_corpus,
    read_goal_types,
    read_responses,
    save_grammar,
    write_goal_types,
    write_responses,
)
from .errors import (
    GenerationError,
    GrammarError,
    InvalidGoal,
    OutOfBounds,
    ParseError,
    UnificationFailure,
    ValidationError,
)
from .extractor import (
    ExtractionReport,
    GoalTypeSet,
    dnf_substitute,
    extract_subgrammar,
    extract_sublexicon,
    verify_consistency,
)
from .generator import LexicalItem, Realization, SemanticSpec, generate_sentence
from .lattice import (
    EMPTY,
    And,
    Atom,
    ConstraintSet,
    Or,
    System,
    TypeLattice,
    entry_satisfied,
    normalize_entry,
    remove_unsatisfiable,
    unify_constraints,
    validate_lattice,
)
from .notation import parse_systems
from .telemetry import GrowthSeries, benchmark, collect_goal_types, growth_curve_csv, read_growth_curve

__version__ = "0.1.0"


def fixture_path(name: str) -> Path:
    """Path of a bundled data file (``biography.grammar.json``,
    ``biographies.jsonl``, ``out_of_domain.jsonl``)."""
    return Path(str(resources.files(__package__).joinpath("data", name)))


__all__ = [n for n in dir() if not n.startswith("_") and n not in ("resources", "Path")]
