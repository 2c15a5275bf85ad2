"""Training-phase instrumentation and full-versus-sub benchmarking."""

from __future__ import annotations

import csv
import io
import logging
import time
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .errors import GrammarError
from .extractor import GoalTypeSet
from .generator import Lexicon, SemanticSpec, generate_sentence
from .lattice import TypeLattice

log = logging.getLogger(__name__)

PLATEAU_WINDOW = 25


@dataclass(frozen=True)
class GrowthSeries:
    points: tuple[tuple[int, int], ...] = ()

    def final(self) -> int:
        return self.points[-1][1] if self.points else 0

    def plateau(self, window: int = PLATEAU_WINDOW) -> int | None:
        """Sentence index after which ``window`` consecutive sentences added
        no new type, or ``None`` if the curve has not flattened that long.

        A heuristic for when training has seen enough; nothing more.
        """
        last_growth = 0
        prev = 0
        for index, count in self.points:
            if count > prev:
                last_growth = index
            prev = count
            if index - last_growth >= window:
                return last_growth
        return None


class Training(NamedTuple):
    goal: GoalTypeSet
    series: GrowthSeries
    responses: dict[str, frozenset[str]]
    usage: frozenset[str]
    warnings: list[str]


def collect_goal_types(
    lattice: TypeLattice,
    lexicon: Lexicon,
    corpus: Sequence[SemanticSpec],
    provenance: str = "",
) -> Training:
    if not corpus:
        raise ValueError("training corpus is empty")
    used: set[str] = set()
    responses: dict[str, set[str]] = {}
    usage: set[str] = set()
    points = []
    warnings = []
    for i, spec in enumerate(corpus, start=1):
        try:
            r = generate_sentence(lattice, lexicon, spec)
        except GrammarError as exc:
            msg = f"sentence {i} ({spec.id or '-'}) skipped: {exc}"
            log.warning(msg)
            warnings.append(msg)
        else:
            used |= r.used_types
            usage |= r.lexical_usage
            for name, answers in r.inquiry_log.items():
                responses.setdefault(name, set()).update(answers)
        points.append((i, len(used)))
    goal = GoalTypeSet(frozenset(used), provenance, len(corpus))
    return Training(
        goal,
        GrowthSeries(tuple(points)),
        {k: frozenset(v) for k, v in sorted(responses.items())},
        frozenset(usage),
        warnings,
    )


def emit_growth_curve(series: GrowthSeries) -> list[tuple[str, str]]:
    rows = [("sentence", "cumulative_types")]
    rows += [(str(i), str(n)) for i, n in series.points]
    return rows


def growth_curve_csv(series: GrowthSeries) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(emit_growth_curve(series))
    return buf.getvalue()


def read_growth_curve(text: str) -> GrowthSeries:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != ["sentence", "cumulative_types"]:
        raise ValueError(f"unexpected growth curve header {header!r}")
    return GrowthSeries(tuple((int(a), int(b)) for a, b in reader))


# ---------------------------------------------------------------------------
# benchmark


@dataclass(frozen=True)
class BenchRow:
    label: str
    full_steps: int
    sub_steps: int
    improvement: int
    sentence: str


@dataclass(frozen=True)
class SentenceCost:
    index: int
    text: str
    full_steps: int
    sub_steps: int
    full_ms: float | None = None
    sub_ms: float | None = None

    @property
    def improvement(self) -> int:
        return self.full_steps - self.sub_steps


@dataclass
class Benchmark:
    rows: list[BenchRow]
    sentences: list[SentenceCost] = field(default_factory=list)
    skipped: list[int] = field(default_factory=list)

    @property
    def ratio(self) -> float:
        full = sum(s.full_steps for s in self.sentences)
        return sum(s.sub_steps for s in self.sentences) / full if full else 1.0

    def ratio_range(self) -> tuple[float, float]:
        ratios = [s.sub_steps / s.full_steps for s in self.sentences if s.full_steps]
        return (min(ratios), max(ratios)) if ratios else (1.0, 1.0)

    def to_json(self) -> dict:
        lo, hi = self.ratio_range()
        out = {
            "rows": [
                {
                    "label": r.label,
                    "full": r.full_steps,
                    "sub": r.sub_steps,
                    "improvement": r.improvement,
                    "sentence": r.sentence,
                }
                for r in self.rows
            ],
            "ratio": round(self.ratio, 6),
            "ratioMin": round(lo, 6),
            "ratioMax": round(hi, 6),
            "sentences": len(self.sentences),
            "skipped": self.skipped,
        }
        if self.sentences and self.sentences[0].full_ms is not None:
            out["wallClockMs"] = {
                "full": round(sum(s.full_ms for s in self.sentences), 3),
                "sub": round(sum(s.sub_ms for s in self.sentences), 3),
            }
        return out

    def format_table(self) -> str:
        width = max([len(r.label) for r in self.rows] + [5])
        lines = [f"{'':<{width}}  {'full':>6}  {'sub':>6}  {'improvement':>11}  sentence"]
        for r in self.rows:
            lines.append(
                f"{r.label:<{width}}  {r.full_steps:>6}  {r.sub_steps:>6}  {r.improvement:>11}  {r.sentence}"
            )
        lo, hi = self.ratio_range()
        lines.append(f"step ratio {self.ratio:.4f} (per sentence {lo:.2f}-{hi:.2f}; unit: systems fired + inquiries asked)")
        return "\n".join(lines) + "\n"


def _timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, (time.perf_counter() - t0) * 1000.0


def benchmark(
    full: TypeLattice,
    sub: TypeLattice,
    corpus: Iterable[SemanticSpec],
    lexicon: Lexicon,
    sub_lexicon: Lexicon | None = None,
    wall_clock: bool = False,
) -> Benchmark:
    """Per-sentence step counts under both grammars with worst/best/average rows.

    Step counts are the asserted metric; wall-clock times are only collected
    when asked for.
    """
    sub_lexicon = lexicon if sub_lexicon is None else sub_lexicon
    costs: list[SentenceCost] = []
    skipped = []
    for i, spec in enumerate(corpus, start=1):
        try:
            a, ta = _timed(generate_sentence, full, lexicon, spec)
            b, tb = _timed(generate_sentence, sub, sub_lexicon, spec)
        except GrammarError as exc:
            log.warning("sentence %d skipped in benchmark: %s", i, exc)
            skipped.append(i)
            continue
        costs.append(
            SentenceCost(i, a.text, a.steps, b.steps, ta if wall_clock else None, tb if wall_clock else None)
        )
    rows: list[BenchRow] = []
    if costs:
        worst = min(costs, key=lambda c: c.improvement)
        best = max(costs, key=lambda c: c.improvement)
        mean_full = sum(c.full_steps for c in costs) / len(costs)
        mean_sub = sum(c.sub_steps for c in costs) / len(costs)
        mean_gain = mean_full - mean_sub
        typical = min(costs, key=lambda c: abs(c.improvement - mean_gain))
        for label, c in (("worst case", worst), ("best case", best)):
            rows.append(BenchRow(label, c.full_steps, c.sub_steps, c.improvement, c.text))
        af, asub = round(mean_full), round(mean_sub)
        rows.append(BenchRow("average case", af, asub, af - asub, typical.text))
    return Benchmark(rows, costs, skipped)
