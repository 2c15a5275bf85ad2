"""Exception hierarchy shared by every stage of the pipeline."""

from __future__ import annotations


class GrammarError(Exception):
    """Base class. ``path`` records the constituent path when generation fails."""

    def __init__(self, message: str):
        super().__init__(message)
        self.path: tuple[str, ...] = ()

    def __str__(self) -> str:
        msg = super().__str__()
        if self.path:
            return f"{msg} (at {'/'.join(self.path)})"
        return msg


class UnificationFailure(GrammarError):
    def __init__(self, message: str, label: str | None = None, types: tuple[str, ...] = ()):
        super().__init__(message)
        self.label = label
        self.types = types


class InvalidGoal(GrammarError):
    pass


class ParseError(GrammarError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


class ValidationError(GrammarError):
    def __init__(self, report):
        super().__init__("grammar failed validation:\n" + report.format())
        self.report = report


# chooser evaluation


class ChooserError(GrammarError):
    pass


class MissingAnswer(ChooserError):
    def __init__(self, inquiry: str, args: tuple[str, ...]):
        super().__init__(f"no answer for inquiry {inquiry}({', '.join(args)})")
        self.inquiry = inquiry
        self.args = args


class NoBranch(ChooserError):
    def __init__(self, inquiry: str, answer: str):
        super().__init__(f"inquiry {inquiry} answered {answer!r} but the chooser has no such branch")
        self.inquiry = inquiry
        self.answer = answer


class NoChoice(ChooserError):
    pass


class OutOfBounds(ChooserError):
    def __init__(self, reason: str, system: str | None = None):
        where = f" in system {system}" if system else ""
        super().__init__(f"out of bounds{where}: {reason}")
        self.reason = reason
        self.system = system


class ChoosePercolated(ChooserError):
    pass


# generation


class GenerationError(GrammarError):
    pass


class OrderCycle(GenerationError):
    pass


class LexiconMiss(GenerationError):
    pass


class UnboundFunction(GenerationError):
    pass


class BindingConflict(GenerationError):
    pass
