"""Exception hierarchy shared by every armtrace module."""

from __future__ import annotations


class ArmError(Exception):
    """Base class for all errors raised by armtrace."""


class InputError(ArmError):
    """Malformed or inconsistent user input (automaton files, logs, traces)."""


class AutomatonSyntaxError(InputError):
    """The text does not follow the automaton file grammar."""

    def __init__(self, message: str, line: int, column: int = 1):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class AutomatonSemanticError(InputError):
    """The text parses, but names things that do not exist or conflict."""


class LogFormatError(InputError):
    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


class ForeignSymbolError(InputError):
    """A trace uses an event that is not part of the alphabet in use."""

    def __init__(self, symbol: str, line: int | None = None):
        self.symbol = symbol
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}symbol {symbol!r} is not in the alphabet")


class AlphabetMismatchError(ArmError):
    def __init__(self, left, right):
        super().__init__(
            f"alphabets differ: {{{', '.join(left)}}} vs {{{', '.join(right)}}}"
        )


class ResourceLimitError(ArmError):
    """Subset construction exceeded the configured state budget."""

    def __init__(self, budget: int):
        self.budget = budget
        super().__init__(f"state budget of {budget} constructed states exceeded")
