"""Exception hierarchy shared by every module."""


class InvGraphError(Exception):
    """Base class for all library errors."""


class AlphabetError(InvGraphError, ValueError):
    """A letter or word does not belong to the alphabet it is used with."""


class GraphError(InvGraphError, ValueError):
    """A graph violates a structural invariant (determinism, involution, ...)."""


class TruncationError(InvGraphError):
    """An answer would depend on vertices outside the trusted region of a ball."""


class FormatError(InvGraphError, ValueError):
    """A text file could not be parsed. Carries the offending line number."""

    def __init__(self, message, lineno=None, path=None):
        self.message = message
        self.lineno = lineno
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)


class GrammarError(InvGraphError, ValueError):
    """A grammar is not in Chomsky normal form or has useless variables."""


class MachineError(InvGraphError, ValueError):
    """A pushdown automaton or transducer cannot perform the requested run."""
