"""Exception hierarchy shared across the package."""


class LcaGraphError(Exception):
    """Base class for all errors raised by this package."""


class ValueKindError(LcaGraphError):
    """A property value is malformed (NaN/infinite float, empty unit, ...)."""


class IntegrityError(LcaGraphError):
    """A referential-integrity rule would be violated."""


class UnknownEntityError(LcaGraphError):
    """An operation referenced a node or edge id that does not exist."""


class DumpFormatError(LcaGraphError):
    """A snapshot dump is malformed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class VersionMismatchError(DumpFormatError):
    """A snapshot dump carries an unsupported version header."""


class VocabularyError(LcaGraphError):
    """Triples use an IRI scheme this package does not understand."""

    def __init__(self, message, subjects=()):
        super().__init__(message)
        self.subjects = list(subjects)


class SchemaSyntaxError(LcaGraphError):
    """The schema DSL text could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class MappingError(LcaGraphError):
    """A mapping table is malformed or incoherent."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class TableFormatError(LcaGraphError):
    """A unified-table CSV has the wrong header or is otherwise unreadable."""


class QuerySyntaxError(LcaGraphError):
    """Query text failed to lex or parse."""

    def __init__(self, message, line=1, column=0):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class QuerySemanticError(LcaGraphError):
    """Query parsed but is not well-formed (unbound variable, aggregate misuse)."""


class QueryRuntimeError(LcaGraphError):
    """Query evaluation hit a value it cannot operate on."""
