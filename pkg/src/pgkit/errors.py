"""Exception hierarchy shared by every pgkit module."""


class PgkitError(Exception):
    """Base class for all pgkit errors."""


class CompositeBase(PgkitError, ValueError):
    pass


class UnsupportedSize(PgkitError, ValueError):
    pass


class FieldMismatch(PgkitError, TypeError):
    pass


class DivisionByZero(PgkitError, ZeroDivisionError):
    pass


class UnknownElement(PgkitError, KeyError):
    def __init__(self, elements):
        self.elements = sorted(elements)
        super().__init__(f"elements not in ground set: {self.elements}")

    def __str__(self):
        return self.args[0]


class RankOutOfRange(PgkitError, ValueError):
    pass


class NotAFlat(PgkitError, ValueError):
    pass


class NotSpanned(PgkitError, ValueError):
    pass


class StructureViolation(PgkitError):
    pass


class ResourceExceeded(PgkitError):
    pass


class AxiomViolation(PgkitError):
    def __init__(self, axiom, witness):
        self.axiom = axiom
        self.witness = witness
        super().__init__(f"{axiom} violated: {witness}")


class PreconditionFailed(PgkitError):
    pass


class NotOverfull(PreconditionFailed):
    pass


class UnknownSuite(PgkitError, KeyError):
    def __str__(self):
        return f"unknown suite: {self.args[0]}"


class ParseError(PgkitError, ValueError):
    def __init__(self, message, line=None, path="$"):
        self.line = line
        self.path = path
        where = f"{path}" if line is None else f"line {line}, {path}"
        super().__init__(f"{where}: {message}")


class ReplayError(PgkitError):
    def __init__(self, step, cause):
        self.step = step
        self.cause = cause
        super().__init__(f"op {step}: {cause}")
