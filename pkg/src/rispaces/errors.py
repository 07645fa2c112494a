"""Exception hierarchy.

Every error carries a short machine-readable ``code`` so the CLI can surface it.
"""


class RispacesError(Exception):
    code = "error"


class DomainMismatch(RispacesError):
    code = "domain_mismatch"


class InvalidFunction(RispacesError):
    code = "invalid_function"


class InvalidGenerator(RispacesError):
    code = "invalid_generator"


class UnboundedRearrangement(RispacesError):
    code = "unbounded_rearrangement"


class InexactRearrangement(RispacesError):
    code = "inexact_rearrangement"


class NotLocallyIntegrable(RispacesError):
    code = "not_locally_integrable"


class NotInClass(RispacesError):
    """An operation would leave the representable piece class."""

    code = "not_in_class"


class NoLimit(RispacesError):
    code = "no_limit"


class NotEmbedded(RispacesError):
    code = "not_embedded"


class Unclassifiable(RispacesError):
    code = "unclassifiable"


class NoConvergence(RispacesError):
    code = "no_convergence"

    def __init__(self, message, partials=()):
        super().__init__(message)
        self.partials = list(partials)


class BisectionFailure(RispacesError):
    code = "bisection_failure"


class NotTrivialIdeal(RispacesError):
    code = "not_trivial_ideal"


class UnsupportedForm(RispacesError):
    code = "unsupported_form"


class InfiniteModular(RispacesError):
    code = "infinite_modular"


class ParseError(RispacesError):
    code = "parse_error"

    def __init__(self, field, line=None, col=None, message=""):
        self.field = field
        self.line = line
        self.col = col
        where = f" at line {line}, column {col}" if line is not None else ""
        super().__init__(f"{field}: {message or 'invalid'}{where}")
