"""Exception hierarchy shared by all kpcst modules."""


class KpcstError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(KpcstError):
    """Malformed instance file, result file, or textual rational/event."""


class ValidationError(KpcstError):
    """Input violates an instance or argument precondition."""


class NotRespectedError(KpcstError):
    """A tie-breaking list entry could not be processed in its iteration."""


class InternalInvariantError(KpcstError):
    """A runtime self-check failed; indicates a bug, not bad input."""


class CertificateError(KpcstError):
    """A certificate inequality does not hold; carries both exact sides."""


class LimitError(KpcstError):
    """Requested exact computation exceeds the configured size limit."""
