"""Exception hierarchy shared by all modules."""


class SVFormsError(Exception):
    """Base class for every error raised by this package."""


class MalformedElementError(SVFormsError, ValueError):
    """A basis element or rational token could not be parsed or is invalid."""


class ParityError(MalformedElementError):
    """A mode does not lie in the index set of its family."""


class WindowError(SVFormsError, ValueError):
    """Invalid truncation window."""


class WindowTooSmallError(WindowError):
    pass


class DomainError(SVFormsError, ValueError):
    """A family tag was requested for parameters it does not apply to."""


class NotStabilizedError(SVFormsError, RuntimeError):
    """A comparison needs a stabilized solution; enlarge the window."""
