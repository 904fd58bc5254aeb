"""Exception types shared across the package.

Exit-code mapping used by the CLI: UsageError / DescriptionError -> 2,
ResourceError -> 3, RefutationError -> 4.
"""


class TwistlabError(Exception):
    pass


class UsageError(TwistlabError):
    """Caller violated a documented precondition."""


class DescriptionError(UsageError):
    """Malformed system-description input.  `where` is a JSON-ish path."""

    def __init__(self, message, where=""):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


class ResourceError(TwistlabError):
    """A configured resource cap (ball size, ambient dimension) was exceeded."""


class RefutationError(TwistlabError):
    """A computed norm lower bound exceeded a bound certified by a theorem.

    This is never an acceptable numerical outcome; it signals an
    implementation bug and is surfaced with its own exit code.
    """

    def __init__(self, message, observed=None, certified=None):
        self.observed = observed
        self.certified = certified
        super().__init__(message)
