"""Exception types shared across the package."""


class UnknownArgumentError(KeyError):
    """An argument name that is not part of the graph was used."""


class NotConflictFreeError(ValueError):
    """An operation requiring a conflict-free set was given a conflicting one."""


class GraphSizeError(ValueError):
    """The graph (or the relevant enumeration universe) is too large."""


class DeadlineExceeded(TimeoutError):
    """A cooperative deadline elapsed mid-enumeration.

    ``stats`` carries the partial instrumentation collected up to the cutoff
    when the caller asked for it, else None.
    """

    def __init__(self, message="timeout", stats=None):
        super().__init__(message)
        self.stats = stats


class ConflictFreeSampleError(RuntimeError):
    """Rejection sampling failed to find a conflict-free set of the requested size."""


class GraphParseError(ValueError):
    """A graph file could not be parsed or validated.

    ``line`` is the 1-based line number of the offending statement when known.
    """

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line
