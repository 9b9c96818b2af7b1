"""Shared exception types.

Everything raised on purpose by the library derives from OrbitkitError so
callers (the CLI in particular) can distinguish "your input is wrong" from
genuine bugs.
"""


class OrbitkitError(Exception):
    """Base class for all intentional failures."""


class DescriptorMismatch(OrbitkitError, ValueError):
    """An element was used with a group descriptor it does not belong to."""


class KindError(OrbitkitError, TypeError):
    """An operation that only makes sense for one group kind got another."""


class UnknownPoint(OrbitkitError, KeyError):
    """A point outside the space was passed to an action or morphism."""


class TruncationError(OrbitkitError, ValueError):
    """An exact answer was requested from a bound-truncated object."""


class EnumerationCap(OrbitkitError, ValueError):
    """An exhaustive enumeration was asked for beyond its hard size caps."""


class HypothesisNotMet(OrbitkitError, ValueError):
    """A construction's stated hypothesis failed; carries which one."""

    def __init__(self, hypothesis: str, detail: str = ""):
        self.hypothesis = hypothesis
        self.detail = detail
        msg = hypothesis if not detail else f"{hypothesis}: {detail}"
        super().__init__(msg)


class MapUndefined(OrbitkitError, ValueError):
    """A partial map was evaluated outside its domain."""


class InvalidStructure(OrbitkitError, ValueError):
    """A composite object (groupoid, partition, graph) failed its axioms."""


class ParseError(OrbitkitError, ValueError):
    """An instance file could not be parsed; message carries file:line."""
