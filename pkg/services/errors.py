class GkmError(ValueError):
    """Base class for every error raised by the GKM pipeline."""


class InputError(GkmError):
    """The input document or its numeric data is malformed."""


class ConsistencyError(GkmError):
    """The input parsed, but the data contradicts a structural assertion."""


class ParseError(InputError):
    pass


class SchemaError(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class UnsupportedRank(InputError):
    pass


class NotOrthogonal(InputError):
    pass


class GroupTooLarge(InputError):
    pass


class NotSubsystem(InputError):
    pass


class RankMismatch(InputError):
    pass


class ZeroVector(ConsistencyError):
    pass


class NotSubgroup(ConsistencyError):
    pass


class SelfEdge(ConsistencyError):
    pass


class EdgeCountMismatch(ConsistencyError):
    pass


class WprimeNotInKminus(ConsistencyError):
    pass


class WrongCase(ConsistencyError):
    pass


class QuotientNotZ2(ConsistencyError):
    pass


class ChoiceDependence(ConsistencyError):
    pass


class FormalityViolation(ConsistencyError):
    pass


class NotGkm(ConsistencyError):
    """Graph construction was requested for a diagram failing the GKM criterion."""


class UnknownEntry(InputError):
    """No catalog document with the requested id."""
