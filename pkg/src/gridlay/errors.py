"""Exception types raised by the layout engine."""


class LayoutError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(LayoutError):
    """A document could not be parsed at all (malformed JSON, bad GDS record)."""


class ValidationError(LayoutError):
    """A parsed document violates the schema; the message names the field."""


class UnknownLayer(LayoutError):
    pass


class UnknownPin(LayoutError):
    pass


class UnknownWire(LayoutError):
    pass


class UnknownGenerator(LayoutError):
    pass


class DuplicatePin(LayoutError):
    pass


class NotOnGrid(LayoutError):
    """An exact reverse-mapping query hit a coordinate between grid lines."""


class InfeasibleSpec(LayoutError):
    """A grid spec cannot be realized (empty pattern, or cycle larger than the region)."""


class BadParams(LayoutError):
    """Template or generator parameters violate their schema."""


class NonRectilinear(LayoutError):
    """Consecutive routing waypoints share neither a row nor a column."""


class MissingVia(LayoutError):
    """The grid's via map has no entry for a required track intersection."""


class NoCutRule(LayoutError):
    pass


class NotColorable(LayoutError):
    pass


class NoDummyTemplate(LayoutError):
    pass


class GdsOverflow(LayoutError):
    """A coordinate does not fit the 32-bit range of the GDSII stream format."""


class FlowError(LayoutError):
    """An error raised inside a generation stage, annotated with the stage name."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause
