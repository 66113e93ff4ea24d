"""Semantic exception hierarchy shared across the toolkit."""


class WelfairError(Exception):
    """Base class for all library-specific failures."""


class ZeroConditionMass(WelfairError):
    """The conditioning event carries zero weight; the probability is undefined."""


class EnumerationCapExceeded(WelfairError):
    """A decision space would enumerate more elements than its configured cap."""


class SupportTooLarge(EnumerationCapExceeded):
    """The classifier space implied by the distinct input support exceeds the cap."""


class UnknownAlgorithm(WelfairError):
    """The audited algorithm is not a member of the decision space."""


class HorizonUnbounded(WelfairError):
    """Neither a finite horizon nor certified absorption bounds episode length."""


class ScenarioError(WelfairError):
    """A scenario document could not be loaded."""


class ParseError(ScenarioError):
    """The scenario file is not syntactically valid."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        loc = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{loc}")
        self.line = line
        self.column = column


class SchemaError(ScenarioError):
    """The scenario file parsed but does not match the expected schema."""

    def __init__(self, message: str, field: str | None = None):
        loc = f" [field: {field}]" if field else ""
        super().__init__(f"{message}{loc}")
        self.field = field
