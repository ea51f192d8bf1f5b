"""Engine error types, shared across modules.

Each exception carries a stable machine ``code`` that the HTTP facade maps
onto status codes.
"""


class EngineError(Exception):
    """Base class for all engine errors."""

    code = "EngineError"
    http_status = 400

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code


class InvalidSpec(EngineError):
    code = "InvalidSpec"


class RepresentationUnavailable(EngineError):
    code = "RepresentationUnavailable"


class UnknownBlockId(EngineError):
    code = "UnknownBlockId"


class TooLarge(EngineError):
    code = "TooLarge"


class EmptyArrangement(EngineError):
    code = "EmptyArrangement"


class RunnerUnavailable(EngineError):
    code = "RunnerUnavailable"
    http_status = 503


class ProtocolError(EngineError):
    code = "ProtocolError"
    http_status = 503


class NotApplicable(EngineError):
    code = "NotApplicable"
    http_status = 409


class EmptyText(EngineError):
    code = "EmptyText"


class EmptyWorkspace(EngineError):
    code = "EmptyWorkspace"


class IllegalTransition(EngineError):
    code = "IllegalTransition"
    http_status = 409


class OutOfRange(EngineError):
    code = "OutOfRange"


class ProblemNotFinished(EngineError):
    code = "ProblemNotFinished"
    http_status = 409


class MissingItem(EngineError):
    code = "MissingItem"


class NoData(EngineError):
    code = "NoData"


class TooFew(EngineError):
    code = "TooFew"


class DegenerateMatrix(EngineError):
    code = "DegenerateMatrix"
