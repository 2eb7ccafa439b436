"""Error type shared by every public operation of the toolkit."""

import enum
import json


class ErrorKind(str, enum.Enum):
    InvalidParams = "InvalidParams"
    PointOutsideBall = "PointOutsideBall"
    LogKernelCase = "LogKernelCase"
    DegreeOverflow = "DegreeOverflow"
    SingularGram = "SingularGram"
    BisectionNoConverge = "BisectionNoConverge"
    QuadratureUnderResolved = "QuadratureUnderResolved"


class ToolkitError(Exception):
    """Raised with exactly one :class:`ErrorKind` and a human readable message."""

    def __init__(self, kind, message):
        self.kind = ErrorKind(kind)
        self.message = message
        super().__init__(f"{self.kind.value}: {message}")

    def to_json(self):
        return json.dumps({"error": self.kind.value, "message": self.message})
