from typing import Any

from pydantic import ValidationError


class FideliumError(Exception):
    """Base class for domain errors.

    Every error carries a stable `code`, a human readable message and a
    context mapping; the CLI renders all three as its JSON error object.
    """

    code = "domain_error"
    exit_code = 1

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context = context

    def to_dict(self) -> dict[str, Any]:
        return {"code": self.code, "message": self.message, "context": self.context}


class DimensionMismatchError(FideliumError):
    code = "dimension_mismatch"


class InvalidStateError(FideliumError):
    code = "invalid_state"


class NotUnitaryError(FideliumError):
    code = "not_unitary"


class TracePreservationError(FideliumError):
    code = "trace_preservation"


class DesignVerificationError(FideliumError):
    code = "design_verification"


class OptimizerFailureError(FideliumError):
    code = "optimizer_failure"


class InvalidParameterError(FideliumError):
    code = "invalid_parameter"


class FileFormatError(FideliumError):
    code = "parse_failure"


class MissingFileError(FideliumError):
    code = "file_not_found"


class SelftestFailure(FideliumError):
    code = "selftest_failed"


class UsageError(FideliumError):
    code = "usage_error"
    exit_code = 2

    @classmethod
    def from_validation(cls, message: str, error: ValidationError) -> "UsageError":
        problems = [f"{'.'.join(str(part) for part in item['loc'])}: {item['msg']}" for item in error.errors()]
        return cls(message, problems=problems)
