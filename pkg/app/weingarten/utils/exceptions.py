from typing import Any


class WeingartenException(Exception):
    pass


class InvalidRelationException(WeingartenException):
    pass


class TrivialRelationException(WeingartenException):
    """
    Raised when the coefficients describe a surface with one constant principal curvature.
    Attributes:
        verdict: the trivial ClassificationVerdict the coefficients route to.
    """

    def __init__(self, message: str, verdict: Any):
        super().__init__(message)
        self.verdict = verdict


class DomainException(WeingartenException):
    pass


class SlopeBlowupSignal(WeingartenException):
    pass


class StepFailureException(WeingartenException):
    def __init__(self, message: str, trace: Any = None):
        super().__init__(message)
        self.trace = trace


class InsufficientDataException(WeingartenException):
    pass


class ContactAngleInconsistency(WeingartenException):
    pass


class ContractViolation(WeingartenException):
    pass


class NoSignChangeException(WeingartenException):
    pass


class SweepOutputException(WeingartenException):
    pass
