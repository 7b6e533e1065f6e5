"""Exception hierarchy shared across the toolkit.

``DataError`` covers malformed or missing inputs (CLI exit code 2);
``ServiceError`` covers transport and protocol failures of the model
services (exit code 3).
"""

__all__ = [
    "MMRobustError",
    "DataError",
    "UnknownMethodError",
    "InputTooSmallError",
    "MissingAssetError",
    "CodecError",
    "EmptyInputError",
    "NoEligibleWordError",
    "MissingImageError",
    "MalformedCaptionsError",
    "MissingLabelsError",
    "AdapterFailureError",
    "DimensionMismatchError",
    "ZeroVectorError",
    "ServiceError",
    "ServiceUnavailableError",
    "MalformedResponseError",
]


class MMRobustError(Exception):
    """Base class for all toolkit errors."""


class DataError(MMRobustError):
    """Bad or missing input data."""


class UnknownMethodError(DataError):
    pass


class InputTooSmallError(DataError):
    pass


class MissingAssetError(DataError):
    pass


class CodecError(DataError):
    pass


class EmptyInputError(DataError):
    pass


class NoEligibleWordError(DataError):
    """No token is eligible for the requested lexical edit; callers treat the
    sample as identity and flag it."""


class MissingImageError(DataError):
    pass


class MalformedCaptionsError(DataError):
    pass


class MissingLabelsError(DataError):
    pass


class AdapterFailureError(MMRobustError):
    pass


class DimensionMismatchError(DataError):
    pass


class ZeroVectorError(DataError):
    pass


class ServiceError(MMRobustError):
    """Base class for model-service failures."""


class ServiceUnavailableError(ServiceError):
    pass


class MalformedResponseError(ServiceError):
    pass
