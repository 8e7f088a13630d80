"""Exception hierarchy shared by every module.

Each exception carries a short machine-readable ``code`` that the CLI copies
into its structured error object.
"""


class HypCayleyError(Exception):
    code = "error"

    def to_dict(self):
        return {"code": self.code, "message": str(self)}


class PresentationError(HypCayleyError, ValueError):
    code = "presentation"


class BackendError(HypCayleyError):
    code = "backend"


class ResourceLimitError(HypCayleyError):
    code = "resource_limit"


class UnsafeDistanceError(HypCayleyError):
    code = "unsafe_distance"


class OutOfBallError(HypCayleyError):
    code = "out_of_ball"


class ForbiddenEndpointError(HypCayleyError):
    code = "forbidden_endpoint"


class NotGeodesicError(HypCayleyError):
    code = "not_geodesic"


class PushPathError(HypCayleyError):
    """An avoidance path required by path pushing was not found."""

    code = "push_path"

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index

    def to_dict(self):
        d = super().to_dict()
        d["index"] = self.index
        return d


class DisconnectedError(HypCayleyError):
    """The complement of a ball separates two points that must be joined."""

    code = "disconnected"

    def __init__(self, message, stage=None):
        super().__init__(message)
        self.stage = stage

    def to_dict(self):
        d = super().to_dict()
        d["stage"] = self.stage
        return d


class ChainContractError(HypCayleyError):
    code = "chain_contract"

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair

    def to_dict(self):
        d = super().to_dict()
        d["pair"] = None if self.pair is None else [str(p) for p in self.pair]
        return d


class FormatError(HypCayleyError):
    code = "format"
