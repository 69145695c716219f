"""Exception hierarchy shared by every catmos module."""


class CatmosError(Exception):
    """Base class for all errors raised by this package."""


class QuerySyntaxError(CatmosError, ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class QueryRangeError(CatmosError, ValueError):
    pass


class CodecError(CatmosError, ValueError):
    pass


class StaticVarError(CatmosError, ValueError):
    pass


class TopologyError(CatmosError, ValueError):
    pass


class ScenarioError(CatmosError, ValueError):
    pass


class MergeError(CatmosError, ValueError):
    pass
