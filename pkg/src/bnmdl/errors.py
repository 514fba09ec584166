"""Exception hierarchy shared by every module."""


class BnMdlError(ValueError):
    """Base class for all errors raised by bnmdl."""


class CycleError(BnMdlError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("edges create the directed cycle " + "->".join(map(str, self.cycle)))


class InvalidEdge(BnMdlError):
    pass


class TooLarge(BnMdlError):
    pass


class SizeMismatch(BnMdlError):
    pass


class ParseError(BnMdlError):
    pass


class EmptyData(BnMdlError):
    pass


class SpecMismatch(BnMdlError):
    pass


class PolicyMismatch(BnMdlError):
    pass


class DomainError(BnMdlError):
    pass


class OverlapError(BnMdlError):
    pass
