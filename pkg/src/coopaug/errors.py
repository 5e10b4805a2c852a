"""Exception types raised by the coopaug library."""


class CoopaugError(Exception):
    """Base class for all library errors."""


class GroupTooSmall(CoopaugError):
    pass


class DegenerateCenters(CoopaugError):
    pass


class EmptyInput(CoopaugError):
    pass


class BadTarget(CoopaugError):
    pass


class MismatchedGrids(CoopaugError):
    pass


class InvalidPair(CoopaugError):
    pass


class PlacementFailure(CoopaugError):
    pass


class BadMagic(CoopaugError):
    pass


class TruncatedFile(CoopaugError):
    pass


class IoFailure(CoopaugError):
    pass
