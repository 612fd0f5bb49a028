"""Exception hierarchy shared by all modules."""


class TwoDiskError(Exception):
    """Base class for every error raised by the package."""


class GeometryError(TwoDiskError):
    pass


class NonPositiveParameter(GeometryError):
    pass


class MarginViolation(GeometryError):
    pass


class GapTooWide(GeometryError):
    pass


class OutOfDomain(TwoDiskError):
    pass


class CollarsOverlap(TwoDiskError):
    pass


class IncommensurateSpacing(TwoDiskError):
    pass


class UnresolvedCollar(TwoDiskError):
    pass


class UnresolvedGap(TwoDiskError):
    """Finest grid spacing is coarser than an eighth of the smallest gap."""


class NoConvergence(TwoDiskError):
    pass


class SharpModeUnsupported(TwoDiskError):
    pass


class OriginInRegion(TwoDiskError):
    pass


class EmptyRegion(TwoDiskError):
    pass


class UnresolvedAnnulus(TwoDiskError):
    pass


class UnresolvedShell(UnresolvedAnnulus):
    pass


class ConfigParse(TwoDiskError):
    pass


class IoFailure(TwoDiskError):
    pass
