"""Exception hierarchy for gblab.

Every error raised on purpose by the library derives from :class:`GBLabError`, which is a
:class:`ValueError` so callers that only guard against bad values keep working.
"""


class GBLabError(ValueError):
    """Base class of all gblab errors."""


class DimensionError(GBLabError):
    """A matrix or bundle has a dimension the operation cannot handle."""


class NotSkewError(GBLabError):
    """A matrix expected to be skew-symmetric is not."""


class DomainError(GBLabError):
    """An argument lies outside the domain of the operation."""


class GridError(GBLabError):
    """Forms or fields live on incompatible chart grids."""


class DegreeError(GBLabError):
    """A form has the wrong bidegree for the operation."""


class TruncationError(GBLabError):
    """A fiber integrand has not decayed at the edge of the sampled fiber."""


class FrameError(GBLabError):
    """A frame or coframe is singular or not adapted."""


class NormError(GBLabError):
    """A section expected to have unit length does not."""


class LocusError(GBLabError):
    """A section vanishes where it must not."""


class KernelError(GBLabError):
    """A bilinear form has a nontrivial kernel."""


class CommutationError(GBLabError):
    """Operators expected to commute do not."""


class FixtureError(GBLabError):
    """An unknown fixture name was requested."""


class ConfigError(GBLabError):
    """The run configuration is invalid."""


class InputError(GBLabError):
    """An input file could not be interpreted."""
