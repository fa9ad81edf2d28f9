"""
Exception hierarchy for horokit.

Library code raises these; the verification harness catches them per check
and turns them into failed records.
"""


class HorokitError(Exception):
    """Base class for all horokit errors."""


class NonConvergence(HorokitError):
    """Quadrature subdivision budget exhausted before reaching tolerance."""


class NonFinite(HorokitError):
    """An integrand or special function produced NaN or Inf."""


class PoleAtNonpositiveInteger(HorokitError):
    """Gamma evaluated at 0, -1, -2, ..."""


class DivergentAtOne(HorokitError):
    """2F1 at x=1 with Re(c-a-b) <= 0."""


class SeriesNonConvergence(HorokitError):
    """Hypergeometric series did not settle within its term budget."""


class ShapeMismatch(HorokitError):
    pass


class NonOrthogonalBlock(HorokitError):
    pass


class BranchCutHit(HorokitError):
    """Point lies on an excluded branch locus."""


class NearSingularKernel(HorokitError):
    """|1 - xi.y| below the admissible separation."""


class OutsideDenseSet(HorokitError):
    pass


class ConfigInvalid(HorokitError):
    pass


class UnknownSuite(ConfigInvalid):
    pass
