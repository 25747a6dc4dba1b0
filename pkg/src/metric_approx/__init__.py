"""Abstract rationals on subsets of the line: schemes, limsup covers, dimensions."""
from .errors import (
    ConstructionFailed,
    DomainError,
    InconsistentBracket,
    InvalidArgument,
    MetricApproxError,
    ResourceLimit,
    Undecided,
    UnsupportedSpace,
)
from .exact import IntervalUnion, RoundedPower, as_fraction, pow_rational, radius
from .spaces import SpaceDescriptor

__version__ = "0.1.0"
