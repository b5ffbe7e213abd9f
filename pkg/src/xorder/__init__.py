"""Transform-order comparison of lifetime distributions and coherent systems.

The package decides whether two lifetimes are ordered in the convex or star
transform order, or provably non-comparable, from closed-form tails, sign
patterns of shifted survival differences and symbolic tail asymptotics.
"""

from .asymptotics import *  # noqa: F401,F403
from .asymptotics import __all__ as _asymptotics_all
from .distcore import *  # noqa: F401,F403
from .distcore import __all__ as _distcore_all
from .errors import (
    ConfigurationError,
    ConstraintViolation,
    DepthError,
    DomainError,
    NoExponentialAsymptoteError,
    RangeError,
    SingularPointError,
    UnboundedQuantileError,
    UnsupportedDependenceError,
    ValidationError,
    XOrderError,
)
from .limits import LimitEstimate, estimate_limit, sequence_limit
from .orders import *  # noqa: F401,F403
from .orders import __all__ as _orders_all
from .systems import *  # noqa: F401,F403
from .systems import __all__ as _systems_all

__version__ = "0.1.0"

__all__ = [
    *_distcore_all,
    *_systems_all,
    *_orders_all,
    *_asymptotics_all,
    "ConfigurationError",
    "ConstraintViolation",
    "DepthError",
    "DomainError",
    "LimitEstimate",
    "NoExponentialAsymptoteError",
    "RangeError",
    "SingularPointError",
    "UnboundedQuantileError",
    "UnsupportedDependenceError",
    "ValidationError",
    "XOrderError",
    "estimate_limit",
    "sequence_limit",
]
