"""Exception types raised across the package.

Input-contract violations (bad lag, bad cutoff, malformed files) are kept
distinct from numeric degeneracies discovered during a computation (zero
covariance, undefined interval), because the command line maps the two
families to different exit codes.
"""


class CsdexError(Exception):
    """Base class for all package-specific errors."""


class InvalidLagError(CsdexError, ValueError):
    """Lag is out of range for the panel (needs 0 <= tau <= T-2)."""


class InvalidCutoffError(CsdexError, ValueError):
    """Section cutoff n is outside 1..N."""


class InvalidTruncationError(CsdexError, ValueError):
    """Long-run-variance truncation lag is out of range."""


class InvalidKappaError(CsdexError, ValueError):
    """A zero kappa was supplied where the estimator needs log(kappa^2)."""


class NonstationaryError(CsdexError, ValueError):
    """A simulator coefficient violates stationarity (|rho| >= 1)."""


class NoClosedFormError(CsdexError, ValueError):
    """The factor process has no closed-form autocovariance."""


class DegenerateDataError(CsdexError, ArithmeticError):
    """The data admit no answer: zero variance, zero covariance, or a
    cutoff too small to form a cross-sectional variance."""


class CiUndefinedError(CsdexError, ArithmeticError):
    """The confidence-interval log argument is non-positive."""


class PanelFormatError(CsdexError, ValueError):
    """A panel file failed to parse (ragged rows, non-numeric cells, ...)."""
