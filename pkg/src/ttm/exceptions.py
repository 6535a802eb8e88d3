"""Exception hierarchy shared by every ttm module."""


class TTMError(ValueError):
    """Base class for all errors raised by ttm."""


class DegenerateReal(TTMError):
    """Operation needs Im(c) > 0 but the parameter is real.

    For real c the folding line and the pre-folding line are parallel, so
    their intersection (and everything built on it) is undefined.
    """


class UnitModulus(TTMError):
    """Operation is undefined for |c| = 1."""


class NotExpanding(TTMError):
    """Operation needs |c| > 1."""


class InsufficientChain(TTMError):
    """A vertex chain does not cover the indices an operation needs."""


class BadRotation(TTMError):
    """arg(c) does not match the requested rational rotation j/k."""


class EmptySample(TTMError):
    """An orbit sample has no usable points."""


class NoSurvivors(TTMError):
    """No sample survived the requested number of iterations."""


class DegenerateWindow(TTMError):
    """A fit window has too few points to estimate a slope."""


class ConfigParse(TTMError):
    """A job configuration could not be parsed."""


class IoFailure(OSError):
    """Writing an artifact failed."""
