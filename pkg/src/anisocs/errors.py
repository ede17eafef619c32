"""Exception hierarchy shared by all modules."""


class AnisoCSError(Exception):
    """Base class for every error raised by the package."""


class DimensionMismatch(AnisoCSError, ValueError):
    pass


class RankDeficient(AnisoCSError, ValueError):
    """The operator does not have full column rank (lower frame bound is 0)."""


class Aliasing(AnisoCSError, ValueError):
    """A frequency lies outside the alias-free range of the sampling grid."""


class BadGridSize(AnisoCSError, ValueError):
    pass


class BadLambda(AnisoCSError, ValueError):
    pass


class TooFewPoints(AnisoCSError, ValueError):
    pass


class BadRange(AnisoCSError, ValueError):
    pass


class IndexOutOfRange(AnisoCSError, IndexError):
    pass


class ZeroSubspace(AnisoCSError, ValueError):
    """The subspace spanned by the requested generators is trivial."""


class BadAlpha(AnisoCSError, ValueError):
    pass


class BadTheta(AnisoCSError, ValueError):
    pass


class ZeroWeights(AnisoCSError, ValueError):
    pass


class ZeroDivisor(AnisoCSError, ZeroDivisionError):
    """A sampled index carries a zero repetition count in the weighted norm."""


class BadComposition(AnisoCSError, ValueError):
    pass


class Infeasible(AnisoCSError):
    pass


class Unbounded(AnisoCSError):
    pass


class NotConverged(AnisoCSError):
    """Raised when an iterative solver stops at ``max_iters``.

    The best iterate is attached as ``result`` so callers can still report it.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class TooManyResamples(AnisoCSError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class BadSchedule(AnisoCSError, ValueError):
    pass


class ConfigError(AnisoCSError, ValueError):
    """Invalid experiment configuration.

    ``pointer`` is a JSON pointer to the offending field (``""`` is the
    whole document).
    """

    def __init__(self, message, pointer=""):
        super().__init__(f"{pointer or '(root)'}: {message}")
        self.pointer = pointer


class IoError(AnisoCSError, OSError):
    pass
