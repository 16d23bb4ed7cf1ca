"""Exception hierarchy shared by every module."""


class EmbolicError(Exception):
    """Base class for all errors raised by the package."""


class DomainError(EmbolicError, ValueError):
    """A point lies on or outside the admissible disc, or a parameter is out of range."""


class DimensionError(EmbolicError, ValueError):
    """Multi-disc operands disagree on the number of discs."""


class NonConvergenceError(EmbolicError, RuntimeError):
    """An iterative solver exhausted its budget.

    Attributes:
        iterate: final iterate(s) reached by the solver.
        grad_norm: Riemannian gradient norm(s) at the final iterate.
    """

    def __init__(self, message, iterate=None, grad_norm=None):
        super().__init__(message)
        self.iterate = iterate
        self.grad_norm = grad_norm


class DataError(EmbolicError, ValueError):
    """Input data is empty, malformed, or inconsistent with the emotion catalog."""


class UndefinedDirectionError(EmbolicError, ValueError):
    """A class direction cannot be fit because its weighted resultant vanishes."""


class NonFiniteError(EmbolicError, FloatingPointError):
    """An objective or loss evaluated to NaN or infinity."""


class MissingArtifactError(EmbolicError, FileNotFoundError):
    """A pipeline stage needs an input file that does not exist."""


class LockHeldError(EmbolicError, RuntimeError):
    """Another process holds the output directory's lock file."""
