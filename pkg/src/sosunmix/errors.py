"""Exception and warning classes shared across the package."""


class DimensionError(ValueError):
    """Array shapes or grids do not agree."""


class SingularSubspaceError(ValueError):
    """A signal eigenvalue is zero, so the subspace cannot be whitened."""


class UndefinedCorrelationError(ValueError):
    """A zero-variance row makes Pearson correlation undefined."""


class SingularMatrixError(ValueError):
    """A matrix that must have full column rank does not."""


class SeparationWarning(UserWarning):
    """Base class for identifiability warnings raised during unmixing."""


class IllSeparatedSubspaceWarning(SeparationWarning):
    """The n-th and (n+1)-th zero-lag eigenvalues coincide."""


class NonIdentifiableDelayWarning(SeparationWarning):
    """The delayed covariance has repeated spectrum entries at this delay."""
