"""Exception types shared across the library."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class NonConvergenceError(RuntimeError):
    """An iterative scheme exhausted its budget without meeting tolerance."""


class NoSignChangeError(ValueError):
    """A bracketed root finder was given endpoints with equal signs."""


class NoRootError(RuntimeError):
    """No root exists in the scanned range."""


class KnotSingularityError(ValueError):
    """Evaluation requested at (or too close to) a knot angle where the
    quantity is singular or discontinuous."""


class StepTooLargeError(ValueError):
    """A finite-difference stencil would straddle a knot ray."""
