"""Exception hierarchy shared by all cauchylab modules.

Everything user-facing derives from :class:`CauchyLabError`. Semantic
violations of input contracts raise :class:`ValidationError` subclasses;
malformed file content raises :class:`ParseError`; plain I/O failures
propagate as the builtin ``OSError``. Exceeding a configured work budget
raises :class:`BudgetExceeded`. Non-convergence of iterative norms is not
an exception: norm routines return their best estimate with a flag.
"""


class CauchyLabError(Exception):
    """Base class for all cauchylab errors."""


class ValidationError(CauchyLabError):
    """An input violates a documented precondition or invariant."""


class DimensionMismatch(ValidationError):
    """Points, measures, cubes or kernels of incompatible dimension."""


class DuplicatePoint(ValidationError):
    """Two atoms coincide exactly; measures must be atom-disjoint."""


class NonpositiveWeight(ValidationError):
    """Atom weights must be strictly positive."""


class InvalidSpec(ValidationError):
    """A Cantor construction spec is out of range."""


class InvalidRange(ValidationError):
    """An interval or truncation range is empty or reversed."""


class InvalidParameter(ValidationError):
    """A scalar parameter is out of its documented range."""


class InvalidScales(ValidationError):
    """Scale or epsilon ladders must be strictly decreasing and positive."""


class InvalidLevel(ValidationError):
    """A dyadic level index is out of range."""


class EmptyMeasure(ValidationError):
    """Operation requires a measure with at least one atom."""


class EmptyCube(ValidationError):
    """Operation requires a cube holding at least one atom."""


class OverlappingCubes(ValidationError):
    """Operation requires geometrically disjoint cubes."""


class DegenerateTriple(ValidationError):
    """Circumradius is undefined when two of the three points coincide."""


class CoincidentPoints(ValidationError):
    """Kernels are undefined on the diagonal z = w."""


class KernelDimensionMismatch(ValidationError):
    """Kernel and measure dimensions are incompatible."""


class LengthMismatch(ValidationError):
    """Vector length does not match the operator size."""


class BreakpointSingularity(ValidationError):
    """Closed-form transform evaluated exactly at a jump point."""


class ParseError(CauchyLabError):
    """File content is structurally malformed."""


class BudgetExceeded(CauchyLabError):
    """Estimated work exceeds the configured operation budget."""
