"""Exception types. All derive from ValueError so plain callers can catch broadly."""


class FibseqError(ValueError):
    """Base class for input and contract violations."""


class SchemaError(FibseqError):
    """A JSON document does not match the expected schema."""


class ExponentRangeError(FibseqError):
    """An exponent sequence is nonpositive, unbounded, or in the wrong range."""


class UnsupportedPairError(FibseqError):
    """A (source, target) mapping pair that no characterization covers."""


class UnsupportedMatrixError(FibseqError):
    """A matrix whose structure does not allow exact evaluation."""
