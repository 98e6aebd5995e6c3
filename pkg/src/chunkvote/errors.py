"""Exception types shared across the package."""


class ChunkvoteError(Exception):
    """Base class for every error this package raises on bad input."""


class ParseError(ChunkvoteError):
    """An input file is malformed (column count, brackets, headers)."""


class ValidationError(ChunkvoteError):
    """Data violates a declared invariant (tag grammar, scheme, arity)."""


class AlignmentError(ChunkvoteError):
    """Gold and predicted data do not cover the same tokens."""


class ConfigError(ChunkvoteError):
    """An experiment configuration is unusable (unknown key, bad value)."""


class TrainingError(ChunkvoteError):
    """A learner cannot be trained on the given data."""
