"""Exception types shared across the package.

The CLI maps these onto exit codes: usage errors exit 1, ValidationError
(and subclasses) exit 2, OS-level I/O errors exit 3.
"""


class MultinetError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(MultinetError):
    """Input violates a documented precondition or invariant."""


class ParseError(ValidationError):
    """A line of an input file could not be parsed.

    Carries the 1-based line number of the offending line.
    """

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class EmbeddingFormatError(ValidationError):
    """An embedding file does not follow the word2vec text layout."""


class InvalidStartError(ValidationError):
    """A walk was started at a node with no neighbors in the start layer."""


class TrainingError(MultinetError):
    """Training produced non-finite parameters."""


class DeadEnd(MultinetError):
    """Signal: the current walk state has no outgoing probability mass.

    Raised by transition sampling; walk simulation catches it and either
    resamples the layer or truncates the walk.
    """
