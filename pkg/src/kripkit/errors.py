"""Error types shared across the package.

Everything raised on bad user input or unmet preconditions derives from
ToolError, so the command line can map domain failures to exit code 1
without fishing through arbitrary exceptions.
"""


class ToolError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class ParseError(ToolError):
    """Formula text could not be parsed.

    Carries the character offset of the offending token.
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ModelFormatError(ToolError):
    """A model dictionary or file does not satisfy the schema."""


class FlavorError(ToolError):
    """Operation or connective not available for the model's flavor,
    or a modal index is out of range for the model."""


class FragmentError(ToolError):
    """Ill-formed fragment, or a fragment/flavor combination that the
    requested operation does not support."""


class PreconditionError(ToolError):
    """A stated precondition (model validity, strict condensation)
    does not hold."""


class InternalCheckError(ToolError):
    """An internal consistency check failed: a synthesized formula did
    not verify, or a self-bisimulation fixpoint is not an equivalence.
    These indicate a bug and are surfaced, never swallowed."""
