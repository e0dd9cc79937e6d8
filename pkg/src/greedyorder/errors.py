"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: usage errors exit 1, data errors
(schema, infeasible inputs) exit 2, internal invariant violations exit 3.
"""


class GreedyOrderError(Exception):
    """Base class for all package errors."""


class InvalidGraphError(GreedyOrderError):
    """Graph construction rejected the input (range, duplicates, shape)."""


class DimensionMismatchError(GreedyOrderError):
    """Sizes of a graph and a permutation (or two structures) disagree."""


class NoPerfectMatchingError(GreedyOrderError):
    """The graph does not admit a perfect matching."""


class MatchingNotAlignedError(GreedyOrderError):
    """A matching was expected to pair index i with index i but does not."""


class MissingArcError(GreedyOrderError):
    """A path-cover operation requires an arc that is not present."""


class LengthOrderViolatedError(GreedyOrderError):
    """An unbalance step was asked to move a vertex onto a shorter path."""


class PropositionViolatedError(GreedyOrderError):
    """An internal counting invariant failed; indicates a bug, exits 3."""


class FamilyShapeError(GreedyOrderError):
    """A structured-family adversary or audit found the wrong shape."""


class HallInfeasibleError(GreedyOrderError):
    """A required system of distinct representatives does not exist."""


class GenerationError(GreedyOrderError):
    """A randomized generator exhausted its rejection/repair budget."""


class AnalysisParamError(GreedyOrderError):
    """Analysis parameters fell outside a lemma's stated domain."""


class SchemaError(GreedyOrderError):
    """A JSON document violated the wire format."""


class UsageError(GreedyOrderError):
    """Bad command-line usage."""
