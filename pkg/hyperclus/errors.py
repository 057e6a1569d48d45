"""
Exception hierarchy for hyperclus.

Every failure the library can raise derives from HyperclusError. Bad input also derives
from ValueError, solver trouble from RuntimeError, so callers that only know the builtin
types still catch the right things.
"""

from typing import Optional, Sequence


class HyperclusError(Exception):
    """Base class for all hyperclus errors."""


# =============================================================================
# INPUT / VALIDATION ERRORS
# =============================================================================

class InputError(HyperclusError, ValueError):
    """Invalid input: bad hypergraph, bad file, bad arguments."""


class NonPositiveWeight(InputError):
    pass


class VertexIndexOutOfRange(InputError):
    pass


class IsolatedVertex(InputError):
    pass


class SingletonEdge(InputError):
    pass


class LengthMismatch(InputError):
    pass


class ZeroVector(InputError):
    pass


class TrivialPartition(InputError):
    """S is empty or covers every vertex."""


class EmptyCluster(InputError):
    pass


class TooLarge(InputError):
    pass


class ConfigError(InputError):
    pass


class MalformedCsv(InputError):
    pass


class UnknownColumn(InputError):
    pass


class UnparseableNumeric(InputError):
    pass


class AllValuesIdentical(InputError):
    pass


class ParseError(InputError):
    """Malformed .edvw / schema / gamma file; carries the 1-based line number."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(f"{where}{message}")


class UnsplittableCluster(InputError):
    pass


# =============================================================================
# STRUCTURAL / SOLVER ERRORS
# =============================================================================

class Disconnected(HyperclusError, RuntimeError):
    """The hypergraph (or graph) has more than one connected component."""

    def __init__(self, message: str, component_sizes: Optional[Sequence[int]] = None):
        self.component_sizes = list(component_sizes or [])
        super().__init__(message)


class DisconnectedSpectrum(Disconnected):
    """Numerically repeated zero eigenvalue of the normalized Laplacian."""


class NotConverged(HyperclusError, RuntimeError):
    def __init__(self, message: str, residual: Optional[float] = None, iterations: Optional[int] = None):
        self.residual = residual
        self.iterations = iterations
        super().__init__(message)


class DegenerateStationary(HyperclusError, RuntimeError):
    pass


class GenerationFailed(HyperclusError, RuntimeError):
    pass
