"""Exception types shared across the toolkit."""


class SkmodError(Exception):
    """Base class for all toolkit errors."""


class ParseError(SkmodError):
    """Reaction-file syntax or consistency error, with source location."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


class NetworkError(SkmodError):
    """Violation of a reaction-network construction contract."""


class UnknownSpeciesError(NetworkError):
    pass


class UnknownReactionError(NetworkError):
    pass


class PartitionError(NetworkError):
    """Supplied species sets do not form the required partition."""


class GraphError(SkmodError):
    pass


class NotChordalError(GraphError):
    pass


class RIPOrderError(GraphError):
    """A clique ordering does not satisfy the running intersection property."""


class TreeError(GraphError):
    """Invalid junction-tree operation (unknown or non-adjacent clusters)."""


class SimulationError(SkmodError):
    pass


class ExplosionError(SimulationError):
    """Event-count cap exceeded; the model is likely explosive."""


class PathConsistencyError(SkmodError):
    """Projected paths do not admit a consistent reaction assignment."""
