"""Exception types shared across the package."""


class DegenerateSimplexError(ValueError):
    """A simplex has (numerically) zero volume or a geometric construction degenerates."""


class BranchingError(ValueError):
    """A facet is shared by more than two elements of a triangulation."""


class FractureBoundaryError(ValueError):
    """A fracture touches the boundary of the volume mesh."""


class IntegrityError(RuntimeError):
    """Internal consistency check failed on a generalized mesh."""


class ParseError(ValueError):
    """Malformed mesh file. ``lineno`` is 1-based (``None`` if not line specific)."""

    def __init__(self, message: str, lineno: int | None = None, path: str | None = None):
        self.lineno = lineno
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)
