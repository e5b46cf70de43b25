from edgeplan.core.exceptions import EdgeplanError


class TooFewEdges(EdgeplanError):
    code = "too_few_edges"

    def __init__(self, count: int, minimum: int = 2):
        super().__init__(f"Need at least {minimum} valid edges, got {count}")
        self.count = count


class EmptyResult(EdgeplanError):
    """Raised when duplicate merging leaves fewer than three vertices."""

    code = "empty_result"

    def __init__(self, count: int):
        super().__init__(f"Polygon collapsed to {count} distinct vertices")
        self.count = count
