from typing import Any, Dict, Optional


class EdgeplanError(Exception):
    """Base class of every error raised by edgeplan.

    ``code`` is a stable machine-readable identifier, ``detail`` a human
    readable message and ``location`` points at the offending element
    (room/edge index, file line, document field ...).
    """

    code: str = "edgeplan_error"

    def __init__(self, detail: str = "", location: Optional[Dict[str, Any]] = None):
        super().__init__(detail)
        self.detail = detail
        self.location = location or {}

    def to_dict(self) -> Dict[str, Any]:
        d = {"error": self.code, "detail": self.detail}
        if self.location:
            d["location"] = self.location
        return d


class TooManyEdges(EdgeplanError):
    """Raised when a room receives more edges than the capacity N allows."""

    code = "too_many_edges"

    def __init__(self, count: int, capacity: int):
        super().__init__(f"Room has {count} edges, capacity is {capacity}")
        self.count = count
        self.capacity = capacity


class TooManyRooms(EdgeplanError):
    code = "too_many_rooms"

    def __init__(self, count: int, capacity: int):
        super().__init__(f"Floorplan has {count} rooms, capacity is {capacity}")
        self.count = count
        self.capacity = capacity


class DegenerateEdge(EdgeplanError):
    """Raised when a valid edge has identical endpoints."""

    code = "degenerate_edge"

    def __init__(self, index: int = None, room: int = None):
        location = {}
        if room is not None:
            location["room"] = room
        if index is not None:
            location["index"] = index
        super().__init__("Edge start and end point are identical", location)


class TooFewVertices(EdgeplanError):
    code = "too_few_vertices"

    def __init__(self, count: int, minimum: int = 3):
        super().__init__(f"Need at least {minimum} vertices, got {count}")
        self.count = count


class CapacityMismatch(EdgeplanError):
    code = "capacity_mismatch"

    def __init__(self, expected, actual):
        super().__init__(f"Capacity mismatch: expected {expected}, got {actual}")
        self.expected = expected
        self.actual = actual


class LengthMismatch(EdgeplanError):
    code = "length_mismatch"

    def __init__(self, expected: int, actual: int):
        super().__init__(f"Sequence length mismatch: expected {expected}, got {actual}")
        self.expected = expected
        self.actual = actual
