from edgeplan.core.exceptions import EdgeplanError


class EmptyCloud(EdgeplanError):
    code = "empty_cloud"

    def __init__(self, detail: str = "Point cloud has no points"):
        super().__init__(detail)


class DegenerateBounds(EdgeplanError):
    """Raised when the projection window has zero (or negative) extent."""

    code = "degenerate_bounds"

    def __init__(self, bounds):
        super().__init__(f"Projection bounds {bounds} have zero extent on an axis")
        self.bounds = bounds


class OutOfExtent(EdgeplanError):
    code = "out_of_extent"

    def __init__(self, coord, extent):
        super().__init__(f"{coord} lies outside {extent}")
        self.coord = coord
        self.extent = extent
