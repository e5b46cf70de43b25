from edgeplan.core.exceptions import EdgeplanError


class DimensionMismatch(EdgeplanError):
    code = "dimension_mismatch"

    def __init__(self, expected, actual):
        super().__init__(f"Mask dimensions differ: {expected} vs {actual}")
        self.expected = expected
        self.actual = actual
