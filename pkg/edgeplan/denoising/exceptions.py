from edgeplan.core.exceptions import EdgeplanError


class InvalidConfig(EdgeplanError):
    """Raised for out-of-range configuration values."""

    code = "invalid_config"

    def __init__(self, field: str, value):
        super().__init__(f"Invalid value {value!r} for {field}", {"field": field})
        self.field = field
        self.value = value
