from typing import Any, Dict, Optional

from pydantic import ValidationError

from edgeplan.core.exceptions import EdgeplanError


class ParseError(EdgeplanError):
    """Raised when a file is not well-formed text of its format."""

    code = "parse_error"

    def __init__(
        self, detail: str, path=None, line: int = None, column: int = None
    ):
        location = {}
        if path is not None:
            location["path"] = str(path)
        if line is not None:
            location["line"] = line
        if column is not None:
            location["column"] = column
        super().__init__(detail, location)


class SchemaViolation(EdgeplanError):
    code = "schema_violation"

    def __init__(self, detail: str, location: Optional[Dict[str, Any]] = None):
        super().__init__(detail, location)

    @classmethod
    def from_validation_error(cls, e: ValidationError, path=None) -> "SchemaViolation":
        """Report the first failing field of a pydantic error."""
        first = e.errors()[0]
        field = ".".join(str(part) for part in first["loc"])
        location = {"field": field, "reason": first["type"]}
        if path is not None:
            location["path"] = str(path)
        return cls(f"{field}: {first['msg']}", location)


class CapacityExceeded(EdgeplanError):
    code = "capacity_exceeded"

    def __init__(self, what: str, count: int, capacity: int, location=None):
        super().__init__(f"{count} {what} exceed capacity {capacity}", location)
        self.count = count
        self.capacity = capacity


class IoError(EdgeplanError):
    code = "io_error"

    def __init__(self, path, reason: str):
        super().__init__(f"{path}: {reason}", {"path": str(path)})


class BadMagic(EdgeplanError):
    """Raised when a raster file does not start with the binary PGM magic."""

    code = "bad_magic"

    def __init__(self, path, magic: bytes):
        super().__init__(
            f"{path}: expected P5 header, found {magic!r}", {"path": str(path)}
        )
