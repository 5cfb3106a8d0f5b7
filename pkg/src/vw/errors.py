"""Exception types shared across the package."""


class VwError(Exception):
    """Base for all package-specific errors."""


class NoFloor(VwError):
    """No floor pixels available: the caller should emit the all-zero command."""


class InvalidDepth(VwError):
    """Depth input contains non-finite values."""


class MalformedPayload(VwError):
    """Wire payload is not exactly ten in-range comma-separated integers."""


class UnknownClient(VwError):
    """Client id is not one of client1..client5."""


class SceneError(VwError):
    """Scene geometry violates an invariant (e.g. camera outside the field)."""


class ConfigError(VwError):
    """Bad layout name, malformed layout file, or missing experiment condition."""


class DegenerateSample(VwError):
    """All paired differences are zero; the signed-rank test is undefined."""
