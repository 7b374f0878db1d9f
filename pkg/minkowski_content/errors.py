"""
Error types for minkowski_content.

Library code raises plain ValueError / TypeError for bad arguments. The two
subclasses below exist so the command line can map failures to exit codes:

    ConfigError       -> exit code 2 (invalid scene, schedule or grid)
    ResourceCapError  -> exit code 3 (kernel or packing would be too large)
"""


class MinkowskiContentError(Exception):
    """Base class for all package specific errors."""


class ConfigError(MinkowskiContentError, ValueError):
    """A configuration or scene description failed validation."""


class ResourceCapError(MinkowskiContentError, RuntimeError):
    """
    A requested computation exceeds a configured resource cap.

    Attributes:
        estimate: the predicted size (kernel extent, ball count, ...)
        cap: the cap that was exceeded
    """

    def __init__(self, message, estimate=None, cap=None):
        super().__init__(message)
        self.estimate = estimate
        self.cap = cap
