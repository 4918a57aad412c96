"""Exception hierarchy shared across the package."""


class BrepmateError(Exception):
    """Base class for all package errors."""


class PartSyntaxError(BrepmateError):
    """The byte stream is not well-formed JSON."""


class PartSchemaError(BrepmateError):
    """The JSON is well-formed but violates the part/assembly schema."""


class PartIntegrityError(BrepmateError):
    """Schema-valid data with broken invariants (dangling ref, duplicate id, bad axis)."""


class UnsupportedSurfaceError(BrepmateError):
    """Tessellation requested for a surface kind outside the supported repertoire."""


class UnsupportedOrientationError(BrepmateError):
    """Entity kind cannot supply a frame z-axis."""


class DegenerateFrameError(BrepmateError):
    """Frame resolution failed (zero-length axis, missing boundary data)."""


class DegenerateGeometryError(BrepmateError):
    """Geometric operation on degenerate input (e.g. both parts have zero extent)."""


class UnknownEntityError(BrepmateError):
    """Reference to an entity id that does not exist on the part."""


class ShapeMismatchError(BrepmateError):
    """Tensor operation received incompatible shapes."""


class NonFiniteError(BrepmateError):
    """A NaN or Inf appeared in a tensor op; reports the op name."""


class CheckpointError(BrepmateError):
    """Checkpoint missing, malformed, or config-hash mismatch."""
