class ValidationError(ValueError):
    """An input value or configuration field violates its contract."""


class DegenerateSampleError(RuntimeError):
    """A certificate sampler produced only identical trajectory pairs."""


class EnumerationCapError(RuntimeError):
    """A product-channel enumeration would exceed the configured alphabet cap."""
