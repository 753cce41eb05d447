"""Exception types raised across the package."""


class SchemaError(ValueError):
    """A chart-spec document is missing fields or carries unknown ones."""


class DimensionMismatch(ValueError):
    """Two rasters (or a raster and a spec canvas) disagree in shape."""


class NoAlphaChannel(ValueError):
    """An image without an alpha channel was given where matting is assumed."""


class SizeLimit(ValueError):
    """Input exceeds the cost guard of an exhaustive computation."""


class TooSmall(ValueError):
    """Image is too short to split into the requested number of grids."""


class TargetTooSmall(ValueError):
    """Requested assembly height is below one grid height."""


class NonFiniteInput(ValueError):
    """A matrix contains NaN or infinite entries."""
