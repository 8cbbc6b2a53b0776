#!/usr/bin/python3

from pathlib import Path
from typing import Optional, Union

# cloud/


class CloudFormatError(ValueError):

    """
    Raised when a point cloud file cannot be parsed.

    Attributes
    ----------
    path : str
        The file being read.
    location : str
        Human readable location of the problem, e.g. "line 4" or "byte 1187".
    """

    def __init__(self, path: Union[str, Path], location: Optional[str], msg: str) -> None:
        self.path = str(path)
        self.location = location or ""
        where = f"{self.path}, {self.location}" if self.location else self.path
        super().__init__(f"{where}: {msg}")


class EmptyCloudError(ValueError):
    pass


class UnorganizedCloudError(ValueError):
    pass


# spatial/


class DimensionMismatch(ValueError):
    pass


class EmptyIndex(LookupError):
    pass


# geometry/


class InsufficientNeighbors(ValueError):
    def __init__(self, found: int, required: int, radius: float) -> None:
        self.found = found
        self.required = required
        super().__init__(
            f"Only {found} neighbors within {radius} m, at least {required} are required"
        )


class DegeneratePair(ValueError):
    pass


# saliency/


class MaskFormatError(ValueError):
    def __init__(self, path: Union[str, Path], location: Optional[str], msg: str) -> None:
        self.path = str(path)
        self.location = location or ""
        where = f"{self.path}, {self.location}" if self.location else self.path
        super().__init__(f"{where}: {msg}")


class MaskSizeMismatch(ValueError):
    def __init__(self, expected: tuple, found: tuple) -> None:
        self.expected = expected
        self.found = found
        super().__init__(
            f"Mask is {found[0]}x{found[1]} (width x height), expected {expected[0]}x{expected[1]}"
        )


class PixelOutOfBounds(IndexError):
    pass


# descriptors/


class MissingColorError(ValueError):
    pass


class SingletonSupport(ValueError):
    pass


# recognition/


class DescriptorFamilyMismatch(ValueError):
    pass


class DuplicateView(ValueError):
    pass


class DegenerateConfiguration(ValueError):
    pass


class DatabaseFormatError(ValueError):
    pass


# bench/


class ModelIdMismatch(ValueError):
    pass


class DegenerateBoxError(ValueError):
    pass


class OverlappingPlacement(ValueError):
    pass


class OutsideFrustum(ValueError):
    pass


class DatasetNotFound(OSError):
    pass


class ConfigValidationError(ValueError):
    def __init__(self, key: str, msg: str) -> None:
        self.key = key
        super().__init__(f"Invalid setting '{key}': {msg}")


class BoostrecConfigWarning(Warning):
    pass


class BoostrecRuntimeWarning(Warning):
    pass
