#!/usr/bin/python3

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple, Union

import cv2
import numpy as np

from boostrec.exceptions import MaskFormatError, MaskSizeMismatch

PathLike = Union[str, Path]


@dataclass(frozen=True, eq=False)
class SaliencyMask:

    """Per-pixel salience in [0, 1], shape (height, width)."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError(f"A mask is a 2-D raster, got shape {values.shape}")
        if values.size and (np.isnan(values).any() or values.min() < 0 or values.max() > 1):
            raise ValueError("Mask values must lie in [0, 1]")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def size(self) -> Tuple[int, int]:
        return self.width, self.height

    @classmethod
    def full(cls, width: int, height: int, value: float = 1.0) -> "SaliencyMask":
        return cls(np.full((height, width), value, dtype=np.float64))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SaliencyMask):
            return NotImplemented
        return bool(np.array_equal(self.values, other.values))


@dataclass(frozen=True, eq=False)
class BinaryMask:

    """Salient / not salient per pixel, shape (height, width)."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        bits = np.array(self.bits, dtype=bool)
        if bits.ndim != 2:
            raise ValueError(f"A mask is a 2-D raster, got shape {bits.shape}")
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def size(self) -> Tuple[int, int]:
        return self.width, self.height

    @property
    def salient_count(self) -> int:
        return int(self.bits.sum())

    @property
    def coverage(self) -> float:
        """Fraction of salient pixels."""
        return self.salient_count / self.bits.size if self.bits.size else 0.0

    @classmethod
    def full(cls, width: int, height: int) -> "BinaryMask":
        return cls(np.ones((height, width), dtype=bool))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return bool(np.array_equal(self.bits, other.bits))


def _pgm_header(path: Path, raw: bytes) -> Tuple[str, int, int, int, int]:
    """Parses a PGM header, returns (magic, width, height, maxval, data offset)."""
    tokens = []
    offset = 0
    while len(tokens) < 4:
        while offset < len(raw) and raw[offset : offset + 1].isspace():
            offset += 1
        if offset < len(raw) and raw[offset : offset + 1] == b"#":
            end = raw.find(b"\n", offset)
            offset = len(raw) if end == -1 else end + 1
            continue
        start = offset
        while offset < len(raw) and not raw[offset : offset + 1].isspace():
            offset += 1
        if start == offset:
            raise MaskFormatError(path, f"byte {offset}", "header ends early")
        tokens.append((start, raw[start:offset].decode("ascii", errors="replace")))

    magic = tokens[0][1]
    if magic not in ("P2", "P5"):
        raise MaskFormatError(path, "byte 0", f"expected a P2 or P5 grayscale map, got '{magic}'")
    values = []
    for start, token in tokens[1:]:
        if not token.isdigit():
            raise MaskFormatError(path, f"byte {start}", f"expected an integer, got '{token}'")
        values.append(int(token))
    width, height, maxval = values
    if maxval != 255:
        raise MaskFormatError(
            path, f"byte {tokens[3][0]}", f"only 8-bit masks are supported, maxval is {maxval}"
        )
    # a single whitespace byte separates the header from the data
    return magic, width, height, maxval, offset + 1


def load_mask(path: PathLike, expected_size: Optional[Tuple[int, int]] = None) -> SaliencyMask:
    """
    Loads an 8-bit PGM (P5 or P2) saliency mask. Values are ``pixel / 255``.

    Arguments
    ---------
    path : str | Path
        Mask file.
    expected_size : (int, int), optional
        (width, height) the mask must have, usually the registered image size.
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise MaskFormatError(path, None, f"unreadable file ({exc.strerror or exc})") from None
    magic, width, height, _, offset = _pgm_header(path, raw)

    if magic == "P5":
        available = len(raw) - offset
        if available < width * height:
            raise MaskFormatError(
                path, f"byte {offset}", f"expected {width * height} pixels, found {available}"
            )
    else:
        count = len(raw[offset:].split())
        if count < width * height:
            line = raw.count(b"\n") + 1
            raise MaskFormatError(
                path, f"line {line}", f"expected {width * height} pixels, found {count}"
            )

    pixels = cv2.imdecode(np.frombuffer(raw, dtype=np.uint8), cv2.IMREAD_UNCHANGED)
    if pixels is None or pixels.shape[:2] != (height, width):
        raise MaskFormatError(path, f"byte {offset}", "pixel data could not be decoded")
    if pixels.ndim == 3:
        pixels = pixels[:, :, 0]
    if expected_size is not None and tuple(expected_size) != (width, height):
        raise MaskSizeMismatch(tuple(expected_size), (width, height))
    return SaliencyMask(pixels.astype(np.float64) / 255.0)


def mask_to_pixels(mask: Union[SaliencyMask, BinaryMask]) -> np.ndarray:
    if isinstance(mask, BinaryMask):
        return mask.bits.astype(np.uint8) * 255
    return np.round(mask.values * 255).astype(np.uint8)


def save_mask(mask: Union[SaliencyMask, BinaryMask], path: PathLike, binary: bool = True) -> Path:
    """Writes a mask as an 8-bit PGM, P5 by default or P2 with ``binary=False``."""
    path = Path(path)
    ok, data = cv2.imencode(".pgm", mask_to_pixels(mask), [cv2.IMWRITE_PXM_BINARY, int(binary)])
    if not ok:
        raise OSError(f"Unable to encode mask for {path}")
    path.write_bytes(data.tobytes())
    return path


def load_image(path: PathLike) -> np.ndarray:
    """Loads a raster as RGB (h, w, 3) or grayscale (h, w) uint8."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise MaskFormatError(path, None, f"unreadable file ({exc.strerror or exc})") from None
    pixels = cv2.imdecode(np.frombuffer(raw, dtype=np.uint8), cv2.IMREAD_UNCHANGED)
    if pixels is None:
        raise MaskFormatError(path, None, "not a readable image")
    if pixels.ndim == 3:
        code = cv2.COLOR_BGRA2RGB if pixels.shape[2] == 4 else cv2.COLOR_BGR2RGB
        pixels = cv2.cvtColor(pixels, code)
    return pixels


def save_image(image: np.ndarray, path: PathLike) -> Path:
    """Writes an RGB or grayscale uint8 raster, format chosen by suffix (.ppm, .pgm, .png)."""
    path = Path(path)
    image = np.asarray(image, dtype=np.uint8)
    if image.ndim == 3:
        image = cv2.cvtColor(image, cv2.COLOR_RGB2BGR)
    ok, data = cv2.imencode(path.suffix or ".ppm", image)
    if not ok:
        raise OSError(f"Unable to encode image for {path}")
    path.write_bytes(data.tobytes())
    return path
