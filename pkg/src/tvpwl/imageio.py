"""Grey-scale image files.

Supported formats, chosen by file extension:

``.png``
    8- or 16-bit greyscale PNG. 16-bit samples are scaled by ``255/65535``.
``.pgm``
    Binary PGM (``P5``); samples scaled by ``255/maxval``.
``.raw``
    Lossless float64 dump: the 8-byte magic ``b"TVPWLRAW"``, then ``M`` and
    ``N`` as little-endian uint64, then ``M*N`` little-endian doubles in
    row-major order.

PNG and PGM writes quantise to 8 bits (round half away from zero, then clamp
to ``[0, 255]``). All writes go to a temporary file that is renamed into
place.
"""
import os
import struct
import tempfile
from io import BytesIO
from pathlib import Path

import numpy as np
from PIL import Image

__all__ = ["ImageFormatError", "read_image", "write_image", "quantise_8bit", "RAW_MAGIC"]

RAW_MAGIC = b"TVPWLRAW"
_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


class ImageFormatError(ValueError):
    """Unsupported image format or corrupt file contents."""


def _format_of(path):
    ext = Path(path).suffix.lower()
    if ext not in (".png", ".pgm", ".raw"):
        raise ImageFormatError(f"unsupported image extension {ext!r} (use .png, .pgm or .raw)")
    return ext[1:]


def quantise_8bit(u):
    """Round half away from zero, then clamp to ``[0, 255]``; returns uint8."""
    u = np.asarray(u, dtype=np.float64)
    q = np.sign(u) * np.floor(np.abs(u) + 0.5)
    return np.clip(q, 0, 255).astype(np.uint8)


def _atomic_write(path, data):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- raw ---------------------------------------------------------------------

def _encode_raw(u):
    u = np.ascontiguousarray(u, dtype="<f8")
    M, N = u.shape
    return RAW_MAGIC + struct.pack("<QQ", M, N) + u.tobytes()


def _decode_raw(data):
    if len(data) < 24 or data[:8] != RAW_MAGIC:
        raise ImageFormatError("not a raw field file (bad magic)")
    M, N = struct.unpack("<QQ", data[8:24])
    if M < 1 or N < 1 or len(data) != 24 + 8 * M * N:
        raise ImageFormatError("corrupt raw header or truncated payload")
    return np.frombuffer(data, dtype="<f8", offset=24).reshape(M, N).astype(np.float64)


# -- pgm ---------------------------------------------------------------------

def _pgm_tokens(data):
    """Yield (token, end_offset) for the four header fields, skipping comments."""
    pos = 0
    n = len(data)
    for _ in range(4):
        while pos < n:
            c = data[pos:pos + 1]
            if c == b"#":
                while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                    pos += 1
            elif c.isspace():
                pos += 1
            else:
                break
        start = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise ImageFormatError("truncated PGM header")
        yield data[start:pos], pos


def _decode_pgm(data):
    tokens = list(_pgm_tokens(data))
    magic = tokens[0][0]
    if magic != b"P5":
        raise ImageFormatError(f"only binary PGM (P5) is supported, got {magic!r}")
    try:
        N, M, maxval = (int(t[0]) for t in tokens[1:])
    except ValueError as exc:
        raise ImageFormatError("corrupt PGM header") from exc
    if M < 1 or N < 1 or not 0 < maxval < 65536:
        raise ImageFormatError("corrupt PGM header")
    # exactly one whitespace byte separates header and raster
    start = tokens[3][1] + 1
    dtype = np.dtype("u1") if maxval < 256 else np.dtype(">u2")
    need = M * N * dtype.itemsize
    if len(data) < start + need:
        raise ImageFormatError("truncated PGM raster")
    raster = np.frombuffer(data, dtype=dtype, count=M * N, offset=start).reshape(M, N)
    return raster.astype(np.float64) * (255.0 / maxval)


def _encode_pgm(u):
    q = quantise_8bit(u)
    M, N = q.shape
    return f"P5\n{N} {M}\n255\n".encode("ascii") + q.tobytes()


# -- png ---------------------------------------------------------------------

def _decode_png(data):
    if data[:8] != _PNG_SIGNATURE or len(data) < 33 or data[12:16] != b"IHDR":
        raise ImageFormatError("not a PNG file")
    bit_depth, colour_type = data[24], data[25]
    if colour_type != 0:
        raise ImageFormatError("only greyscale PNG is supported")
    try:
        im = Image.open(BytesIO(data))
        im.load()
    except Exception as exc:
        raise ImageFormatError(f"corrupt PNG: {exc}") from exc
    a = np.asarray(im).astype(np.float64)
    if bit_depth == 16:
        return a * (255.0 / 65535.0)
    if bit_depth == 8:
        return a
    # 1/2/4-bit greyscale decode to 0..2^d-1 in mode 'L' except 1-bit
    if im.mode == "1":
        return a * 255.0
    return a * (255.0 / (2 ** bit_depth - 1))


def _encode_png(u):
    buf = BytesIO()
    Image.fromarray(quantise_8bit(u)).save(buf, format="PNG")
    return buf.getvalue()


def read_image(path):
    """Read a grey-scale image as a float64 ``(M, N)`` array in ``[0, 255]``.

    Raises
    ------
    ImageFormatError
        Unknown extension or unreadable contents.
    OSError
        The file cannot be opened.
    """
    fmt = _format_of(path)
    data = Path(path).read_bytes()
    if fmt == "raw":
        return _decode_raw(data)
    if fmt == "pgm":
        return _decode_pgm(data)
    return _decode_png(data)


def write_image(path, u):
    """Write `u` to `path`; 8-bit for PNG/PGM, exact for ``.raw``."""
    fmt = _format_of(path)
    u = np.asarray(u, dtype=np.float64)
    if u.ndim != 2:
        raise ValueError("only 2-D grey-scale fields can be written")
    encode = {"raw": _encode_raw, "pgm": _encode_pgm, "png": _encode_png}[fmt]
    _atomic_write(path, encode(u))
