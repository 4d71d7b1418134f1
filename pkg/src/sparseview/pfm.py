"""Portable float map (PFM) reader/writer for single-channel depth maps.

Canonical form written here: header `Pf`, `<width> <height>`, scale `-1.0`
(little-endian float32), pixel rows stored bottom-to-top. Invalid depths are
encoded as 0.0.
"""

from __future__ import annotations

import numpy as np

from .depth_filter import DepthMap
from .errors import MalformedLine


def _read_header_token(f) -> bytes:
    tok = b""
    while True:
        c = f.read(1)
        if not c:
            raise MalformedLine(1, "truncated header")
        if c.isspace():
            if tok:
                return tok
            continue
        tok += c


def read_pfm(path: str) -> DepthMap:
    with open(path, "rb") as f:
        magic = _read_header_token(f)
        if magic != b"Pf":
            raise MalformedLine(1, f"expected Pf header, got {magic!r}", path)
        try:
            width = int(_read_header_token(f))
            height = int(_read_header_token(f))
            scale = float(_read_header_token(f))
        except ValueError as exc:
            raise MalformedLine(2, f"bad dimensions or scale: {exc}", path) from exc
        if width <= 0 or height <= 0:
            raise MalformedLine(2, "nonpositive dimensions", path)
        dtype = "<f4" if scale < 0 else ">f4"
        data = f.read(4 * width * height)
        if len(data) != 4 * width * height:
            raise MalformedLine(3, "truncated pixel data", path)
        grid = np.frombuffer(data, dtype=dtype).reshape(height, width)
    return DepthMap(width=width, height=height, values=np.flipud(grid).astype(np.float64))


def write_pfm(path: str, depth: DepthMap) -> None:
    values = np.array(depth.values, dtype=np.float64, copy=True)
    values[~np.isfinite(values)] = 0.0
    grid = np.flipud(values).astype("<f4")
    with open(path, "wb") as f:
        f.write(b"Pf\n")
        f.write(f"{depth.width} {depth.height}\n".encode())
        f.write(b"-1.0\n")
        f.write(grid.tobytes())
