"""Placeholder page rasters: flat PNGs with region outlines.

Real page images come from upstream renderers; these keep bundles usable and
byte-deterministic for tests and the browser reader. The PNG encoder is
hand-rolled (stdlib struct+zlib) so output bytes depend only on this code.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .model import Document, Page, RegionKind

_BACKGROUND = (255, 255, 255)
_PAGE_BORDER = (200, 200, 200)

_KIND_COLORS = {
    RegionKind.PARAGRAPH: (90, 90, 90),
    RegionKind.HEADING: (30, 30, 120),
    RegionKind.FIGURE: (178, 34, 34),
    RegionKind.TABLE: (160, 90, 20),
    RegionKind.CAPTION: (120, 60, 140),
    RegionKind.FOOTNOTE: (100, 140, 100),
    RegionKind.REFERENCE_ENTRY: (60, 120, 140),
    RegionKind.OTHER: (150, 150, 150),
}


def _encode_png(pixels: np.ndarray) -> bytes:
    """Encode an (h, w, 3) uint8 array as a deterministic RGB PNG."""
    height, width, _ = pixels.shape

    def chunk(tag: bytes, data: bytes) -> bytes:
        body = tag + data
        return struct.pack(">I", len(data)) + body + struct.pack(">I", zlib.crc32(body))

    raw = b"".join(b"\x00" + row.tobytes() for row in pixels)
    return (
        b"\x89PNG\r\n\x1a\n"
        + chunk(b"IHDR", struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0))
        + chunk(b"IDAT", zlib.compress(raw, 9))
        + chunk(b"IEND", b"")
    )


def _draw_outline(pixels: np.ndarray, x0: int, y0: int, x1: int, y1: int, color) -> None:
    height, width, _ = pixels.shape
    x0 = max(0, min(x0, width - 1))
    x1 = max(0, min(x1, width - 1))
    y0 = max(0, min(y0, height - 1))
    y1 = max(0, min(y1, height - 1))
    pixels[y0, x0 : x1 + 1] = color
    pixels[y1, x0 : x1 + 1] = color
    pixels[y0 : y1 + 1, x0] = color
    pixels[y0 : y1 + 1, x1] = color


def render_page_image(page: Page, px_width: int = 306) -> bytes:
    scale = px_width / page.width
    px_height = max(1, round(page.height * scale))
    pixels = np.full((px_height, px_width, 3), _BACKGROUND, dtype=np.uint8)
    _draw_outline(pixels, 0, 0, px_width - 1, px_height - 1, _PAGE_BORDER)
    for region in page.regions:
        box = region.bbox
        _draw_outline(
            pixels,
            round(box.x * scale),
            round(box.y * scale),
            round((box.x + box.w) * scale) - 1,
            round((box.y + box.h) * scale) - 1,
            _KIND_COLORS[region.kind],
        )
    return _encode_png(pixels)


def render_thumb(document: Document, px_width: int = 64) -> bytes:
    if document.pages:
        return render_page_image(document.pages[0], px_width=px_width)
    # Documents with no pages still get a thumbnail: a blank letter-ratio card.
    pixels = np.full((round(px_width * 1.294), px_width, 3), _BACKGROUND, dtype=np.uint8)
    _draw_outline(pixels, 0, 0, px_width - 1, pixels.shape[0] - 1, _PAGE_BORDER)
    return _encode_png(pixels)
