"""Font loading and glyph rasterization.

Outlines come from fontTools; curves are flattened with a fixed subdivision
count and filled by the backend scanline kernel (nonzero winding) on a 4x
supersampled grid, so coverage values are exact multiples of 1/16 and the
whole path is bit-deterministic.
"""

import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from fontTools.pens.basePen import BasePen
from fontTools.ttLib import TTFont

from . import backend
from .errors import GlyphBlank, GlyphMissing

SUPERSAMPLE = 4
CURVE_STEPS = 16


@dataclass
class GlyphBitmap:
    """One rasterized character; pixels are ink coverage in [0, 1]."""

    codepoint: int
    style_id: int
    pixels: np.ndarray
    size: int

    def __post_init__(self):
        h, w = self.pixels.shape
        if not (h == w == self.size and _power_of_two(self.size)):
            raise ValueError(f"bitmap must be square power-of-two, got {h}x{w} size={self.size}")
        if self.style_id < 0:
            raise ValueError("style_id must be >= 0")
        lo, hi = float(self.pixels.min()), float(self.pixels.max())
        if lo < 0.0 or hi > 1.0:
            raise ValueError(f"pixel values outside [0,1]: min={lo} max={hi}")


def _power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


class _PolylinePen(BasePen):
    """Flattens an outline into closed polylines (fixed subdivision)."""

    def __init__(self, glyph_set):
        super().__init__(glyph_set)
        self.contours = []
        self._points = None

    def _moveTo(self, pt):
        self._points = [pt]

    def _lineTo(self, pt):
        self._points.append(pt)

    def _curveToOne(self, p1, p2, p3):
        p0 = self._points[-1]
        for i in range(1, CURVE_STEPS + 1):
            t = i / CURVE_STEPS
            s = 1.0 - t
            x = s * s * s * p0[0] + 3 * s * s * t * p1[0] + 3 * s * t * t * p2[0] + t * t * t * p3[0]
            y = s * s * s * p0[1] + 3 * s * s * t * p1[1] + 3 * s * t * t * p2[1] + t * t * t * p3[1]
            self._points.append((x, y))

    def _qCurveToOne(self, p1, p2):
        p0 = self._points[-1]
        for i in range(1, CURVE_STEPS + 1):
            t = i / CURVE_STEPS
            s = 1.0 - t
            x = s * s * p0[0] + 2 * s * t * p1[0] + t * t * p2[0]
            y = s * s * p0[1] + 2 * s * t * p1[1] + t * t * p2[1]
            self._points.append((x, y))

    def _closePath(self):
        if self._points and len(self._points) >= 2:
            self.contours.append(np.asarray(self._points, dtype=np.float64))
        self._points = None

    def _endPath(self):
        self._closePath()


class FontOutlines:
    """A loaded outline font; safe for concurrent read-only use."""

    def __init__(self, path):
        self.path = Path(path)
        self._font = TTFont(str(self.path), lazy=True)
        self._cmap = self._font.getBestCmap()
        self._glyph_set = self._font.getGlyphSet()
        self._cache: dict[int, list[np.ndarray]] = {}
        self._lock = threading.Lock()

    def has_glyph(self, codepoint: int) -> bool:
        return codepoint in self._cmap

    def outline(self, codepoint: int) -> list[np.ndarray]:
        """Closed polyline contours in font units; raises GlyphMissing."""
        if codepoint not in self._cmap:
            raise GlyphMissing(codepoint)
        with self._lock:
            cached = self._cache.get(codepoint)
            if cached is None:
                pen = _PolylinePen(self._glyph_set)
                self._glyph_set[self._cmap[codepoint]].draw(pen)
                cached = pen.contours
                self._cache[codepoint] = cached
        return cached


def load_font(path) -> FontOutlines:
    return FontOutlines(path)


def _contour_edges(contours, scale, cx, cy, half):
    segs = []
    for pts in contours:
        closed = np.vstack([pts, pts[:1]])
        xs = (closed[:, 0] - cx) * scale + half
        ys = (cy - closed[:, 1]) * scale + half
        e = np.empty((len(pts), 4), dtype=np.float64)
        e[:, 0] = xs[:-1]
        e[:, 1] = ys[:-1]
        e[:, 2] = xs[1:]
        e[:, 3] = ys[1:]
        segs.append(e)
    return np.vstack(segs) if segs else np.zeros((0, 4), dtype=np.float64)


def rasterize_glyph(font: FontOutlines, codepoint: int, size: int, margin_fraction: float = 0.1,
                    style_id: int = 0) -> GlyphBitmap:
    """Render one glyph centered by its ink bounding box.

    The outline is scaled uniformly so its longer bbox side fills the
    central (1 - 2*margin_fraction)*size square; background is 0, full ink 1.
    """
    if not (_power_of_two(size) and size >= 8):
        raise ValueError(f"size must be a power of two >= 8, got {size}")
    if not 0.0 <= margin_fraction < 0.5:
        raise ValueError(f"margin_fraction must be in [0, 0.5), got {margin_fraction}")
    contours = font.outline(codepoint)
    if not contours:
        raise GlyphBlank(codepoint)
    allpts = np.vstack(contours)
    xmin, ymin = allpts.min(axis=0)
    xmax, ymax = allpts.max(axis=0)
    extent = max(xmax - xmin, ymax - ymin)
    if extent <= 0:
        raise GlyphBlank(codepoint)

    grid = size * SUPERSAMPLE
    inner = (1.0 - 2.0 * margin_fraction) * grid
    scale = inner / extent
    edges = _contour_edges(contours, scale, (xmin + xmax) / 2.0, (ymin + ymax) / 2.0, grid / 2.0)
    mask = backend.scanline_fill(edges, grid, grid)
    counts = mask.reshape(size, SUPERSAMPLE, size, SUPERSAMPLE).sum(axis=(1, 3))
    if counts.sum() == 0:
        raise GlyphBlank(codepoint)
    pixels = counts.astype(np.float64) / (SUPERSAMPLE * SUPERSAMPLE)
    return GlyphBitmap(codepoint=codepoint, style_id=style_id, pixels=pixels, size=size)
