"""Deterministic synthetic TrueType fonts for demos and tests.

Real CJK font files are large and unevenly licensed, so demos and the test
suite build their own: every codepoint gets a reproducible stroke skeleton
(horizontal/vertical/diagonal bars, optional enclosing box), and each style
renders that same skeleton with different stroke geometry.  The character
content therefore matches across fonts while the style differs, which is
exactly the pairing the dataset builder expects.

Fonts are emitted byte-identically for identical inputs (fixed timestamps).
"""

import random
from dataclasses import dataclass
from pathlib import Path

from fontTools.fontBuilder import FontBuilder
from fontTools.pens.ttGlyphPen import TTGlyphPen

UPM = 1000
ASCENT = 880
DESCENT = -120


@dataclass(frozen=True)
class StrokeStyle:
    name: str
    h_width: float
    v_width: float
    shear: float = 0.0
    serif: bool = False


# One source style plus four visually distinct targets; ordered so that
# neighbouring ids differ mostly in weight (kind to interpolation demos).
SOURCE_STYLE = StrokeStyle("plain", 70, 70)
TARGET_STYLES = (
    StrokeStyle("broad", 100, 100),
    StrokeStyle("medium", 62, 62),
    StrokeStyle("fineserif", 26, 78, serif=True),
    StrokeStyle("slant", 54, 54, shear=0.20),
)

_ROWS = (200, 350, 500, 650, 800)
_COLS = (220, 380, 500, 620, 780)
_L, _R = 150, 850


def stroke_skeleton(codepoint: int) -> list[tuple[float, float, float, float]]:
    """Segments (x1, y1, x2, y2) in font units, deterministic per codepoint."""
    rng = random.Random(codepoint)
    segs = []
    rows = rng.sample(_ROWS, rng.randint(1, 3))
    cols = rng.sample(_COLS, rng.randint(1, 3))
    for y in rows:
        x0 = rng.choice((_L, _L, 300))
        x1 = rng.choice((_R, _R, 700))
        segs.append((x0, y, x1, y))
    for x in cols:
        y0 = rng.choice((200, 200, 380))
        y1 = rng.choice((800, 800, 640))
        segs.append((x, y0, x, y1))
    for _ in range(rng.randint(0, 2)):
        if rng.random() < 0.5:
            segs.append((rng.choice((260, 340)), 760, rng.choice((660, 740)), 240))
        else:
            segs.append((rng.choice((260, 340)), 240, rng.choice((660, 740)), 760))
    if rng.random() < 0.25:
        segs += [(_L, 800, _R, 800), (_L, 200, _R, 200), (_L, 200, _L, 800), (_R, 200, _R, 800)]
    return segs


def _orient_ccw(points):
    area = 0.0
    for i in range(len(points)):
        x1, y1 = points[i]
        x2, y2 = points[(i + 1) % len(points)]
        area += x1 * y2 - x2 * y1
    return points if area >= 0 else points[::-1]


def stroke_contours(seg, style: StrokeStyle):
    """Closed contours (point lists) in font units for one skeleton segment."""
    x1, y1, x2, y2 = seg
    horizontal = abs(x2 - x1) >= abs(y2 - y1)
    width = style.h_width if horizontal else style.v_width
    dx, dy = x2 - x1, y2 - y1
    length = (dx * dx + dy * dy) ** 0.5
    ux, uy = dx / length, dy / length
    nx, ny = -uy * width / 2, ux * width / 2
    ext = width / 2
    ax, ay = x1 - ux * ext, y1 - uy * ext
    bx, by = x2 + ux * ext, y2 + uy * ext
    quad = [(ax + nx, ay + ny), (bx + nx, by + ny), (bx - nx, by - ny), (ax - nx, ay - ny)]
    contours = [_orient_ccw(quad)]
    if style.serif and horizontal:
        top = max(y1, y2) + style.h_width / 2
        tip = max(x1, x2) + ext
        contours.append(_orient_ccw([(tip - 46, top), (tip + 4, top + 48), (tip + 8, top)]))
    return contours


def _apply_shear(points, shear):
    return [(x + shear * (y - 500), y) for x, y in points]


def glyph_contours(codepoint: int, style: StrokeStyle):
    contours = []
    for seg in stroke_skeleton(codepoint):
        contours.extend(stroke_contours(seg, style))
    if style.shear:
        contours = [_apply_shear(c, style.shear) for c in contours]
    return [[(int(round(x)), int(round(y))) for x, y in c] for c in contours]


def build_font(path, style: StrokeStyle, codepoints, family: str | None = None) -> Path:
    """Write a TTF covering `codepoints` in the given stroke style."""
    path = Path(path)
    codepoints = sorted(set(codepoints))
    names = [f"uni{cp:04X}" for cp in codepoints]
    fb = FontBuilder(UPM, isTTF=True)
    fb.setupGlyphOrder([".notdef"] + names)
    fb.setupCharacterMap(dict(zip(codepoints, names)))

    pen = TTGlyphPen(None)
    glyphs = {".notdef": pen.glyph()}
    metrics = {".notdef": (UPM, 0)}
    for cp, name in zip(codepoints, names):
        pen = TTGlyphPen(None)
        xmin = UPM
        for contour in glyph_contours(cp, style):
            pen.moveTo(contour[0])
            for pt in contour[1:]:
                pen.lineTo(pt)
            pen.closePath()
            xmin = min(xmin, min(p[0] for p in contour))
        glyphs[name] = pen.glyph()
        metrics[name] = (UPM, xmin)

    fb.setupGlyf(glyphs)
    fb.setupHorizontalMetrics(metrics)
    fb.setupHorizontalHeader(ascent=ASCENT, descent=DESCENT)
    fb.setupNameTable({"familyName": family or style.name, "styleName": "Regular"})
    fb.setupOS2(sTypoAscender=ASCENT, sTypoDescender=DESCENT, usWinAscent=ASCENT, usWinDescent=-DESCENT)
    fb.setupPost()
    fb.font.recalcTimestamp = False
    fb.font["head"].created = 0x7C25B080  # fixed epoch, keeps font bytes reproducible
    fb.font["head"].modified = 0x7C25B080
    path.parent.mkdir(parents=True, exist_ok=True)
    fb.save(str(path))
    return path


def build_font_set(out_dir, codepoints, skip: dict[str, set[int]] | None = None) -> dict[str, Path]:
    """Build the source font plus all four target fonts into out_dir.

    skip maps a style name to codepoints left out of that font (used to
    exercise missing-glyph handling).
    """
    out_dir = Path(out_dir)
    skip = skip or {}
    paths = {}
    for style in (SOURCE_STYLE,) + TARGET_STYLES:
        cps = [cp for cp in codepoints if cp not in skip.get(style.name, set())]
        paths[style.name] = build_font(out_dir / f"{style.name}.ttf", style, cps)
    return paths


def main(argv=None):
    import argparse

    ap = argparse.ArgumentParser(description="generate the demo font set")
    ap.add_argument("out_dir")
    ap.add_argument("--charset", default="builtin:top128")
    args = ap.parse_args(argv)
    from .charset import load_charset

    paths = build_font_set(args.out_dir, load_charset(args.charset))
    for name, p in paths.items():
        print(f"{name}\t{p}")


if __name__ == "__main__":
    main()
