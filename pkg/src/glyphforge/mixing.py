"""Style weight construction, interpolation paths, and specimen sheets.

Weight vectors are unconstrained reals: one-hot selects a training style,
fractional mixtures blend styles, and values outside [0, 1] are permitted
as exploratory extrapolation.  mix() never normalizes.
"""

from dataclasses import dataclass

import numpy as np
from PIL import Image, ImageDraw, ImageFont

from .dataset import StyleCatalog
from .errors import GlyphBlank, GlyphMissing, MixSpecInvalid, StyleDimMismatch, StyleUnknown
from .model import forward
from .raster import rasterize_glyph


def one_hot(style_id: int, k: int) -> np.ndarray:
    if not 0 <= style_id < k:
        raise StyleUnknown(f"style id {style_id} outside 0..{k - 1}")
    w = np.zeros(k, dtype=np.float64)
    w[style_id] = 1.0
    return w


def mix(entries, catalog: StyleCatalog) -> np.ndarray:
    """Weight vector from (style id or name, weight) pairs; zeros elsewhere."""
    w = np.zeros(catalog.k, dtype=np.float64)
    seen = set()
    for ref, value in entries:
        if isinstance(ref, str):
            sid = catalog.id_for(ref)
            if sid is None:
                raise StyleUnknown(f"unknown style name {ref!r}")
        else:
            sid = int(ref)
            if not 0 <= sid < catalog.k:
                raise StyleUnknown(f"style id {sid} outside 0..{catalog.k - 1}")
        if sid in seen:
            raise MixSpecInvalid(f"style {ref!r} referenced twice")
        seen.add(sid)
        value = float(value)
        if not np.isfinite(value):
            raise MixSpecInvalid(f"weight for style {ref!r} is not finite")
        w[sid] = value
    return w


def parse_mix_spec(text: str, catalog: StyleCatalog) -> np.ndarray:
    """CLI form: "name=weight,name=weight"; names may also be numeric ids."""
    entries = []
    text = text.strip()
    if text:
        for part in text.split(","):
            if "=" not in part:
                raise MixSpecInvalid(f"expected name=weight, got {part!r}")
            name, _, value = part.partition("=")
            name = name.strip()
            try:
                weight = float(value)
            except ValueError as exc:
                raise MixSpecInvalid(f"bad weight in {part!r}") from exc
            entries.append((int(name) if name.isdigit() else name, weight))
    return mix(entries, catalog)


def interpolation_path(a, b, steps: int) -> list[np.ndarray]:
    """steps vectors from a to b inclusive; endpoints are exact copies."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise StyleDimMismatch(f"endpoint lengths differ: {a.shape} vs {b.shape}")
    if steps < 2:
        raise ValueError(f"steps must be >= 2, got {steps}")
    path = [a.copy()]
    for t in range(1, steps - 1):
        path.append(a + (b - a) * (t / (steps - 1)))
    path.append(b.copy())
    return path


@dataclass
class SpecimenSheet:
    grid: list  # rows of output arrays (None where the glyph failed)
    image: np.ndarray  # composed page, uint8 grayscale
    report: list  # SkipEntry-style strings for failed cells
    chars: list
    weights: list


_CELL_PAD = 4


def _crossed_box(size: int) -> np.ndarray:
    cell = np.zeros((size, size))
    cell[0, :] = cell[-1, :] = cell[:, 0] = cell[:, -1] = 1.0
    idx = np.arange(size)
    cell[idx, idx] = 1.0
    cell[idx, size - 1 - idx] = 1.0
    return cell


def render_specimen(params, config, source_font, chars, weight_vectors,
                    margin_fraction: float = 0.1, style_names=None) -> SpecimenSheet:
    """Grid of forward() outputs: rows are characters, columns weight vectors.

    Unrasterizable characters render as crossed boxes and are listed in the
    report; the sheet is still produced.
    """
    size = config.input_size
    vectors = [np.asarray(w, dtype=np.float64) for w in weight_vectors]
    for w in vectors:
        if w.shape != (config.style_count,):
            raise StyleDimMismatch(f"weight vector {w} does not have length {config.style_count}")
    report = []
    rows = []
    for cp in chars:
        try:
            bitmap = rasterize_glyph(source_font, cp, size, margin_fraction)
        except (GlyphMissing, GlyphBlank) as exc:
            kind = "missing" if isinstance(exc, GlyphMissing) else "blank"
            report.append(f"U+{cp:04X}\t{kind}")
            rows.append([None] * len(vectors))
            continue
        x = bitmap.pixels[None, None].astype(config.np_dtype)
        cells = [forward(params, x, w, config)[0, 0] for w in vectors]
        rows.append(cells)

    image = _compose_sheet(rows, chars, vectors, size, style_names)
    return SpecimenSheet(grid=rows, image=image, report=report, chars=list(chars), weights=vectors)


def _weight_label(w) -> str:
    return "[" + ",".join(f"{v:.3f}" for v in w) + "]"


def _compose_sheet(rows, chars, vectors, size, style_names) -> np.ndarray:
    n_rows, n_cols = len(rows), len(vectors)
    label_h = 14 * (2 if style_names else 1) + 4
    label_w = size
    width = label_w + n_cols * (size + _CELL_PAD) + _CELL_PAD
    height = label_h + n_rows * (size + _CELL_PAD) + _CELL_PAD
    page = Image.new("L", (width, height), 255)
    draw = ImageDraw.Draw(page)
    font = ImageFont.load_default()
    for j, w in enumerate(vectors):
        x0 = label_w + _CELL_PAD + j * (size + _CELL_PAD)
        if style_names:
            dominant = int(np.argmax(np.abs(w))) if np.any(w) else None
            name = style_names[dominant] if dominant is not None else "zero"
            draw.text((x0, 2), name[: size // 7], fill=0, font=font)
            draw.text((x0, 16), _weight_label(w)[: size // 6], fill=0, font=font)
        else:
            draw.text((x0, 2), _weight_label(w)[: size // 6], fill=0, font=font)
    for i, cp in enumerate(chars):
        y0 = label_h + _CELL_PAD + i * (size + _CELL_PAD)
        draw.text((4, y0 + size // 2 - 6), f"U+{cp:04X}", fill=0, font=font)
        for j in range(n_cols):
            x0 = label_w + _CELL_PAD + j * (size + _CELL_PAD)
            cell = rows[i][j] if rows[i][j] is not None else _crossed_box(size)
            ink = np.rint(np.asarray(cell, dtype=np.float64) * 255.0).astype(np.uint8)
            page.paste(Image.fromarray(255 - ink, "L"), (x0, y0))
    return np.asarray(page)


def save_sheet(sheet: SpecimenSheet, path) -> None:
    Image.fromarray(sheet.image, "L").save(path, format="PNG")
