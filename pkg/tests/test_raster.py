import threading

import numpy as np
import pytest

from glyphforge import backend
from glyphforge.errors import GlyphBlank, GlyphMissing
from glyphforge.raster import load_font, rasterize_glyph


@pytest.fixture(scope="module")
def plain(font_set):
    return load_font(font_set["plain"])


def test_contract_size64(plain, demo_codepoints):
    g = rasterize_glyph(plain, demo_codepoints[0], 64)
    assert g.pixels.shape == (64, 64)
    assert g.pixels.min() >= 0.0 and g.pixels.max() <= 1.0
    assert (g.pixels > 0.5).any()


def test_deterministic_bits(plain, demo_codepoints):
    a = rasterize_glyph(plain, demo_codepoints[3], 64)
    b = rasterize_glyph(plain, demo_codepoints[3], 64)
    assert np.array_equal(a.pixels, b.pixels)


def test_missing_glyph(plain):
    with pytest.raises(GlyphMissing):
        rasterize_glyph(plain, ord("A"), 64)


def test_blank_glyph(tmp_path):
    from glyphforge.fontfactory import SOURCE_STYLE, build_font
    from fontTools.ttLib import TTFont
    from fontTools.pens.ttGlyphPen import TTGlyphPen

    # give U+0020 an empty outline
    path = build_font(tmp_path / "b.ttf", SOURCE_STYLE, [0x4E00])
    font = TTFont(str(path))
    pen = TTGlyphPen(None)
    font["glyf"]["uni4E00"] = pen.glyph()
    font.save(str(tmp_path / "blank.ttf"))
    f = load_font(tmp_path / "blank.ttf")
    with pytest.raises(GlyphBlank):
        rasterize_glyph(f, 0x4E00, 32)


def test_margin_is_respected(plain, demo_codepoints):
    g = rasterize_glyph(plain, demo_codepoints[0], 64, margin_fraction=0.25)
    border = int(0.25 * 64) - 1
    assert g.pixels[:border, :].sum() == 0
    assert g.pixels[-border:, :].sum() == 0
    assert g.pixels[:, :border].sum() == 0
    assert g.pixels[:, -border:].sum() == 0


def test_scaled_to_inner_box(plain, demo_codepoints):
    g = rasterize_glyph(plain, demo_codepoints[0], 64, margin_fraction=0.1)
    ys, xs = np.nonzero(g.pixels)
    extent = max(ys.max() - ys.min(), xs.max() - xs.min()) + 1
    assert abs(extent - 0.8 * 64) <= 2  # ink bbox fills the central square


def test_invalid_size_and_margin(plain):
    with pytest.raises(ValueError):
        rasterize_glyph(plain, 0x4E00, 100)
    with pytest.raises(ValueError):
        rasterize_glyph(plain, 0x4E00, 4)
    with pytest.raises(ValueError):
        rasterize_glyph(plain, 0x4E00, 64, margin_fraction=0.5)


def test_concurrent_reads_match_serial(plain, demo_codepoints):
    serial = [rasterize_glyph(plain, cp, 32).pixels for cp in demo_codepoints[:8]]
    results = [None] * 8

    def work(i, cp):
        results[i] = rasterize_glyph(plain, cp, 32).pixels

    threads = [threading.Thread(target=work, args=(i, cp)) for i, cp in enumerate(demo_codepoints[:8])]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for a, b in zip(serial, results):
        assert np.array_equal(a, b)


def test_backends_bit_identical(plain, demo_codepoints):
    try:
        backend.use_backend("numba")
        nb = rasterize_glyph(plain, demo_codepoints[0], 32).pixels
    finally:
        backend.use_backend("numpy")
    np_ = rasterize_glyph(plain, demo_codepoints[0], 32).pixels
    assert np.array_equal(nb, np_)


def test_styles_are_visually_distinct(font_set, demo_codepoints):
    from glyphforge.fontfactory import TARGET_STYLES

    cp = demo_codepoints[0]
    renders = [rasterize_glyph(load_font(font_set[s.name]), cp, 64).pixels for s in TARGET_STYLES]
    for i in range(len(renders)):
        for j in range(i + 1, len(renders)):
            assert np.abs(renders[i] - renders[j]).mean() > 0.02
