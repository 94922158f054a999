#!/usr/bin/env python3
"""Times the hot kernels on both backends.

Covers the convolution primitives at the training-run stage shapes and the
scanline rasterizer on a real glyph outline.  Run:

    python benchmarks/bench_kernels.py [--repeat N]

The numbers behind the default backend choice (numpy) come from here: the
jitted direct-loop convolutions lose to im2col+BLAS at these channel
counts, while the jitted scanline fill wins by a wide margin.
"""

import argparse
import tempfile
import time

import numpy as np

from glyphforge import backend
from glyphforge.charset import load_charset
from glyphforge.fontfactory import SOURCE_STYLE, build_font
from glyphforge.raster import load_font, rasterize_glyph

CONV_SHAPES = [
    # (batch, in_ch, spatial, out_ch) for the 64px depth-4 base-32 model
    (16, 1, 64, 32),
    (16, 32, 32, 64),
    (16, 64, 16, 128),
    (16, 128, 8, 256),
]


def _time(fn, repeat):
    fn()  # warm (JIT compile on the numba path)
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - t0) / repeat


def bench_convs(repeat):
    rng = np.random.default_rng(0)
    rows = []
    for b, c, s, o in CONV_SHAPES:
        xp = rng.standard_normal((b, c, s + 2, s + 2))
        w = rng.standard_normal((o, c, 4, 4))
        dy = rng.standard_normal((b, o, s // 2, s // 2))
        rows.append((
            f"conv {c:>3}->{o:<3} @{s:>2}px",
            _time(lambda: backend.conv2d_forward(xp, w, 2), repeat),
            _time(lambda: backend.conv2d_backward_data(dy, w, 2, s + 2, s + 2), repeat),
            _time(lambda: backend.conv2d_backward_weights(xp, dy, 2, 4), repeat),
        ))
    return rows


def bench_raster(repeat, font_path, codepoint):
    font = load_font(font_path)
    return _time(lambda: rasterize_glyph(font, codepoint, 64), repeat)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=10)
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        cps = load_charset("builtin:top4")
        font_path = build_font(f"{tmp}/bench.ttf", SOURCE_STYLE, cps)

        results = {}
        for name in ("numpy", "numba"):
            backend.use_backend(name)
            results[name] = {
                "convs": bench_convs(args.repeat),
                "raster": bench_raster(args.repeat, font_path, cps[0]),
            }

    print(f"{'kernel':<22}{'numpy':>12}{'numba':>12}{'numba/numpy':>14}")
    for i, (label, *_np) in enumerate(results["numpy"]["convs"]):
        nb = results["numba"]["convs"][i]
        for j, part in enumerate(("fwd", "bwd_data", "bwd_w")):
            t_np = results["numpy"]["convs"][i][j + 1]
            t_nb = nb[j + 1]
            print(f"{label + ' ' + part:<22}{t_np * 1e3:>10.2f}ms{t_nb * 1e3:>10.2f}ms{t_nb / t_np:>13.2f}x")
    t_np = results["numpy"]["raster"]
    t_nb = results["numba"]["raster"]
    print(f"{'rasterize 64px glyph':<22}{t_np * 1e3:>10.2f}ms{t_nb * 1e3:>10.2f}ms{t_nb / t_np:>13.2f}x")


if __name__ == "__main__":
    main()
