"""Numba-jitted kernel implementations.

Same contracts as kernels_numpy; see that module for shape conventions.
Each output element is accumulated by exactly one thread in a fixed order,
so results are reproducible run-to-run regardless of thread count.
scanline_fill is bit-identical to the numpy backend; the convolution
kernels match it to float rounding (summation order differs from BLAS).
"""

import math

import numpy as np
from numba import njit, prange


@njit(parallel=True, cache=True, nogil=True)
def conv2d_forward(xp, w, stride):
    b, c, hp, wp = xp.shape
    o, _, k, _ = w.shape
    oh = (hp - k) // stride + 1
    ow = (wp - k) // stride + 1
    out = np.empty((b, o, oh, ow), dtype=xp.dtype)
    for bo in prange(b * o):
        bb = bo // o
        oo = bo % o
        acc = np.zeros((oh, ow), dtype=xp.dtype)
        for cc in range(c):
            for u in range(k):
                for v in range(k):
                    wv = w[oo, cc, u, v]
                    for i in range(oh):
                        row = i * stride + u
                        for j in range(ow):
                            acc[i, j] += xp[bb, cc, row, j * stride + v] * wv
        out[bb, oo] = acc
    return out


@njit(parallel=True, cache=True, nogil=True)
def conv2d_backward_data(dy, w, stride, hp, wp):
    b, o, oh, ow = dy.shape
    _, c, k, _ = w.shape
    dxp = np.zeros((b, c, hp, wp), dtype=dy.dtype)
    for bb in prange(b):
        for oo in range(o):
            for i in range(oh):
                for j in range(ow):
                    g = dy[bb, oo, i, j]
                    for cc in range(c):
                        for u in range(k):
                            row = i * stride + u
                            for v in range(k):
                                dxp[bb, cc, row, j * stride + v] += g * w[oo, cc, u, v]
    return dxp


@njit(parallel=True, cache=True, nogil=True)
def conv2d_backward_weights(xp, dy, stride, k):
    b, c, hp, wp = xp.shape
    _, o, oh, ow = dy.shape
    dw = np.zeros((o, c, k, k), dtype=xp.dtype)
    for oo in prange(o):
        for bb in range(b):
            for i in range(oh):
                for j in range(ow):
                    g = dy[bb, oo, i, j]
                    for cc in range(c):
                        for u in range(k):
                            row = i * stride + u
                            for v in range(k):
                                dw[oo, cc, u, v] += g * xp[bb, cc, row, j * stride + v]
    return dw


@njit(parallel=True, cache=True, nogil=True)
def scanline_fill(edges, width, height):
    mask = np.zeros((height, width), dtype=np.uint8)
    ne = edges.shape[0]
    if ne == 0:
        return mask
    for row in prange(height):
        yc = row + 0.5
        xs = np.empty(ne, dtype=np.float64)
        ws = np.empty(ne, dtype=np.int64)
        n = 0
        for e in range(ne):
            x1 = edges[e, 0]
            y1 = edges[e, 1]
            x2 = edges[e, 2]
            y2 = edges[e, 3]
            if y1 == y2:
                continue
            if y1 < y2:
                ylo, yhi, wind = y1, y2, 1
            else:
                ylo, yhi, wind = y2, y1, -1
            if ylo <= yc < yhi:
                slope = (x2 - x1) / (y2 - y1)
                x = x1 + (yc - y1) * slope
                # stable insertion sort by x
                pos = n
                while pos > 0 and xs[pos - 1] > x:
                    xs[pos] = xs[pos - 1]
                    ws[pos] = ws[pos - 1]
                    pos -= 1
                xs[pos] = x
                ws[pos] = wind
                n += 1
        acc = 0
        for t in range(n - 1):
            acc += ws[t]
            if acc == 0:
                continue
            lo = int(math.ceil(xs[t] - 0.5))
            hi = int(math.ceil(xs[t + 1] - 0.5))
            if lo < 0:
                lo = 0
            if hi > width:
                hi = width
            for i in range(lo, hi):
                mask[row, i] = 1
    return mask
