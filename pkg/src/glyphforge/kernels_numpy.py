"""Pure-numpy kernel implementations (BLAS-backed im2col convolutions).

All convolution kernels operate on pre-padded inputs; padding and cropping
are the caller's job.  Shapes:

  xp : (B, C, HP, WP)   padded input
  w  : (O, C, K, K)     kernel
  dy : (B, O, OH, OW)   upstream gradient / transposed-conv input
"""

import math

import numpy as np


def _windows(xp, k, stride, oh, ow):
    b, c = xp.shape[:2]
    sb, sc, sh, sw = xp.strides
    return np.lib.stride_tricks.as_strided(
        xp, (b, c, oh, ow, k, k), (sb, sc, sh * stride, sw * stride, sh, sw)
    )


def conv2d_forward(xp, w, stride):
    b, c, hp, wp = xp.shape
    o, _, k, _ = w.shape
    oh = (hp - k) // stride + 1
    ow = (wp - k) // stride + 1
    cols = _windows(xp, k, stride, oh, ow).transpose(0, 2, 3, 1, 4, 5)
    cols = np.ascontiguousarray(cols).reshape(b * oh * ow, c * k * k)
    y = cols @ w.reshape(o, -1).T
    return np.ascontiguousarray(y.reshape(b, oh, ow, o).transpose(0, 3, 1, 2))


def conv2d_backward_data(dy, w, stride, hp, wp):
    b, o, oh, ow = dy.shape
    _, c, k, _ = w.shape
    # g[b,i,j,c,u,v] = sum_o dy[b,o,i,j] * w[o,c,u,v]
    g = np.tensordot(dy, w, axes=([1], [0]))
    dxp = np.zeros((b, c, hp, wp), dtype=dy.dtype)
    for u in range(k):
        for v in range(k):
            dxp[:, :, u : u + stride * oh : stride, v : v + stride * ow : stride] += (
                g[:, :, :, :, u, v].transpose(0, 3, 1, 2)
            )
    return dxp


def conv2d_backward_weights(xp, dy, stride, k):
    b, c, hp, wp = xp.shape
    _, o, oh, ow = dy.shape
    cols = _windows(xp, k, stride, oh, ow).transpose(0, 2, 3, 1, 4, 5)
    cols = np.ascontiguousarray(cols).reshape(b * oh * ow, c * k * k)
    dyf = np.ascontiguousarray(dy.transpose(0, 2, 3, 1)).reshape(b * oh * ow, o)
    return (dyf.T @ cols).reshape(o, c, k, k)


def scanline_fill(edges, width, height):
    """Nonzero-winding coverage mask on a subpixel grid.

    edges: (E, 4) float64 rows [x1, y1, x2, y2] in subpixel coordinates.
    Returns a (height, width) uint8 mask; cell (r, i) is 1 when the point
    (i + 0.5, r + 0.5) lies inside the outline.
    """
    mask = np.zeros((height, width), dtype=np.uint8)
    if edges.shape[0] == 0:
        return mask
    x1, y1, x2, y2 = edges[:, 0], edges[:, 1], edges[:, 2], edges[:, 3]
    keep = y1 != y2
    x1, y1, x2, y2 = x1[keep], y1[keep], x2[keep], y2[keep]
    if x1.size == 0:
        return mask
    slope = (x2 - x1) / (y2 - y1)
    ylo = np.minimum(y1, y2)
    yhi = np.maximum(y1, y2)
    winding = np.where(y2 > y1, 1, -1).astype(np.int64)
    for row in range(height):
        yc = row + 0.5
        hit = (ylo <= yc) & (yc < yhi)
        if not hit.any():
            continue
        xs = x1[hit] + (yc - y1[hit]) * slope[hit]
        ws = winding[hit]
        order = np.argsort(xs, kind="stable")
        xs = xs[order]
        acc = np.cumsum(ws[order])
        for t in range(xs.size - 1):
            if acc[t] == 0:
                continue
            lo = math.ceil(xs[t] - 0.5)
            hi = math.ceil(xs[t + 1] - 0.5)
            if lo < 0:
                lo = 0
            if hi > width:
                hi = width
            if hi > lo:
                mask[row, lo:hi] = 1
    return mask
