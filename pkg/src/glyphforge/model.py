"""Style-conditioned U-Net encoder-decoder with hand-written backprop.

Fixed architecture choices (recorded in checkpoints): 4x4 kernels, stride 2,
pad 1; per-channel (instance) normalization after every non-final stage;
leaky rectifier (slope 0.2) in the encoder, plain rectifier in the decoder;
final stage linear + sigmoid squashed into the open interval
(OUT_MARGIN, 1 - OUT_MARGIN).  The style vector is appended to the encoder
bottleneck as K spatially-constant channels; encoder stage i's activation
is concatenated into decoder stage depth-1-i's input.
"""

from dataclasses import dataclass, asdict

import numpy as np

from . import backend
from .errors import ConfigInvalid, ShapeMismatch, StyleDimMismatch

KERNEL = 4
STRIDE = 2
PAD = 1
NORM_EPS = 1e-5
LEAK = 0.2
OUT_MARGIN = 1e-6

ARCHITECTURE = {
    "kernel": KERNEL,
    "stride": STRIDE,
    "pad": PAD,
    "norm": "instance",
    "norm_eps": NORM_EPS,
    "encoder_activation": f"leaky_relu({LEAK})",
    "decoder_activation": "relu",
    "output": f"sigmoid into ({OUT_MARGIN}, {1 - OUT_MARGIN})",
}


@dataclass(frozen=True)
class ModelConfig:
    input_size: int
    depth: int
    base_channels: int
    channel_cap: int = 512
    style_count: int = 1
    seed: int = 0
    dtype: str = "float64"

    def __post_init__(self):
        if self.input_size < 2 or self.input_size & (self.input_size - 1):
            raise ConfigInvalid(f"input_size must be a power of two, got {self.input_size}")
        if self.depth < 2:
            raise ConfigInvalid(f"depth must be >= 2, got {self.depth}")
        if self.input_size % (1 << self.depth) or self.input_size >> self.depth < 1:
            raise ConfigInvalid(
                f"bottleneck side input_size/2^depth = {self.input_size}/{1 << self.depth} < 1"
            )
        if self.base_channels < 1:
            raise ConfigInvalid(f"base_channels must be >= 1, got {self.base_channels}")
        if self.channel_cap < 1:
            raise ConfigInvalid(f"channel_cap must be >= 1, got {self.channel_cap}")
        if self.style_count < 1:
            raise ConfigInvalid(f"style_count must be >= 1, got {self.style_count}")
        if self.dtype not in ("float32", "float64"):
            raise ConfigInvalid(f"dtype must be float32 or float64, got {self.dtype}")

    @property
    def encoder_channels(self) -> list[int]:
        return [min(self.channel_cap, self.base_channels << i) for i in range(self.depth)]

    @property
    def bottleneck_side(self) -> int:
        return self.input_size >> self.depth

    @property
    def bottleneck_channels(self) -> int:
        return self.encoder_channels[-1]

    @property
    def np_dtype(self):
        return np.float32 if self.dtype == "float32" else np.float64

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["architecture"] = ARCHITECTURE
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "ModelConfig":
        return cls(
            input_size=doc["input_size"],
            depth=doc["depth"],
            base_channels=doc["base_channels"],
            channel_cap=doc["channel_cap"],
            style_count=doc["style_count"],
            seed=doc["seed"],
            dtype=doc.get("dtype", "float64"),
        )


def param_shapes(config: ModelConfig) -> dict[str, tuple]:
    """Ordered parameter name -> shape map; fully determined by the config."""
    enc = config.encoder_channels
    shapes: dict[str, tuple] = {}
    prev = 1
    for i, ch in enumerate(enc):
        shapes[f"enc{i}.w"] = (ch, prev, KERNEL, KERNEL)
        shapes[f"enc{i}.b"] = (ch,)
        shapes[f"enc{i}.g"] = (ch,)
        shapes[f"enc{i}.beta"] = (ch,)
        prev = ch
    prev = enc[-1] + config.style_count
    for d in range(config.depth):
        last = d == config.depth - 1
        out = 1 if last else min(config.channel_cap, config.base_channels << (config.depth - 2 - d))
        shapes[f"dec{d}.w"] = (prev, out, KERNEL, KERNEL)
        shapes[f"dec{d}.b"] = (out,)
        if not last:
            shapes[f"dec{d}.g"] = (out,)
            shapes[f"dec{d}.beta"] = (out,)
            prev = out + enc[config.depth - 2 - d]
    return shapes


def param_count(config: ModelConfig) -> int:
    return sum(int(np.prod(s)) for s in param_shapes(config).values())


def init_model(config: ModelConfig) -> dict[str, np.ndarray]:
    """Fan-in-scaled random kernels, zero biases; deterministic in config.seed."""
    rng = np.random.default_rng(config.seed)
    dtype = config.np_dtype
    params = {}
    for name, shape in param_shapes(config).items():
        kind = name.rsplit(".", 1)[1]
        if kind == "w":
            fan_in = shape[1] * KERNEL * KERNEL if name.startswith("enc") else shape[0] * KERNEL * KERNEL
            params[name] = (rng.standard_normal(shape) * np.sqrt(2.0 / fan_in)).astype(dtype)
        elif kind == "g":
            params[name] = np.ones(shape, dtype=dtype)
        else:
            params[name] = np.zeros(shape, dtype=dtype)
    return params


def _pad(x):
    return np.pad(x, ((0, 0), (0, 0), (PAD, PAD), (PAD, PAD)))


def _norm_forward(z, g, beta):
    mu = z.mean(axis=(2, 3), keepdims=True)
    var = z.var(axis=(2, 3), keepdims=True)
    inv = 1.0 / np.sqrt(var + NORM_EPS)
    xhat = (z - mu) * inv
    return g[None, :, None, None] * xhat + beta[None, :, None, None], xhat, inv


def _norm_backward(dy, xhat, inv, g):
    dbeta = dy.sum(axis=(0, 2, 3))
    dg = (dy * xhat).sum(axis=(0, 2, 3))
    dxhat = dy * g[None, :, None, None]
    dz = inv * (
        dxhat
        - dxhat.mean(axis=(2, 3), keepdims=True)
        - xhat * (dxhat * xhat).mean(axis=(2, 3), keepdims=True)
    )
    return dz, dg, dbeta


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-np.clip(z, -60.0, 60.0)))


def _as_weight_matrix(weights, batch, style_count, dtype):
    w = np.asarray(weights, dtype=dtype)
    if w.ndim == 1:
        if w.shape[0] != style_count:
            raise StyleDimMismatch(f"expected {style_count} style weights, got {w.shape[0]}")
        w = np.broadcast_to(w, (batch, style_count))
    elif w.ndim == 2:
        if w.shape != (batch, style_count):
            raise StyleDimMismatch(f"expected weights ({batch}, {style_count}), got {w.shape}")
    else:
        raise StyleDimMismatch(f"style weights must be 1-D or 2-D, got ndim={w.ndim}")
    if not np.isfinite(w).all():
        raise StyleDimMismatch("style weights must be finite")
    return w


def encode(params, batch, config: ModelConfig, cache=None):
    """Run the encoder; returns (bottleneck, skips)."""
    x = np.asarray(batch, dtype=config.np_dtype)
    s = config.input_size
    if x.ndim != 4 or x.shape[1] != 1 or x.shape[2] != s or x.shape[3] != s:
        raise ShapeMismatch(f"expected batch (B, 1, {s}, {s}), got {x.shape}")
    h = x
    skips = []
    for i in range(config.depth):
        xp = _pad(h)
        z = backend.conv2d_forward(xp, params[f"enc{i}.w"], STRIDE)
        z += params[f"enc{i}.b"][None, :, None, None]
        zn, xhat, inv = _norm_forward(z, params[f"enc{i}.g"], params[f"enc{i}.beta"])
        h = np.where(zn > 0, zn, LEAK * zn)
        if cache is not None:
            cache["enc"].append({"xp": xp, "xhat": xhat, "inv": inv, "zn": zn})
        if i < config.depth - 1:
            skips.append(h)
    return h, skips


def inject_style(bottleneck, weights, style_count: int):
    """Append one spatially-constant channel per style weight."""
    b, _, s1, s2 = bottleneck.shape
    w = _as_weight_matrix(weights, b, style_count, bottleneck.dtype)
    planes = np.broadcast_to(w[:, :, None, None], (b, style_count, s1, s2))
    return np.concatenate([bottleneck, planes.astype(bottleneck.dtype)], axis=1)


def decode(params, conditioned, skips, config: ModelConfig, cache=None):
    """Run the decoder over the style-conditioned bottleneck."""
    enc = config.encoder_channels
    side = config.bottleneck_side
    want = (enc[-1] + config.style_count, side, side)
    if conditioned.ndim != 4 or conditioned.shape[1:] != want:
        raise ShapeMismatch(f"expected conditioned (B, {want[0]}, {want[1]}, {want[2]}), got {conditioned.shape}")
    if len(skips) != config.depth - 1:
        raise ShapeMismatch(f"expected {config.depth - 1} skips, got {len(skips)}")
    bsz = conditioned.shape[0]
    for i, sk in enumerate(skips):
        s = config.input_size >> (i + 1)
        if sk.shape != (bsz, enc[i], s, s):
            raise ShapeMismatch(f"skip {i} must be ({bsz}, {enc[i]}, {s}, {s}), got {sk.shape}")

    h = conditioned
    out = None
    for d in range(config.depth):
        if d >= 1:
            h = np.concatenate([h, skips[config.depth - 1 - d]], axis=1)
        w = params[f"dec{d}.w"]
        hin = h
        side_out = h.shape[2] * 2
        full = backend.conv2d_backward_data(h, w, STRIDE, side_out + 2 * PAD, side_out + 2 * PAD)
        z = full[:, :, PAD:-PAD, PAD:-PAD] + params[f"dec{d}.b"][None, :, None, None]
        if d == config.depth - 1:
            sig = _sigmoid(z)
            out = OUT_MARGIN + (1.0 - 2.0 * OUT_MARGIN) * sig
            if cache is not None:
                cache["dec"].append({"hin": hin, "sig": sig})
        else:
            zn, xhat, inv = _norm_forward(z, params[f"dec{d}.g"], params[f"dec{d}.beta"])
            h = np.maximum(zn, 0.0)
            if cache is not None:
                cache["dec"].append({"hin": hin, "xhat": xhat, "inv": inv, "zn": zn})
    return out


def forward(params, batch, weights, config: ModelConfig, cache=None):
    """Full evaluation: encode, inject style, decode."""
    if cache is not None:
        cache.setdefault("enc", [])
        cache.setdefault("dec", [])
    bottleneck, skips = encode(params, batch, config, cache)
    conditioned = inject_style(bottleneck, weights, config.style_count)
    out = decode(params, conditioned, skips, config, cache)
    if cache is not None:
        cache["skips"] = skips
    return out


def backward(params, cache, dout, config: ModelConfig):
    """Gradients of a scalar loss w.r.t. every parameter, given dloss/doutput."""
    depth = config.depth
    grads = {}
    dskips = [None] * (depth - 1)
    g = dout
    dprev = None
    for d in range(depth - 1, -1, -1):
        st = cache["dec"][d]
        if d == depth - 1:
            sig = st["sig"]
            dz = g * (1.0 - 2.0 * OUT_MARGIN) * sig * (1.0 - sig)
        else:
            dzn = np.where(st["zn"] > 0, dprev, 0.0)
            dz, dg_, dbeta = _norm_backward(dzn, st["xhat"], st["inv"], params[f"dec{d}.g"])
            grads[f"dec{d}.g"] = dg_
            grads[f"dec{d}.beta"] = dbeta
        grads[f"dec{d}.b"] = dz.sum(axis=(0, 2, 3))
        dzp = _pad(dz)
        grads[f"dec{d}.w"] = backend.conv2d_backward_weights(dzp, st["hin"], STRIDE, KERNEL)
        dhin = backend.conv2d_forward(dzp, params[f"dec{d}.w"], STRIDE)
        if d >= 1:
            skip_ch = cache["skips"][depth - 1 - d].shape[1]
            dskips[depth - 1 - d] = dhin[:, -skip_ch:]
            dprev = dhin[:, :-skip_ch]
        else:
            dprev = dhin

    # dprev holds the conditioned-bottleneck gradient; drop the style planes
    da = dprev[:, : config.bottleneck_channels]
    for i in range(depth - 1, -1, -1):
        st = cache["enc"][i]
        if i < depth - 1:
            da = da + dskips[i]
        zn = st["zn"]
        dzn = np.where(zn > 0, da, LEAK * da)
        dz, dg_, dbeta = _norm_backward(dzn, st["xhat"], st["inv"], params[f"enc{i}.g"])
        grads[f"enc{i}.g"] = dg_
        grads[f"enc{i}.beta"] = dbeta
        grads[f"enc{i}.b"] = dz.sum(axis=(0, 2, 3))
        grads[f"enc{i}.w"] = backend.conv2d_backward_weights(st["xp"], dz, STRIDE, KERNEL)
        if i > 0:
            hp, wp = st["xp"].shape[2], st["xp"].shape[3]
            dxp = backend.conv2d_backward_data(dz, params[f"enc{i}.w"], STRIDE, hp, wp)
            da = dxp[:, :, PAD:-PAD, PAD:-PAD]
    return grads
