"""Stateless HTTP inference service over a trained checkpoint.

Endpoints: GET /styles, POST /generate, POST /interpolate, GET /healthz.
Responses are JSON with base64-encoded PNG bitmaps (add ?format=raw to
/generate for a binary multipart body).  Identical request bodies always
produce identical response bytes; requests arriving before the model has
loaded get 503.
"""

import base64
import io
from dataclasses import dataclass

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from PIL import Image
from pydantic import BaseModel, Field

from .checkpoint import load_checkpoint
from .dataset import load_catalog
from .errors import GlyphBlank, GlyphMissing
from .mixing import interpolation_path
from .model import forward
from .raster import load_font, rasterize_glyph

MULTIPART_BOUNDARY = "glyphforge-frame"


@dataclass
class ServiceConfig:
    checkpoint: str
    catalog: str
    host: str = "127.0.0.1"
    port: int = 8500
    max_chars: int = 64
    max_steps: int = 33

    def __post_init__(self):
        if self.max_chars < 1 or self.max_steps < 2:
            raise ValueError("limits must be positive (max_steps >= 2)")


class ApiError(Exception):
    def __init__(self, status: int, code: str, detail: str):
        self.status = status
        self.code = code
        self.detail = detail
        super().__init__(detail)


class GenerateRequest(BaseModel):
    chars: str
    weights: list[float]


class InterpolateRequest(BaseModel):
    chars: str
    from_weights: list[float] = Field(alias="from")
    to_weights: list[float] = Field(alias="to")
    steps: int


def _png_bytes(array: np.ndarray) -> bytes:
    ink = np.rint(np.asarray(array, dtype=np.float64) * 255.0).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(ink, "L").save(buf, format="PNG")
    return buf.getvalue()


def create_app(config: ServiceConfig, defer_load: bool = False) -> FastAPI:
    app = FastAPI(title="glyphforge", docs_url=None, redoc_url=None)
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"])
    app.state.config = config
    app.state.model = None
    if not defer_load:
        load_model(app)

    @app.exception_handler(ApiError)
    async def api_error_handler(_req: Request, exc: ApiError):
        return JSONResponse({"error": exc.code, "detail": exc.detail}, status_code=exc.status)

    @app.exception_handler(RequestValidationError)
    async def validation_handler(_req: Request, exc: RequestValidationError):
        return JSONResponse({"error": "BadRequest", "detail": str(exc.errors()[:1])}, status_code=400)

    def state():
        if app.state.model is None:
            raise ApiError(503, "ServiceUnavailable", "model is not loaded yet")
        return app.state.model

    def check_weights(vec, k) -> np.ndarray:
        if len(vec) != k:
            raise ApiError(400, "StyleDimMismatch", f"expected {k} weights, got {len(vec)}")
        arr = np.asarray(vec, dtype=np.float64)
        if not np.isfinite(arr).all():
            raise ApiError(400, "WeightsNotFinite", "style weights must be finite numbers")
        return arr

    def check_chars(chars: str, limit: int) -> list[str]:
        if not chars:
            raise ApiError(400, "EmptyChars", "chars must contain at least one character")
        if len(chars) > limit:
            raise ApiError(400, "TooManyChars", f"at most {limit} characters per request")
        return list(chars)

    def raster_batch(chars: list[str]):
        m = state()
        kept, skipped, planes = [], [], []
        for ch in chars:
            try:
                bm = rasterize_glyph(m["font"], ord(ch), m["size"], m["margin"])
            except (GlyphMissing, GlyphBlank):
                skipped.append(ch)
                continue
            kept.append(ch)
            planes.append(bm.pixels)
        if not kept:
            return np.zeros((0, 1, m["size"], m["size"])), kept, skipped
        x = np.stack(planes)[:, None].astype(m["ckpt"].config.np_dtype)
        return x, kept, skipped

    def render(x, weights) -> list[bytes]:
        m = state()
        if x.shape[0] == 0:
            return []
        out = forward(m["ckpt"].params, x, weights, m["ckpt"].config)
        return [_png_bytes(out[i, 0]) for i in range(out.shape[0])]

    @app.get("/styles")
    async def styles():
        m = state()
        return {"K": m["catalog"]["K"], "styles": m["catalog"]["styles"]}

    @app.get("/healthz")
    async def healthz():
        if app.state.model is None:
            return JSONResponse({"status": "loading"}, status_code=503)
        m = app.state.model
        return {
            "status": "ok",
            "checkpoint_hash": m["ckpt"].content_hash,
            "K": m["ckpt"].config.style_count,
            "input_size": m["ckpt"].config.input_size,
        }

    @app.post("/generate")
    async def generate(body: GenerateRequest, format: str = "json"):
        m = state()
        chars = check_chars(body.chars, app.state.config.max_chars)
        weights = check_weights(body.weights, m["ckpt"].config.style_count)
        x, kept, skipped = raster_batch(chars)
        images = render(x, weights)
        if format == "raw":
            parts = []
            for ch, png in zip(kept, images):
                parts.append(
                    f"--{MULTIPART_BOUNDARY}\r\n"
                    f"Content-Type: image/png\r\n"
                    f'Content-Disposition: inline; filename="u{ord(ch):04X}.png"\r\n\r\n'.encode()
                    + png
                    + b"\r\n"
                )
            body_bytes = b"".join(parts) + f"--{MULTIPART_BOUNDARY}--\r\n".encode()
            return Response(body_bytes, media_type=f"multipart/mixed; boundary={MULTIPART_BOUNDARY}")
        return {
            "size": m["ckpt"].config.input_size,
            "images": [
                {"char": ch, "png_base64": base64.b64encode(png).decode("ascii")}
                for ch, png in zip(kept, images)
            ],
            "skipped": skipped,
        }

    @app.post("/interpolate")
    async def interpolate(body: InterpolateRequest):
        m = state()
        cfg = app.state.config
        chars = check_chars(body.chars, cfg.max_chars)
        w_from = check_weights(body.from_weights, m["ckpt"].config.style_count)
        w_to = check_weights(body.to_weights, m["ckpt"].config.style_count)
        if not 2 <= body.steps <= cfg.max_steps:
            raise ApiError(400, "StepsOutOfRange", f"steps must be in [2, {cfg.max_steps}]")
        x, kept, skipped = raster_batch(chars)
        frames = []
        for w in interpolation_path(w_from, w_to, body.steps):
            images = render(x, w)
            frames.append(
                [
                    {"char": ch, "png_base64": base64.b64encode(png).decode("ascii")}
                    for ch, png in zip(kept, images)
                ]
            )
        return {"size": m["ckpt"].config.input_size, "steps": body.steps,
                "frames": frames, "skipped": skipped}

    return app


def load_model(app: FastAPI) -> None:
    """Load checkpoint + catalog into app state; requests 503 until done."""
    cfg: ServiceConfig = app.state.config
    ckpt = load_checkpoint(cfg.checkpoint)
    catalog = load_catalog(cfg.catalog)
    if catalog["K"] != ckpt.config.style_count:
        raise ValueError(
            f"catalog K={catalog['K']} does not match checkpoint style_count={ckpt.config.style_count}"
        )
    if catalog["size"] != ckpt.config.input_size:
        raise ValueError(
            f"catalog size={catalog['size']} does not match checkpoint input_size={ckpt.config.input_size}"
        )
    font = load_font(catalog["source_font"])
    app.state.model = {
        "ckpt": ckpt,
        "catalog": catalog,
        "font": font,
        "size": ckpt.config.input_size,
        "margin": catalog.get("margin_fraction", 0.1),
    }
