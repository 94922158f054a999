"""Paired-glyph dataset construction, serialization, and splitting.

Container layout: one canonical-JSON manifest line, then the samples as raw
8-bit arrays in (codepoint, style_id) order, source bitmap before target.
The manifest's content_hash is a sha256 over the manifest (minus the hash
field itself) plus the payload, so a rebuild from identical inputs matches
bit for bit.
"""

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DatasetEmpty, GlyphBlank, GlyphMissing, SplitDegenerate
from .raster import FontOutlines, GlyphBitmap, load_font

FORMAT = "glyphforge-dataset/1"


@dataclass(frozen=True)
class StyleCatalog:
    """Ordered target styles; ids are exactly 0..K-1."""

    entries: tuple  # of (style_id, name, font_source)

    def __post_init__(self):
        ids = [e[0] for e in self.entries]
        names = [e[1] for e in self.entries]
        if ids != list(range(len(ids))):
            raise ValueError(f"style ids must be 0..K-1 with no gaps, got {ids}")
        if len(set(names)) != len(names):
            raise ValueError(f"style names must be unique, got {names}")

    @property
    def k(self) -> int:
        return len(self.entries)

    def id_for(self, name: str):
        for sid, nm, _ in self.entries:
            if nm == name:
                return sid
        return None

    def name_for(self, style_id: int) -> str:
        return self.entries[style_id][1]


@dataclass
class SamplePair:
    source: GlyphBitmap
    target: GlyphBitmap
    style_id: int


@dataclass
class DatasetManifest:
    source_font: dict  # {"path":, "sha256":}
    target_fonts: list  # [{"path":, "sha256":, "style_id":, "name":}]
    charset: list
    size: int
    margin_fraction: float
    split_seed: int
    sample_index: list  # [[codepoint, style_id], ...]
    content_hash: str = ""
    format: str = FORMAT

    @property
    def k(self) -> int:
        return len(self.target_fonts)

    @property
    def source_style_id(self) -> int:
        # the designated source style sits one past the K target ids
        return self.k

    def canonical_json(self, with_hash: bool = True) -> str:
        doc = {
            "format": self.format,
            "source_font": self.source_font,
            "target_fonts": self.target_fonts,
            "charset": self.charset,
            "size": self.size,
            "margin_fraction": self.margin_fraction,
            "split_seed": self.split_seed,
            "sample_index": self.sample_index,
        }
        if with_hash:
            doc["content_hash"] = self.content_hash
        return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=True)

    def catalog(self) -> StyleCatalog:
        return StyleCatalog(tuple((t["style_id"], t["name"], t["path"]) for t in self.target_fonts))


@dataclass
class SkipEntry:
    codepoint: int
    style_id: int
    reason: str

    def line(self) -> str:
        return f"U+{self.codepoint:04X}\t{self.style_id}\t{self.reason}"


def _sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _font_name(path) -> str:
    return Path(path).stem


def quantize(pixels: np.ndarray) -> np.ndarray:
    return np.rint(pixels * 255.0).astype(np.uint8)


def dequantize(raw: np.ndarray) -> np.ndarray:
    return raw.astype(np.float64) / 255.0


def build_dataset(source_font, target_fonts, charset, size, margin_fraction=0.1,
                  split_seed=0, workers=1):
    """Rasterize all (codepoint, target style) pairs.

    Returns (manifest, samples, skips).  Samples are ordered by
    (codepoint, style_id); failures land in the skip report instead of
    being silently dropped.
    """
    if not target_fonts:
        raise ValueError("at least one target font is required")
    if not charset:
        raise DatasetEmpty("charset is empty")
    from .raster import rasterize_glyph

    src = load_font(source_font)
    targets = [load_font(p) for p in target_fonts]
    k = len(targets)
    source_style = k

    def do_codepoint(cp):
        pairs, skips = [], []
        try:
            sbm = rasterize_glyph(src, cp, size, margin_fraction, style_id=source_style)
        except GlyphMissing:
            return [], [SkipEntry(cp, source_style, "missing(source)")]
        except GlyphBlank:
            return [], [SkipEntry(cp, source_style, "blank(source)")]
        for sid, tf in enumerate(targets):
            try:
                tbm = rasterize_glyph(tf, cp, size, margin_fraction, style_id=sid)
            except GlyphMissing:
                skips.append(SkipEntry(cp, sid, "missing"))
                continue
            except GlyphBlank:
                skips.append(SkipEntry(cp, sid, "blank"))
                continue
            pairs.append(SamplePair(source=sbm, target=tbm, style_id=sid))
        return pairs, skips

    samples, skips = [], []
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(do_codepoint, charset))
    else:
        results = [do_codepoint(cp) for cp in charset]
    for pairs, sk in results:
        samples.extend(pairs)
        skips.extend(sk)
    samples.sort(key=lambda s: (s.source.codepoint, s.style_id))
    skips.sort(key=lambda s: (s.codepoint, s.style_id))
    if not samples:
        raise DatasetEmpty("no (codepoint, style) pair rasterized successfully")

    manifest = DatasetManifest(
        source_font={"path": str(source_font), "sha256": _sha256_file(source_font)},
        target_fonts=[
            {"path": str(p), "sha256": _sha256_file(p), "style_id": i, "name": _font_name(p)}
            for i, p in enumerate(target_fonts)
        ],
        charset=list(charset),
        size=size,
        margin_fraction=margin_fraction,
        split_seed=split_seed,
        sample_index=[[s.source.codepoint, s.style_id] for s in samples],
    )
    manifest.content_hash = _payload_hash(manifest, samples)
    return manifest, samples, skips


def _payload_bytes(samples) -> bytes:
    parts = []
    for s in samples:
        parts.append(quantize(s.source.pixels).tobytes())
        parts.append(quantize(s.target.pixels).tobytes())
    return b"".join(parts)


def _payload_hash(manifest, samples) -> str:
    h = hashlib.sha256()
    h.update(manifest.canonical_json(with_hash=False).encode("utf-8"))
    h.update(b"\n")
    h.update(_payload_bytes(samples))
    return h.hexdigest()


def save_dataset(path, manifest: DatasetManifest, samples) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(manifest.canonical_json().encode("utf-8"))
        f.write(b"\n")
        f.write(_payload_bytes(samples))
    return path


def load_dataset(path):
    """Read a container file back into (manifest, samples); verifies the hash."""
    with open(path, "rb") as f:
        header = f.readline()
        payload = f.read()
    doc = json.loads(header.decode("utf-8"))
    if doc.get("format") != FORMAT:
        raise ValueError(f"not a {FORMAT} file: {path}")
    stored_hash = doc.pop("content_hash", "")
    manifest = DatasetManifest(
        source_font=doc["source_font"],
        target_fonts=doc["target_fonts"],
        charset=doc["charset"],
        size=doc["size"],
        margin_fraction=doc["margin_fraction"],
        split_seed=doc["split_seed"],
        sample_index=doc["sample_index"],
        content_hash=stored_hash,
    )
    size = manifest.size
    n = len(manifest.sample_index)
    raw = np.frombuffer(payload, dtype=np.uint8)
    if raw.size != n * 2 * size * size:
        raise ValueError(f"payload size {raw.size} does not match {n} samples of {size}x{size}")
    raw = raw.reshape(n, 2, size, size)
    samples = []
    for idx, (cp, sid) in enumerate(manifest.sample_index):
        sbm = GlyphBitmap(cp, manifest.source_style_id, dequantize(raw[idx, 0]), size)
        tbm = GlyphBitmap(cp, sid, dequantize(raw[idx, 1]), size)
        samples.append(SamplePair(source=sbm, target=tbm, style_id=sid))
    if _payload_hash(manifest, samples) != stored_hash:
        raise ValueError(f"content hash mismatch in {path}")
    return manifest, samples


def write_skip_report(path, skips) -> Path:
    path = Path(path)
    path.write_text("".join(e.line() + "\n" for e in skips), encoding="utf-8")
    return path


def split_dataset(manifest, samples, val_fraction: float, seed: int):
    """Partition by codepoint so no held-out character leaks into train."""
    if not 0.0 <= val_fraction < 1.0:
        raise ValueError(f"val_fraction must be in [0, 1), got {val_fraction}")
    cps = sorted({s.source.codepoint for s in samples})
    n_val = int(round(len(cps) * val_fraction))
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(cps))
    val_cps = {cps[i] for i in perm[:n_val]}
    train = [s for s in samples if s.source.codepoint not in val_cps]
    val = [s for s in samples if s.source.codepoint in val_cps]
    if not train:
        raise SplitDegenerate(f"val_fraction={val_fraction} leaves no training codepoints")
    return train, val


def write_catalog(path, manifest: DatasetManifest) -> Path:
    """Companion catalog document used by generation tools and the service."""
    doc = {
        "K": manifest.k,
        "styles": [{"id": t["style_id"], "name": t["name"]} for t in manifest.target_fonts],
        "source_font": manifest.source_font["path"],
        "source_style_id": manifest.source_style_id,
        "size": manifest.size,
        "margin_fraction": manifest.margin_fraction,
    }
    path = Path(path)
    path.write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    return path


def load_catalog(path) -> dict:
    doc = json.loads(Path(path).read_text("utf-8"))
    ids = [s["id"] for s in doc["styles"]]
    names = [s["name"] for s in doc["styles"]]
    if ids != list(range(doc["K"])) or len(set(names)) != len(names):
        raise ValueError(f"malformed catalog {path}")
    return doc
