import hashlib
import json
import os
from pathlib import Path

import numpy as np
import pytest

from glyphforge import fontfactory as ff
from glyphforge.charset import load_charset
from glyphforge.checkpoint import load_checkpoint
from glyphforge.dataset import build_dataset, save_dataset, split_dataset, write_catalog
from glyphforge.model import ModelConfig
from glyphforge.train import TrainConfig, fit

# The desk-scale reference experiment: 4 distinct targets, 32 characters,
# 64px, depth 4, base 32, K=4, 500 + 1500 steps, batch 16, seed 7.
OVERFIT4 = {
    "charset": "builtin:top32",
    "size": 64,
    "depth": 4,
    "base": 32,
    "cap": 512,
    "k": 4,
    "seed": 7,
    "phase1_steps": 500,
    "phase2_steps": 1500,
    "batch": 16,
    "lr": 2e-4,
    "dtype": "float32",
}


@pytest.fixture(scope="session")
def demo_codepoints():
    return load_charset("builtin:top32")


@pytest.fixture(scope="session")
def font_set(tmp_path_factory, demo_codepoints):
    """Source + 4 target fonts covering the top-32 charset (plus spares)."""
    extra = load_charset("builtin:top48")
    out = tmp_path_factory.mktemp("fonts")
    return ff.build_font_set(out, extra)


@pytest.fixture(scope="session")
def gapped_font_set(tmp_path_factory, demo_codepoints):
    """Like font_set but the 'broad' target lacks one top-2 codepoint."""
    out = tmp_path_factory.mktemp("fonts_gapped")
    missing = load_charset("builtin:top2")[1]
    return ff.build_font_set(out, demo_codepoints, skip={"broad": {missing}}), missing


def target_paths(fonts):
    return [fonts[s.name] for s in ff.TARGET_STYLES]


@pytest.fixture(scope="session")
def small_dataset(font_set):
    """8 codepoints x 4 targets at 32px; fast enough for unit tests."""
    charset = load_charset("builtin:top8")
    manifest, samples, skips = build_dataset(
        font_set["plain"], target_paths(font_set), charset, 32, 0.1, split_seed=3
    )
    return manifest, samples, skips


@pytest.fixture()
def tiny_config():
    return ModelConfig(input_size=8, depth=2, base_channels=4, channel_cap=512,
                       style_count=2, seed=0, dtype="float64")


def _code_key() -> str:
    import glyphforge

    root = Path(glyphforge.__file__).parent
    files = sorted(p for p in root.glob("*.py"))
    h = hashlib.sha256()
    for p in files:
        h.update(p.read_bytes())
    h.update(json.dumps(OVERFIT4, sort_keys=True).encode())
    return h.hexdigest()[:16]


def _run_overfit4(workdir: Path) -> dict:
    r = OVERFIT4
    charset = load_charset(r["charset"])
    fonts = ff.build_font_set(workdir / "fonts", charset)
    targets = [fonts[s.name] for s in ff.TARGET_STYLES]
    manifest, samples, _ = build_dataset(
        fonts["plain"], targets, charset, r["size"], 0.1, split_seed=r["seed"]
    )
    ds_dir = workdir / "ds"
    ds_dir.mkdir(exist_ok=True)
    save_dataset(ds_dir / "dataset.bin", manifest, samples)
    write_catalog(ds_dir / "catalog.json", manifest)
    config = ModelConfig(r["size"], r["depth"], r["base"], r["cap"], r["k"],
                         seed=r["seed"], dtype=r["dtype"])
    train, val = split_dataset(manifest, samples, 0.0, r["seed"])
    p1 = TrainConfig(1, r["phase1_steps"], r["batch"], r["lr"], seed=r["seed"], checkpoint_every=500)
    p2 = TrainConfig(2, r["phase2_steps"], r["batch"], r["lr"], seed=r["seed"] + 1, checkpoint_every=500)
    run_dir = workdir / "run"
    ckpt, report = fit(train, val, config, p1, p2, out_dir=run_dir,
                       log_path=run_dir / "metrics.tsv")
    (workdir / "report.json").write_text(json.dumps({
        "losses": report.losses,
        "phases": report.phases,
        "final_checkpoint": report.final_checkpoint,
        "wall_clock": report.wall_clock,
    }))
    (workdir / "DONE").write_text("ok")
    return _load_overfit4(workdir)


def _load_overfit4(workdir: Path) -> dict:
    from glyphforge.dataset import load_dataset

    report = json.loads((workdir / "report.json").read_text())
    manifest, samples = load_dataset(workdir / "ds" / "dataset.bin")
    return {
        "workdir": workdir,
        "fonts_dir": workdir / "fonts",
        "source_font": workdir / "fonts" / "plain.ttf",
        "dataset_path": workdir / "ds" / "dataset.bin",
        "catalog_path": workdir / "ds" / "catalog.json",
        "manifest": manifest,
        "samples": samples,
        "checkpoint_path": Path(report["final_checkpoint"]),
        "checkpoint": load_checkpoint(report["final_checkpoint"]),
        "losses": report["losses"],
        "phases": report["phases"],
        "wall_clock": report["wall_clock"],
    }


@pytest.fixture(scope="session")
def overfit4(tmp_path_factory):
    """The trained desk-scale model; cached across sessions when
    GLYPHFORGE_TEST_CACHE is set (keyed by package source digest)."""
    cache_root = os.environ.get("GLYPHFORGE_TEST_CACHE")
    if cache_root:
        workdir = Path(cache_root) / _code_key()
        if (workdir / "DONE").exists():
            return _load_overfit4(workdir)
        workdir.mkdir(parents=True, exist_ok=True)
        return _run_overfit4(workdir)
    return _run_overfit4(tmp_path_factory.mktemp("overfit4"))


def one_hot_rows(k):
    return np.eye(k, dtype=np.float64)
