"""Two-phase training: unconditioned feature learning, then one-hot retraining.

Phase 1 feeds all-zero style vectors (the conditioning channels exist but
carry nothing), phase 2 resumes the same parameters with one-hot vectors.
Loss is mean absolute pixel error; updates use moment-accumulating gradient
descent (Adam-style first/second moments with bias correction).
"""

import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .errors import DatasetEmpty, NumericalDivergence, ShapeMismatch
from .model import ModelConfig, backward, forward, init_model

DIVERGENCE_LOSS = 1e3
ADAM_B1 = 0.9
ADAM_B2 = 0.999
ADAM_EPS = 1e-8
PLATEAU_PATIENCE = 3


@dataclass
class TrainConfig:
    phase: int
    steps: int
    batch_size: int = 16
    learning_rate: float = 2e-4
    lr_decay: float = 0.5
    seed: int = 0
    checkpoint_every: int = 500
    loss: str = "mae"

    def __post_init__(self):
        if self.phase not in (1, 2):
            raise ValueError(f"phase must be 1 or 2, got {self.phase}")
        if self.steps < 0:
            raise ValueError(f"steps must be >= 0, got {self.steps}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.loss != "mae":
            raise ValueError(f"unsupported loss {self.loss!r}")


@dataclass
class TrainReport:
    losses: list = field(default_factory=list)
    phases: list = field(default_factory=list)  # phase tag per step
    val_mae: dict | None = None
    wall_clock: float = 0.0
    final_checkpoint: str | None = None


class AdamState:
    def __init__(self, params, learning_rate):
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0
        self.learning_rate = learning_rate


def l1_loss_and_grad(out, target):
    diff = out - target
    loss = float(np.abs(diff).mean())
    dout = np.sign(diff) / diff.size
    return loss, dout


def batch_arrays(samples, dtype=np.float64):
    """Stack SamplePairs into (sources, targets, style_ids)."""
    x = np.stack([s.source.pixels for s in samples])[:, None].astype(dtype)
    y = np.stack([s.target.pixels for s in samples])[:, None].astype(dtype)
    sid = np.array([s.style_id for s in samples], dtype=np.int64)
    return x, y, sid


def train_step(params, config: ModelConfig, x, y, weights, opt: AdamState):
    """One optimization step; returns (updated params, loss)."""
    cache = {}
    out = forward(params, x, weights, config, cache)
    loss, dout = l1_loss_and_grad(out, y)
    if not np.isfinite(loss) or loss > DIVERGENCE_LOSS:
        raise NumericalDivergence(f"loss {loss} is not a usable value")
    grads = backward(params, cache, dout, config)
    for name, g in grads.items():
        if not np.isfinite(g).all():
            raise NumericalDivergence(f"non-finite gradient in {name}")
    opt.t += 1
    c1 = 1.0 - ADAM_B1 ** opt.t
    c2 = 1.0 - ADAM_B2 ** opt.t
    new_params = {}
    for name, p in params.items():
        g = grads[name]
        opt.m[name] = ADAM_B1 * opt.m[name] + (1.0 - ADAM_B1) * g
        opt.v[name] = ADAM_B2 * opt.v[name] + (1.0 - ADAM_B2) * g * g
        step = opt.learning_rate * (opt.m[name] / c1) / (np.sqrt(opt.v[name] / c2) + ADAM_EPS)
        new_params[name] = p - step.astype(p.dtype)
    return new_params, loss


def evaluate_forward(forward_fn, samples, k, batch_size=32, dtype=np.float64):
    """Per-style MAE table for any (batch, weights) -> outputs callable."""
    if not samples:
        raise DatasetEmpty("evaluation split is empty")
    x, y, sid = batch_arrays(samples, dtype)
    eye = np.eye(k, dtype=dtype)
    errs = np.empty(len(samples))
    for lo in range(0, len(samples), batch_size):
        hi = min(lo + batch_size, len(samples))
        out = forward_fn(x[lo:hi], eye[sid[lo:hi]])
        errs[lo:hi] = np.abs(out - y[lo:hi]).mean(axis=(1, 2, 3))
    per_style = {int(s): float(errs[sid == s].mean()) for s in np.unique(sid)}
    return {"per_style": per_style, "overall": float(errs.mean())}


def evaluate(ckpt: Checkpoint, samples, batch_size=32):
    """Evaluation-mode per-style MAE for a checkpoint on a dataset split."""
    if samples and samples[0].source.size != ckpt.config.input_size:
        raise ShapeMismatch(
            f"checkpoint expects {ckpt.config.input_size}px bitmaps, dataset has {samples[0].source.size}px"
        )
    fn = lambda xb, wb: forward(ckpt.params, xb, wb, ckpt.config)
    return evaluate_forward(fn, samples, ckpt.config.style_count, batch_size, ckpt.config.np_dtype)


class _MetricsLog:
    def __init__(self, path):
        self._fh = open(path, "w", encoding="utf-8") if path else None

    def step(self, step, phase, loss):
        if self._fh:
            self._fh.write(f"{step}\t{phase}\t{loss:.8f}\n")

    def eval(self, table):
        if self._fh:
            for sid, mae in sorted(table["per_style"].items()):
                self._fh.write(f"eval\t{sid}\t{mae:.8f}\n")
            self._fh.flush()

    def lr(self, phase, value):
        if self._fh:
            self._fh.write(f"lr\t{phase}\t{value:.3e}\n")

    def close(self):
        if self._fh:
            self._fh.close()


def fit(train_samples, val_samples, config: ModelConfig, phase1: TrainConfig, phase2: TrainConfig,
        out_dir=None, log_path=None, progress=None):
    """Run both phases; returns (final Checkpoint, TrainReport).

    Checkpoints land in out_dir as ckpt_phase{P}_step{N}; on divergence the
    last written checkpoint stays on disk and NumericalDivergence is raised.
    """
    if not train_samples:
        raise DatasetEmpty("training split is empty")
    out_dir = Path(out_dir) if out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    log = _MetricsLog(log_path)
    dtype = config.np_dtype
    k = config.style_count
    x_all, y_all, sid_all = batch_arrays(train_samples, dtype)
    if x_all.shape[2] != config.input_size:
        raise ShapeMismatch(f"dataset bitmaps are {x_all.shape[2]}px, config expects {config.input_size}px")
    eye = np.eye(k, dtype=dtype)

    params = init_model(config)
    report = TrainReport()
    t0 = time.time()
    global_step = 0
    last_path = None

    def save(phase, step_in_phase):
        nonlocal last_path
        if out_dir:
            p = out_dir / f"ckpt_phase{phase}_step{step_in_phase}"
            save_checkpoint(p, config, params, phase, step_in_phase)
            last_path = p
        return last_path

    try:
        for cfg in (phase1, phase2):
            if cfg.steps == 0:
                continue
            rng = np.random.default_rng(cfg.seed)
            opt = AdamState(params, cfg.learning_rate)
            best_val = np.inf
            stall = 0
            for step in range(1, cfg.steps + 1):
                idx = rng.integers(0, len(train_samples), cfg.batch_size)
                w = np.zeros((cfg.batch_size, k), dtype=dtype) if cfg.phase == 1 else eye[sid_all[idx]]
                params, loss = train_step(params, config, x_all[idx], y_all[idx], w, opt)
                global_step += 1
                report.losses.append(loss)
                report.phases.append(cfg.phase)
                log.step(global_step, cfg.phase, loss)
                if progress and global_step % 50 == 0:
                    progress(global_step, cfg.phase, loss)
                if cfg.checkpoint_every and step % cfg.checkpoint_every == 0:
                    save(cfg.phase, step)
                    if val_samples:
                        fn = lambda xb, wb: forward(params, xb, wb, config)
                        table = evaluate_forward(fn, val_samples, k, dtype=dtype)
                        log.eval(table)
                        if table["overall"] < best_val - 1e-6:
                            best_val = table["overall"]
                            stall = 0
                        else:
                            stall += 1
                            if stall >= PLATEAU_PATIENCE:
                                opt.learning_rate *= cfg.lr_decay
                                log.lr(cfg.phase, opt.learning_rate)
                                stall = 0
            if cfg.checkpoint_every == 0 or cfg.steps % cfg.checkpoint_every != 0:
                save(cfg.phase, cfg.steps)
    finally:
        log.close()

    final_phase = phase2.phase if phase2.steps else phase1.phase
    final_steps = phase2.steps if phase2.steps else phase1.steps
    if out_dir:
        final_path = out_dir / f"ckpt_phase{final_phase}_step{final_steps}"
        if not final_path.exists():
            save_checkpoint(final_path, config, params, final_phase, final_steps)
        ckpt = load_checkpoint(final_path)
        report.final_checkpoint = str(final_path)
    else:
        from .checkpoint import Checkpoint as _C

        ckpt = _C(config=config, params=params, phase=final_phase, step=final_steps, content_hash="")
    if val_samples:
        report.val_mae = evaluate(ckpt, val_samples)
    report.wall_clock = time.time() - t0
    return ckpt, report
