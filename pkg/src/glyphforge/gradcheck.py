"""Analytic-vs-finite-difference gradient verification.

Runs the full training loss on a tiny high-precision config and compares
every parameter's analytic gradient against central differences.  The
`corrupt` hook negates one array's analytic gradient so tests can prove the
check has teeth.
"""

import numpy as np

from .model import ModelConfig, backward, forward, init_model
from .train import l1_loss_and_grad

TINY_CONFIG = ModelConfig(input_size=8, depth=2, base_channels=4, channel_cap=512,
                          style_count=2, seed=0, dtype="float64")


def gradient_check(config: ModelConfig = TINY_CONFIG, trials: int = 3, seed: int = 0,
                   h: float = 1e-4, batch_size: int = 2, corrupt: str | None = None) -> dict:
    """Returns {"max_rel_error", "per_param", "trials"}.

    Relative error per element: |ga - gfd| / max(1e-8, |ga| + |gfd|).
    """
    if config.dtype != "float64":
        raise ValueError("gradient checking requires a float64 config")
    per_param: dict[str, float] = {}
    for trial in range(trials):
        cfg = ModelConfig(config.input_size, config.depth, config.base_channels,
                          config.channel_cap, config.style_count,
                          seed=config.seed + trial, dtype="float64")
        params = init_model(cfg)
        rng = np.random.default_rng(seed * 1000 + trial)
        x = rng.uniform(0.0, 1.0, (batch_size, 1, cfg.input_size, cfg.input_size))
        y = rng.uniform(0.0, 1.0, (batch_size, 1, cfg.input_size, cfg.input_size))
        w = rng.uniform(-0.5, 1.5, (batch_size, cfg.style_count))

        cache = {}
        out = forward(params, x, w, cfg, cache)
        _, dout = l1_loss_and_grad(out, y)
        grads = backward(params, cache, dout, cfg)
        if corrupt is not None:
            grads[corrupt] = -grads[corrupt]

        def loss_at() -> float:
            return float(np.abs(forward(params, x, w, cfg) - y).mean())

        for name, p in params.items():
            ga = grads[name]
            flat = p.reshape(-1)
            worst = per_param.get(name, 0.0)
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + h
                lp = loss_at()
                flat[i] = orig - h
                lm = loss_at()
                flat[i] = orig
                gfd = (lp - lm) / (2.0 * h)
                gan = float(ga.reshape(-1)[i])
                rel = abs(gan - gfd) / max(1e-8, abs(gan) + abs(gfd))
                if rel > worst:
                    worst = rel
            per_param[name] = worst
    return {
        "max_rel_error": max(per_param.values()),
        "per_param": per_param,
        "trials": trials,
    }
