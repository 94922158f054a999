"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 runtime error.  Runtime failures
print a single machine-greppable line starting with `error:`.
"""

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .errors import GlyphForgeError, NumericalDivergence


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _power_of_two(text):
    value = int(text)
    if value < 8 or value & (value - 1):
        raise argparse.ArgumentTypeError(f"{value} is not a power of two >= 8")
    return value


def _env(name, default):
    return os.environ.get(f"GLYPHFORGE_{name}", default)


def _build_parser() -> _Parser:
    p = _Parser(prog="glyphforge", description="Chinese font style transfer toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("dataset-build", parents=[], help="rasterize a paired glyph dataset")
    d.add_argument("--source", required=True, help="source font file")
    d.add_argument("--targets", required=True, help="comma-separated target font files")
    d.add_argument("--charset", required=True, help="builtin:topN, U+A..U+B, or a text file")
    d.add_argument("--size", type=_power_of_two, default=64)
    d.add_argument("--margin", type=float, default=0.1)
    d.add_argument("--split-seed", type=int, default=0)
    d.add_argument("--workers", type=int, default=1)
    d.add_argument("--out", required=True, help="output directory")

    t = sub.add_parser("train", help="two-phase training run")
    t.add_argument("--dataset", required=True)
    t.add_argument("--out", required=True)
    t.add_argument("--size", type=_power_of_two, default=None, help="must match the dataset")
    t.add_argument("--depth", type=int, default=4)
    t.add_argument("--base", type=int, default=32)
    t.add_argument("--cap", type=int, default=512)
    t.add_argument("--k", type=int, default=None, help="style count; defaults to the dataset's")
    t.add_argument("--seed", type=int, default=7)
    t.add_argument("--dtype", choices=("float32", "float64"), default="float32")
    t.add_argument("--phase1-steps", type=int, default=500)
    t.add_argument("--phase2-steps", type=int, default=1500)
    t.add_argument("--batch", type=int, default=16)
    t.add_argument("--lr", type=float, default=2e-4)
    t.add_argument("--lr-decay", type=float, default=0.5)
    t.add_argument("--checkpoint-every", type=int, default=500)
    t.add_argument("--val-fraction", type=float, default=0.0)
    t.add_argument("--quiet", action="store_true")

    e = sub.add_parser("eval", help="per-style MAE of a checkpoint on a dataset")
    e.add_argument("--checkpoint", required=True)
    e.add_argument("--dataset", required=True)
    e.add_argument("--split", choices=("all", "train", "val"), default="all")
    e.add_argument("--val-fraction", type=float, default=0.2)

    g = sub.add_parser("gen", help="render characters under one weight vector")
    g.add_argument("--checkpoint", required=True)
    g.add_argument("--catalog", required=True)
    g.add_argument("--chars", required=True)
    g.add_argument("--mix", required=True, help='e.g. "broad=1" or "broad=0.5,slant=0.5"')
    g.add_argument("--out", required=True, help="output PNG")

    i = sub.add_parser("interpolate", help="render an interpolation sequence")
    i.add_argument("--checkpoint", required=True)
    i.add_argument("--catalog", required=True)
    i.add_argument("--chars", required=True)
    i.add_argument("--from", dest="from_mix", required=True)
    i.add_argument("--to", dest="to_mix", required=True)
    i.add_argument("--steps", type=int, required=True)
    i.add_argument("--out", required=True, help="output directory for frame PNGs")

    c = sub.add_parser("gradcheck", help="finite-difference gradient verification")
    c.add_argument("--size", type=_power_of_two, default=8)
    c.add_argument("--depth", type=int, default=2)
    c.add_argument("--base", type=int, default=4)
    c.add_argument("--k", type=int, default=2)
    c.add_argument("--trials", type=int, default=3)
    c.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("serve", help="run the HTTP inference service")
    s.add_argument("--checkpoint", default=_env("CHECKPOINT", None))
    s.add_argument("--catalog", default=_env("CATALOG", None))
    s.add_argument("--host", default=_env("HOST", "127.0.0.1"))
    s.add_argument("--port", type=int, default=int(_env("PORT", "8500")))
    s.add_argument("--max-chars", type=int, default=int(_env("MAX_CHARS", "64")))
    s.add_argument("--max-steps", type=int, default=int(_env("MAX_STEPS", "33")))
    return p


def _cmd_dataset_build(args) -> int:
    from .charset import load_charset
    from .dataset import build_dataset, save_dataset, write_catalog, write_skip_report

    targets = [s for s in args.targets.split(",") if s]
    for font in [args.source, *targets]:
        if not Path(font).is_file():
            raise FileNotFoundError(f"font not found: {font}")
    charset = load_charset(args.charset)
    manifest, samples, skips = build_dataset(
        args.source, targets, charset, args.size, args.margin,
        split_seed=args.split_seed, workers=args.workers,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_dataset(out / "dataset.bin", manifest, samples)
    write_catalog(out / "catalog.json", manifest)
    write_skip_report(out / "skip_report.txt", skips)
    print(f"samples={len(samples)} skipped={len(skips)} hash={manifest.content_hash[:16]}")
    return 0


def _cmd_train(args) -> int:
    from .dataset import load_dataset, split_dataset
    from .model import ModelConfig
    from .train import TrainConfig, evaluate, fit

    manifest, samples = load_dataset(args.dataset)
    if args.size is not None and args.size != manifest.size:
        raise ValueError(f"--size {args.size} does not match dataset size {manifest.size}")
    k = args.k if args.k is not None else manifest.k
    if k != manifest.k:
        raise ValueError(f"--k {k} does not match dataset style count {manifest.k}")
    config = ModelConfig(manifest.size, args.depth, args.base, args.cap, k,
                         seed=args.seed, dtype=args.dtype)
    train, val = split_dataset(manifest, samples, args.val_fraction, manifest.split_seed)
    p1 = TrainConfig(1, args.phase1_steps, args.batch, args.lr, args.lr_decay,
                     seed=args.seed, checkpoint_every=args.checkpoint_every)
    p2 = TrainConfig(2, args.phase2_steps, args.batch, args.lr, args.lr_decay,
                     seed=args.seed + 1, checkpoint_every=args.checkpoint_every)
    out = Path(args.out)
    progress = None
    if not args.quiet:
        progress = lambda step, phase, loss: print(f"step {step}\tphase {phase}\tloss {loss:.5f}")
    ckpt, report = fit(train, val, config, p1, p2, out_dir=out,
                       log_path=out / "metrics.tsv", progress=progress)
    table = evaluate(ckpt, train)
    for sid, mae in sorted(table["per_style"].items()):
        print(f"eval\t{sid}\t{mae:.6f}")
    print(f"final_train_mae={table['overall']:.6f}")
    print(f"checkpoint={report.final_checkpoint}")
    return 0


def _cmd_eval(args) -> int:
    from .checkpoint import load_checkpoint
    from .dataset import load_dataset, split_dataset
    from .train import evaluate

    ckpt = load_checkpoint(args.checkpoint)
    manifest, samples = load_dataset(args.dataset)
    if args.split != "all":
        train, val = split_dataset(manifest, samples, args.val_fraction, manifest.split_seed)
        samples = train if args.split == "train" else val
    table = evaluate(ckpt, samples)
    for sid, mae in sorted(table["per_style"].items()):
        print(f"eval\t{sid}\t{mae:.6f}")
    print(f"overall={table['overall']:.6f}")
    return 0


def _load_gen_context(checkpoint_path, catalog_path):
    from .checkpoint import load_checkpoint
    from .dataset import StyleCatalog, load_catalog
    from .raster import load_font

    ckpt = load_checkpoint(checkpoint_path)
    catalog = load_catalog(catalog_path)
    if catalog["K"] != ckpt.config.style_count:
        raise ValueError(f"catalog K={catalog['K']} != checkpoint K={ckpt.config.style_count}")
    styles = StyleCatalog(tuple((s["id"], s["name"], "") for s in catalog["styles"]))
    font = load_font(catalog["source_font"])
    return ckpt, catalog, styles, font


def _cmd_gen(args) -> int:
    from .mixing import parse_mix_spec, render_specimen, save_sheet

    ckpt, catalog, styles, font = _load_gen_context(args.checkpoint, args.catalog)
    weights = parse_mix_spec(args.mix, styles)
    sheet = render_specimen(ckpt.params, ckpt.config, font, [ord(c) for c in args.chars],
                            [weights], margin_fraction=catalog.get("margin_fraction", 0.1),
                            style_names=[s["name"] for s in catalog["styles"]])
    save_sheet(sheet, args.out)
    for line in sheet.report:
        print(line)
    print(f"wrote {args.out}")
    return 0


def _cmd_interpolate(args) -> int:
    from .mixing import interpolation_path, parse_mix_spec, render_specimen, save_sheet

    ckpt, catalog, styles, font = _load_gen_context(args.checkpoint, args.catalog)
    if args.steps < 2:
        raise ValueError(f"--steps must be >= 2, got {args.steps}")
    w_from = parse_mix_spec(args.from_mix, styles)
    w_to = parse_mix_spec(args.to_mix, styles)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    chars = [ord(c) for c in args.chars]
    names = [s["name"] for s in catalog["styles"]]
    for idx, w in enumerate(interpolation_path(w_from, w_to, args.steps)):
        sheet = render_specimen(ckpt.params, ckpt.config, font, chars, [w],
                                margin_fraction=catalog.get("margin_fraction", 0.1),
                                style_names=names)
        save_sheet(sheet, out / f"frame_{idx:03d}.png")
    print(f"wrote {args.steps} frames to {out}")
    return 0


def _cmd_gradcheck(args) -> int:
    from .gradcheck import gradient_check
    from .model import ModelConfig

    config = ModelConfig(args.size, args.depth, args.base, 512, args.k,
                         seed=args.seed, dtype="float64")
    report = gradient_check(config, trials=args.trials, seed=args.seed)
    for name, err in sorted(report["per_param"].items()):
        print(f"{name}\t{err:.3e}")
    print(f"max_rel_error={report['max_rel_error']:.3e}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app

    if not args.checkpoint or not args.catalog:
        raise ValueError("serve requires --checkpoint and --catalog (or GLYPHFORGE_* env vars)")
    config = ServiceConfig(args.checkpoint, args.catalog, args.host, args.port,
                           args.max_chars, args.max_steps)
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    return 0


_COMMANDS = {
    "dataset-build": _cmd_dataset_build,
    "train": _cmd_train,
    "eval": _cmd_eval,
    "gen": _cmd_gen,
    "interpolate": _cmd_interpolate,
    "gradcheck": _cmd_gradcheck,
    "serve": _cmd_serve,
}


def run(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except NumericalDivergence:
        print("error: numerical divergence", file=sys.stderr)
        return 2
    except (GlyphForgeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
