import hashlib

import pytest

from conftest import target_paths
from glyphforge.cli import run


def _targets_arg(fonts):
    return ",".join(str(p) for p in target_paths(fonts))


@pytest.fixture(scope="module")
def built(tmp_path_factory, font_set):
    out = tmp_path_factory.mktemp("cli_ds")
    rc = run(["dataset-build", "--source", str(font_set["plain"]),
              "--targets", _targets_arg(font_set), "--charset", "builtin:top4",
              "--size", "32", "--out", str(out)])
    assert rc == 0
    return out


@pytest.fixture(scope="module")
def trained(tmp_path_factory, built):
    out = tmp_path_factory.mktemp("cli_run")
    rc = run(["train", "--dataset", str(built / "dataset.bin"), "--out", str(out),
              "--depth", "3", "--base", "8", "--cap", "64", "--phase1-steps", "4",
              "--phase2-steps", "6", "--batch", "4", "--checkpoint-every", "0", "--quiet"])
    assert rc == 0
    return out / "ckpt_phase2_step6"


def test_dataset_build_summary(capsys, tmp_path, font_set):
    rc = run(["dataset-build", "--source", str(font_set["plain"]),
              "--targets", _targets_arg(font_set), "--charset", "builtin:top2",
              "--size", "32", "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert rc == 0
    assert "samples=8 skipped=0" in out
    assert (tmp_path / "dataset.bin").is_file()
    assert (tmp_path / "catalog.json").is_file()
    assert (tmp_path / "skip_report.txt").is_file()


def test_dataset_build_missing_font(capsys, tmp_path):
    rc = run(["dataset-build", "--source", "/no/such/font.ttf", "--targets", "/also/missing.ttf",
              "--charset", "builtin:top2", "--out", str(tmp_path)])
    err = capsys.readouterr().err
    assert rc == 2
    assert err.startswith("error: font not found")


def test_size_not_power_of_two_is_usage_error(capsys, tmp_path, font_set):
    with pytest.raises(SystemExit) as exc:
        run(["dataset-build", "--source", str(font_set["plain"]),
             "--targets", _targets_arg(font_set), "--charset", "builtin:top2",
             "--size", "100", "--out", str(tmp_path)])
    assert exc.value.code == 1
    assert "error:" in capsys.readouterr().err


def test_unknown_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        run(["transmogrify"])
    assert exc.value.code == 1


def test_dataset_build_reproducible_hash(capsys, tmp_path, font_set):
    argv = lambda out: ["dataset-build", "--source", str(font_set["plain"]),
                        "--targets", _targets_arg(font_set), "--charset", "builtin:top2",
                        "--size", "32", "--out", str(out)]
    run(argv(tmp_path / "a"))
    run(argv(tmp_path / "b"))
    assert (tmp_path / "a/dataset.bin").read_bytes() == (tmp_path / "b/dataset.bin").read_bytes()


def test_train_phase2_only(capsys, tmp_path, built):
    rc = run(["train", "--dataset", str(built / "dataset.bin"), "--out", str(tmp_path),
              "--depth", "3", "--base", "8", "--cap", "64", "--phase1-steps", "0",
              "--phase2-steps", "3", "--batch", "4", "--checkpoint-every", "0", "--quiet"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "final_train_mae=" in out
    assert (tmp_path / "ckpt_phase2_step3").is_file()


def test_train_divergence_exits_2_and_keeps_checkpoint(capsys, tmp_path, built, monkeypatch):
    import numpy as np

    import glyphforge.train as train_mod

    calls = {"n": 0}
    real = train_mod.l1_loss_and_grad

    def poisoned(out, target):
        calls["n"] += 1
        if calls["n"] > 2:
            return float("nan"), np.zeros_like(out)
        return real(out, target)

    monkeypatch.setattr(train_mod, "l1_loss_and_grad", poisoned)
    rc = run(["train", "--dataset", str(built / "dataset.bin"), "--out", str(tmp_path),
              "--depth", "3", "--base", "8", "--cap", "64", "--phase1-steps", "5",
              "--phase2-steps", "5", "--batch", "4", "--checkpoint-every", "2", "--quiet"])
    err = capsys.readouterr().err
    assert rc == 2
    assert "error: numerical divergence" in err
    assert (tmp_path / "ckpt_phase1_step2").is_file()  # last good checkpoint retained


def test_gen_mix_equals_one_hot_output(tmp_path, built, trained):
    out_mix = tmp_path / "mix.png"
    out_hot = tmp_path / "hot.png"
    base = ["gen", "--checkpoint", str(trained), "--catalog", str(built / "catalog.json"),
            "--chars", "的一"]
    assert run(base + ["--mix", "broad=1", "--out", str(out_mix)]) == 0
    assert run(base + ["--mix", "0=1.0", "--out", str(out_hot)]) == 0
    assert hashlib.sha256(out_mix.read_bytes()).hexdigest() == hashlib.sha256(out_hot.read_bytes()).hexdigest()


def test_interpolate_writes_frames_with_exact_endpoints(tmp_path, built, trained):
    frames = tmp_path / "frames"
    rc = run(["interpolate", "--checkpoint", str(trained), "--catalog", str(built / "catalog.json"),
              "--chars", "的", "--from", "broad=1", "--to", "medium=1", "--steps", "3",
              "--out", str(frames)])
    assert rc == 0
    files = sorted(frames.glob("frame_*.png"))
    assert len(files) == 3
    gen_a = tmp_path / "even_a.png"
    gen_b = tmp_path / "even_b.png"
    run(["gen", "--checkpoint", str(trained), "--catalog", str(built / "catalog.json"),
         "--chars", "的", "--mix", "broad=1", "--out", str(gen_a)])
    run(["gen", "--checkpoint", str(trained), "--catalog", str(built / "catalog.json"),
         "--chars", "的", "--mix", "medium=1", "--out", str(gen_b)])
    assert files[0].read_bytes() == gen_a.read_bytes()
    assert files[-1].read_bytes() == gen_b.read_bytes()


def test_gradcheck_cli(capsys):
    rc = run(["gradcheck", "--trials", "1"])
    out = capsys.readouterr().out
    assert rc == 0
    line = [l for l in out.splitlines() if l.startswith("max_rel_error=")][0]
    assert float(line.split("=")[1]) < 1e-3


def test_eval_cli(capsys, built, trained):
    rc = run(["eval", "--checkpoint", str(trained), "--dataset", str(built / "dataset.bin")])
    out = capsys.readouterr().out
    assert rc == 0
    assert "overall=" in out
    eval_lines = [l for l in out.splitlines() if l.startswith("eval\t")]
    assert len(eval_lines) == 4
