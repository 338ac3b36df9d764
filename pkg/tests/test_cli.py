import json
import subprocess
import sys

import numpy as np
import pytest

from htg_eval.cli import main
from htg_eval.data_model import (
    generate_fixture_dataset,
    save_id_list,
    save_manifest,
    save_transcriptions,
    write_fixture_dataset,
    write_htgf,
)


@pytest.fixture
def fixture_dir(tmp_path):
    fx = generate_fixture_dataset(3, 24, seed=0, hypothesis_error_rate=0.2, oov_fraction=0.3)
    paths = write_fixture_dataset(fx, tmp_path / "fx")
    return fx, paths, tmp_path


def run_cli(args, capsysbinary):
    code = main(list(args))
    captured = capsysbinary.readouterr()
    return code, captured.out, captured.err


def test_fid_identical_files(tmp_path, capsysbinary, rng):
    data = rng.normal(size=(20, 4)).astype(np.float32)
    path = tmp_path / "r.htgf"
    write_htgf(path, [f"s{i}" for i in range(20)], data)
    code, out, _ = run_cli(["fid", "--real", str(path), "--gen", str(path)], capsysbinary)
    assert code == 0
    payload = json.loads(out)
    assert payload["metric"] == "fid"
    assert abs(payload["value"]) < 1e-8
    assert "inputs" in payload["metadata"]


def test_unknown_subcommand(capsysbinary):
    code, _, _ = run_cli(["bogus"], capsysbinary)
    assert code == 2


def test_missing_required_option(capsysbinary):
    code, _, _ = run_cli(["fid"], capsysbinary)
    assert code == 2


def test_domain_error_is_typed_json_on_stderr(fixture_dir, capsysbinary):
    fx, paths, tmp = fixture_dir
    # The fixture transcription log mixes IV and OOV samples: contamination.
    code, out, err = run_cli(
        [
            "htg-oov",
            "--records",
            str(paths["transcriptions"]),
            "--manifest",
            str(paths["manifest"]),
        ],
        capsysbinary,
    )
    assert code == 1
    assert json.loads(err)["error"] == "VocabViolation"


def test_htg_oov_clean(fixture_dir, capsysbinary):
    fx, paths, tmp = fixture_dir
    oov_ids = {e.sample_id for e in fx.manifest.samples if e.vocab_tag.value == "OOV"}
    records = [r for r in fx.transcriptions if r.sample_id in oov_ids]
    save_transcriptions(records, tmp / "oov.jsonl")
    code, out, _ = run_cli(
        ["htg-oov", "--records", str(tmp / "oov.jsonl"), "--manifest", str(paths["manifest"])],
        capsysbinary,
    )
    assert code == 0
    assert json.loads(out)["metric"] == "HTG_OOV"


def test_cer_and_filter_flow(fixture_dir, capsysbinary):
    fx, paths, tmp = fixture_dir
    code, out, _ = run_cli(["cer", "--records", str(paths["transcriptions"])], capsysbinary)
    assert code == 0
    micro = json.loads(out)["micro_cer"]
    assert micro > 0

    kept_path = tmp / "kept.txt"
    code, out, _ = run_cli(
        [
            "filter",
            "--records",
            str(paths["transcriptions"]),
            "--kept-out",
            str(kept_path),
        ],
        capsysbinary,
    )
    assert code == 0
    payload = json.loads(out)
    clean = [r.sample_id for r in fx.transcriptions if r.hypothesis == r.reference]
    assert payload["kept_ids"] == clean
    assert kept_path.read_text().split() == clean


def test_htg_htr_and_style_flow(fixture_dir, capsysbinary):
    fx, paths, tmp = fixture_dir
    ids = [r.sample_id for r in fx.transcriptions]
    save_id_list(ids, tmp / "test_ids.txt")
    code, out, _ = run_cli(
        [
            "htg-htr",
            "--records",
            str(paths["transcriptions"]),
            "--split",
            str(tmp / "test_ids.txt"),
        ],
        capsysbinary,
    )
    assert code == 0
    assert json.loads(out)["metric"] == "HTG_HTR"

    save_id_list(ids, tmp / "eval_ids.txt")
    code, out, _ = run_cli(
        ["htg-style", "--pred", str(paths["style"]), "--split", str(tmp / "eval_ids.txt")],
        capsysbinary,
    )
    assert code == 0
    assert json.loads(out)["value"] == 100.0

    (tmp / "wrong_ids.txt").write_text("other-id\n")
    code, _, err = run_cli(
        ["htg-style", "--pred", str(paths["style"]), "--split", str(tmp / "wrong_ids.txt")],
        capsysbinary,
    )
    assert code == 1
    assert json.loads(err)["error"] == "SplitViolation"


def test_style_split_command(fixture_dir, capsysbinary):
    fx, paths, tmp = fixture_dir
    code, out, _ = run_cli(
        [
            "style-split",
            "--manifest",
            str(paths["manifest"]),
            "--fraction",
            "0.7",
            "--seed",
            "0",
            "--train-out",
            str(tmp / "train.txt"),
            "--eval-out",
            str(tmp / "eval.txt"),
        ],
        capsysbinary,
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["n_train"] + payload["n_eval"] == len(fx.manifest)


def test_gs_command(tmp_path, capsysbinary, rng):
    pts = rng.normal(size=(40, 3)).astype(np.float32)
    path_a = tmp_path / "a.htgf"
    path_b = tmp_path / "b.htgf"
    write_htgf(path_a, [f"a{i}" for i in range(40)], pts)
    write_htgf(path_b, [f"b{i}" for i in range(40)], pts)
    code, out, _ = run_cli(
        [
            "gs",
            "--a",
            str(path_a),
            "--b",
            str(path_b),
            "--landmarks",
            "8",
            "--repeats",
            "3",
            "--seed",
            "0",
        ],
        capsysbinary,
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["gs"] == 0.0
    assert len(payload["mrlt_a"]) == 100


def test_report_markdown(tmp_path, capsysbinary):
    values = {"GANwriting": {"FID": 37.41, "KID": 0.0196}}
    values_path = tmp_path / "values.json"
    values_path.write_text(json.dumps(values))
    code, out, _ = run_cli(
        ["report", "--values", str(values_path), "--format", "markdown"], capsysbinary
    )
    assert code == 0
    assert out.decode().splitlines()[0] == "| Method | FID | KID |"


def test_compare_command(tmp_path, capsysbinary):
    from htg_eval.data_model import TranscriptionRecord

    base = [TranscriptionRecord("a", "hello", "hello"), TranscriptionRecord("b", "word", "ward")]
    variant = [TranscriptionRecord("a", "hello", "hello"), TranscriptionRecord("b", "word", "word")]
    save_transcriptions(base, tmp_path / "base.jsonl")
    save_transcriptions(variant, tmp_path / "var.jsonl")
    code, out, _ = run_cli(
        [
            "compare",
            "--baseline",
            str(tmp_path / "base.jsonl"),
            "--variant",
            f"better={tmp_path / 'var.jsonl'}",
        ],
        capsysbinary,
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["variants"]["better"]["improved"]


def test_validate_and_fixture_commands(tmp_path, capsysbinary):
    code, out, _ = run_cli(
        ["fixture", "--writers", "2", "--samples", "6", "--seed", "1", "--out-dir", str(tmp_path / "fx")],
        capsysbinary,
    )
    assert code == 0
    feats = json.loads(out)["paths"]["features"]
    code, out, _ = run_cli(["validate", "--path", feats], capsysbinary)
    assert code == 0
    assert json.loads(out)["ok"] is True


def test_pixel_command(tmp_path, capsysbinary):
    fx = generate_fixture_dataset(2, 4, seed=2)
    paths = write_fixture_dataset(fx, tmp_path)
    ids = list(fx.images)
    pairs = [{"a": f"images/{ids[0]}.png", "b": f"images/{ids[0]}.png"}]
    pairs_path = tmp_path / "pairs.jsonl"
    pairs_path.write_text("\n".join(json.dumps(p) for p in pairs) + "\n")
    code, out, _ = run_cli(["pixel", "--pairs", str(pairs_path)], capsysbinary)
    assert code == 0
    payload = json.loads(out)
    assert payload["n_pairs"] == 1
    assert payload["identical_pairs"] == 1
    assert payload["per_pair"]["psnr"] == ["inf"]


def test_lpips_command(tmp_path, capsysbinary, rng):
    maps = rng.normal(size=(3, 4, 2, 2)).astype(np.float32)
    write_htgf(tmp_path / "a.htgf", ["x", "y", "z"], maps)
    write_htgf(tmp_path / "b.htgf", ["x", "y", "z"], maps)
    code, out, _ = run_cli(
        [
            "lpips",
            "--layer",
            "conv1",
            str(tmp_path / "a.htgf"),
            str(tmp_path / "b.htgf"),
            "--weight",
            "conv1=2.0",
        ],
        capsysbinary,
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["value"] == 0.0
    assert payload["per_pair"] == [0.0, 0.0, 0.0]
    assert payload["metadata"]["weights"]["conv1"] == 2.0


def test_scaling_plan_and_curve_commands(fixture_dir, capsysbinary, tmp_path):
    fx, paths, tmp = fixture_dir
    code, out, _ = run_cli(
        [
            "scaling-plan",
            "--manifest",
            str(paths["manifest"]),
            "--step",
            "10",
            "--seed",
            "0",
            "--out-dir",
            str(tmp_path / "plan"),
        ],
        capsysbinary,
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["sizes"] == [10, 20, 24]
    assert len(payload["manifests"]) == 3

    results = tmp_path / "steps.csv"
    results.write_text("size,cer_percent\n10,40.0\n20,30.0\n24,31.5\n")
    code, out, _ = run_cli(
        ["scaling-curve", "--results", str(results), "--out-csv", str(tmp_path / "c.csv")],
        capsysbinary,
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["n_increases"] == 1
    assert (tmp_path / "c.csv").read_text().startswith("size,cer_percent")


def test_threads_env_fallback(fixture_dir, capsysbinary, monkeypatch):
    fx, paths, tmp = fixture_dir
    monkeypatch.setenv("HTG_EVAL_THREADS", "3")
    code, out, _ = run_cli(["cer", "--records", str(paths["transcriptions"])], capsysbinary)
    assert code == 0
    baseline = json.loads(out)
    monkeypatch.delenv("HTG_EVAL_THREADS")
    code, out, _ = run_cli(["cer", "--records", str(paths["transcriptions"])], capsysbinary)
    assert json.loads(out) == baseline


def test_console_script_runs():
    result = subprocess.run(
        [sys.executable, "-m", "htg_eval.cli", "--help"], capture_output=True, text=True
    )
    assert result.returncode == 0
    assert "Evaluation toolkit" in result.stdout


def test_output_flag_writes_file(tmp_path, capsysbinary, rng):
    data = rng.normal(size=(5, 2)).astype(np.float32)
    path = tmp_path / "r.htgf"
    write_htgf(path, [f"s{i}" for i in range(5)], data)
    out_path = tmp_path / "out.json"
    code, out, _ = run_cli(
        ["fid", "--real", str(path), "--gen", str(path), "--output", str(out_path)],
        capsysbinary,
    )
    assert code == 0
    assert out == b""
    assert json.loads(out_path.read_text())["metric"] == "fid"
