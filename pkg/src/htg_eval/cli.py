"""Single entry point mapping subcommands 1:1 onto the library operations.

Success prints JSON (or markdown/CSV where requested) on stdout and exits 0.
Domain errors print ``{"error": <type>, "message": ...}`` on stderr and exit
1; usage errors exit 2. ``HTG_EVAL_THREADS`` is the fallback for --threads.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import __version__
from ._kernels import BACKEND
from .data_model import (
    generate_fixture_dataset,
    load_feature_matrix,
    load_id_list,
    load_image,
    load_layer_maps,
    load_logits,
    load_manifest,
    load_style_predictions,
    load_transcriptions,
    make_style_split,
    partition_lexicon,
    save_id_list,
    write_fixture_dataset,
)
from .distribution_metrics import (
    KernelSpec,
    WriterFeatureTable,
    conventions_metadata,
    fid,
    gaussian_summary,
    hwd,
    inception_score,
    kid,
    kid_subsets,
    lpips,
)
from .errors import HtgEvalError, SchemaError
from .geometry_score import GsParams, geometry_score, mrlt
from .pixel_metrics import SsimConstants, evaluate_pairs
from .protocol import (
    build_report,
    file_digest,
    render_report,
    scaling_curve,
    scaling_subsets,
    utility_comparison,
    write_plan_manifests,
)
from .style_metrics import htg_style, style_accuracy
from .text_metrics import cer, filter_by_cer, htg_htr, htg_oov, wer


def _threads(value: int | None) -> int:
    if value is None:
        value = int(os.environ.get("HTG_EVAL_THREADS", "1"))
    if value < 1:
        raise SchemaError("threads must be >= 1")
    return value


def _emit(payload, output: str | None, as_bytes: bool = False) -> None:
    if as_bytes:
        data = payload
    else:
        data = (json.dumps(payload, sort_keys=True) + "\n").encode("utf-8")
    if output:
        Path(output).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()


_output_option = click.option("--output", type=click.Path(), default=None, help="Write result here instead of stdout.")


@click.group(name="htg-eval")
@click.version_option(version=__version__)
def cli():
    """Evaluation toolkit for handwritten-text-generation systems."""


@cli.command("pixel")
@click.option("--pairs", "pairs_path", required=True, type=click.Path(exists=True))
@click.option("--windowed", is_flag=True, help="Mean SSIM over sliding windows instead of one global window.")
@click.option("--window", default=11, show_default=True)
@click.option("--threads", type=int, default=None)
@_output_option
def pixel_cmd(pairs_path, windowed, window, threads, output):
    """Pixel metrics over image pairs (JSONL: {"a": path, "b": path})."""
    base = Path(pairs_path).parent
    pairs = []
    with open(pairs_path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if "a" not in obj or "b" not in obj:
                raise SchemaError(f"{pairs_path}: each line needs fields 'a' and 'b'")
            pairs.append((load_image(base / obj["a"]), load_image(base / obj["b"])))
    if not pairs:
        raise SchemaError(f"{pairs_path}: no pairs")
    report = evaluate_pairs(pairs, windowed=windowed, window=window, threads=_threads(threads))
    _emit(report.to_dict(), output)


@cli.command("fid")
@click.option("--real", "real_path", required=True, type=click.Path(exists=True))
@click.option("--gen", "gen_path", required=True, type=click.Path(exists=True))
@_output_option
def fid_cmd(real_path, gen_path, output):
    """Frechet distance between Gaussian summaries of two HTGF feature files."""
    real = load_feature_matrix(real_path)
    gen = load_feature_matrix(gen_path)
    value = fid(gaussian_summary(real), gaussian_summary(gen))
    _emit(
        {
            "metric": "fid",
            "value": value,
            "metadata": {
                **conventions_metadata(),
                "inputs": {"real": file_digest(real_path), "gen": file_digest(gen_path)},
            },
        },
        output,
    )


@cli.command("kid")
@click.option("--real", "real_path", required=True, type=click.Path(exists=True))
@click.option("--gen", "gen_path", required=True, type=click.Path(exists=True))
@click.option("--degree", default=3, show_default=True)
@click.option("--gamma", type=float, default=None, help="Kernel gamma; default 1/D.")
@click.option("--coef0", default=1.0, show_default=True)
@click.option("--subsets", type=int, default=None, help="Average over this many random blocks.")
@click.option("--subset-size", type=int, default=100, show_default=True)
@click.option("--seed", default=0, show_default=True)
@_output_option
def kid_cmd(real_path, gen_path, degree, gamma, coef0, subsets, subset_size, seed, output):
    """Unbiased kernel distance (squared MMD) between two HTGF feature files."""
    real = load_feature_matrix(real_path)
    gen = load_feature_matrix(gen_path)
    kernel = KernelSpec(degree=degree, gamma=gamma, coef0=coef0)
    payload = {
        "metric": "kid",
        "metadata": {
            **conventions_metadata(kernel, real.dim),
            "inputs": {"real": file_digest(real_path), "gen": file_digest(gen_path)},
        },
    }
    if subsets:
        mean, std = kid_subsets(real, gen, kernel, subsets, subset_size, seed)
        payload.update(value=mean, stddev=std, subsets=subsets, subset_size=subset_size, seed=seed)
    else:
        payload["value"] = kid(real, gen, kernel)
    _emit(payload, output)


@cli.command("is")
@click.option("--logits", "logits_path", required=True, type=click.Path(exists=True))
@click.option("--splits", default=1, show_default=True)
@_output_option
def is_cmd(logits_path, splits, output):
    """Inception-style score of an HTGF logit file."""
    mean, std = inception_score(load_logits(logits_path), n_splits=splits)
    _emit(
        {
            "metric": "inception_score",
            "value": mean,
            "stddev": std,
            "splits": splits,
            "metadata": {"inputs": {"logits": file_digest(logits_path)}},
        },
        output,
    )


@cli.command("lpips")
@click.option(
    "--layer",
    "layers",
    required=True,
    multiple=True,
    nargs=3,
    metavar="NAME A_PATH B_PATH",
    help="Layer name plus the two rank-4 HTGF files to compare.",
)
@click.option("--weight", "weights", multiple=True, metavar="NAME=W")
@_output_option
def lpips_cmd(layers, weights, output):
    """Perceptual distance from per-layer feature map files."""
    weight_map = {}
    for item in weights:
        name, _, raw = item.partition("=")
        if not raw:
            raise SchemaError(f"bad --weight {item!r}, expected NAME=W")
        weight_map[name] = float(raw)
    a_paths = {name: a for name, a, _ in layers}
    b_paths = {name: b for name, _, b in layers}
    a = load_layer_maps(a_paths, weight_map)
    b = load_layer_maps(b_paths, weight_map)
    values = lpips(a, b)
    _emit(
        {
            "metric": "lpips",
            "value": float(values.mean()),
            "per_pair": [float(v) for v in values],
            "metadata": {
                "weights": {layer.layer_name: layer.weight for layer in a.layers},
                "inputs": {
                    name: {"a": file_digest(a_paths[name]), "b": file_digest(b_paths[name])}
                    for name in a_paths
                },
            },
        },
        output,
    )


@cli.command("hwd")
@click.option("--real", "real_path", required=True, type=click.Path(exists=True))
@click.option("--gen", "gen_path", required=True, type=click.Path(exists=True))
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option(
    "--gen-manifest",
    "gen_manifest_path",
    type=click.Path(exists=True),
    default=None,
    help="Writer labels for the generated set; defaults to --manifest.",
)
@_output_option
def hwd_cmd(real_path, gen_path, manifest_path, gen_manifest_path, output):
    """Per-writer mean-feature distance between two HTGF feature files."""
    manifest = load_manifest(manifest_path)
    gen_manifest = load_manifest(gen_manifest_path) if gen_manifest_path else manifest
    real = WriterFeatureTable.from_features(load_feature_matrix(real_path), manifest)
    gen = WriterFeatureTable.from_features(load_feature_matrix(gen_path), gen_manifest)
    _emit(
        {
            "metric": "hwd",
            "value": hwd(real, gen),
            "metadata": {
                **conventions_metadata(),
                "inputs": {"real": file_digest(real_path), "gen": file_digest(gen_path)},
            },
        },
        output,
    )


@cli.command("gs")
@click.option("--a", "a_path", required=True, type=click.Path(exists=True))
@click.option("--b", "b_path", required=True, type=click.Path(exists=True))
@click.option("--landmarks", default=64, show_default=True)
@click.option("--gamma", default=1.0 / 128.0, show_default=True)
@click.option("--imax", default=100, show_default=True)
@click.option("--repeats", default=100, show_default=True)
@click.option("--seed", default=0, show_default=True)
@_output_option
def gs_cmd(a_path, b_path, landmarks, gamma, imax, repeats, seed, output):
    """Topology-based score between two HTGF feature files."""
    params = GsParams(i_max=imax, n_landmarks=landmarks, gamma=gamma, n_repeats=repeats, seed=seed)
    a = load_feature_matrix(a_path)
    b = load_feature_matrix(b_path)
    mrlt_a = mrlt(a, params)
    mrlt_b = mrlt(b, params)
    diff = mrlt_a - mrlt_b
    _emit(
        {
            "gs": float(diff @ diff),
            "mrlt_a": [float(v) for v in mrlt_a],
            "mrlt_b": [float(v) for v in mrlt_b],
            "params": params.metadata(),
            "metadata": {
                "kernel_backend": BACKEND,
                "inputs": {"a": file_digest(a_path), "b": file_digest(b_path)},
            },
        },
        output,
    )


@cli.command("cer")
@click.option("--records", "records_path", required=True, type=click.Path(exists=True))
@click.option("--threads", type=int, default=None)
@_output_option
def cer_cmd(records_path, threads, output):
    """Character error rate over a transcription log."""
    report = cer(load_transcriptions(records_path), threads=_threads(threads))
    _emit(report.to_dict(), output)


@cli.command("wer")
@click.option("--records", "records_path", required=True, type=click.Path(exists=True))
@click.option("--threads", type=int, default=None)
@_output_option
def wer_cmd(records_path, threads, output):
    """Word error rate over a transcription log."""
    report = wer(load_transcriptions(records_path), threads=_threads(threads))
    _emit(report.to_dict(), output)


@cli.command("htg-htr")
@click.option("--records", "records_path", required=True, type=click.Path(exists=True))
@click.option("--split", "split_path", required=True, type=click.Path(exists=True), help="Declared real test split (id list).")
@click.option("--threads", type=int, default=None)
@_output_option
def htg_htr_cmd(records_path, split_path, threads, output):
    """CER percent of a synthetic-trained recognizer on the real test split."""
    records = load_transcriptions(records_path)
    value = htg_htr(records, load_id_list(split_path), threads=_threads(threads))
    _emit(
        {
            "metric": "HTG_HTR",
            "value": value,
            "n_records": len(records),
            "metadata": {"inputs": {"records": file_digest(records_path), "split": file_digest(split_path)}},
        },
        output,
    )


@cli.command("htg-oov")
@click.option("--records", "records_path", required=True, type=click.Path(exists=True))
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--threads", type=int, default=None)
@_output_option
def htg_oov_cmd(records_path, manifest_path, threads, output):
    """CER percent over a generated out-of-vocabulary set."""
    records = load_transcriptions(records_path)
    value = htg_oov(records, load_manifest(manifest_path), threads=_threads(threads))
    _emit(
        {
            "metric": "HTG_OOV",
            "value": value,
            "n_records": len(records),
            "metadata": {"inputs": {"records": file_digest(records_path), "manifest": file_digest(manifest_path)}},
        },
        output,
    )


@cli.command("filter")
@click.option("--records", "records_path", required=True, type=click.Path(exists=True))
@click.option("--threshold", default=0.0, show_default=True)
@click.option("--kept-out", type=click.Path(), default=None, help="Write kept ids (one per line) for manifest subsetting.")
@_output_option
def filter_cmd(records_path, threshold, kept_out, output):
    """Keep records whose per-record CER is at most the threshold."""
    kept, dropped, summary = filter_by_cer(load_transcriptions(records_path), threshold)
    if kept_out:
        save_id_list(kept, kept_out)
    _emit({**summary.to_dict(), "kept_ids": kept, "dropped_ids": dropped}, output)


@cli.command("htg-style")
@click.option("--pred", "pred_path", required=True, type=click.Path(exists=True))
@click.option("--split", "split_path", required=True, type=click.Path(exists=True), help="Eval split id list.")
@_output_option
def htg_style_cmd(pred_path, split_path, output):
    """Style accuracy percent over the held-out eval split."""
    records = load_style_predictions(pred_path)
    value = htg_style(records, load_id_list(split_path))
    report = style_accuracy(records)
    _emit(
        {
            "metric": "HTG_style",
            "value": value,
            "report": report.to_dict(),
            "metadata": {"inputs": {"pred": file_digest(pred_path), "split": file_digest(split_path)}},
        },
        output,
    )


@cli.command("style-split")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--fraction", default=0.7, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--train-out", type=click.Path(), required=True)
@click.option("--eval-out", type=click.Path(), required=True)
@_output_option
def style_split_cmd(manifest_path, fraction, seed, train_out, eval_out, output):
    """Per-writer stratified train/eval split for the style protocol."""
    manifest = load_manifest(manifest_path)
    train_ids, eval_ids = make_style_split(manifest, fraction, seed)
    save_id_list(train_ids, train_out)
    save_id_list(eval_ids, eval_out)
    _emit(
        {
            "n_train": len(train_ids),
            "n_eval": len(eval_ids),
            "fraction": fraction,
            "seed": seed,
            "train_out": str(train_out),
            "eval_out": str(eval_out),
        },
        output,
    )


@cli.command("partition")
@click.option("--train-manifest", "train_manifest_path", required=True, type=click.Path(exists=True))
@click.option("--words", "words_path", required=True, type=click.Path(exists=True), help="Candidate words, one per line.")
@click.option("--iv-out", type=click.Path(), default=None)
@click.option("--oov-out", type=click.Path(), default=None)
@_output_option
def partition_cmd(train_manifest_path, words_path, iv_out, oov_out, output):
    """Partition candidate words into IV/OOV against a train lexicon."""
    manifest = load_manifest(train_manifest_path)
    words = load_id_list(words_path)
    iv, oov = partition_lexicon(manifest.lexicon, words)
    if iv_out:
        save_id_list(iv, iv_out)
    if oov_out:
        save_id_list(oov, oov_out)
    _emit({"n_candidates": len(words), "n_iv": len(iv), "n_oov": len(oov), "iv": iv, "oov": oov}, output)


@cli.command("scaling-plan")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--step", default=5000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out-dir", type=click.Path(), required=True)
@_output_option
def scaling_plan_cmd(manifest_path, step, seed, out_dir, output):
    """Nested sub-manifests of sizes step, 2*step, ..., total."""
    manifest = load_manifest(manifest_path)
    plan = scaling_subsets(manifest, step=step, seed=seed)
    paths = write_plan_manifests(plan, manifest, out_dir)
    _emit(
        {
            "sizes": plan.sizes,
            "step": plan.step,
            "seed": plan.seed,
            "manifests": [str(p) for p in paths],
        },
        output,
    )


@cli.command("scaling-curve")
@click.option("--results", "results_path", required=True, type=click.Path(exists=True), help="CSV with header size,cer_percent.")
@click.option("--out-csv", type=click.Path(), default=None)
@click.option("--out-json", type=click.Path(), default=None)
@_output_option
def scaling_curve_cmd(results_path, out_csv, out_json, output):
    """Package per-step results into curve artifacts with a monotonicity note."""
    import csv as _csv

    rows = []
    with open(results_path, "r", encoding="utf-8") as fh:
        for row in _csv.DictReader(fh):
            try:
                rows.append((int(row["size"]), float(row["cer_percent"])))
            except (KeyError, TypeError, ValueError) as exc:
                raise SchemaError(f"{results_path}: bad row {row!r} ({exc})") from exc
    curve = scaling_curve(rows)
    if out_csv:
        Path(out_csv).write_bytes(curve.to_csv_bytes())
    if out_json:
        Path(out_json).write_bytes(curve.to_json_bytes())
    _emit(curve.to_json_bytes(), output, as_bytes=True)


@cli.command("report")
@click.option("--values", "values_path", required=True, type=click.Path(exists=True), help='JSON {"method": {"metric": value}}.')
@click.option("--digest", "digests", multiple=True, metavar="NAME=PATH", help="Record input file digests in the report.")
@click.option("--format", "fmt", type=click.Choice(["json", "markdown"]), default="json", show_default=True)
@_output_option
def report_cmd(values_path, digests, fmt, output):
    """Render a method-comparison report."""
    with open(values_path, "r", encoding="utf-8") as fh:
        values = json.load(fh)
    if not isinstance(values, dict):
        raise SchemaError(f"{values_path}: expected a JSON object")
    digest_map = {}
    for item in digests:
        name, _, path = item.partition("=")
        if not path:
            raise SchemaError(f"bad --digest {item!r}, expected NAME=PATH")
        digest_map[name] = file_digest(path)
    report = build_report(values, metadata=conventions_metadata(), input_digests=digest_map)
    _emit(render_report(report, fmt), output, as_bytes=True)


@cli.command("compare")
@click.option("--baseline", "baseline_path", required=True, type=click.Path(exists=True))
@click.option("--variant", "variant_args", multiple=True, required=True, metavar="NAME=PATH")
@click.option("--format", "fmt", type=click.Choice(["json", "markdown"]), default="json", show_default=True)
@click.option("--threads", type=int, default=None)
@_output_option
def compare_cmd(baseline_path, variant_args, fmt, threads, output):
    """Compare variant transcription logs against a baseline (CER deltas)."""
    n_threads = _threads(threads)
    baseline = cer(load_transcriptions(baseline_path), threads=n_threads)
    variants = {}
    for item in variant_args:
        name, _, path = item.partition("=")
        if not path:
            raise SchemaError(f"bad --variant {item!r}, expected NAME=PATH")
        variants[name] = cer(load_transcriptions(path), threads=n_threads)
    comparison = utility_comparison(baseline, variants)
    data = comparison.to_markdown_bytes() if fmt == "markdown" else comparison.to_json_bytes()
    _emit(data, output, as_bytes=True)


@cli.command("fixture")
@click.option("--writers", default=5, show_default=True)
@click.option("--samples", default=50, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--error-rate", default=0.0, show_default=True, help="Per-character hypothesis corruption rate.")
@click.option("--style-error-rate", default=0.0, show_default=True)
@click.option("--oov-fraction", default=0.0, show_default=True)
@click.option("--out-dir", type=click.Path(), required=True)
@_output_option
def fixture_cmd(writers, samples, seed, error_rate, style_error_rate, oov_fraction, out_dir, output):
    """Generate a deterministic synthetic dataset for desk-scale runs."""
    fixture = generate_fixture_dataset(
        writers,
        samples,
        seed,
        hypothesis_error_rate=error_rate,
        style_error_rate=style_error_rate,
        oov_fraction=oov_fraction,
    )
    paths = write_fixture_dataset(fixture, out_dir)
    _emit(
        {
            "n_writers": writers,
            "n_samples": samples,
            "seed": seed,
            "paths": {k: str(v) for k, v in paths.items()},
        },
        output,
    )


@cli.command("validate")
@click.option("--path", "file_path", required=True, type=click.Path(exists=True))
@click.option("--kind", type=click.Choice(["features", "logits", "maps"]), default="features", show_default=True)
@_output_option
def validate_cmd(file_path, kind, output):
    """Validate an HTGF file against the loader contracts."""
    if kind == "features":
        fm = load_feature_matrix(file_path)
        info = {"dims": list(fm.data.shape)}
    elif kind == "logits":
        lm = load_logits(file_path)
        info = {"dims": list(lm.logits.shape), "is_probability": lm.is_probability}
    else:
        maps = load_layer_maps({"layer": file_path})
        info = {"dims": list(maps.layers[0].maps.shape)}
    _emit({"ok": True, "kind": kind, "digest": file_digest(file_path), **info}, output)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Abort:
        return 130
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except HtgEvalError as exc:
        sys.stderr.write(json.dumps({"error": exc.code, "message": str(exc)}) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
