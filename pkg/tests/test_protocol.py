import json

import pytest

from htg_eval.data_model import DatasetManifest, SampleEntry, load_manifest
from htg_eval.errors import SchemaError, SplitViolation
from htg_eval.protocol import (
    build_report,
    render_report,
    scaling_curve,
    scaling_subsets,
    utility_comparison,
    write_plan_manifests,
)
from htg_eval.text_metrics import CerReport, EditStats


def manifest_of(n):
    return DatasetManifest("train", [SampleEntry(f"s{i}", "word", i % 4) for i in range(n)])


class TestScalingSubsets:
    def test_clipping_rule(self):
        plan = scaling_subsets(manifest_of(12), step=5, seed=0)
        assert plan.sizes == [5, 10, 12]

    def test_exact_multiple(self):
        plan = scaling_subsets(manifest_of(10), step=5, seed=0)
        assert plan.sizes == [5, 10]

    def test_full_scale_enumeration(self):
        plan = scaling_subsets(manifest_of(47_000), step=5_000, seed=0)
        assert len(plan.sizes) == 10
        assert plan.sizes[-1] == 47_000
        assert plan.sizes == [5_000 * k for k in range(1, 10)] + [47_000]

    def test_nesting(self):
        plan = scaling_subsets(manifest_of(23), step=7, seed=3)
        subsets = plan.subsets()
        for small, big in zip(subsets, subsets[1:]):
            assert set(small) < set(big)
        assert set(subsets[-1]) == {f"s{i}" for i in range(23)}

    def test_deterministic_in_seed(self):
        m = manifest_of(30)
        assert scaling_subsets(m, 7, seed=1).order == scaling_subsets(m, 7, seed=1).order
        assert scaling_subsets(m, 7, seed=1).order != scaling_subsets(m, 7, seed=2).order

    def test_write_manifests(self, tmp_path):
        m = manifest_of(12)
        plan = scaling_subsets(m, step=5, seed=0)
        paths = write_plan_manifests(plan, m, tmp_path)
        assert [p.name for p in paths] == [
            "subset_000005.jsonl",
            "subset_000010.jsonl",
            "subset_000012.jsonl",
        ]
        sub = load_manifest(paths[0])
        assert len(sub) == 5


class TestScalingCurve:
    def test_no_increase(self):
        curve = scaling_curve([(5000, 40.0), (10000, 30.0)])
        assert curve.n_increases == 0

    def test_one_increase(self):
        curve = scaling_curve([(5000, 30.0), (10000, 35.0)])
        assert curve.n_increases == 1

    def test_duplicate_sizes(self):
        with pytest.raises(SchemaError):
            scaling_curve([(5000, 30.0), (5000, 31.0)])

    def test_unsorted_sizes(self):
        with pytest.raises(SchemaError):
            scaling_curve([(10000, 30.0), (5000, 31.0)])

    def test_artifacts(self):
        curve = scaling_curve([(5, 12.5), (10, 11.0)])
        assert curve.to_csv_bytes().decode().splitlines()[0] == "size,cer_percent"
        payload = json.loads(curve.to_json_bytes())
        assert payload["curve"][0] == {"size": 5, "cer_percent": 12.5}


TABLE_ROWS = {
    "real images": {"HTG_HTR": 5.14, "HTG_style": 82.05},
    "GANwriting": {
        "FID": 37.41,
        "KID": 0.0196,
        "HWD": 0.610,
        "HTG_HTR": 39.56,
        "HTG_style": 4.59,
        "HTG_OOV": 7.45,
    },
    "SmartPatch": {
        "FID": 48.24,
        "KID": 0.0331,
        "HWD": 0.641,
        "HTG_HTR": 39.22,
        "HTG_style": 3.00,
        "HTG_OOV": 9.20,
    },
    "VATr": {
        "FID": 27.79,
        "KID": 0.0105,
        "HWD": 0.591,
        "HTG_HTR": 21.37,
        "HTG_style": 1.39,
        "HTG_OOV": 5.42,
    },
    "WordStylist": {
        "FID": 36.69,
        "KID": 0.0194,
        "HWD": 0.303,
        "HTG_HTR": 8.23,
        "HTG_style": 67.12,
        "HTG_OOV": 29.85,
    },
}


class TestReports:
    def test_published_row_renders_in_canonical_order(self):
        report = build_report({"GANwriting": TABLE_ROWS["GANwriting"]})
        md = render_report(report, "markdown").decode()
        lines = md.splitlines()
        assert lines[0] == "| Method | FID | KID | HWD | HTG_HTR | HTG_style | HTG_OOV |"
        assert lines[2] == "| GANwriting | 37.41 | 0.0196 | 0.61 | 39.56 | 4.59 | 7.45 |"

    def test_full_table_missing_cells(self):
        report = build_report(TABLE_ROWS)
        md = render_report(report, "markdown").decode()
        real_row = next(l for l in md.splitlines() if l.startswith("| real images"))
        assert real_row == "| real images | - | - | - | 5.14 | 82.05 | - |"

    def test_byte_determinism(self):
        a = render_report(build_report(TABLE_ROWS), "markdown")
        b = render_report(build_report(TABLE_ROWS), "markdown")
        assert a == b
        ja = render_report(build_report(TABLE_ROWS), "json")
        jb = render_report(build_report(TABLE_ROWS), "json")
        assert ja == jb

    def test_json_roundtrip_six_significant_digits(self):
        report = build_report(TABLE_ROWS)
        payload = json.loads(render_report(report, "json"))
        for method, row in TABLE_ROWS.items():
            for metric, value in row.items():
                got = payload["values"][method][metric]
                assert float(format(got, ".6g")) == float(format(value, ".6g"))

    def test_empty_report(self):
        with pytest.raises(SchemaError):
            build_report({})

    def test_conflicting_duplicates(self):
        with pytest.raises(SchemaError):
            build_report([("m", "FID", 1.0), ("m", "FID", 2.0)])
        # Agreeing duplicates collapse.
        report = build_report([("m", "FID", 1.0), ("m", "FID", 1.0)])
        assert report.values["m"]["FID"] == 1.0

    def test_unknown_format(self):
        with pytest.raises(SchemaError):
            render_report(build_report(TABLE_ROWS), "latex")


def cer_report(percent, digest="d0", n=100):
    stats = EditStats(
        substitutions=int(percent * n / 100), insertions=0, deletions=0, reference_length=n
    )
    return CerReport(
        micro_cer=percent / 100.0,
        per_record=[stats],
        n_records=1,
        split_digest=digest,
    )


class TestUtilityComparison:
    def test_published_improvement(self):
        comparison = utility_comparison(
            cer_report(5.14), {"real+filtered": cer_report(4.49)}
        )
        row = comparison.variants["real+filtered"]
        assert row["delta"] == pytest.approx(-0.65, abs=1e-9)
        assert row["improved"]

    def test_no_change(self):
        comparison = utility_comparison(cer_report(5.14), {"same": cer_report(5.14)})
        assert comparison.variants["same"]["delta"] == pytest.approx(0.0, abs=1e-12)
        assert not comparison.variants["same"]["improved"]

    def test_split_mismatch(self):
        with pytest.raises(SplitViolation):
            utility_comparison(cer_report(5.0), {"v": cer_report(5.0, digest="other")})

    def test_artifacts(self):
        comparison = utility_comparison(cer_report(5.14), {"v": cer_report(4.49)})
        payload = json.loads(comparison.to_json_bytes())
        assert payload["baseline_cer_percent"] == pytest.approx(5.14)
        md = comparison.to_markdown_bytes().decode()
        assert "| v |" in md
