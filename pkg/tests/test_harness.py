import json

import numpy as np
import pytest

from camobench.attributes.classify import AttributeFlags
from camobench.core.maps import BinaryMask
from camobench.errors import EvaluationAborted, ManifestError
from camobench.harness.breakdown import (
    attr_breakdown,
    display_offsets,
    rank_histogram,
    render_rank_histogram_csv,
)
from camobench.harness.evaluate import eval_fix, eval_rank, eval_seg, resolve_pred_roots
from camobench.harness.report import (
    EvaluationReport,
    MetricRow,
    compute_aggregates,
    emit_report,
    render_csv,
)
from camobench.harness.stats import dataset_stats, furthest_center_distance
from camobench.harness.storage import FileReportStorage
from camobench.metrics.ranking import corr
from camobench.models import BenchConfig, DatasetManifest, RankLabel


def _mean(report, method, metric):
    return report.aggregate(method, metric).mean


def _dataset_value(report, method, metric):
    return next(r.value for r in report.dataset_rows if r.method == method and r.metric == metric)


class TestEvalSeg:
    def test_perfect_and_inverse(self, seg_manifest):
        report = eval_seg(DatasetManifest.load(seg_manifest))
        assert report.methods == ["perfect", "inverse"]
        assert report.errors == []
        assert _mean(report, "perfect", "S") == pytest.approx(1.0)
        assert _mean(report, "perfect", "F") == pytest.approx(1.0)
        assert _mean(report, "perfect", "E") == pytest.approx(1.0)
        assert _mean(report, "perfect", "MAE") == 0.0
        assert _mean(report, "inverse", "MAE") == 1.0
        assert _mean(report, "inverse", "S") < 0.5

    def test_rows_follow_manifest_order(self, seg_manifest):
        report = eval_seg(DatasetManifest.load(seg_manifest))
        assert [r.image_id for r in report.rows][:4] == ["a"] * 4
        assert report.rows[-1].image_id == "b"

    def test_missing_prediction_is_isolated(self, seg_manifest):
        (seg_manifest.parent / "preds" / "perfect" / "b.png").unlink()
        report = eval_seg(DatasetManifest.load(seg_manifest))
        assert len(report.errors) == 4
        assert {e.kind for e in report.errors} == {"FileMissing"}
        assert {(e.image_id, e.method) for e in report.errors} == {("b", "perfect")}
        assert report.aggregate("perfect", "MAE").count == 1
        assert report.aggregate("inverse", "MAE").count == 2

    def test_strict_aborts(self, seg_manifest):
        (seg_manifest.parent / "preds" / "perfect" / "b.png").unlink()
        with pytest.raises(EvaluationAborted):
            eval_seg(DatasetManifest.load(seg_manifest), strict=True)

    def test_cli_roots_override_manifest(self, seg_manifest):
        manifest = DatasetManifest.load(seg_manifest)
        root = seg_manifest.parent / "preds" / "inverse"
        report = eval_seg(manifest, {"only": root})
        assert report.methods == ["only"]
        assert _mean(report, "only", "MAE") == 1.0


class TestResolvePredRoots:
    def test_manifest_roots_are_resolved(self, seg_manifest):
        roots = resolve_pred_roots(DatasetManifest.load(seg_manifest))
        assert roots["perfect"] == seg_manifest.parent / "preds" / "perfect"

    def test_no_roots(self):
        with pytest.raises(ManifestError):
            resolve_pred_roots(DatasetManifest(dataset="empty"))


class TestEvalFix:
    def test_oracle(self, fix_manifest):
        report = eval_fix(DatasetManifest.load(fix_manifest), config=_fast_config())
        assert report.errors == []
        assert _mean(report, "oracle", "CC") == pytest.approx(1.0)
        assert _mean(report, "oracle", "SIM") == pytest.approx(1.0)
        assert _mean(report, "oracle", "KLD") == pytest.approx(0.0, abs=1e-6)
        assert _mean(report, "oracle", "EMD") == pytest.approx(0.0, abs=1e-6)
        assert _mean(report, "oracle", "AUC_J") == 1.0
        assert _mean(report, "oracle", "AUC_B") == 1.0
        assert _mean(report, "oracle", "sAUC") == 1.0
        assert _mean(report, "oracle", "NSS") > 0

    def test_jobs_do_not_change_the_report(self, fix_manifest):
        manifest = DatasetManifest.load(fix_manifest)
        serial = eval_fix(manifest, config=_fast_config(), seed=3, jobs=1)
        parallel = eval_fix(manifest, config=_fast_config(), seed=3, jobs=2)
        assert serial == parallel

    def test_missing_points_only_drop_location_metrics(self, fix_manifest):
        (fix_manifest.parent / "points" / "q.png").unlink()
        report = eval_fix(DatasetManifest.load(fix_manifest), config=_fast_config())
        assert {e.metric for e in report.errors} == {"NSS", "AUC_J", "AUC_B", "sAUC"}
        assert report.aggregate("oracle", "CC").count == 3
        assert report.aggregate("oracle", "NSS").count == 2

    def test_single_image_only_loses_shuffled_auc(self, fix_manifest):
        manifest = DatasetManifest.load(fix_manifest)
        manifest.entries = manifest.entries[:1]
        report = eval_fix(manifest, config=_fast_config())
        assert report.errors
        assert {(e.metric, e.kind) for e in report.errors} == {("sAUC", "EmptyNegativePool")}
        assert report.aggregate("oracle", "AUC_B").count == 1

    def test_unlisted_points_name_the_image(self, fix_manifest):
        manifest = DatasetManifest.load(fix_manifest)
        manifest.entries[0] = manifest.entries[0].model_copy(update={"fixation_points": None})
        report = eval_fix(manifest, config=_fast_config())
        missing = [e for e in report.errors if e.kind == "FileMissing"]
        assert missing
        assert all(e.path == str(fix_manifest.parent / "images" / "p.png") for e in missing)


def _fast_config() -> BenchConfig:
    return BenchConfig.model_validate({"metrics": {"auc_splits": 5}})


class TestEvalRank:
    def test_exact_and_reversed(self, rank_manifest):
        config = BenchConfig.model_validate({"match": {"samples": 10, "repeats": 2}})
        report = eval_rank(DatasetManifest.load(rank_manifest), config=config)
        assert report.errors == []
        assert _dataset_value(report, "exact", "Corr") == pytest.approx(1.0)
        assert _dataset_value(report, "reversed", "Corr") == pytest.approx(-1.0)
        assert _dataset_value(report, "exact", "rank_penalty") == 0.0
        assert _dataset_value(report, "reversed", "rank_penalty") == pytest.approx(0.48)
        assert _mean(report, "exact", "r_MAE") == 0.0
        assert _mean(report, "reversed", "r_MAE") == pytest.approx(0.6)
        assert _mean(report, "exact", "MAE") == 0.0
        assert _mean(report, "reversed", "MAE") == 0.0

    def test_shipped_penalty_matrix(self, rank_manifest):
        config = BenchConfig.model_validate(
            {"penalty_matrix": "published", "match": {"samples": 2, "repeats": 1}}
        )
        report = eval_rank(DatasetManifest.load(rank_manifest), config=config)
        # (HD,ES) .8, (M3,M1) .4, (M2,M2) 0, (M1,M3) .4, (ES,HD) .8
        assert _dataset_value(report, "reversed", "rank_penalty") == pytest.approx(0.48)
        assert report.metadata["conventions"]["penalty_matrix"] == "published"

    def test_corr_follows_the_run_seed(self, rank_manifest, monkeypatch):
        seen = []

        def recording_corr(images, config):
            seen.append(config.seed)
            return corr(images, config)

        monkeypatch.setattr("camobench.harness.evaluate.corr", recording_corr)
        manifest = DatasetManifest.load(rank_manifest)
        fast = {"match": {"samples": 2, "repeats": 1}}
        report = eval_rank(manifest, config=BenchConfig.model_validate(fast), seed=7)
        assert seen == [7, 7]
        assert report.metadata["seeds"]["corr"] == 7

        seen.clear()
        pinned = {"match": {"samples": 2, "repeats": 1, "seed": 3}}
        eval_rank(manifest, config=BenchConfig.model_validate(pinned), seed=7)
        assert seen == [3, 3]

    def test_underpopulated_rank_is_an_error_row(self, rank_manifest):
        manifest = DatasetManifest.load(rank_manifest)
        manifest.entries = manifest.entries[:4]
        report = eval_rank(manifest, config=BenchConfig())
        assert [(e.method, e.kind) for e in report.errors] == [
            ("exact", "RankUnderpopulated"),
            ("reversed", "RankUnderpopulated"),
        ]
        assert _dataset_value(report, "exact", "rank_penalty") == 0.0


class TestReport:
    def test_emission_is_deterministic(self, seg_manifest, tmp_path):
        manifest = DatasetManifest.load(seg_manifest)
        first = emit_report(eval_seg(manifest), tmp_path / "one")
        second = emit_report(eval_seg(manifest), tmp_path / "two")
        assert [p.name for p in first] == ["report.csv", "report.json", "report.md"]
        for a, b in zip(first, second):
            assert a.read_bytes() == b.read_bytes()
        document = json.loads(first[1].read_text())
        assert document["metadata"]["conventions"]["aggregation"] == "mean over images"

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValueError):
            emit_report(EvaluationReport(kind="seg", dataset="d"), tmp_path, ["xml"])

    def test_csv_error_rows(self, seg_manifest):
        (seg_manifest.parent / "preds" / "inverse" / "a.png").unlink()
        lines = render_csv(eval_seg(DatasetManifest.load(seg_manifest))).splitlines()
        assert lines[0].startswith("image_id,instance_id,method,metric,value")
        assert any(line.startswith("a,,inverse,S,,load_scalar_map,FileMissing") for line in lines)

    def test_aggregates_skip_missing(self):
        rows = [
            MetricRow(image_id="a", method="m", metric="S", value=0.5),
            MetricRow(image_id="b", method="m", metric="S", value=1.0),
        ]
        [agg] = compute_aggregates(rows, ["m"], ["S", "F"])
        assert (agg.metric, agg.mean, agg.count) == ("S", 0.75, 2)


def _flags(image_id, **attrs):
    return AttributeFlags(image_id=image_id, instance_id="0", **attrs)


class TestBreakdown:
    REPORT = EvaluationReport(
        kind="seg",
        dataset="toy",
        methods=["m"],
        metrics=["S"],
        rows=[
            MetricRow(image_id="a", method="m", metric="S", value=0.62),
            MetricRow(image_id="b", method="m", metric="S", value=0.9),
        ],
    )

    def test_means_over_carrying_images(self):
        flags = [_flags("a", BM=True, SO=True), _flags("b", BM=True, SO=False)]
        breakdown = attr_breakdown(self.REPORT, flags)
        by_attr = {r.attribute: r for r in breakdown.rows}
        assert by_attr["BM"].mean == pytest.approx(0.76)
        assert by_attr["SO"].mean == pytest.approx(0.62)
        assert "CB" not in by_attr
        assert any("CB" in note for note in breakdown.notes)

    def test_display_offset_lands_in_band(self):
        breakdown = attr_breakdown(self.REPORT, [_flags("a", SO=True)])
        offset = display_offsets(breakdown)[("SO", "S")]
        assert offset == pytest.approx(0.1)
        assert 0.7 <= 0.62 + offset < 0.8

    def test_rank_histogram(self):
        flags = [_flags("a", BM=True), _flags("b", BM=True, SO=True)]
        ranks = [("a", "0", RankLabel.ES), ("b", "0", RankLabel.ES), ("c", "0", RankLabel.HD)]
        histogram = rank_histogram(ranks, flags)
        assert histogram.cell("BM", "ES") == 2
        assert histogram.cell("SO", RankLabel.ES) == 1
        assert histogram.cell("BM", "HD") == 0
        assert render_rank_histogram_csv(histogram).splitlines()[1] == "BM,2,0,0,0,0"


class TestStorage:
    def test_save_get_delete(self, tmp_path):
        storage = FileReportStorage(tmp_path / "reports")
        report = EvaluationReport(kind="seg", dataset="toy")
        storage.save("run-1", report)
        assert storage.exists("run-1")
        assert storage.get("run-1") == report
        assert storage.list_all() == ["run-1"]
        assert storage.delete("run-1")
        assert storage.get("run-1") is None
        assert not storage.delete("run-1")

    def test_rejects_path_like_ids(self, tmp_path):
        with pytest.raises(ValueError):
            FileReportStorage(tmp_path).get("../escape")


class TestStats:
    def test_furthest_center_distance(self):
        bits = np.zeros((10, 10), dtype=bool)
        bits[0, 0] = True
        expected = np.hypot(4.5, 4.5) / np.hypot(5.0, 5.0)
        assert furthest_center_distance(BinaryMask(bits)) == pytest.approx(expected)

    def test_dataset_stats(self, rank_manifest):
        stats = dataset_stats(DatasetManifest.load(rank_manifest))
        assert [i.image_id for i in stats.images] == [f"img{k}" for k in range(5)]
        assert stats.images[0].area_ratio == pytest.approx(144 / 576)
        assert sum(stats.area_histogram) == 5
        assert stats.area_histogram[2] == 5
        assert stats.rank_counts == {"ES": 1, "M1": 1, "M2": 1, "M3": 1, "HD": 1}
