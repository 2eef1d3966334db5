import numpy as np
import pytest

from eigenspine import (
    AnnotatedSample,
    IdMismatchError,
    SpineSample,
    cobb_report,
    evaluate_labels,
    zero_report,
)
from eigenspine.evaluation import LabelMetrics
from eigenspine.geometry import VertebraInstance

from helpers import chain_sample, rect_instance


def annotate(sample):
    report = (
        cobb_report(sample) if len(sample.instances) >= 2 else zero_report()
    )
    return AnnotatedSample(sample=sample, cobb=report)


def reference_set(n_samples=4, n_instances=8):
    refs = {}
    for i in range(n_samples):
        sample = chain_sample(
            tuple([0.0, 12.0] * (n_instances // 2))[:n_instances],
            sample_id=f"s{i}",
        )
        refs[sample.sample_id] = annotate(sample)
    return refs


def with_instances(ref, instances):
    sample = SpineSample.from_instances(ref.sample_id, instances)
    return annotate(sample)


class TestPerfectAgreement:
    def test_identity_scores_perfectly(self):
        refs = reference_set()
        metrics = evaluate_labels(refs, refs)
        assert metrics.ap == pytest.approx(100.0, abs=1e-9)
        assert metrics.ar == pytest.approx(100.0, abs=1e-9)
        assert metrics.smape == pytest.approx(0.0, abs=1e-9)
        assert metrics.mean_ed == pytest.approx(0.0, abs=1e-9)

    def test_sequence_input_matches_mapping_input(self):
        refs = reference_set()
        assert evaluate_labels(list(refs.values()), refs) == evaluate_labels(
            refs, refs
        )


class TestRecall:
    def test_uniform_half_drop_halves_recall(self):
        refs = reference_set(n_samples=6, n_instances=8)
        preds = {
            sid: with_instances(ref, ref.sample.instances[::2])
            for sid, ref in refs.items()
        }
        metrics = evaluate_labels(preds, refs)
        assert metrics.ar == pytest.approx(50.0, abs=2.0)
        assert metrics.ap == pytest.approx(50.0, abs=2.0)

    def test_missing_sample_counts_as_zero_detections(self):
        refs = reference_set(n_samples=2)
        preds = {"s0": refs["s0"]}
        metrics = evaluate_labels(preds, refs)
        assert metrics.ar == pytest.approx(50.0, abs=1e-9)
        assert metrics.ap == pytest.approx(50.0, abs=1e-9)

    def test_top_k_caps_considered_detections(self):
        refs = reference_set(n_samples=1, n_instances=4)
        capped = evaluate_labels(refs, refs, top_k=2)
        assert capped.ar == pytest.approx(50.0, abs=1e-9)


class TestMatching:
    def test_unknown_predicted_id_raises(self):
        refs = reference_set(n_samples=1)
        preds = {"mystery": refs["s0"]}
        with pytest.raises(IdMismatchError):
            evaluate_labels(preds, refs)

    def test_offset_beyond_iou_threshold_zeroes_ap(self):
        refs = reference_set(n_samples=2)
        preds = {}
        for sid, ref in refs.items():
            moved = [
                VertebraInstance(inst.contour + [40.0, 0.0], inst.confidence)
                for inst in ref.sample.instances
            ]
            preds[sid] = with_instances(ref, moved)
        assert evaluate_labels(preds, refs).ap == pytest.approx(0.0, abs=1e-9)

    def test_iou_threshold_is_inclusive(self):
        ref_inst = [
            rect_instance((60.0, 30.0), width=30, height=13),
            rect_instance((60.0, 60.0), width=30, height=13),
        ]
        refs = {"s0": annotate(SpineSample.from_instances("s0", ref_inst))}

        # 10 px of lateral shift on a 30 px wide box is IoU exactly 0.5
        def shifted(dx):
            moved = [
                VertebraInstance(inst.contour + [dx, 0.0], inst.confidence)
                for inst in ref_inst
            ]
            return {"s0": annotate(SpineSample.from_instances("s0", moved))}

        assert evaluate_labels(shifted(10.0), refs).ap == pytest.approx(100.0)
        assert evaluate_labels(shifted(10.5), refs).ap == pytest.approx(0.0)

    def test_duplicate_detection_is_false_positive(self):
        ref_inst = [rect_instance((60.0, 30.0), width=30, height=13)]
        refs = {"s0": annotate(SpineSample.from_instances("s0", ref_inst))}
        dup = [
            VertebraInstance(ref_inst[0].contour, 0.9),
            VertebraInstance(ref_inst[0].contour + 0.5, 0.8),
        ]
        preds = {"s0": annotate(SpineSample.from_instances("s0", dup))}
        metrics = evaluate_labels(preds, refs)
        assert metrics.ap == pytest.approx(100.0, abs=1e-9)
        assert metrics.ar == pytest.approx(100.0, abs=1e-9)

    def test_hand_computed_average_precision(self):
        ref_inst = [
            rect_instance((60.0, 30.0), width=30, height=13),
            rect_instance((60.0, 60.0), width=30, height=13),
        ]
        refs = {"s0": annotate(SpineSample.from_instances("s0", ref_inst))}
        preds_inst = [
            VertebraInstance(ref_inst[0].contour, 0.9),
            VertebraInstance(ref_inst[0].contour + [80.0, 5.0], 0.8),
            VertebraInstance(ref_inst[1].contour, 0.7),
        ]
        preds = {"s0": annotate(SpineSample.from_instances("s0", preds_inst))}
        metrics = evaluate_labels(preds, refs)
        # conf order: TP, FP, TP -> precision envelope 1.0 then 2/3
        assert metrics.ap == pytest.approx(100.0 * (0.5 + 0.5 * 2 / 3))


class TestAngleAgreement:
    def test_smape_and_ed_aggregate_over_samples(self):
        refs = {
            "s0": annotate(chain_sample((0.0, 30.0), sample_id="s0")),
            "s1": annotate(chain_sample((0.0, 40.0), sample_id="s1")),
        }
        preds = {
            "s0": annotate(chain_sample((0.0, 20.0), sample_id="s0")),
            "s1": annotate(chain_sample((0.0, 40.0), sample_id="s1")),
        }
        metrics = evaluate_labels(preds, refs)
        assert metrics.smape == pytest.approx((20.0 + 0.0) / 2, abs=1e-9)
        assert metrics.mean_ed == pytest.approx((10.0 + 0.0) / 2, abs=1e-9)

    def test_missing_sample_compares_against_zero_report(self):
        refs = {"s0": annotate(chain_sample((0.0, 30.0), sample_id="s0"))}
        metrics = evaluate_labels({}, refs)
        assert metrics.smape == pytest.approx(200.0 * 30.0 / 60.0, abs=1e-9)
        assert metrics.mean_ed == pytest.approx(30.0, abs=1e-9)


class TestLabelMetrics:
    def test_dict_view(self):
        metrics = LabelMetrics(ap=96.5, ar=88.0, smape=4.5, mean_ed=3.25)
        assert metrics.to_dict() == {
            "ap": 96.5,
            "ar": 88.0,
            "smape": 4.5,
            "mean_ed": 3.25,
        }
