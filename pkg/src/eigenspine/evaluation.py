"""Label-quality metrics: detection AP/AR and Cobb angle agreement.

Predictions are matched to reference instances greedily in descending
confidence order at a fixed polygon-IoU threshold.  AP is the area
under the all-point interpolated precision-recall curve over the whole
corpus; AR is the mean per-sample recall with at most ``top_k`` highest
confidence detections considered.  Angle agreement compares each
sample's maximum Cobb angle (SMAPE) and its regional report (mean
Euclidean distance).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from shapely.geometry import Polygon

from .errors import IdMismatchError
from .geometry import angle_ed, smape, zero_report

IOU_THRESHOLD = 0.5
TOP_K_RECALL = 20


@dataclass(frozen=True)
class LabelMetrics:
    """Corpus-level label quality, percentages in [0, 100]."""

    ap: float
    ar: float
    smape: float
    mean_ed: float

    def to_dict(self) -> dict:
        return {
            "ap": self.ap,
            "ar": self.ar,
            "smape": self.smape,
            "mean_ed": self.mean_ed,
        }


def _prepared(instances) -> list:
    """Contours with bounding boxes and lazily repaired polygons."""
    out = []
    for inst in instances:
        contour = inst.contour
        out.append(
            {
                "contour": contour,
                "lo": contour.min(axis=0),
                "hi": contour.max(axis=0),
                "poly": None,
                "confidence": inst.confidence,
            }
        )
    return out


def _polygon(entry) -> Polygon:
    if entry["poly"] is None:
        poly = Polygon(entry["contour"])
        if not poly.is_valid:
            poly = poly.buffer(0)
        entry["poly"] = poly
    return entry["poly"]


def _iou(a, b) -> float:
    if np.any(a["hi"] <= b["lo"]) or np.any(b["hi"] <= a["lo"]):
        return 0.0
    pa, pb = _polygon(a), _polygon(b)
    inter = pa.intersection(pb).area
    union = pa.area + pb.area - inter
    return inter / union if union > 0 else 0.0


def _match(preds, refs, iou_threshold: float) -> list:
    """True/false-positive flags for confidence-ordered predictions."""
    order = sorted(range(len(preds)), key=lambda i: -preds[i]["confidence"])
    taken = [False] * len(refs)
    flags = []
    for i in order:
        best_iou = 0.0
        best_j = -1
        for j, ref in enumerate(refs):
            if taken[j]:
                continue
            iou = _iou(preds[i], ref)
            if iou > best_iou:
                best_iou = iou
                best_j = j
        if best_j >= 0 and best_iou >= iou_threshold:
            taken[best_j] = True
            flags.append((preds[i]["confidence"], True))
        else:
            flags.append((preds[i]["confidence"], False))
    return flags


def _as_mapping(dataset) -> dict:
    if isinstance(dataset, dict):
        return dict(dataset)
    return {item.sample_id: item for item in dataset}


def _average_precision(scored: list, n_refs: int) -> float:
    if n_refs == 0 or not scored:
        return 0.0
    scored = sorted(scored, key=lambda t: -t[0])
    tp = np.cumsum([1.0 if flag else 0.0 for _, flag in scored])
    fp = np.cumsum([0.0 if flag else 1.0 for _, flag in scored])
    recall = tp / n_refs
    precision = tp / np.maximum(tp + fp, 1e-12)
    mrec = np.concatenate(([0.0], recall, [1.0]))
    mpre = np.concatenate(([0.0], precision, [0.0]))
    for i in range(mpre.size - 2, -1, -1):
        mpre[i] = max(mpre[i], mpre[i + 1])
    changed = np.where(mrec[1:] != mrec[:-1])[0]
    return float(np.sum((mrec[changed + 1] - mrec[changed]) * mpre[changed + 1]))


def evaluate_labels(
    pred_dataset,
    ref_dataset,
    iou_threshold: float = IOU_THRESHOLD,
    top_k: int = TOP_K_RECALL,
) -> LabelMetrics:
    """Score a predicted dataset against a same-id reference dataset.

    Reference samples without a predicted counterpart count as zero
    detections; predicted ids absent from the reference raise
    :class:`IdMismatchError`.
    """
    preds = _as_mapping(pred_dataset)
    refs = _as_mapping(ref_dataset)
    for sid in preds:
        if sid not in refs:
            raise IdMismatchError(sid)

    scored = []
    total_refs = 0
    recalls = []
    pred_max = []
    ref_max = []
    eds = []
    for sid in sorted(refs):
        ref = refs[sid]
        ref_entries = _prepared(ref.sample.instances)
        total_refs += len(ref_entries)
        pred = preds.get(sid)
        pred_entries = _prepared(pred.sample.instances) if pred else []
        flags = _match(pred_entries, ref_entries, iou_threshold)
        scored.extend(flags)
        if ref_entries:
            top = flags[: min(top_k, len(flags))]
            recalls.append(sum(1 for _, ok in top if ok) / len(ref_entries))
        pred_report = pred.cobb if pred else zero_report()
        pred_max.append(pred_report.max_deg)
        ref_max.append(ref.cobb.max_deg)
        eds.append(angle_ed(pred_report, ref.cobb))

    ap = _average_precision(scored, total_refs) * 100.0
    ar = float(np.mean(recalls)) * 100.0 if recalls else 0.0
    angle_smape = smape(pred_max, ref_max) if ref_max else 0.0
    mean_ed = float(np.mean(eds)) if eds else 0.0
    return LabelMetrics(ap=ap, ar=ar, smape=angle_smape, mean_ed=mean_ed)
