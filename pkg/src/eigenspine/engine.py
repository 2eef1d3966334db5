"""Iterative pseudo-label curation engine.

Each iteration pseudo-labels the unlabeled pool with a pluggable
predictor, then pushes every sample through confidence gating, segment
and sample legality filters, manual review, and a privacy gate before
admitting it to the accepted snapshot.  A selection ledger records a
verdict bit and rejection reasons for every pool sample every iteration;
the run converges when the verdict map repeats.

Selection modes
---------------
``no_filter``
    Only the confidence gate and the privacy gate apply.
``independent``
    All filters apply; every iteration re-judges every sample afresh.
``cumulative``
    All filters apply; a rejected sample stays rejected in later
    iterations.  A reviewer's approval or correction lifts that
    stickiness, since the engine defers to human judgment.

Manual review feeds on samples that fail sample-level filters.  In
strict mode an iteration refuses to start while items are pending; in
the default mode pending samples are committed as rejected for now and
picked up again on later iterations (mode permitting).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from shapely.geometry import Polygon

from .annotations import AnnotatedSample, save_gray_png
from .basis import EigenSpineBasis, project, reconstruct
from .errors import (
    AnnotationFormatError,
    BlockedOnReviewError,
    IdMismatchError,
    MissingStatsError,
    NoPredictorError,
)
from .geometry import (
    SpineSample,
    VertebraInstance,
    cobb_report,
    polygon_area,
    zero_report,
)
from .similarity import SimilarityConfig, privacy_audit
from .synthetic import PerturbSpec, perturb

LOW_AREA = "LOW_AREA"
ILLEGAL_COORDS = "ILLEGAL_COORDS"
INVALID_CONTOUR = "INVALID_CONTOUR"
TOO_FEW_INSTANCES = "TOO_FEW_INSTANCES"
CENTER_OUTLIER = "CENTER_OUTLIER"
MANUAL_REJECT = "MANUAL_REJECT"
PRIVACY = "PRIVACY"

SELECTION_MODES = ("no_filter", "independent", "cumulative")
REVIEW_FLAGS = ("NON_REALISTIC", "SPINAL_FRACTURE", "UNCLEAR")
REVIEW_ACTIONS = ("approve", "reject", "correct", "flag")


@dataclass(frozen=True)
class EngineConfig:
    """Thresholds and policy knobs for the curation loop."""

    tau_c: float = 0.3
    min_area_px2: float = 200.0
    min_instances: int = 10
    center_dist_factor: float = 3.0
    selection_mode: str = "cumulative"
    similarity: SimilarityConfig = field(default_factory=SimilarityConfig)
    max_iterations: int = 10
    strict_review: bool = False

    def __post_init__(self):
        if not 0.0 <= self.tau_c <= 1.0:
            raise ValueError(f"tau_c {self.tau_c} outside [0, 1]")
        if self.min_area_px2 <= 0:
            raise ValueError("min_area_px2 must be positive")
        if self.min_instances < 1:
            raise ValueError("min_instances must be at least 1")
        if self.center_dist_factor <= 0:
            raise ValueError("center_dist_factor must be positive")
        if self.selection_mode not in SELECTION_MODES:
            raise ValueError(
                f"selection_mode must be one of {SELECTION_MODES}, "
                f"got {self.selection_mode!r}"
            )
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be non-negative")


@dataclass(frozen=True)
class CorpusStats:
    """Corpus-level statistics consumed by sample filters."""

    mean_center_gap: float | None = None


@dataclass(frozen=True)
class SampleVerdict:
    ok: bool
    reasons: tuple = ()


@dataclass(frozen=True)
class PoolSample:
    """One unlabeled pool entry: an id, its image, and a serving path."""

    sample_id: str
    image: np.ndarray
    image_ref: str = ""

    @property
    def canvas(self) -> tuple:
        return (self.image.shape[1], self.image.shape[0])


@dataclass
class ReviewItem:
    """A sample awaiting human judgment, with its filter context."""

    sample_id: str
    instances: tuple
    reasons: tuple
    canvas: tuple
    image: str = ""
    status: str = "pending"
    flags: tuple = ()

    def to_dict(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "canvas": [int(self.canvas[0]), int(self.canvas[1])],
            "reasons": list(self.reasons),
            "image": self.image,
            "status": self.status,
            "flags": list(self.flags),
            "instances": [
                {
                    "contour": [[float(x), float(y)] for x, y in inst.contour],
                    "confidence": float(inst.confidence),
                }
                for inst in self.instances
            ],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "ReviewItem":
        try:
            instances = tuple(
                VertebraInstance(
                    contour=np.asarray(item["contour"], dtype=float),
                    confidence=float(item.get("confidence", 1.0)),
                )
                for item in payload["instances"]
            )
            return cls(
                sample_id=payload["sample_id"],
                instances=instances,
                reasons=tuple(payload.get("reasons", ())),
                canvas=tuple(payload["canvas"]),
                image=payload.get("image", ""),
                status=payload.get("status", "pending"),
                flags=tuple(payload.get("flags", ())),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise AnnotationFormatError(
                f"malformed review item: {exc}"
            ) from exc


@dataclass(frozen=True)
class IterationResult:
    """Everything one iteration committed."""

    iteration: int
    ledger_rows: tuple
    snapshot: tuple
    converged: bool
    pending_review: tuple


def confidence_filter(predictions, tau_c: float) -> list:
    """Keep predictions whose confidence meets the threshold (inclusive)."""
    if not 0.0 <= tau_c <= 1.0:
        raise ValueError(f"tau_c {tau_c} outside [0, 1]")
    kept = []
    for pred in predictions:
        if not isinstance(pred, VertebraInstance):
            contour, confidence = pred
            pred = VertebraInstance(contour=contour, confidence=confidence)
        if pred.confidence >= tau_c:
            kept.append(pred)
    return kept


def _segment_reasons(instance: VertebraInstance, canvas, config) -> tuple:
    """All failed segment predicates, evaluated independently."""
    reasons = []
    if polygon_area(instance.contour) < config.min_area_px2:
        reasons.append(LOW_AREA)
    w, h = canvas
    x, y = instance.contour[:, 0], instance.contour[:, 1]
    if np.any(x < 0) or np.any(x >= w) or np.any(y < 0) or np.any(y >= h):
        reasons.append(ILLEGAL_COORDS)
    poly = Polygon(instance.contour)
    if len(instance.contour) < 3 or not poly.is_valid or poly.area <= 0:
        reasons.append(INVALID_CONTOUR)
    return tuple(reasons)


def segment_filters(instances, canvas, config: EngineConfig):
    """Split instances into survivors and rejects with reasons.

    The three predicates (area, coordinate legality, contour validity)
    are computed independently, so the kept set does not depend on any
    check ordering.
    """
    kept, rejected = [], []
    for inst in instances:
        reasons = _segment_reasons(inst, canvas, config)
        if reasons:
            rejected.append((inst, reasons))
        else:
            kept.append(inst)
    return kept, rejected


def sample_filters(sample, stats: CorpusStats, config: EngineConfig) -> SampleVerdict:
    """Sample-level verdict: instance count and centroid-gap outliers."""
    instances = getattr(sample, "instances", sample)
    reasons = []
    if len(instances) < config.min_instances:
        reasons.append(TOO_FEW_INSTANCES)
    if len(instances) >= 2:
        if stats is None or stats.mean_center_gap is None:
            raise MissingStatsError(
                "corpus mean center gap unavailable; supply CorpusStats"
            )
        if stats.mean_center_gap <= 0:
            raise MissingStatsError("corpus mean center gap must be positive")
        centroids = np.array(
            sorted(
                (inst.centroid for inst in instances),
                key=lambda c: c[1],
            )
        )
        gaps = np.linalg.norm(np.diff(centroids, axis=0), axis=1)
        if np.any(gaps > config.center_dist_factor * stats.mean_center_gap):
            reasons.append(CENTER_OUTLIER)
    return SampleVerdict(ok=not reasons, reasons=tuple(reasons))


def corpus_center_stats(samples) -> CorpusStats:
    """Mean consecutive-centroid distance over a labeled corpus."""
    gaps = []
    for item in samples:
        sample = getattr(item, "sample", item)
        centroids = np.array([inst.centroid for inst in sample.instances])
        if len(centroids) >= 2:
            gaps.extend(np.linalg.norm(np.diff(centroids, axis=0), axis=1))
    if not gaps:
        return CorpusStats(mean_center_gap=None)
    return CorpusStats(mean_center_gap=float(np.mean(gaps)))


class NoisyOracle:
    """Predictor that perturbs hidden ground truth.

    Each sample draws a difficulty level from its own deterministic rng:
    most get a small per-instance localization offset, a ``hard_rate``
    fraction a large one.  After every iteration :meth:`refresh` scores
    the labels the engine just accepted against the hidden truth and
    lowers the working noise level toward ``improve_coeff`` times that
    mean label error, emulating a detector fine-tuned on the enlarged
    labeled set: the cleaner the curated data, the better the next round
    of predictions.  The noise level is quantized and never increases,
    so the verdict map settles after a few iterations.
    """

    def __init__(
        self,
        truths: dict,
        seed: int = 0,
        base_noise_px: float = 1.6,
        hard_rate: float = 0.15,
        hard_offset: float = 8.0,
        regular_offset: float = 0.8,
        improve_coeff: float = 0.35,
        noise_quantum_px: float = 0.2,
        floor_noise_px: float = 0.4,
        miss_penalty_px: float = 8.0,
        error_cap_px: float = 25.0,
        drop_rate: float = 0.04,
        spurious_rate: float = 0.10,
        confidence_scale_px: float = 5.0,
    ):
        self.truths = dict(truths)
        self.seed = seed
        self.base_noise_px = float(base_noise_px)
        self.hard_rate = float(hard_rate)
        self.hard_offset = float(hard_offset)
        self.regular_offset = float(regular_offset)
        self.improve_coeff = float(improve_coeff)
        self.noise_quantum_px = float(noise_quantum_px)
        self.floor_noise_px = float(floor_noise_px)
        self.miss_penalty_px = float(miss_penalty_px)
        self.error_cap_px = float(error_cap_px)
        self.drop_rate = float(drop_rate)
        self.spurious_rate = float(spurious_rate)
        self.confidence_scale_px = float(confidence_scale_px)
        self.noise_px = float(base_noise_px)

    def _rng(self, sample_id: str) -> np.random.Generator:
        digest = hashlib.blake2b(
            f"{self.seed}:{sample_id}".encode(), digest_size=8
        ).digest()
        return np.random.default_rng(int.from_bytes(digest, "big"))

    def predict(self, pool_sample: PoolSample) -> list:
        truth = self.truths.get(pool_sample.sample_id)
        if truth is None:
            raise IdMismatchError(pool_sample.sample_id)
        rng = self._rng(pool_sample.sample_id)
        u_hard = rng.uniform()
        offset = self.hard_offset if u_hard < self.hard_rate else self.regular_offset
        spec = PerturbSpec(
            coord_noise_px=self.noise_px,
            offset_noise_px=self.noise_px * offset,
            confidence_scale_px=self.confidence_scale_px,
            drop_rate=self.drop_rate,
            spurious_rate=self.spurious_rate,
        )
        return list(perturb(truth, spec, rng).instances)

    def _label_error(self, annotated) -> float:
        """Mean per-instance deviation of one accepted label from truth.

        Instances pair with the nearest true centroid; distant spurious
        instances saturate at ``error_cap_px`` and unmatched true
        vertebrae cost ``miss_penalty_px`` each.
        """
        truth = self.truths.get(annotated.sample_id)
        if truth is None:
            raise IdMismatchError(annotated.sample_id)
        t_contours = [inst.contour for inst in truth.instances]
        t_centroids = np.array([c.mean(axis=0) for c in t_contours])
        matched = set()
        total = 0.0
        for inst in annotated.sample.instances:
            gaps = np.linalg.norm(t_centroids - inst.centroid, axis=1)
            j = int(gaps.argmin())
            matched.add(j)
            if t_contours[j].shape == inst.contour.shape:
                err = float(
                    np.linalg.norm(inst.contour - t_contours[j], axis=1).mean()
                )
            else:
                err = float(gaps[j])
            total += min(err, self.error_cap_px)
        total += self.miss_penalty_px * (len(t_contours) - len(matched))
        return total / max(len(t_contours), 1)

    def refresh(self, accepted, seed_corpus, pool_size: int) -> None:
        if not accepted:
            return
        mean_err = float(np.mean([self._label_error(a) for a in accepted]))
        target = max(self.floor_noise_px, self.improve_coeff * mean_err)
        quantum = self.noise_quantum_px
        if quantum > 0:
            target = round(target / quantum) * quantum
        self.noise_px = min(self.noise_px, max(target, self.floor_noise_px))


class NearestCoeff:
    """Baseline that redraws the per-slot mean contour of the corpus.

    Every labeled contour is projected onto the basis; predictions
    reconstruct the mean coefficient vector of each vertebra slot, with
    confidence equal to the slot's presence frequency.
    """

    def __init__(self, basis: EigenSpineBasis):
        self.basis = basis
        self.slot_coeffs = {}
        self.slot_freq = {}

    def refresh(self, accepted, seed_corpus, pool_size: int) -> None:
        labeled = list(seed_corpus) + list(accepted)
        per_slot = {}
        n_samples = 0
        for ann in labeled:
            sample = getattr(ann, "sample", ann)
            n_samples += 1
            for inst in sample.instances:
                per_slot.setdefault(inst.index, []).append(
                    project(self.basis, inst.contour)
                )
        if n_samples == 0:
            return
        self.slot_coeffs = {
            slot: np.mean(coeffs, axis=0) for slot, coeffs in per_slot.items()
        }
        self.slot_freq = {
            slot: min(1.0, len(coeffs) / n_samples)
            for slot, coeffs in per_slot.items()
        }

    def predict(self, pool_sample: PoolSample) -> list:
        out = []
        for slot in sorted(self.slot_coeffs):
            contour = reconstruct(self.basis, self.slot_coeffs[slot])
            out.append(
                VertebraInstance(
                    contour=contour.reshape(-1, 2),
                    confidence=self.slot_freq[slot],
                    index=slot,
                )
            )
        return out


class DataEngine:
    """Drives the curation loop over a fixed pool.

    Parameters
    ----------
    pool : sequence of PoolSample
        Unlabeled samples; processed in sample_id order.
    config : EngineConfig
    predictor : object, optional
        Must expose ``predict(pool_sample)``; may expose
        ``refresh(accepted, seed_corpus, pool_size)``.
    seed_corpus : sequence of AnnotatedSample
        Human-labeled samples that bootstrap corpus statistics and
        predictor refreshes.
    references : sequence of 2-D arrays
        Privacy reference images; empty disables the privacy gate.
    privacy_verdicts : mapping, optional
        Precomputed ``sample_id -> rejected`` verdicts; useful when the
        same pool is audited repeatedly.
    """

    def __init__(
        self,
        pool,
        config: EngineConfig,
        predictor=None,
        seed_corpus=(),
        references=(),
        reference_ids=None,
        privacy_verdicts=None,
    ):
        self.pool = sorted(pool, key=lambda p: p.sample_id)
        ids = [p.sample_id for p in self.pool]
        if len(set(ids)) != len(ids):
            raise ValueError("pool sample_ids must be unique")
        self._image_refs = {p.sample_id: p.image_ref for p in self.pool}
        self.config = config
        self.predictor = predictor
        self.seed_corpus = list(seed_corpus)
        self.references = list(references)
        self.reference_ids = reference_ids
        self._privacy_cache = dict(privacy_verdicts or {})
        self.audits = {}
        self.iteration = 0
        self.converged = False
        self.accepted = {}
        self.history = []
        self.review_queue = {}
        self.sticky_reject = {}
        self.manual_reject = {}
        self.overrides = {}
        self._applied_tokens = set()

    # ------------------------------------------------------------------
    # privacy

    def _privacy_rejected(self, pool_sample: PoolSample) -> bool:
        sid = pool_sample.sample_id
        if sid in self._privacy_cache:
            return self._privacy_cache[sid]
        if not self.references:
            verdict = False
        else:
            audit = privacy_audit(
                pool_sample.image,
                self.references,
                self.config.similarity,
                sample_id=sid,
                reference_ids=self.reference_ids,
            )
            self.audits[sid] = audit
            verdict = audit.rejected
        self._privacy_cache[sid] = verdict
        return verdict

    # ------------------------------------------------------------------
    # review

    def pending_review_ids(self) -> tuple:
        return tuple(
            sorted(
                sid
                for sid, item in self.review_queue.items()
                if item.status == "pending"
            )
        )

    def resolve(
        self,
        sample_id: str,
        action: str,
        contours=None,
        flags=(),
        token: str | None = None,
    ) -> ReviewItem:
        """Apply one human decision to a queued sample.

        Approve and correct lift any cumulative rejection; reject and
        flag are permanent.  A repeated ``token`` is a no-op, making
        retried submissions safe.
        """
        if action not in REVIEW_ACTIONS:
            raise ValueError(
                f"action must be one of {REVIEW_ACTIONS}, got {action!r}"
            )
        item = self.review_queue.get(sample_id)
        if item is None:
            raise IdMismatchError(sample_id)
        if token is not None and token in self._applied_tokens:
            return item
        flags = tuple(flags)
        unknown = set(flags) - set(REVIEW_FLAGS)
        if unknown:
            raise ValueError(f"unknown review flags: {sorted(unknown)}")

        if action == "approve":
            ann = self._annotate(sample_id, item.instances, source="pseudo")
            self.overrides[sample_id] = ann
            self.sticky_reject.pop(sample_id, None)
            item.status = "approved"
        elif action == "correct":
            if not contours:
                raise ValueError("correct action requires contours")
            instances = [
                VertebraInstance(contour=c, confidence=1.0) for c in contours
            ]
            kept, rejected = segment_filters(instances, item.canvas, self.config)
            if rejected:
                detail = "; ".join(
                    f"contour {i}: {', '.join(reasons)}"
                    for i, (_, reasons) in enumerate(rejected)
                )
                raise ValueError(f"corrected contours fail legality: {detail}")
            ann = self._annotate(sample_id, kept, source="corrected")
            self.overrides[sample_id] = ann
            self.sticky_reject.pop(sample_id, None)
            item.status = "corrected"
            item.instances = tuple(kept)
        elif action == "reject":
            self.manual_reject[sample_id] = (MANUAL_REJECT,)
            self.overrides.pop(sample_id, None)
            item.status = "rejected"
        else:  # flag
            if not flags:
                raise ValueError("flag action requires at least one flag")
            self.manual_reject[sample_id] = (MANUAL_REJECT,)
            self.overrides.pop(sample_id, None)
            item.status = "rejected"
        item.flags = tuple(sorted(set(item.flags) | set(flags)))
        if token is not None:
            self._applied_tokens.add(token)
        return item

    def export_review_state(self, state_dir) -> None:
        """Write the queue file and queued samples' images for the server.

        Layout: ``review_queue.json`` plus ``images/<sample_id>.png``
        under ``state_dir``; item image paths are relative to it.
        """
        state_dir = Path(state_dir)
        (state_dir / "images").mkdir(parents=True, exist_ok=True)
        pool_by_id = {p.sample_id: p for p in self.pool}
        items = []
        for sid in sorted(self.review_queue):
            entry = self.review_queue[sid].to_dict()
            pool_sample = pool_by_id.get(sid)
            if pool_sample is not None:
                rel = f"images/{sid}.png"
                save_gray_png(pool_sample.image, state_dir / rel)
                entry["image"] = rel
            items.append(entry)
        with open(state_dir / "review_queue.json", "w", encoding="utf-8") as fh:
            json.dump({"items": items}, fh, indent=2)
            fh.write("\n")

    def load_review_queue(self, path) -> None:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        for entry in payload.get("items", ()):
            item = ReviewItem.from_dict(entry)
            self.review_queue[item.sample_id] = item

    def apply_resolution_file(self, path) -> int:
        """Apply server-recorded resolutions; returns how many applied."""
        applied = 0
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                row = json.loads(line)
                self.resolve(
                    row["sample_id"],
                    row["action"],
                    contours=row.get("contours"),
                    flags=tuple(row.get("flags", ())),
                    token=row.get("token"),
                )
                applied += 1
        return applied

    # ------------------------------------------------------------------
    # iteration

    def _annotate(self, sample_id: str, instances, source: str) -> AnnotatedSample:
        sample = SpineSample.from_instances(sample_id, instances)
        report = cobb_report(sample) if len(sample.instances) >= 2 else zero_report()
        return AnnotatedSample(
            sample=sample,
            cobb=report,
            image=self._image_refs.get(sample_id, ""),
            source=source,
        )

    def _process(self, pool_sample: PoolSample, stats: CorpusStats):
        """Verdict for one sample: (v, reasons, annotated-or-None)."""
        sid = pool_sample.sample_id
        mode = self.config.selection_mode

        if sid in self.manual_reject:
            return 0, self.manual_reject[sid], None
        if sid in self.overrides:
            if self._privacy_rejected(pool_sample):
                reasons = (PRIVACY,)
                if mode == "cumulative":
                    self.sticky_reject.setdefault(sid, reasons)
                return 0, reasons, None
            return 1, (), self.overrides[sid]
        if mode == "cumulative" and sid in self.sticky_reject:
            return 0, self.sticky_reject[sid], None

        predictions = self.predictor.predict(pool_sample)
        instances = confidence_filter(predictions, self.config.tau_c)

        if mode == "no_filter":
            kept = instances
        else:
            kept, rejected_inst = segment_filters(
                instances, pool_sample.canvas, self.config
            )
            seg_codes = sorted(
                {code for _, codes in rejected_inst for code in codes}
            )
            verdict = sample_filters(kept, stats, self.config)
            if not verdict.ok:
                reasons = tuple(sorted(set(verdict.reasons) | set(seg_codes)))
                item = self.review_queue.get(sid)
                if item is None or item.status == "pending":
                    self.review_queue[sid] = ReviewItem(
                        sample_id=sid,
                        instances=tuple(kept),
                        reasons=reasons,
                        canvas=pool_sample.canvas,
                        image=pool_sample.image_ref,
                    )
                if mode == "cumulative":
                    self.sticky_reject.setdefault(sid, reasons)
                return 0, reasons, None

        if self._privacy_rejected(pool_sample):
            reasons = (PRIVACY,)
            if mode == "cumulative":
                self.sticky_reject.setdefault(sid, reasons)
            return 0, reasons, None

        return 1, (), self._annotate(sid, kept, source="pseudo")

    def run_iteration(self) -> IterationResult:
        """One full pass over the pool; commits ledger and snapshot."""
        if self.predictor is None:
            raise NoPredictorError("attach a predictor before iterating")
        pending = self.pending_review_ids()
        if self.config.strict_review and pending:
            raise BlockedOnReviewError(pending)

        stats = corpus_center_stats(
            self.seed_corpus + [self.accepted[k] for k in sorted(self.accepted)]
        )
        ledger_rows = []
        accepted_now = {}
        v_map = {}
        for pool_sample in self.pool:
            v, reasons, annotated = self._process(pool_sample, stats)
            v_map[pool_sample.sample_id] = v
            ledger_rows.append(
                {
                    "iteration": self.iteration,
                    "sample_id": pool_sample.sample_id,
                    "v": v,
                    "reasons": list(reasons),
                }
            )
            if annotated is not None:
                accepted_now[pool_sample.sample_id] = annotated

        converged = (not self.pool) or (
            bool(self.history) and v_map == self.history[-1]
        )
        self.history.append(v_map)
        self.accepted = accepted_now
        self.iteration += 1
        self.converged = converged

        if hasattr(self.predictor, "refresh"):
            self.predictor.refresh(
                [accepted_now[k] for k in sorted(accepted_now)],
                self.seed_corpus,
                len(self.pool),
            )
        return IterationResult(
            iteration=self.iteration - 1,
            ledger_rows=tuple(
                (row["sample_id"], row["v"], tuple(row["reasons"]))
                for row in ledger_rows
            ),
            snapshot=tuple(accepted_now[k] for k in sorted(accepted_now)),
            converged=converged,
            pending_review=self.pending_review_ids(),
        )

    def run(self, max_iterations: int | None = None) -> list:
        """Iterate until the verdict map repeats or the guard trips."""
        limit = (
            self.config.max_iterations
            if max_iterations is None
            else max_iterations
        )
        results = []
        for _ in range(limit):
            result = self.run_iteration()
            results.append(result)
            if result.converged:
                break
        return results

    def snapshot(self) -> tuple:
        """Currently accepted samples, sorted by id."""
        return tuple(self.accepted[k] for k in sorted(self.accepted))
