"""System acceptance suite: one test per shipped guarantee.

Running ``pytest -v tests/test_acceptance.py`` prints one PASSED or
FAILED line per criterion.  The 500-sample synthetic pool used by the
curation-loop criteria is expensive, so it is built once per module and
shared; every other criterion runs on purpose-built fixtures.
"""

import json
import math
import time
from types import SimpleNamespace

import numpy as np
import pytest

from eigenspine import (
    AnnotatedSample,
    CorpusStats,
    DataEngine,
    EngineConfig,
    LossWeights,
    NoisyOracle,
    PoolSample,
    SimilarityConfig,
    SpineSample,
    SpineSpec,
    VertebraInstance,
    angle_ed,
    cobb_report,
    confidence_filter,
    cross_entropy,
    cs,
    evaluate_labels,
    fit_basis,
    focal,
    generate,
    make_corpus,
    pixel_distance,
    privacy_audit,
    project,
    reconstruct,
    reconstruction_error,
    sample_filters,
    segment_filters,
    smape,
    smooth_l1,
    ssim,
    texture_image,
    total_loss,
    zero_report,
)
from eigenspine.annotations import append_ledger_rows, write_annotations
from eigenspine.engine import (
    CENTER_OUTLIER,
    ILLEGAL_COORDS,
    INVALID_CONTOUR,
    LOW_AREA,
    TOO_FEW_INSTANCES,
)

from helpers import rect_instance
from oracles import polygon_is_simple, shoelace_area, svd_oracle, tail_energy

# Shared pool geometry for the engine criteria.  Twelve vertebrae on a
# 256px canvas keep a full three-mode engine comparison under a minute.
POOL_SIZE = 500
SEED_CORPUS_SIZE = 60
CANVAS = (256, 256)
N_VERTEBRAE = 12
VERTEBRA_SIZE = (30.0, 13.0)


@pytest.fixture(scope="module")
def engine_corpus():
    pool_gen = make_corpus(
        POOL_SIZE, seed=11, n_vertebrae=N_VERTEBRAE,
        vertebra_size=VERTEBRA_SIZE, canvas=CANVAS, prefix="pool",
    )
    seed_gen = make_corpus(
        SEED_CORPUS_SIZE, seed=77, n_vertebrae=N_VERTEBRAE,
        vertebra_size=VERTEBRA_SIZE, canvas=CANVAS, prefix="seed",
    )
    truths = {g.sample.sample_id: g.sample for g in pool_gen}
    truth_ann = {
        g.sample.sample_id: AnnotatedSample(sample=g.sample, cobb=g.report)
        for g in pool_gen
    }
    pool = [
        PoolSample(sample_id=g.sample.sample_id, image=g.image)
        for g in pool_gen
    ]
    seed_corpus = [
        AnnotatedSample(sample=g.sample, cobb=g.report) for g in seed_gen
    ]
    references = [texture_image(CANVAS, seed=900 + i) for i in range(12)]
    sim = SimilarityConfig()
    verdicts = {
        ps.sample_id: privacy_audit(
            ps.image, references, sim, sample_id=ps.sample_id
        ).rejected
        for ps in pool
    }
    return SimpleNamespace(
        pool=pool,
        truths=truths,
        truth_ann=truth_ann,
        seed_corpus=seed_corpus,
        references=references,
        verdicts=verdicts,
    )


def test_criterion_1_rank_m_reconstruction_matches_svd_oracle():
    """Fitted bases are orthonormal and hit the optimal residual."""
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    for _ in range(200):
        rows = 2 * int(rng.integers(2, 7))
        cols = int(rng.integers(1, 9))
        matrix = rng.standard_normal((rows, cols)) * rng.uniform(0.5, 3.0)
        m = int(rng.integers(1, min(rows, cols) + 1))
        basis = fit_basis(matrix, m)

        gram = basis.basis.T @ basis.basis
        assert np.max(np.abs(gram - np.eye(m))) <= 1e-9

        _, sigma, _ = svd_oracle(matrix)
        optimal = tail_energy(sigma, m)
        assert abs(reconstruction_error(basis, matrix) - optimal) <= 1e-8
    assert time.perf_counter() - start < 5.0


def test_criterion_2_projection_round_trips_are_stable():
    """Coefficients survive reconstruct/project; projection idempotent."""
    rng = np.random.default_rng(2)
    cases = 0
    for _ in range(200):
        rows = 2 * int(rng.integers(2, 15))
        cols = int(rng.integers(2, 13))
        m = int(rng.integers(1, min(rows, cols) + 1))
        basis = fit_basis(rng.standard_normal((rows, cols)) * 5.0, m)
        for _ in range(5):
            coeffs = rng.standard_normal(m) * 10.0
            contour = reconstruct(basis, coeffs)
            back = project(basis, contour)
            assert np.max(np.abs(back - coeffs)) <= 1e-9

            noisy = contour + rng.standard_normal(rows)
            once = reconstruct(basis, project(basis, noisy))
            twice = reconstruct(basis, project(basis, once))
            assert np.max(np.abs(twice - once)) <= 1e-9
            cases += 1
    assert cases == 1000


def test_criterion_3_cobb_closed_loop_and_rigid_invariance():
    """Generated spines measure back near target; angles ignore pose."""
    hits = 0
    total = 0
    for target in (10.0, 30.0, 60.0):
        for seed in range(50):
            out = generate(SpineSpec(target_max_cobb_deg=target, seed=seed))
            measured = cobb_report(out.sample).max_deg
            total += 1
            hits += abs(measured - target) <= 2.0
    assert hits / total >= 0.95

    sample = generate(SpineSpec(target_max_cobb_deg=30.0, seed=7)).sample
    base = cobb_report(sample)

    def rebuilt(transform):
        instances = [
            VertebraInstance(
                contour=transform(np.asarray(inst.contour, dtype=float)),
                confidence=inst.confidence,
            )
            for inst in sample.instances
        ]
        return cobb_report(SpineSample.from_instances("rigid", instances))

    theta = math.radians(7.3)
    rot = np.array(
        [[math.cos(theta), -math.sin(theta)],
         [math.sin(theta), math.cos(theta)]]
    )
    center = np.array([256.0, 256.0])
    variants = (
        rebuilt(lambda pts: (pts - center) @ rot.T + center),
        rebuilt(lambda pts: pts + np.array([31.5, -12.25])),
        rebuilt(lambda pts: pts * 1.7),
    )
    for report in variants:
        assert report.pt_deg == pytest.approx(base.pt_deg, abs=1e-6)
        assert report.mt_deg == pytest.approx(base.mt_deg, abs=1e-6)
        assert report.tll_deg == pytest.approx(base.tll_deg, abs=1e-6)
        assert report.max_deg == pytest.approx(base.max_deg, abs=1e-6)
        assert report.pt_pair == base.pt_pair
        assert report.mt_pair == base.mt_pair
        assert report.tll_pair == base.tll_pair


def test_criterion_4_similarity_and_error_metric_axioms():
    """Identity, symmetry, range, and triangle-inequality checks."""
    rng = np.random.default_rng(4)

    for _ in range(100):
        a = rng.uniform(0.0, 90.0, size=3)
        b = rng.uniform(0.0, 90.0, size=3)
        a[rng.integers(0, 3)] = 0.0
        value = smape(a, b)
        assert value == pytest.approx(smape(b, a), abs=1e-12)
        assert 0.0 <= value <= 100.0
        assert smape(a, a) == 0.0

    image = rng.uniform(0.0, 255.0, size=(24, 24))
    assert ssim(image, image) == pytest.approx(1.0, abs=1e-9)
    assert pixel_distance(image, image) == 0.0
    assert cs(image, image) == pytest.approx(1.0, abs=1e-9)

    for _ in range(500):
        x, y, z = (rng.uniform(0.0, 255.0, size=(8, 8)) for _ in range(3))
        assert pixel_distance(x, z) <= (
            pixel_distance(x, y) + pixel_distance(y, z) + 1e-12
        )


def test_criterion_5_privacy_gate_blocks_copies_only():
    """Duplicates are rejected, novel candidates pass, gate is monotone."""
    cfg = SimilarityConfig()
    assert (cfg.lambda_ss, cfg.lambda_ps, cfg.tau_cs) == (0.2, 0.8, 0.6)

    reference_gen = make_corpus(
        200, seed=2000, n_vertebrae=8, vertebra_size=(20.0, 9.0),
        canvas=(128, 128), prefix="ref",
    )
    references = [g.image for g in reference_gen]

    for idx in (0, 99, 199):
        audit = privacy_audit(references[idx], references, cfg)
        assert audit.rejected
        assert audit.max_cs == pytest.approx(1.0, abs=1e-9)

    false_rejections = 0
    for i in range(40):
        candidate = texture_image((128, 128), seed=7000 + i)
        false_rejections += privacy_audit(candidate, references, cfg).rejected
    assert false_rejections == 0

    # Blends between a reference and an unrelated texture trace a
    # similarity ramp; a stricter gate must never reject fewer of them.
    texture = texture_image((128, 128), seed=7000).astype(float)
    ref = references[0].astype(float)
    blends = [
        np.clip((1.0 - w) * ref + w * texture, 0.0, 255.0)
        for w in (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
    ]
    counts = []
    for tau in (0.3, 0.45, 0.6, 0.75, 0.9):
        gate = SimilarityConfig(tau_cs=tau)
        counts.append(
            sum(privacy_audit(b, references, gate).rejected for b in blends)
        )
    assert counts == sorted(counts, reverse=True)
    assert counts[0] > counts[-1]


def test_criterion_6_each_filter_reason_fires_exactly_once():
    """Boundary fixtures trip every legality reason once and only once."""
    config = EngineConfig()
    canvas = (200, 100)
    fired = []

    # Segment level: 199 vs 200 px^2, one off-canvas rect, one contour
    # that crosses itself without losing enclosed area.
    dip = np.array(
        [[10.0, 10.0], [90.0, 10.0], [90.0, 60.0],
         [40.0, 20.0], [60.0, 20.0], [10.0, 60.0]]
    )
    assert not polygon_is_simple(dip)
    assert shoelace_area(dip) >= config.min_area_px2
    segment_fixture = [
        rect_instance((50.0, 30.0), width=20.0, height=10.0),
        rect_instance((50.0, 70.0), width=19.9, height=10.0),
        rect_instance((-3.0, 50.0), width=30.0, height=13.0),
        VertebraInstance(contour=dip, confidence=0.9),
        rect_instance((120.0, 30.0), width=20.0, height=10.0),
    ]
    kept, rejected = segment_filters(segment_fixture, canvas, config)
    assert len(kept) == 2
    for _, reasons in rejected:
        fired.extend(reasons)

    # Sample level: 9 vs 10 instances, then a centroid gap at 3.01 vs
    # 2.99 times the corpus mean.
    stats = CorpusStats(mean_center_gap=10.0)

    def chain(gaps):
        centers = np.cumsum([0.0, *gaps]) + 20.0
        return [
            rect_instance((60.0, y), width=20.0, height=8.0) for y in centers
        ]

    verdicts = [
        sample_filters(chain([10.0] * 8), stats, config),
        sample_filters(chain([10.0] * 9), stats, config),
        sample_filters(chain([10.0] * 10 + [30.1]), stats, config),
        sample_filters(chain([10.0] * 10 + [29.9]), stats, config),
    ]
    assert not verdicts[0].ok and verdicts[1].ok
    assert not verdicts[2].ok and verdicts[3].ok
    for verdict in verdicts:
        fired.extend(verdict.reasons)

    assert sorted(fired) == sorted(
        [CENTER_OUTLIER, ILLEGAL_COORDS, INVALID_CONTOUR, LOW_AREA,
         TOO_FEW_INSTANCES]
    )


def _run_engine(corpus, mode):
    config = EngineConfig(tau_c=0.3, selection_mode=mode, max_iterations=8)
    oracle = NoisyOracle(corpus.truths, seed=0)
    oracle.refresh([], corpus.seed_corpus, len(corpus.pool))
    engine = DataEngine(
        corpus.pool, config, predictor=oracle,
        seed_corpus=corpus.seed_corpus, references=corpus.references,
        privacy_verdicts=corpus.verdicts,
    )
    results = engine.run()
    predictions = {a.sample_id: a for a in results[-1].snapshot}
    refs = {sid: corpus.truth_ann[sid] for sid in predictions}
    metrics = evaluate_labels(predictions, refs)
    return results, metrics


def _write_artifacts(results, outdir):
    outdir.mkdir()
    for i, result in enumerate(results):
        rows = [
            {"iteration": i, "sample_id": sid, "v": int(accepted),
             "reasons": list(reasons)}
            for sid, accepted, reasons in result.ledger_rows
        ]
        append_ledger_rows(rows, outdir / "ledger.jsonl")
        write_annotations(result.snapshot, outdir / f"snapshot_{i:03d}.jsonl")
    return {
        path.name: path.read_bytes() for path in sorted(outdir.iterdir())
    }


def test_criterion_7_curation_loop_converges_and_orders_modes(
    engine_corpus, tmp_path
):
    """Self-training converges fast and filtering never hurts quality."""
    start = time.perf_counter()
    runs = {
        mode: _run_engine(engine_corpus, mode)
        for mode in ("cumulative", "independent", "no_filter")
    }
    rerun_results, _ = _run_engine(engine_corpus, "cumulative")
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0

    for mode, (results, _) in runs.items():
        assert results[-1].converged, mode
        assert len(results) <= 6, mode

    ap = {mode: metrics.ap for mode, (_, metrics) in runs.items()}
    assert ap["cumulative"] >= ap["independent"]
    assert ap["independent"] >= ap["no_filter"] - 0.5

    first = _write_artifacts(runs["cumulative"][0], tmp_path / "run_a")
    second = _write_artifacts(rerun_results, tmp_path / "run_b")
    assert first == second


def test_criterion_8_confidence_sweep_has_interior_minimum(engine_corpus):
    """Angle error over the confidence threshold is U-shaped."""
    oracle = NoisyOracle(
        engine_corpus.truths, seed=0, base_noise_px=0.6, spurious_rate=0.5
    )
    predictions = {
        ps.sample_id: oracle.predict(ps) for ps in engine_corpus.pool
    }
    taus = [round(0.1 * i, 1) for i in range(1, 10)]
    errors = []
    for tau in taus:
        total = 0.0
        for ps in engine_corpus.pool:
            kept = confidence_filter(predictions[ps.sample_id], tau)
            if len(kept) >= 2:
                report = cobb_report(SpineSample.from_instances("t", kept))
            else:
                report = zero_report()
            total += angle_ed(report, engine_corpus.truth_ann[ps.sample_id].cobb)
        errors.append(total / len(engine_corpus.pool))

    assert all(math.isfinite(e) for e in errors)
    best = int(np.argmin(errors))
    assert 0 < best < len(taus) - 1
    assert errors[0] > errors[best]
    assert errors[-1] > errors[best]


def test_criterion_9_loss_identities_hold():
    """Focal reduces to cross-entropy; smooth-L1 is C1; loss is linear."""
    plain = LossWeights(focal_gamma=0.0, focal_alpha=1.0)
    grid = np.concatenate(
        [np.linspace(0.001, 0.999, 200), [0.0, 1e-7, 0.5, 1.0 - 1e-7, 1.0]]
    )
    for p in grid:
        for y in (0, 1):
            assert abs(focal(p, y, plain) - cross_entropy(p, y)) <= 1e-12

    h = 1e-6
    for kink in (1.0, -1.0):
        f = lambda x: smooth_l1([x], [0.0])
        central = (f(kink + h) - f(kink - h)) / (2.0 * h)
        forward = (f(kink + h) - f(kink)) / h
        backward = (f(kink) - f(kink - h)) / h
        assert central == pytest.approx(math.copysign(1.0, kink), abs=1e-6)
        assert abs(forward - backward) <= 1e-6

    rng = np.random.default_rng(9)
    reg_terms = [
        (rng.standard_normal(8), rng.standard_normal(8), bool(i % 2))
        for i in range(6)
    ]
    sr_terms = [(rng.uniform(0.01, 0.99), int(rng.integers(0, 2)))
                for _ in range(5)]
    ssr_terms = [(rng.uniform(0.01, 0.99), int(rng.integers(0, 2)))
                 for _ in range(5)]

    def total(lambda_reg, lambda_cls):
        weights = LossWeights(
            lambda_reg=lambda_reg, lambda_cls=lambda_cls,
            focal_gamma=2.0, focal_alpha=0.25,
        )
        return total_loss(reg_terms, sr_terms, ssr_terms, weights)

    reg_part = total(1.0, 0.0)
    cls_part = total(0.0, 1.0)
    for _ in range(20):
        a = float(rng.uniform(0.05, 4.0))
        b = float(rng.uniform(0.05, 4.0))
        expected = a * reg_part + b * cls_part
        assert total(a, b) == pytest.approx(expected, rel=1e-9)
