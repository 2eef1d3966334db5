"""Command-line entry point.

Subcommands: ``fit-basis``, ``cobb``, ``synth``, ``engine``,
``privacy-scan``, ``serve``.  Failures print a one-line JSON object to
standard error and exit non-zero: 2 for usage or schema problems, 3 for
rank-deficient corpora, 4 when an engine run is blocked on review, 5
when the serve port is taken.

Outputs are deterministic for a fixed seed; wall-clock timestamps go to
``run_log.txt`` only, never into snapshots, ledgers, or metrics.
"""

from __future__ import annotations

import argparse
import csv
import json
import socket
import sys
import time
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - Python 3.10 fallback
    import tomli as tomllib

from .annotations import (
    AnnotatedSample,
    load_gray_png,
    read_annotations,
    save_gray_png,
    write_annotations,
)
from .basis import EigenSpineBasis, build_contour_matrix, fit_basis
from .engine import (
    DataEngine,
    EngineConfig,
    NearestCoeff,
    NoisyOracle,
    PoolSample,
)
from .errors import (
    AnnotationFormatError,
    BlockedOnReviewError,
    DimensionMismatchError,
    EigenSpineError,
    EmptyInputError,
    IdMismatchError,
    InfeasibleSpecError,
    InvalidRankError,
    RankDeficientError,
)
from .evaluation import evaluate_labels
from .geometry import angle_ed, cobb_report, smape, zero_report
from .similarity import SimilarityConfig, privacy_audit, write_audit_csv
from .synthetic import make_corpus, texture_image

EXIT_USAGE = 2
EXIT_RANK_DEFICIENT = 3
EXIT_BLOCKED_ON_REVIEW = 4
EXIT_PORT_IN_USE = 5


def _fail(error: str, detail, exit_code: int):
    sys.stderr.write(json.dumps({"error": error, "detail": str(detail)}) + "\n")
    raise SystemExit(exit_code)


class _Parser(argparse.ArgumentParser):
    """Parser whose usage errors are machine-readable."""

    def error(self, message):
        _fail("usage", message, EXIT_USAGE)


def _read_annotations_or_die(path):
    try:
        return read_annotations(path)
    except OSError as exc:
        _fail("io_error", f"{path}: {exc}", EXIT_USAGE)
    except AnnotationFormatError as exc:
        _fail("annotation_error", f"{path}: {exc}", EXIT_USAGE)


def _load_png_dir(path, what: str):
    directory = Path(path)
    if not directory.is_dir():
        _fail("io_error", f"{what} directory not found: {directory}", EXIT_USAGE)
    files = sorted(directory.glob("*.png"))
    images, names = [], []
    for file in files:
        try:
            images.append(load_gray_png(file))
        except OSError as exc:
            _fail("io_error", f"unreadable image {file}: {exc}", EXIT_USAGE)
        names.append(file.stem)
    return images, names


def _load_config_file(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        _fail("io_error", f"{path}: {exc}", EXIT_USAGE)
    except tomllib.TOMLDecodeError as exc:
        _fail("config_error", f"{path}: {exc}", EXIT_USAGE)


def _pick(flag_value, file_cfg: dict, key: str, default):
    if flag_value is not None:
        return flag_value
    if key in file_cfg:
        return file_cfg[key]
    return default


# ----------------------------------------------------------------------
# fit-basis


def cmd_fit_basis(args) -> int:
    if args.m < 1:
        _fail("usage", f"--m must be a positive integer, got {args.m}", EXIT_USAGE)
    samples = _read_annotations_or_die(args.annotations)
    contours = [
        inst.contour for item in samples for inst in item.sample.instances
    ]
    try:
        matrix = build_contour_matrix(contours)
        basis = fit_basis(matrix, args.m)
    except RankDeficientError as exc:
        _fail("rank_deficient", exc, EXIT_RANK_DEFICIENT)
    except (EmptyInputError, DimensionMismatchError, InvalidRankError) as exc:
        _fail("usage", exc, EXIT_USAGE)
    basis.save(args.out)
    if not args.quiet:
        print("singular values:")
        for i, value in enumerate(basis.singular_values, start=1):
            print(f"  sigma_{i:02d} = {value:.6f}")
        # Residual energy per rank follows from coefficient energies,
        # since the basis columns are orthonormal.
        coeffs = basis.basis.T @ matrix
        norms2 = (matrix**2).sum(axis=0)
        cumulative = np.cumsum(coeffs**2, axis=0)
        print("rank  mean reconstruction error")
        for m in range(1, basis.m + 1):
            residual = np.sqrt(np.maximum(norms2 - cumulative[m - 1], 0.0))
            print(f"{m:4d}  {residual.mean():.6f}")
        print(f"basis written to {args.out}")
    return 0


# ----------------------------------------------------------------------
# cobb


def _report_for(sample) -> "object":
    if len(sample.instances) >= 2:
        return cobb_report(sample)
    return zero_report()


def cmd_cobb(args) -> int:
    preds = _read_annotations_or_die(args.annotations)
    reports = {item.sample_id: _report_for(item.sample) for item in preds}
    payload = {
        "samples": {sid: reports[sid].to_dict() for sid in sorted(reports)}
    }
    if args.ref:
        refs = _read_annotations_or_die(args.ref)
        ref_map = {item.sample_id: item for item in refs}
        for sid in sorted(reports):
            if sid not in ref_map:
                _fail(
                    "id_mismatch",
                    f"sample {sid} missing from reference file",
                    EXIT_USAGE,
                )
        ids = sorted(reports)
        aggregate_smape = smape(
            [reports[sid].max_deg for sid in ids],
            [ref_map[sid].cobb.max_deg for sid in ids],
        )
        mean_ed = float(
            np.mean([angle_ed(reports[sid], ref_map[sid].cobb) for sid in ids])
        )
        payload["aggregate"] = {
            "smape": aggregate_smape,
            "mean_ed": mean_ed,
            "n_samples": len(ids),
        }
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
        fh.write("\n")
    if not args.quiet:
        for sid in sorted(reports):
            print(f"{sid}: {reports[sid].summary()}")
        if "aggregate" in payload:
            agg = payload["aggregate"]
            print(
                f"aggregate over {agg['n_samples']} samples: "
                f"SMAPE {agg['smape']:.2f}%  mean ED {agg['mean_ed']:.2f}"
            )
    return 0


# ----------------------------------------------------------------------
# synth


def cmd_synth(args) -> int:
    out = Path(args.out)
    (out / "images").mkdir(parents=True, exist_ok=True)
    try:
        corpus = make_corpus(
            args.count,
            args.seed,
            n_vertebrae=args.n_vertebrae,
            vertebra_size=tuple(args.vertebra_size),
            canvas=tuple(args.canvas),
            prefix=args.prefix,
        )
    except (ValueError, InfeasibleSpecError) as exc:
        _fail("infeasible_spec", exc, EXIT_USAGE)
    annotated = []
    for generated in corpus:
        rel = f"images/{generated.sample.sample_id}.png"
        save_gray_png(generated.image, out / rel)
        annotated.append(
            AnnotatedSample(
                sample=generated.sample,
                cobb=generated.report,
                image=rel,
                source="seed",
            )
        )
    write_annotations(annotated, out / "annotations.jsonl")
    if args.textures:
        (out / "references").mkdir(parents=True, exist_ok=True)
        height, width = args.canvas[1], args.canvas[0]
        for i in range(args.textures):
            image = texture_image((height, width), seed=args.seed * 7919 + i)
            save_gray_png(image, out / "references" / f"texture_{i:03d}.png")
    if not args.quiet:
        print(
            f"wrote {len(annotated)} samples to {out / 'annotations.jsonl'}"
            + (f" and {args.textures} reference textures" if args.textures else "")
        )
    return 0


# ----------------------------------------------------------------------
# engine


def _engine_config(args, file_cfg: dict) -> EngineConfig:
    similarity = SimilarityConfig(
        lambda_ss=_pick(args.lambda_ss, file_cfg, "lambda_ss", 0.2),
        lambda_ps=_pick(args.lambda_ps, file_cfg, "lambda_ps", 0.8),
        tau_cs=_pick(args.tau_cs, file_cfg, "tau_cs", 0.6),
    )
    return EngineConfig(
        tau_c=_pick(args.tau_c, file_cfg, "tau_c", 0.3),
        min_area_px2=_pick(args.min_area, file_cfg, "min_area_px2", 200.0),
        min_instances=_pick(args.min_instances, file_cfg, "min_instances", 10),
        center_dist_factor=_pick(
            args.center_dist_factor, file_cfg, "center_dist_factor", 3.0
        ),
        selection_mode=_pick(args.selection, file_cfg, "selection_mode", "cumulative"),
        similarity=similarity,
        max_iterations=_pick(args.max_iterations, file_cfg, "max_iterations", 10),
        strict_review=bool(
            args.strict or file_cfg.get("strict_review", False)
        ),
    )


def cmd_engine(args) -> int:
    file_cfg = _load_config_file(args.config) if args.config else {}
    try:
        config = _engine_config(args, file_cfg)
    except ValueError as exc:
        _fail("config_error", exc, EXIT_USAGE)

    pool_ann = _read_annotations_or_die(args.pool)
    pool_dir = Path(args.pool).parent
    pool = []
    for item in pool_ann:
        if not item.image:
            _fail(
                "annotation_error",
                f"pool sample {item.sample_id} has no image path",
                EXIT_USAGE,
            )
        try:
            image = load_gray_png(pool_dir / item.image)
        except OSError as exc:
            _fail("io_error", f"{pool_dir / item.image}: {exc}", EXIT_USAGE)
        pool.append(
            PoolSample(
                sample_id=item.sample_id, image=image, image_ref=item.image
            )
        )

    seed_corpus = (
        _read_annotations_or_die(args.seed_corpus) if args.seed_corpus else []
    )
    references, reference_ids = (
        _load_png_dir(args.references, "reference")
        if args.references
        else ([], [])
    )

    if args.predictor == "noisy-oracle":
        predictor = NoisyOracle(
            {item.sample_id: item.sample for item in pool_ann},
            seed=args.seed,
            base_noise_px=args.noise_px,
            hard_rate=args.hard_rate,
            hard_offset=args.hard_offset,
            improve_coeff=args.improve_coeff,
            drop_rate=args.drop_rate,
            spurious_rate=args.spurious_rate,
            confidence_scale_px=args.confidence_scale_px,
        )
    else:
        if not args.basis:
            _fail("usage", "--predictor nearest-coeff requires --basis", EXIT_USAGE)
        try:
            basis = EigenSpineBasis.load(args.basis)
        except (OSError, AnnotationFormatError) as exc:
            _fail("io_error", f"{args.basis}: {exc}", EXIT_USAGE)
        predictor = NearestCoeff(basis)
    if hasattr(predictor, "refresh"):
        predictor.refresh([], seed_corpus, len(pool))

    engine = DataEngine(
        pool,
        config,
        predictor=predictor,
        seed_corpus=seed_corpus,
        references=references,
        reference_ids=reference_ids,
    )

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    state_dir = Path(args.state_dir) if args.state_dir else out
    queue_file = state_dir / "review_queue.json"
    resolutions_file = state_dir / "review_resolutions.jsonl"
    if queue_file.exists():
        engine.load_review_queue(queue_file)
    if resolutions_file.exists():
        try:
            engine.apply_resolution_file(resolutions_file)
        except (IdMismatchError, ValueError) as exc:
            _fail("resolution_error", exc, EXIT_USAGE)

    truth_map = {item.sample_id: item for item in pool_ann}
    ledger_path = out / "ledger.jsonl"
    ledger_path.unlink(missing_ok=True)
    log_path = out / "run_log.txt"
    metrics_rows = []

    def log(msg: str) -> None:
        with open(log_path, "a", encoding="utf-8") as fh:
            fh.write(f"[{time.strftime('%Y-%m-%dT%H:%M:%S')}] {msg}\n")

    log(
        f"engine start selection={config.selection_mode} tau_c={config.tau_c} "
        f"seed={args.seed} pool={len(pool)}"
    )

    def write_snapshot(index: int, snapshot) -> None:
        write_annotations(snapshot, out / f"snapshot_{index:03d}.jsonl")

    exit_code = 0
    if config.max_iterations == 0:
        write_snapshot(0, engine.snapshot())
        log("max_iterations=0: wrote initial snapshot only")
    else:
        try:
            while engine.iteration < config.max_iterations:
                started = time.perf_counter()
                result = engine.run_iteration()
                write_snapshot(result.iteration, result.snapshot)
                with open(ledger_path, "a", encoding="utf-8") as fh:
                    for sid, v, reasons in result.ledger_rows:
                        fh.write(
                            json.dumps(
                                {
                                    "iteration": result.iteration,
                                    "sample_id": sid,
                                    "v": v,
                                    "reasons": list(reasons),
                                }
                            )
                            + "\n"
                        )
                metrics = evaluate_labels(
                    {a.sample_id: a for a in result.snapshot}, truth_map
                )
                metrics_rows.append(
                    (result.iteration, len(result.snapshot), metrics)
                )
                log(
                    f"iteration {result.iteration}: accepted "
                    f"{len(result.snapshot)}/{len(pool)} "
                    f"ap={metrics.ap:.2f} in "
                    f"{time.perf_counter() - started:.2f}s"
                )
                if result.converged:
                    log(f"converged after {engine.iteration} iterations")
                    break
        except BlockedOnReviewError as exc:
            engine.export_review_state(state_dir)
            _write_metrics(out / "metrics.csv", metrics_rows)
            log(f"blocked on review: {exc}")
            _fail("blocked_on_review", exc, EXIT_BLOCKED_ON_REVIEW)

    engine.export_review_state(state_dir)
    _write_metrics(out / "metrics.csv", metrics_rows)
    if not args.quiet:
        print(
            f"iterations={engine.iteration} converged={engine.converged} "
            f"accepted={len(engine.accepted)}/{len(pool)} "
            f"pending_review={len(engine.pending_review_ids())}"
        )
    return exit_code


def _write_metrics(path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["iteration", "accepted", "ap", "ar", "smape", "mean_ed"]
        )
        for iteration, accepted, metrics in rows:
            writer.writerow(
                [
                    iteration,
                    accepted,
                    repr(metrics.ap),
                    repr(metrics.ar),
                    repr(metrics.smape),
                    repr(metrics.mean_ed),
                ]
            )


# ----------------------------------------------------------------------
# privacy-scan


def cmd_privacy_scan(args) -> int:
    references, reference_ids = _load_png_dir(args.references, "reference")
    if not references:
        _fail(
            "empty_reference_set",
            f"no PNG images in {args.references}",
            EXIT_USAGE,
        )
    candidates, candidate_ids = _load_png_dir(args.candidates, "candidate")
    try:
        cfg = SimilarityConfig(
            lambda_ss=args.lambda_ss if args.lambda_ss is not None else 0.2,
            lambda_ps=args.lambda_ps if args.lambda_ps is not None else 0.8,
            tau_cs=args.tau_cs if args.tau_cs is not None else 0.6,
        )
    except ValueError as exc:
        _fail("config_error", exc, EXIT_USAGE)
    audits = [
        privacy_audit(
            image,
            references,
            cfg,
            sample_id=name,
            reference_ids=reference_ids,
        )
        for name, image in zip(candidate_ids, candidates)
    ]
    write_audit_csv(audits, args.out)
    rejected = sum(1 for audit in audits if audit.rejected)
    if not args.quiet:
        print(
            f"{rejected}/{len(audits)} candidates rejected at "
            f"tau_cs={cfg.tau_cs}"
        )
    return 0


# ----------------------------------------------------------------------
# serve


def cmd_serve(args) -> int:
    state_dir = Path(args.state_dir)
    if not state_dir.is_dir():
        _fail("io_error", f"state directory not found: {state_dir}", EXIT_USAGE)
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((args.host, args.port))
    except OSError as exc:
        probe.close()
        _fail("port_in_use", f"{args.host}:{args.port}: {exc}", EXIT_PORT_IN_USE)
    probe.close()

    import uvicorn

    from .server import create_app

    uvicorn.run(
        create_app(state_dir),
        host=args.host,
        port=args.port,
        log_level="warning",
    )
    return 0


# ----------------------------------------------------------------------
# parser


def build_parser() -> _Parser:
    parser = _Parser(
        prog="eigenspine",
        description=(
            "Contour-basis fitting, Cobb angle measurement, synthetic "
            "corpora, pseudo-label curation, privacy scanning, and the "
            "review service."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit-basis", help="fit a contour basis from annotations")
    p.add_argument("--annotations", required=True)
    p.add_argument("--m", type=int, default=16)
    p.add_argument("--out", required=True)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_fit_basis)

    p = sub.add_parser("cobb", help="measure Cobb angles from annotations")
    p.add_argument("--annotations", required=True)
    p.add_argument("--ref")
    p.add_argument("--out", required=True)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_cobb)

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-vertebrae", type=int, default=17)
    p.add_argument(
        "--vertebra-size", type=float, nargs=2, default=(44.0, 16.0),
        metavar=("WIDTH", "HEIGHT"),
    )
    p.add_argument(
        "--canvas", type=int, nargs=2, default=(512, 512), metavar=("W", "H")
    )
    p.add_argument("--prefix", default="synth")
    p.add_argument("--textures", type=int, default=0)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("engine", help="run the pseudo-label curation loop")
    p.add_argument("--pool", required=True)
    p.add_argument("--seed-corpus")
    p.add_argument("--references")
    p.add_argument("--out", required=True)
    p.add_argument("--config")
    p.add_argument(
        "--selection", choices=("no_filter", "independent", "cumulative")
    )
    p.add_argument("--tau-c", type=float, dest="tau_c")
    p.add_argument("--min-area", type=float)
    p.add_argument("--min-instances", type=int)
    p.add_argument("--center-dist-factor", type=float)
    p.add_argument("--max-iterations", type=int)
    p.add_argument("--lambda-ss", type=float)
    p.add_argument("--lambda-ps", type=float)
    p.add_argument("--tau-cs", type=float)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--state-dir")
    p.add_argument(
        "--predictor", choices=("noisy-oracle", "nearest-coeff"),
        default="noisy-oracle",
    )
    p.add_argument("--basis")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise-px", type=float, default=1.6)
    p.add_argument("--hard-rate", type=float, default=0.15)
    p.add_argument("--hard-offset", type=float, default=8.0)
    p.add_argument("--improve-coeff", type=float, default=0.35)
    p.add_argument("--drop-rate", type=float, default=0.04)
    p.add_argument("--spurious-rate", type=float, default=0.10)
    p.add_argument("--confidence-scale-px", type=float, default=5.0)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_engine)

    p = sub.add_parser("privacy-scan", help="audit candidates against references")
    p.add_argument("--candidates", required=True)
    p.add_argument("--references", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--tau-cs", type=float)
    p.add_argument("--lambda-ss", type=float)
    p.add_argument("--lambda-ps", type=float)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_privacy_scan)

    p = sub.add_parser("serve", help="host the review service")
    p.add_argument("--state-dir", required=True)
    p.add_argument("--port", type=int, default=8571)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except EigenSpineError as exc:
        _fail(type(exc).__name__, exc, 1)


if __name__ == "__main__":
    sys.exit(main())
