"""Eigen-contour spine analysis toolkit.

Low-rank parameterization of vertebra contours, Cobb angle measurement,
synthetic spine corpora, image-similarity privacy auditing, and an
iterative pseudo-label curation engine with a human review loop.
"""

from .annotations import (
    AnnotatedSample,
    load_gray_png,
    read_annotations,
    read_ledger,
    save_gray_png,
    write_annotations,
)
from .basis import (
    EigenSpineBasis,
    LowRankContourTransformer,
    build_contour_matrix,
    fit_basis,
    project,
    reconstruct,
    reconstruction_error,
)
from .engine import (
    CorpusStats,
    DataEngine,
    EngineConfig,
    IterationResult,
    NearestCoeff,
    NoisyOracle,
    PoolSample,
    ReviewItem,
    SampleVerdict,
    confidence_filter,
    corpus_center_stats,
    sample_filters,
    segment_filters,
)
from .errors import (
    AnnotationFormatError,
    BlockedOnReviewError,
    DegenerateEdgeError,
    DimensionMismatchError,
    EigenSpineError,
    EmptyImageError,
    EmptyInputError,
    EmptyReferenceSetError,
    IdMismatchError,
    InfeasibleSpecError,
    InvalidRankError,
    MissingStatsError,
    NoPredictorError,
    RankDeficientError,
    TooFewInstancesError,
)
from .evaluation import LabelMetrics, evaluate_labels
from .geometry import (
    CobbReport,
    SpineSample,
    VertebraInstance,
    angle_ed,
    cobb_report,
    endplate_angles,
    endplate_slices,
    fold_angle_deg,
    polygon_area,
    smape,
    zero_report,
)
from .losses import LossWeights, cross_entropy, focal, smooth_l1, total_loss
from .similarity import (
    AUDIT_CSV_FIELDS,
    PrivacyAudit,
    SimilarityConfig,
    cs,
    grayscale,
    pixel_distance,
    privacy_audit,
    resize_to,
    ssim,
    write_audit_csv,
)
from .synthetic import (
    SEVERITY_BANDS,
    GeneratedSample,
    PerturbSpec,
    SpineSpec,
    draw_target_cobb,
    generate,
    make_corpus,
    perturb,
    rect_contour,
    texture_image,
)

__version__ = "0.1.0"

__all__ = [
    "AUDIT_CSV_FIELDS",
    "AnnotatedSample",
    "AnnotationFormatError",
    "BlockedOnReviewError",
    "CobbReport",
    "CorpusStats",
    "DataEngine",
    "DegenerateEdgeError",
    "DimensionMismatchError",
    "EigenSpineBasis",
    "EigenSpineError",
    "EmptyImageError",
    "EmptyInputError",
    "EmptyReferenceSetError",
    "EngineConfig",
    "GeneratedSample",
    "IdMismatchError",
    "InfeasibleSpecError",
    "InvalidRankError",
    "IterationResult",
    "LabelMetrics",
    "LossWeights",
    "LowRankContourTransformer",
    "MissingStatsError",
    "NearestCoeff",
    "NoPredictorError",
    "NoisyOracle",
    "PerturbSpec",
    "PoolSample",
    "PrivacyAudit",
    "RankDeficientError",
    "ReviewItem",
    "SEVERITY_BANDS",
    "SampleVerdict",
    "SimilarityConfig",
    "SpineSample",
    "SpineSpec",
    "TooFewInstancesError",
    "VertebraInstance",
    "angle_ed",
    "build_contour_matrix",
    "cobb_report",
    "confidence_filter",
    "corpus_center_stats",
    "cross_entropy",
    "cs",
    "draw_target_cobb",
    "endplate_angles",
    "endplate_slices",
    "evaluate_labels",
    "fit_basis",
    "focal",
    "fold_angle_deg",
    "generate",
    "grayscale",
    "load_gray_png",
    "make_corpus",
    "perturb",
    "pixel_distance",
    "polygon_area",
    "privacy_audit",
    "project",
    "read_annotations",
    "read_ledger",
    "reconstruct",
    "reconstruction_error",
    "rect_contour",
    "sample_filters",
    "save_gray_png",
    "segment_filters",
    "smape",
    "smooth_l1",
    "ssim",
    "texture_image",
    "total_loss",
    "write_annotations",
    "write_audit_csv",
    "zero_report",
]
