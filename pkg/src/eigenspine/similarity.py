"""Image similarity scoring and memorization auditing.

All comparisons run on 8-bit-range grayscale arrays.  SSIM uses global
image statistics by default (an optional sliding window is available),
and the pixel term is converted from a normalized L1 distance to a
similarity so that the combined score rises with resemblance.  A
candidate is rejected when its best comprehensive similarity against the
reference corpus strictly exceeds the gate threshold.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from PIL import Image
from scipy.ndimage import uniform_filter

from .errors import (
    DimensionMismatchError,
    EmptyReferenceSetError,
)
from .validation import check_gray_image

# Intensity ceiling assumed by the normalized metrics.
INTENSITY_MAX = 255.0


@dataclass(frozen=True)
class SimilarityConfig:
    """Weights, stabilizers, and gate threshold for similarity scoring.

    ``window`` is either the string ``"global"`` (whole-image statistics)
    or an odd integer side length for local-window SSIM.
    """

    lambda_ss: float = 0.2
    lambda_ps: float = 0.8
    tau_cs: float = 0.6
    c1: float = (0.01 * INTENSITY_MAX) ** 2
    c2: float = (0.03 * INTENSITY_MAX) ** 2
    window: object = "global"

    def __post_init__(self):
        if self.lambda_ss < 0 or self.lambda_ps < 0:
            raise ValueError("similarity weights must be non-negative")
        if abs(self.lambda_ss + self.lambda_ps - 1.0) > 1e-9:
            raise ValueError("lambda_ss + lambda_ps must equal 1")
        if not 0.0 <= self.tau_cs <= 1.0:
            raise ValueError(f"tau_cs {self.tau_cs} outside [0, 1]")
        if self.c1 <= 0 or self.c2 <= 0:
            raise ValueError("stabilizers must be positive")
        if self.window != "global":
            if not isinstance(self.window, int) or self.window < 1 \
                    or self.window % 2 == 0:
                raise ValueError(
                    "window must be 'global' or an odd positive integer"
                )


@dataclass(frozen=True)
class PrivacyAudit:
    """Outcome of scoring one candidate against the reference corpus.

    ``top_matches`` rows are ``(reference_id, ssim, ps_sim, cs)`` sorted
    by descending comprehensive similarity; ``n_memorized`` counts
    references whose similarity exceeds the gate.
    """

    sample_id: str
    top_matches: tuple
    acs: float
    rejected: bool
    n_memorized: int = 0

    @property
    def max_cs(self) -> float:
        return self.top_matches[0][3] if self.top_matches else 0.0


def grayscale(image) -> np.ndarray:
    """Collapse an RGB raster to luma; pass grayscale through untouched."""
    arr = np.asarray(image, dtype=float)
    if arr.ndim == 3 and arr.shape[2] in (3, 4):
        r, g, b = arr[:, :, 0], arr[:, :, 1], arr[:, :, 2]
        return 0.299 * r + 0.587 * g + 0.114 * b
    return check_gray_image(arr)


def _check_same_shape(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape != y.shape:
        raise DimensionMismatchError(
            f"image shapes differ: {x.shape} vs {y.shape}"
        )


def ssim(x, y, cfg: SimilarityConfig = SimilarityConfig()) -> float:
    """Structural similarity between two equal-shape grayscale images."""
    x = check_gray_image(x)
    y = check_gray_image(y)
    _check_same_shape(x, y)
    if cfg.window == "global":
        mx, my = x.mean(), y.mean()
        vx, vy = x.var(), y.var()
        cov = ((x - mx) * (y - my)).mean()
        return float(
            (2 * mx * my + cfg.c1)
            * (2 * cov + cfg.c2)
            / ((mx * mx + my * my + cfg.c1) * (vx + vy + cfg.c2))
        )
    size = cfg.window
    if x.shape[0] < size or x.shape[1] < size:
        raise DimensionMismatchError(
            f"images smaller than the {size}x{size} window"
        )
    mx = uniform_filter(x, size)
    my = uniform_filter(y, size)
    vx = uniform_filter(x * x, size) - mx * mx
    vy = uniform_filter(y * y, size) - my * my
    cov = uniform_filter(x * y, size) - mx * my
    score = (
        (2 * mx * my + cfg.c1)
        * (2 * cov + cfg.c2)
        / ((mx * mx + my * my + cfg.c1) * (vx + vy + cfg.c2))
    )
    # Drop the border where the filter support leaves the image.
    half = size // 2
    return float(score[half:-half or None, half:-half or None].mean())


def pixel_distance(x, y) -> float:
    """Normalized mean absolute intensity difference, in [0, 1]."""
    x = check_gray_image(x)
    y = check_gray_image(y)
    _check_same_shape(x, y)
    return float(np.abs(x - y).mean() / INTENSITY_MAX)


def cs(x, y, cfg: SimilarityConfig = SimilarityConfig()) -> float:
    """Comprehensive similarity: weighted SSIM plus pixel similarity."""
    return float(
        cfg.lambda_ss * ssim(x, y, cfg)
        + cfg.lambda_ps * (1.0 - pixel_distance(x, y))
    )


def resize_to(image: np.ndarray, shape) -> np.ndarray:
    """Bilinear-resample a grayscale image to ``(H, W)``."""
    image = check_gray_image(image)
    if image.shape == tuple(shape):
        return image
    h, w = shape
    pil = Image.fromarray(image.astype(np.float32), mode="F")
    return np.asarray(pil.resize((w, h), Image.BILINEAR), dtype=float)


def privacy_audit(
    candidate,
    references,
    cfg: SimilarityConfig = SimilarityConfig(),
    *,
    sample_id: str = "",
    reference_ids=None,
    top_k: int = 3,
) -> PrivacyAudit:
    """Score a candidate against every reference and apply the gate.

    The candidate is resampled to each reference's dimensions before
    scoring.  The verdict is rejection iff the best comprehensive
    similarity strictly exceeds ``cfg.tau_cs``.
    """
    candidate = check_gray_image(candidate)
    references = list(references)
    if not references:
        raise EmptyReferenceSetError("privacy audit needs references")
    if reference_ids is None:
        reference_ids = [f"ref_{i:04d}" for i in range(len(references))]
    if len(reference_ids) != len(references):
        raise DimensionMismatchError(
            "one reference_id per reference is required"
        )
    rows = []
    for ref_id, ref in zip(reference_ids, references):
        ref = check_gray_image(ref)
        cand = resize_to(candidate, ref.shape)
        s = ssim(cand, ref, cfg)
        ps_sim = 1.0 - pixel_distance(cand, ref)
        score = cfg.lambda_ss * s + cfg.lambda_ps * ps_sim
        rows.append((str(ref_id), float(s), float(ps_sim), float(score)))
    rows.sort(key=lambda r: (-r[3], r[0]))
    top = tuple(rows[:top_k])
    acs = float(np.mean([r[3] for r in top]))
    n_mem = sum(1 for r in rows if r[3] > cfg.tau_cs)
    return PrivacyAudit(
        sample_id=sample_id,
        top_matches=top,
        acs=acs,
        rejected=rows[0][3] > cfg.tau_cs,
        n_memorized=n_mem,
    )


AUDIT_CSV_FIELDS = (
    "new_image",
    "top1_image", "top1_ssim", "top1_ps", "top1_cs",
    "top2_image", "top2_ssim", "top2_ps", "top2_cs",
    "top3_image", "top3_ssim", "top3_ps", "top3_cs",
    "acs", "rejected",
)


def write_audit_csv(audits, path) -> None:
    """Write one checklist row per audit, top-3 matches flattened."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(AUDIT_CSV_FIELDS)
        for audit in audits:
            row = [audit.sample_id]
            for k in range(3):
                if k < len(audit.top_matches):
                    ref_id, s, ps_sim, score = audit.top_matches[k]
                    row += [ref_id, f"{s:.4f}", f"{ps_sim:.4f}", f"{score:.4f}"]
                else:
                    row += ["", "", "", ""]
            row += [f"{audit.acs:.4f}", str(bool(audit.rejected)).lower()]
            writer.writerow(row)
