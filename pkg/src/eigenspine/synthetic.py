"""Parametric synthetic spine samples with exact ground-truth angles.

A spine is a chain of rotated rectangular vertebra contours following a
smooth tilt profile.  The profile is rescaled so its extreme tilt
difference equals the requested Cobb angle, which makes the ground truth
exact by construction; rasterization (polygon fill, mild blur, additive
noise) only affects the image, never the contours.

Everything is deterministic for a fixed seed: random draws happen in one
fixed order per call, so equal specs produce bit-identical output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from PIL import Image, ImageDraw
from scipy.ndimage import gaussian_filter

from .errors import InfeasibleSpecError
from .geometry import CobbReport, SpineSample, VertebraInstance, cobb_report

# Vertex count per vertebra contour.
DEFAULT_N_VERTICES = 14

# Vertical center-to-center spacing as a multiple of vertebra height.
STEP_FACTOR = 1.4

# Kept clear of canvas edges so every vertex stays inside [0, W) x [0, H).
_EDGE_PAD = 1.5

# Severity bands: (lower Cobb, upper Cobb, draw probability).  The
# probabilities follow the train-split imbalance of a scoliosis corpus
# dominated by mild curves.
SEVERITY_BANDS = (
    ("none", 0.0, 10.0, 0.070),
    ("mild", 10.0, 30.0, 0.767),
    ("moderate", 30.0, 45.0, 0.094),
    ("severe", 45.0, 72.0, 0.069),
)


@dataclass(frozen=True)
class SpineSpec:
    """Recipe for one synthetic spine sample."""

    n_vertebrae: int = 17
    target_max_cobb_deg: float = 20.0
    centerline: str = "sine"
    vertebra_size: tuple = (44.0, 16.0)
    canvas: tuple = (512, 512)
    seed: int = 0

    def __post_init__(self):
        if self.n_vertebrae < 2:
            raise ValueError("n_vertebrae must be at least 2")
        if not 0.0 <= self.target_max_cobb_deg <= 90.0:
            raise ValueError(
                f"target Cobb {self.target_max_cobb_deg} outside [0, 90]"
            )
        if self.centerline not in ("sine", "poly3"):
            raise ValueError(f"unknown centerline {self.centerline!r}")
        w, h = self.vertebra_size
        if w <= 0 or h <= 0:
            raise ValueError("vertebra_size must be positive")
        cw, ch = self.canvas
        if w >= cw or h >= ch:
            raise InfeasibleSpecError(
                f"vertebra {self.vertebra_size} does not fit canvas "
                f"{self.canvas}"
            )


@dataclass(frozen=True)
class PerturbSpec:
    """Detector-error model applied to a ground-truth sample.

    ``coord_noise_px`` jitters every vertex independently;
    ``offset_noise_px`` shifts whole instances rigidly, modeling
    localization bias.  Confidence decays exponentially with the actual
    mean vertex displacement at ``confidence_scale_px`` per e-fold.
    """

    coord_noise_px: float = 0.0
    offset_noise_px: float = 0.0
    confidence_scale_px: float = 5.0
    drop_rate: float = 0.0
    spurious_rate: float = 0.0

    def __post_init__(self):
        if self.coord_noise_px < 0 or self.offset_noise_px < 0:
            raise ValueError("noise levels must be non-negative")
        if self.confidence_scale_px <= 0:
            raise ValueError("confidence_scale_px must be positive")
        for name in ("drop_rate", "spurious_rate"):
            rate = getattr(self, name)
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"{name} {rate} outside [0, 1]")


@dataclass(frozen=True)
class GeneratedSample:
    """Ground-truth sample plus its report and rasterized image."""

    sample: SpineSample
    report: CobbReport
    image: np.ndarray
    spec: SpineSpec


def rect_contour(
    center, width: float, height: float, tilt_deg: float,
    n_vertices: int = DEFAULT_N_VERTICES,
) -> np.ndarray:
    """Rotated rectangle sampled at ``n_vertices`` canonical points.

    Vertices run clockwise from the top-left corner; edge vertex counts
    match the canonical endplate layout so tilt measurement sees exactly
    the top and bottom edges.
    """
    k = min(math.ceil(n_vertices / 4) + 1, n_vertices // 2)
    side = n_vertices - 2 * k
    right = (side + 1) // 2
    left = side - right
    hw, hh = width / 2.0, height / 2.0
    xs_top = np.linspace(-hw, hw, k)
    pts = [(x, -hh) for x in xs_top]
    pts += [(hw, -hh + i * height / (right + 1)) for i in range(1, right + 1)]
    pts += [(x, hh) for x in xs_top[::-1]]
    pts += [(-hw, hh - i * height / (left + 1)) for i in range(1, left + 1)]
    local = np.array(pts, dtype=float)
    theta = math.radians(tilt_deg)
    rot = np.array(
        [[math.cos(theta), -math.sin(theta)],
         [math.sin(theta), math.cos(theta)]]
    )
    return local @ rot.T + np.asarray(center, dtype=float)


def _tilt_profile(spec: SpineSpec, rng: np.random.Generator) -> np.ndarray:
    """Per-vertebra tilts whose extreme spread equals the target angle."""
    t = np.linspace(0.0, 1.0, spec.n_vertebrae)
    if spec.centerline == "sine":
        cycles = rng.uniform(0.6, 1.3)
        phase = rng.uniform(0.0, 2.0 * math.pi)
        raw = np.sin(2.0 * math.pi * cycles * t + phase)
    else:
        coeffs = rng.uniform(-1.0, 1.0, size=3)
        raw = coeffs[0] * t + coeffs[1] * t**2 + coeffs[2] * t**3
    span = float(raw.max() - raw.min())
    if span < 1e-9:
        raw = t - 0.5
        span = 1.0
    centered = raw - (raw.max() + raw.min()) / 2.0
    return centered * (spec.target_max_cobb_deg / span)


def _chain_centers(
    tilts_deg: np.ndarray, step: float, lateral: float
) -> np.ndarray:
    """Vertebra centers walking down the tilt profile's tangents."""
    phi = np.radians(tilts_deg)
    mid = (phi[:-1] + phi[1:]) / 2.0
    centers = np.zeros((tilts_deg.size, 2))
    centers[1:, 0] = np.cumsum(step * np.sin(mid) * lateral)
    centers[1:, 1] = np.cumsum(step * np.cos(mid))
    return centers


def _place_contours(spec: SpineSpec, tilts_deg: np.ndarray) -> list:
    """Place rectangles on the canvas, shrinking lateral sway if needed."""
    width, height = spec.vertebra_size
    cw, ch = spec.canvas
    step = height * STEP_FACTOR
    for lateral in (1.0, 0.5, 0.25):
        centers = _chain_centers(tilts_deg, step, lateral)
        contours = [
            rect_contour(c, width, height, tilt)
            for c, tilt in zip(centers, tilts_deg)
        ]
        pts = np.vstack(contours)
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        shift = np.array([cw, ch]) / 2.0 - (lo + hi) / 2.0
        lo += shift
        hi += shift
        if lo[1] < _EDGE_PAD or hi[1] > ch - _EDGE_PAD:
            break
        if lo[0] < _EDGE_PAD or hi[0] > cw - _EDGE_PAD:
            continue
        return [c + shift for c in contours]
    raise InfeasibleSpecError(
        f"{spec.n_vertebrae} vertebrae of size {spec.vertebra_size} do not "
        f"fit canvas {spec.canvas} at target {spec.target_max_cobb_deg} deg"
    )


def rasterize(
    sample: SpineSample, canvas, rng: np.random.Generator
) -> np.ndarray:
    """Grayscale rendering: filled contours, mild blur, additive noise."""
    cw, ch = canvas
    background = int(rng.uniform(28.0, 55.0))
    img = Image.new("L", (cw, ch), color=background)
    draw = ImageDraw.Draw(img)
    for inst in sample.instances:
        fill = int(rng.uniform(168.0, 214.0))
        draw.polygon([(float(x), float(y)) for x, y in inst.contour], fill=fill)
    arr = np.asarray(img, dtype=float)
    arr = gaussian_filter(arr, sigma=1.2)
    arr += rng.normal(0.0, 4.0, size=arr.shape)
    return np.clip(arr, 0.0, 255.0)


def generate(spec: SpineSpec, sample_id: str | None = None) -> GeneratedSample:
    """Build one sample: contours, exact Cobb report, rasterized image."""
    rng = np.random.default_rng(spec.seed)
    tilts = _tilt_profile(spec, rng)
    contours = _place_contours(spec, tilts)
    instances = [
        VertebraInstance(contour=c, confidence=1.0, index=i)
        for i, c in enumerate(contours)
    ]
    if sample_id is None:
        sample_id = f"synth_{spec.seed:08d}"
    sample = SpineSample(sample_id=sample_id, instances=tuple(instances))
    report = cobb_report(sample)
    image = rasterize(sample, spec.canvas, rng)
    return GeneratedSample(sample=sample, report=report, image=image, spec=spec)


def perturb(sample: SpineSample, spec: PerturbSpec, rng=0) -> SpineSample:
    """Jitter, drop, and augment a sample the way a detector would err.

    The per-instance draws are consumed in a fixed order regardless of
    the noise level, so two calls with the same rng seed but different
    ``coord_noise_px`` perturb with perfectly correlated noise.
    """
    rng = np.random.default_rng(rng)
    kept = []
    for inst in sample.instances:
        u_drop = rng.uniform()
        unit = rng.standard_normal(inst.contour.shape)
        shift = rng.standard_normal(2)
        if u_drop < spec.drop_rate:
            continue
        noise = spec.coord_noise_px * unit + spec.offset_noise_px * shift
        contour = inst.contour + noise
        disp = float(np.linalg.norm(noise, axis=1).mean())
        confidence = math.exp(-disp / spec.confidence_scale_px)
        kept.append(VertebraInstance(contour=contour, confidence=confidence))
    u_spur = rng.uniform()
    if u_spur < spec.spurious_rate and sample.instances:
        pts = np.vstack([inst.contour for inst in sample.instances])
        lo = pts.min(axis=0) - 20.0
        hi = pts.max(axis=0) + 20.0
        center = (rng.uniform(lo[0], hi[0]), rng.uniform(lo[1], hi[1]))
        spans = [
            inst.contour.max(axis=0) - inst.contour.min(axis=0)
            for inst in sample.instances
        ]
        mean_w, mean_h = np.mean(spans, axis=0)
        width = mean_w * rng.uniform(0.7, 1.3)
        height = mean_h * rng.uniform(0.7, 1.3)
        tilt = rng.uniform(-40.0, 40.0)
        confidence = rng.uniform(0.05, 0.6)
        n = sample.instances[0].contour.shape[0]
        kept.append(
            VertebraInstance(
                contour=rect_contour(center, width, height, tilt, n),
                confidence=confidence,
            )
        )
    return SpineSample.from_instances(
        sample.sample_id, kept, image_ref=sample.image_ref
    )


def draw_target_cobb(rng: np.random.Generator) -> float:
    """Sample a target angle from the severity-band mixture."""
    probs = [band[3] for band in SEVERITY_BANDS]
    idx = rng.choice(len(SEVERITY_BANDS), p=probs)
    _, lo, hi, _ = SEVERITY_BANDS[idx]
    return float(rng.uniform(lo, hi))


def make_corpus(
    count: int,
    seed: int = 0,
    *,
    n_vertebrae: int = 17,
    vertebra_size=(44.0, 16.0),
    canvas=(512, 512),
    prefix: str = "synth",
) -> list:
    """Generate a severity-mixed corpus of :class:`GeneratedSample`.

    Each sample gets its own derived seed, so corpora with overlapping
    index ranges share their common samples.
    """
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        target = draw_target_cobb(rng)
        spec = SpineSpec(
            n_vertebrae=n_vertebrae,
            target_max_cobb_deg=target,
            centerline="sine",
            vertebra_size=tuple(vertebra_size),
            canvas=tuple(canvas),
            seed=seed * 1_000_003 + i,
        )
        out.append(generate(spec, sample_id=f"{prefix}_{i:05d}"))
    return out


def texture_image(shape, seed: int = 0) -> np.ndarray:
    """Smooth random texture with no spine structure.

    Serves as a stand-in reference corpus for privacy auditing: bright,
    blobby, and dissimilar from dark-background spine renderings.
    """
    rng = np.random.default_rng(seed)
    arr = rng.uniform(0.0, 255.0, size=shape)
    arr = gaussian_filter(arr, sigma=2.5)
    lo, hi = float(arr.min()), float(arr.max())
    if hi <= lo:
        return np.full(shape, 128.0)
    return 60.0 + (arr - lo) / (hi - lo) * (255.0 - 60.0)
