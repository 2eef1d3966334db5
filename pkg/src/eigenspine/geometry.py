"""Vertebra tilt and Cobb angle computation.

Contours follow one canonical layout: vertices stored clockwise starting
at the top-left corner of the vertebra.  The top edge is the first
``ceil(N/4) + 1`` vertices and the bottom edge is the mirrored run on the
opposite side, so endplate tilts can be read off fixed index ranges.

Tilt is the orientation of the total-least-squares line through an edge's
vertices, in degrees relative to horizontal, restricted to ``(-90, 90]``.
Cobb angles are folded pairwise tilt differences:

* MT is the global maximum of ``fold(upper_i - lower_j)`` over ``i <= j``.
* PT repeats the search strictly above MT's upper vertebra.
* TL/L repeats it strictly below MT's lower vertebra.
* A region with no candidate pairs reports 0 with the degenerate pair
  ``(k, k)`` anchored at the MT boundary it would have to clear.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    AnnotationFormatError,
    DegenerateEdgeError,
    DimensionMismatchError,
    EmptyInputError,
    TooFewInstancesError,
)
from .validation import as_contour_points


@dataclass(frozen=True, eq=False)
class VertebraInstance:
    """One detected or labeled vertebra.

    Attributes
    ----------
    contour : ndarray of shape (N, 2)
        Simple polygon in the canonical clockwise-from-top-left order.
    confidence : float
        Detection confidence in ``[0, 1]``; labeled data uses 1.
    index : int
        0-based position from the top of the spine.
    """

    contour: np.ndarray
    confidence: float = 1.0
    index: int = 0

    def __post_init__(self):
        object.__setattr__(self, "contour", as_contour_points(self.contour))
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(
                f"confidence {self.confidence} outside [0, 1]"
            )
        if self.index < 0:
            raise ValueError(f"index must be non-negative, got {self.index}")

    @property
    def centroid(self) -> np.ndarray:
        """Vertex mean, used for vertical ordering."""
        return self.contour.mean(axis=0)


@dataclass(frozen=True, eq=False)
class SpineSample:
    """A spine image's worth of vertebra instances, ordered top to bottom."""

    sample_id: str
    instances: tuple
    image_ref: str | None = None

    def __post_init__(self):
        if not self.sample_id:
            raise ValueError("sample_id must be non-empty")
        object.__setattr__(self, "instances", tuple(self.instances))
        ys = [inst.centroid[1] for inst in self.instances]
        if any(a > b for a, b in zip(ys, ys[1:])):
            raise ValueError(
                "instances must be sorted by ascending centroid y; "
                "use SpineSample.from_instances to sort"
            )

    @classmethod
    def from_instances(
        cls, sample_id: str, instances, image_ref: str | None = None
    ) -> "SpineSample":
        """Sort instances top to bottom and reassign their indices."""
        ordered = sorted(instances, key=lambda inst: inst.centroid[1])
        ordered = tuple(
            replace(inst, index=i) for i, inst in enumerate(ordered)
        )
        return cls(sample_id=sample_id, instances=ordered, image_ref=image_ref)


@dataclass(frozen=True)
class CobbReport:
    """Regional Cobb angles in degrees with their vertebra pairs.

    Pairs are ``(upper_index, lower_index)`` positions within the
    sample's top-to-bottom instance order; a degenerate ``(k, k)`` pair
    marks a region that had no candidate pairs.
    """

    pt_deg: float
    mt_deg: float
    tll_deg: float
    max_deg: float
    pt_pair: tuple = (0, 0)
    mt_pair: tuple = (0, 0)
    tll_pair: tuple = (0, 0)

    def __post_init__(self):
        for name in ("pt_pair", "mt_pair", "tll_pair"):
            pair = tuple(int(v) for v in getattr(self, name))
            if len(pair) != 2 or pair[0] > pair[1]:
                raise ValueError(f"{name} must satisfy upper <= lower: {pair}")
            object.__setattr__(self, name, pair)
        regional = max(self.pt_deg, self.mt_deg, self.tll_deg)
        if abs(self.max_deg - regional) > 1e-9:
            raise ValueError(
                f"max_deg {self.max_deg} != max of regional angles {regional}"
            )

    def to_dict(self) -> dict:
        return {
            "pt": float(self.pt_deg),
            "mt": float(self.mt_deg),
            "tll": float(self.tll_deg),
            "max": float(self.max_deg),
            "pairs": {
                "pt": list(self.pt_pair),
                "mt": list(self.mt_pair),
                "tll": list(self.tll_pair),
            },
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "CobbReport":
        try:
            pairs = payload.get("pairs", {})
            return cls(
                pt_deg=float(payload["pt"]),
                mt_deg=float(payload["mt"]),
                tll_deg=float(payload["tll"]),
                max_deg=float(payload["max"]),
                pt_pair=tuple(pairs.get("pt", (0, 0))),
                mt_pair=tuple(pairs.get("mt", (0, 0))),
                tll_pair=tuple(pairs.get("tll", (0, 0))),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise AnnotationFormatError(
                f"malformed Cobb report payload: {exc}"
            ) from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def summary(self) -> str:
        """Two-decimal rendering for human-facing output."""
        return (
            f"PT {self.pt_deg:.2f}  MT {self.mt_deg:.2f}  "
            f"TL/L {self.tll_deg:.2f}  max {self.max_deg:.2f}"
        )


def endplate_slices(n_vertices: int) -> tuple:
    """Index slices of the top and bottom edges in the canonical order.

    The top edge takes the first ``ceil(N/4) + 1`` vertices (clamped so
    the two edges never overlap); walking clockwise, the bottom edge is
    the same-length run on the far side of the right flank.
    """
    if n_vertices < 4:
        raise DimensionMismatchError(
            f"contour needs at least 4 vertices, got {n_vertices}"
        )
    k = min(math.ceil(n_vertices / 4) + 1, n_vertices // 2)
    right = (n_vertices - 2 * k + 1) // 2
    return slice(0, k), slice(k + right, k + right + k)


def _tls_angle_deg(points: np.ndarray) -> float:
    """Total-least-squares line orientation in degrees, in (-90, 90]."""
    centered = points - points.mean(axis=0)
    sxx = float(centered[:, 0] @ centered[:, 0])
    syy = float(centered[:, 1] @ centered[:, 1])
    sxy = float(centered[:, 0] @ centered[:, 1])
    if sxx + syy == 0.0:
        raise DegenerateEdgeError("edge vertices are coincident")
    deg = math.degrees(0.5 * math.atan2(2.0 * sxy, sxx - syy))
    if deg <= -90.0:
        deg += 180.0
    return deg


def endplate_angles(vertebra) -> tuple:
    """Tilts of the upper and lower endplates, degrees in (-90, 90]."""
    contour = getattr(vertebra, "contour", vertebra)
    points = as_contour_points(contour)
    top, bottom = endplate_slices(points.shape[0])
    return _tls_angle_deg(points[top]), _tls_angle_deg(points[bottom])


def fold_angle_deg(diff):
    """Fold a tilt difference into [0, 90] via 180-degree periodicity."""
    r = np.abs(diff) % 180.0
    return np.minimum(r, 180.0 - r)


def _masked_argmax(block: np.ndarray) -> tuple:
    """Row-major argmax over the upper triangle (i <= j) of a block."""
    masked = np.where(
        np.arange(block.shape[0])[:, None] <= np.arange(block.shape[1])[None, :],
        block,
        -1.0,
    )
    flat = int(np.argmax(masked))
    i, j = divmod(flat, block.shape[1])
    return float(masked[i, j]), (i, j)


def cobb_report(sample: SpineSample) -> CobbReport:
    """Regional Cobb angles of a sample.

    MT is the global maximum folded tilt difference over ordered pairs;
    PT and TL/L repeat the search strictly above and strictly below the
    MT pair, each falling back to 0 at the boundary index when its
    region is empty.
    """
    instances = sample.instances
    if len(instances) < 2:
        raise TooFewInstancesError(
            f"need at least 2 instances, got {len(instances)}"
        )
    tilts = [endplate_angles(inst) for inst in instances]
    upper = np.array([t[0] for t in tilts])
    lower = np.array([t[1] for t in tilts])
    angles = fold_angle_deg(upper[:, None] - lower[None, :])

    mt, (mi, mj) = _masked_argmax(angles)
    if mi > 0:
        pt, (pi, pj) = _masked_argmax(angles[:mi, :mi])
        pt_pair = (pi, pj)
    else:
        pt, pt_pair = 0.0, (mi, mi)
    n = len(instances)
    if mj < n - 1:
        tll, (ti, tj) = _masked_argmax(angles[mj + 1:, mj + 1:])
        tll_pair = (ti + mj + 1, tj + mj + 1)
    else:
        tll, tll_pair = 0.0, (mj, mj)

    return CobbReport(
        pt_deg=pt,
        mt_deg=mt,
        tll_deg=tll,
        max_deg=max(pt, mt, tll),
        pt_pair=pt_pair,
        mt_pair=(mi, mj),
        tll_pair=tll_pair,
    )


def polygon_area(contour) -> float:
    """Unsigned shoelace area of a closed polygon."""
    pts = as_contour_points(contour)
    x, y = pts[:, 0], pts[:, 1]
    return float(
        0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))
    )


def zero_report() -> CobbReport:
    """Report for samples too sparse to measure: all angles zero."""
    return CobbReport(pt_deg=0.0, mt_deg=0.0, tll_deg=0.0, max_deg=0.0)


def smape(pred, gt) -> float:
    """Symmetric mean absolute percentage error between angle lists.

    Terms with both values zero contribute nothing, so straight spines
    compare as identical rather than undefined.
    """
    pred = np.asarray(pred, dtype=float)
    gt = np.asarray(gt, dtype=float)
    if pred.shape != gt.shape or pred.ndim != 1:
        raise DimensionMismatchError(
            f"angle lists must be equal-length 1-D, got {pred.shape} "
            f"and {gt.shape}"
        )
    if pred.size == 0:
        raise EmptyInputError("angle lists are empty")
    num = np.abs(pred - gt)
    den = np.abs(pred) + np.abs(gt)
    terms = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return float(100.0 / pred.size * terms.sum())


def angle_ed(pred: CobbReport, gt: CobbReport) -> float:
    """Euclidean distance between two reports' regional angles."""
    return float(
        math.hypot(
            pred.pt_deg - gt.pt_deg,
            pred.mt_deg - gt.mt_deg,
            pred.tll_deg - gt.tll_deg,
        )
    )
