"""Dataset file formats: annotation JSONL, ledger JSONL, grayscale PNG.

One annotation line per sample:

    {"sample_id": str, "image": str, "instances": [{"contour": [[x, y],
    ...], "confidence": float}], "cobb": {...}, "source": "seed" |
    "pseudo" | "corrected"}

Floats are written with Python's shortest round-trip representation, so
reading a file back reproduces bit-identical values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np
from PIL import Image

from .errors import AnnotationFormatError
from .geometry import CobbReport, SpineSample, VertebraInstance

SOURCES = ("seed", "pseudo", "corrected")


@dataclass(frozen=True)
class AnnotatedSample:
    """A spine sample with its Cobb report and provenance tag."""

    sample: SpineSample
    cobb: CobbReport
    image: str = ""
    source: str = "seed"

    def __post_init__(self):
        if self.source not in SOURCES:
            raise AnnotationFormatError(
                f"source must be one of {SOURCES}, got {self.source!r}"
            )

    @property
    def sample_id(self) -> str:
        return self.sample.sample_id

    def to_dict(self) -> dict:
        return {
            "sample_id": self.sample.sample_id,
            "image": self.image,
            "instances": [
                {
                    "contour": [[float(x), float(y)] for x, y in inst.contour],
                    "confidence": float(inst.confidence),
                }
                for inst in self.sample.instances
            ],
            "cobb": self.cobb.to_dict(),
            "source": self.source,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "AnnotatedSample":
        try:
            sample_id = payload["sample_id"]
            instances = [
                VertebraInstance(
                    contour=np.asarray(item["contour"], dtype=float),
                    confidence=float(item.get("confidence", 1.0)),
                )
                for item in payload["instances"]
            ]
            cobb = CobbReport.from_dict(payload["cobb"])
            source = payload.get("source", "seed")
            image = payload.get("image", "")
        except (KeyError, TypeError, ValueError) as exc:
            raise AnnotationFormatError(
                f"malformed annotation record: {exc}"
            ) from exc
        sample = SpineSample.from_instances(sample_id, instances)
        return cls(sample=sample, cobb=cobb, image=image, source=source)


def write_annotations(samples, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for item in samples:
            fh.write(json.dumps(item.to_dict()))
            fh.write("\n")


def read_annotations(path) -> list:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                payload = json.loads(line)
            except json.JSONDecodeError as exc:
                raise AnnotationFormatError(
                    f"{path}:{line_no}: invalid JSON: {exc}"
                ) from exc
            out.append(AnnotatedSample.from_dict(payload))
    return out


def append_ledger_rows(rows, path) -> None:
    """Append ``{"iteration", "sample_id", "v", "reasons"}`` lines."""
    with open(path, "a", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row))
            fh.write("\n")


def read_ledger(path) -> list:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise AnnotationFormatError(
                    f"{path}:{line_no}: invalid JSON: {exc}"
                ) from exc
            if not {"iteration", "sample_id", "v", "reasons"} <= row.keys():
                raise AnnotationFormatError(
                    f"{path}:{line_no}: incomplete ledger row"
                )
            rows.append(row)
    return rows


def save_gray_png(image: np.ndarray, path) -> None:
    arr = np.clip(np.asarray(image, dtype=float), 0.0, 255.0)
    Image.fromarray(np.rint(arr).astype(np.uint8), mode="L").save(path)


def load_gray_png(path) -> np.ndarray:
    with Image.open(path) as img:
        return np.asarray(img.convert("L"), dtype=float)


def relabel(annotated: AnnotatedSample, **changes) -> AnnotatedSample:
    """Copy an annotated sample with selected fields replaced."""
    return replace(annotated, **changes)
