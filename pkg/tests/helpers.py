"""Small builders shared across test modules."""

import numpy as np

from eigenspine import SpineSample, VertebraInstance, rect_contour


def rect_instance(center, width=30.0, height=13.0, tilt_deg=0.0, n=14,
                  confidence=1.0):
    return VertebraInstance(
        contour=rect_contour(center, width, height, tilt_deg, n),
        confidence=confidence,
    )


def chain_sample(tilts, sample_id="s", center_x=100.0, top_y=40.0,
                 step=24.0, width=30.0, height=13.0, confidence=1.0):
    """Vertical stack of rectangles with the given tilt per vertebra."""
    instances = [
        rect_instance((center_x, top_y + i * step), width, height, t,
                      confidence=confidence)
        for i, t in enumerate(tilts)
    ]
    return SpineSample.from_instances(sample_id, instances)


def random_orthonormal(rows, cols, rng):
    q, _ = np.linalg.qr(rng.normal(size=(rows, rows)))
    return q[:, :cols]
