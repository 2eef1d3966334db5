"""Input coercion helpers used by the public entry points."""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError, EmptyImageError, EmptyInputError


def as_contour_points(contour, n_vertices: int | None = None) -> np.ndarray:
    """Coerce a contour to an ``(N, 2)`` float array.

    Accepts either point rows or a flat ``[x1, y1, ..., xN, yN]`` vector.
    """
    arr = np.asarray(contour, dtype=float)
    if arr.ndim == 1:
        if arr.size == 0:
            raise EmptyInputError("contour is empty")
        if arr.size % 2 != 0:
            raise DimensionMismatchError(
                f"flat contour length {arr.size} is not even"
            )
        arr = arr.reshape(-1, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DimensionMismatchError(
            f"expected (N, 2) contour, got shape {arr.shape}"
        )
    if arr.shape[0] == 0:
        raise EmptyInputError("contour is empty")
    if n_vertices is not None and arr.shape[0] != n_vertices:
        raise DimensionMismatchError(
            f"expected {n_vertices} vertices, got {arr.shape[0]}"
        )
    if not np.all(np.isfinite(arr)):
        raise DimensionMismatchError("contour contains non-finite values")
    return arr


def as_contour_vector(contour, n_vertices: int | None = None) -> np.ndarray:
    """Coerce a contour to the flat interleaved ``(2N,)`` layout."""
    return as_contour_points(contour, n_vertices).reshape(-1)


def check_gray_image(image) -> np.ndarray:
    """Coerce a single-channel image to a 2-D float array."""
    arr = np.asarray(image, dtype=float)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    if arr.ndim != 2:
        raise DimensionMismatchError(
            f"expected a 2-D grayscale image, got shape {arr.shape}"
        )
    if arr.size == 0:
        raise EmptyImageError("image has zero pixels")
    return arr
