"""Low-rank parameterization of vertebra contours.

A corpus of closed contours, each with ``N`` vertices, is flattened to
interleaved ``[x1, y1, ..., xN, yN]`` columns of a ``(2N, L)`` matrix.  A
truncated singular value decomposition of that matrix yields an
orthonormal basis whose leading directions capture the dominant contour
shapes.  Coordinates are used as-is: no mean is subtracted, so the first
basis direction absorbs the average contour and projections remain plain
matrix products.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .errors import (
    AnnotationFormatError,
    DimensionMismatchError,
    EmptyInputError,
    InvalidRankError,
    RankDeficientError,
)
from .validation import as_contour_vector

# Singular values at or below this fraction of the largest one are
# treated as numerically zero when deciding whether a rank is supported.
RANK_RTOL = 1e-12

# Orthonormality slack tolerated when validating a stored basis.
_ORTHO_ATOL = 1e-6


@dataclass(frozen=True)
class EigenSpineBasis:
    """Truncated orthonormal basis for flattened vertebra contours.

    Attributes
    ----------
    basis : ndarray of shape (2 * n_vertices, m)
        Orthonormal columns, ordered by decreasing singular value.  Each
        column is sign-fixed so its largest-magnitude entry is positive.
    singular_values : ndarray of shape (m,)
        Singular values retained by the truncation, non-increasing.
    n_vertices : int
        Vertex count of the contours the basis was fitted on.
    """

    basis: np.ndarray
    singular_values: np.ndarray
    n_vertices: int
    _skip_checks: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=float)
        sv = np.asarray(self.singular_values, dtype=float)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "singular_values", sv)
        if self._skip_checks:
            return
        if basis.ndim != 2:
            raise DimensionMismatchError(
                f"basis must be 2-D, got shape {basis.shape}"
            )
        if basis.shape[0] != 2 * self.n_vertices:
            raise DimensionMismatchError(
                f"basis has {basis.shape[0]} rows, expected "
                f"{2 * self.n_vertices} for {self.n_vertices} vertices"
            )
        if sv.shape != (basis.shape[1],):
            raise DimensionMismatchError(
                "one singular value per basis column is required"
            )
        if basis.shape[1] == 0:
            raise InvalidRankError("basis must keep at least one column")
        if np.any(np.diff(sv) > 0):
            raise AnnotationFormatError("singular values must be non-increasing")
        gram = basis.T @ basis
        if not np.allclose(gram, np.eye(basis.shape[1]), atol=_ORTHO_ATOL):
            raise AnnotationFormatError("basis columns are not orthonormal")

    @property
    def m(self) -> int:
        """Number of retained basis directions."""
        return self.basis.shape[1]

    def to_dict(self) -> dict:
        return {
            "n_vertices": int(self.n_vertices),
            "m": int(self.m),
            "singular_values": [float(v) for v in self.singular_values],
            "basis": [[float(v) for v in row] for row in self.basis],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "EigenSpineBasis":
        try:
            n_vertices = int(payload["n_vertices"])
            m = int(payload["m"])
            sv = np.asarray(payload["singular_values"], dtype=float)
            basis = np.asarray(payload["basis"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise AnnotationFormatError(f"malformed basis payload: {exc}") from exc
        if basis.ndim != 2 or basis.shape != (2 * n_vertices, m):
            raise AnnotationFormatError(
                f"basis shape {basis.shape} does not match "
                f"n_vertices={n_vertices}, m={m}"
            )
        if sv.shape != (m,):
            raise AnnotationFormatError(
                f"expected {m} singular values, got {sv.shape}"
            )
        return cls(basis=basis, singular_values=sv, n_vertices=n_vertices)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "EigenSpineBasis":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                payload = json.load(fh)
            except json.JSONDecodeError as exc:
                raise AnnotationFormatError(f"invalid basis JSON: {exc}") from exc
        return cls.from_dict(payload)


def build_contour_matrix(contours) -> np.ndarray:
    """Stack contours as columns of a ``(2N, L)`` matrix.

    Parameters
    ----------
    contours : sequence
        Contours given either as ``(N, 2)`` point arrays or flat
        ``(2N,)`` vectors.  All must share the same vertex count.
    """
    contours = list(contours)
    if not contours:
        raise EmptyInputError("no contours supplied")
    first = as_contour_vector(contours[0])
    n_vertices = first.size // 2
    columns = [first]
    for c in contours[1:]:
        columns.append(as_contour_vector(c, n_vertices))
    return np.stack(columns, axis=1)


def fit_basis(matrix: np.ndarray, m: int) -> EigenSpineBasis:
    """Fit a rank-``m`` basis to a ``(2N, L)`` contour matrix.

    Raises
    ------
    InvalidRankError
        If ``m`` is outside ``[1, min(2N, L)]``.
    RankDeficientError
        If the ``m``-th singular value is numerically zero relative to
        the largest one.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2:
        raise DimensionMismatchError(
            f"contour matrix must be 2-D, got shape {matrix.shape}"
        )
    rows, cols = matrix.shape
    if rows == 0 or cols == 0:
        raise EmptyInputError("contour matrix is empty")
    if rows % 2 != 0:
        raise DimensionMismatchError(
            f"contour matrix must have an even row count, got {rows}"
        )
    max_rank = min(rows, cols)
    if not isinstance(m, (int, np.integer)) or isinstance(m, bool):
        raise InvalidRankError(f"rank must be an integer, got {m!r}")
    if not 1 <= m <= max_rank:
        raise InvalidRankError(
            f"rank {m} outside valid range [1, {max_rank}] for shape "
            f"{matrix.shape}"
        )
    u, s, _ = np.linalg.svd(matrix, full_matrices=False)
    if s[m - 1] <= RANK_RTOL * s[0]:
        raise RankDeficientError(
            f"singular value {m} is numerically zero "
            f"({s[m - 1]:.3e} vs leading {s[0]:.3e})"
        )
    u_m = u[:, :m].copy()
    # Fix each column's sign so its largest-magnitude entry is positive.
    anchor = np.abs(u_m).argmax(axis=0)
    signs = np.sign(u_m[anchor, np.arange(m)])
    signs[signs == 0] = 1.0
    u_m *= signs
    return EigenSpineBasis(
        basis=u_m, singular_values=s[:m].copy(), n_vertices=rows // 2
    )


def project(basis: EigenSpineBasis, contour) -> np.ndarray:
    """Coefficients of a contour in the basis: ``c = U^T a``."""
    vec = as_contour_vector(contour, basis.n_vertices)
    return basis.basis.T @ vec


def reconstruct(basis: EigenSpineBasis, coeffs) -> np.ndarray:
    """Flat contour rebuilt from coefficients: ``a = U c``."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (basis.m,):
        raise DimensionMismatchError(
            f"expected {basis.m} coefficients, got shape {coeffs.shape}"
        )
    return basis.basis @ coeffs


def reconstruction_error(basis: EigenSpineBasis, matrix) -> float:
    """Frobenius norm of the residual after projecting onto the basis.

    Accepts a contour matrix with one column per contour, or a single
    contour in either accepted layout (Frobenius and Euclidean norms
    coincide for one column).
    """
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim == 2 and arr.shape[0] == 2 * basis.n_vertices:
        if not np.all(np.isfinite(arr)):
            raise DimensionMismatchError("contour matrix has non-finite entries")
        mat = arr
    else:
        mat = as_contour_vector(arr, basis.n_vertices).reshape(-1, 1)
    resid = mat - basis.basis @ (basis.basis.T @ mat)
    return float(np.linalg.norm(resid))


class LowRankContourTransformer(TransformerMixin, BaseEstimator):
    """Estimator-style wrapper around the contour basis.

    ``X`` rows are flattened contours, so a corpus of ``L`` contours
    with ``N`` vertices each is an ``(L, 2N)`` matrix (the transpose of
    the column layout used by :func:`fit_basis`).

    Parameters
    ----------
    n_components : int, default=16
        Number of basis directions to retain.

    Attributes
    ----------
    basis_ : EigenSpineBasis
        The fitted basis.

    Examples
    --------
    >>> import numpy as np
    >>> rng = np.random.default_rng(0)
    >>> X = rng.uniform(0, 100, size=(40, 28))
    >>> tf = LowRankContourTransformer(n_components=5).fit(X)
    >>> tf.transform(X).shape
    (40, 5)
    """

    def __init__(self, n_components: int = 16):
        self.n_components = n_components

    def fit(self, X, y=None) -> "LowRankContourTransformer":
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise DimensionMismatchError(
                f"expected (n_samples, 2 * n_vertices), got shape {X.shape}"
            )
        self.basis_ = fit_basis(X.T, self.n_components)
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "basis_")
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != 2 * self.basis_.n_vertices:
            raise DimensionMismatchError(
                f"expected (n_samples, {2 * self.basis_.n_vertices}), "
                f"got shape {X.shape}"
            )
        return X @ self.basis_.basis

    def inverse_transform(self, coeffs) -> np.ndarray:
        check_is_fitted(self, "basis_")
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.ndim != 2 or coeffs.shape[1] != self.basis_.m:
            raise DimensionMismatchError(
                f"expected (n_samples, {self.basis_.m}), got shape "
                f"{coeffs.shape}"
            )
        return coeffs @ self.basis_.basis.T
