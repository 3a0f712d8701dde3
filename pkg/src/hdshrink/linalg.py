"""Dense symmetric linear algebra: sample covariance, eigendecomposition,
spectral function application, and quadratic forms.

Data matrices are p x n arrays whose columns are observations.  All
operations are pure; returned arrays are freshly allocated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, DimensionError, NumericError

SYMMETRY_RTOL = 1e-12


def validate_data_matrix(X: np.ndarray) -> np.ndarray:
    """Check a p x n data matrix (columns are samples) and return it as float64."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DimensionError(f"data matrix must be 2-d, got shape {X.shape}")
    p, n = X.shape
    if p < 1:
        raise DimensionError("data matrix needs at least one row")
    if n < 2:
        raise DimensionError(f"need at least 2 samples (columns), got {n}")
    if not np.all(np.isfinite(X)):
        raise DataError("data matrix contains non-finite entries")
    return X


def validate_symmetric(M: np.ndarray) -> np.ndarray:
    """Check that M is square, finite, and symmetric to relative 1e-12."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise DataError("matrix contains non-finite entries")
    scale = max(1.0, float(np.abs(M).max()))
    if np.abs(M - M.T).max() > SYMMETRY_RTOL * scale:
        raise DataError("matrix is not symmetric to relative 1e-12")
    return M


@dataclass(frozen=True)
class Spectrum:
    """Eigen-pairs of a symmetric matrix plus the (p, n) context.

    eigenvalues are ascending; eigenvectors holds the matching orthonormal
    columns, each with its largest-magnitude component made positive so the
    decomposition is deterministic.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    p: int
    n: int


def sample_covariance(X: np.ndarray) -> np.ndarray:
    """Bessel-corrected sample covariance of the columns of X (p x n)."""
    X = validate_data_matrix(X)
    n = X.shape[1]
    centered = X - X.mean(axis=1, keepdims=True)
    S = centered @ centered.T / (n - 1)
    return (S + S.T) / 2.0


def eigh(S: np.ndarray, n: int) -> Spectrum:
    """Eigendecomposition of a symmetric matrix with deterministic signs.

    The input is symmetrized as (S + S') / 2 before decomposition to absorb
    accumulated asymmetry.  ``n`` records the sample size that produced S.
    """
    S = validate_symmetric(S)
    M = (S + S.T) / 2.0
    try:
        vals, vecs = np.linalg.eigh(M)
    except np.linalg.LinAlgError as exc:
        raise NumericError(
            f"eigensolver failed on {M.shape[0]}x{M.shape[0]} matrix "
            f"(trace={np.trace(M):.6g}, max|entry|={np.abs(M).max():.6g}): {exc}"
        ) from exc
    # np.linalg.eigh returns ascending eigenvalues already.
    anchor = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[anchor, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    vecs = vecs * signs
    return Spectrum(eigenvalues=vals, eigenvectors=vecs, p=S.shape[0], n=int(n))


def apply_spectral(spec: Spectrum, curve_values: np.ndarray) -> np.ndarray:
    """Rebuild sum_i c_i u_i u_i' for per-eigenvalue values c, keeping U fixed."""
    c = np.asarray(curve_values, dtype=float)
    if c.shape != (spec.p,):
        raise DimensionError(
            f"curve length {c.shape} does not match spectrum dimension {spec.p}"
        )
    if not np.all(np.isfinite(c)):
        raise DataError("curve contains non-finite values")
    U = spec.eigenvectors
    M = (U * c) @ U.T
    return (M + M.T) / 2.0


def quadratic_form(M: np.ndarray, v: np.ndarray) -> float:
    """v' M v for a symmetric matrix M."""
    M = validate_symmetric(M)
    v = np.asarray(v, dtype=float)
    if v.shape != (M.shape[0],):
        raise DimensionError(
            f"vector length {v.shape} does not match matrix dimension {M.shape[0]}"
        )
    return float(v @ M @ v)


def save_matrix(path, M: np.ndarray) -> None:
    """Write a matrix or vector as headerless comma-separated rows."""
    np.savetxt(path, np.atleast_2d(np.asarray(M, dtype=float)), delimiter=",")


def load_matrix(path) -> np.ndarray:
    """Read a headerless comma-separated matrix; shape is inferred."""
    try:
        M = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise DataError(f"failed to parse matrix CSV {path}: {exc}") from exc
    if not np.all(np.isfinite(M)):
        raise DataError(f"matrix CSV {path} contains non-finite entries")
    return M


def load_vector(path) -> np.ndarray:
    """Read a vector stored as one CSV row or one value per line."""
    M = load_matrix(path)
    if 1 not in M.shape:
        raise DimensionError(f"expected a vector in {path}, got shape {M.shape}")
    return M.ravel()
