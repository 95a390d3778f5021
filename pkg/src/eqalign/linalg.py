"""Dense linear-algebra kernel for the alignment baselines and metrics.

Everything operates on plain float64 ``numpy`` arrays. Matrices are expected
to be modest (d up to a couple of hundred); the eigensolver is a cyclic
Jacobi iteration, which is simple, accurate and deterministic at that scale.

All functions are pure and safe to call concurrently.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DataError, NumericalError, ShapeError

# Ridge added to covariance matrices destined for inversion or Cholesky:
# near-collinear sensor channels are the norm, not the exception.
RIDGE_SCALE = 1e-6

_JACOBI_OFF_TOL = 1e-12
_JACOBI_MAX_SWEEPS = 100


@dataclass
class SymEig:
    """Eigendecomposition of a symmetric matrix.

    ``values`` are sorted descending; ``vectors`` holds the matching
    orthonormal eigenvectors as columns, each with its first nonzero
    component made positive (deterministic sign convention).
    """

    values: np.ndarray
    vectors: np.ndarray


def _as_matrix(a, name="matrix"):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NumericalError(f"{name} contains non-finite entries")
    return a


def _check_square_symmetric(a, tol, name="matrix"):
    a = _as_matrix(a, name)
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {a.shape}")
    asym = np.max(np.abs(a - a.T)) if a.size else 0.0
    if asym > tol:
        raise NumericalError(
            f"{name} is not symmetric: max |A - A^T| = {asym:.3e} > {tol:.0e}"
        )
    return a


def covariance(x, centered=False):
    """Sample covariance of the rows of ``x`` with divisor ``n - 1``.

    Parameters
    ----------
    x : ndarray of shape (n, d)
        One observation per row.
    centered : bool
        When False (default) the column means are subtracted first.

    Returns
    -------
    ndarray of shape (d, d), symmetric PSD.
    """
    x = _as_matrix(x, "x")
    n = x.shape[0]
    if n < 2:
        raise DataError(f"covariance needs at least 2 rows, got {n}")
    if not centered:
        x = x - x.mean(axis=0)
    c = x.T @ x / (n - 1)
    return 0.5 * (c + c.T)


def ridge_regularize(a, scale=RIDGE_SCALE):
    """Add ``scale * mean(diag(a))`` to the diagonal of a square matrix."""
    a = _check_square_symmetric(a, tol=1e-8, name="a")
    bump = scale * float(np.mean(np.diag(a))) if a.shape[0] else 0.0
    return a + bump * np.eye(a.shape[0])


def sym_eig(a):
    """Full eigendecomposition of a symmetric matrix via cyclic Jacobi sweeps.

    Sweeps stop when the off-diagonal Frobenius norm drops below 1e-12 or
    after 100 sweeps. Eigenvalues come back sorted descending; ordering among
    numerically equal eigenvalues is unspecified, so tests should assert
    reconstruction rather than vector identity.
    """
    a = _check_square_symmetric(a, tol=1e-8, name="a")
    d = a.shape[0]
    m = 0.5 * (a + a.T)
    v = np.eye(d)
    if d == 1:
        vals = np.array([m[0, 0]])
        return SymEig(values=vals, vectors=v)

    def off_norm(mat):
        return np.sqrt(max(np.sum(mat * mat) - np.sum(np.diag(mat) ** 2), 0.0))

    prev_off = np.inf
    for _ in range(_JACOBI_MAX_SWEEPS):
        off = off_norm(m)
        if off < _JACOBI_OFF_TOL or off >= prev_off:
            break
        prev_off = off
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = m[p, q]
                if apq == 0.0:
                    continue
                app, aqq = m[p, p], m[q, q]
                theta = (aqq - app) / (2.0 * apq)
                t = np.sign(theta) if theta != 0 else 1.0
                t = t / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                col_p = m[:, p].copy()
                col_q = m[:, q].copy()
                new_p = c * col_p - s * col_q
                new_q = s * col_p + c * col_q
                m[:, p] = new_p
                m[p, :] = new_p
                m[:, q] = new_q
                m[q, :] = new_q
                m[p, p] = app - t * apq
                m[q, q] = aqq + t * apq
                m[p, q] = 0.0
                m[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq

    values = np.diag(m).copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = v[:, order]
    # sign convention: first component with non-negligible magnitude positive
    for j in range(d):
        col = vectors[:, j]
        nz = np.nonzero(np.abs(col) > 1e-12)[0]
        if nz.size and col[nz[0]] < 0:
            vectors[:, j] = -col
    return SymEig(values=values, vectors=vectors)


def cholesky(a):
    """Lower-triangular Cholesky factor of a symmetric positive definite matrix.

    Raises
    ------
    NumericalError
        If a non-positive pivot is met (matrix not PD even after the caller's
        ridge regularization).
    """
    a = _check_square_symmetric(a, tol=1e-8, name="a")
    d = a.shape[0]
    low = np.zeros_like(a)
    for j in range(d):
        s = a[j, j] - low[j, :j] @ low[j, :j]
        if s <= 0.0:
            raise NumericalError(
                f"Cholesky failed at pivot {j}: non-positive value {s:.3e}"
            )
        low[j, j] = np.sqrt(s)
        if j + 1 < d:
            low[j + 1 :, j] = (a[j + 1 :, j] - low[j + 1 :, :j] @ low[j, :j]) / low[j, j]
    return low


def solve_lower(low, b):
    """Solve ``low @ x = b`` for lower-triangular ``low`` by forward substitution."""
    low = np.asarray(low, dtype=float)
    b = np.asarray(b, dtype=float)
    squeeze = b.ndim == 1
    x = np.array(b, dtype=float, ndmin=2)
    if squeeze:
        x = x.T
    x = x.copy()
    for i in range(low.shape[0]):
        x[i] = (x[i] - low[i, :i] @ x[:i]) / low[i, i]
    return x[:, 0] if squeeze else x


def solve_upper(up, b):
    """Solve ``up @ x = b`` for upper-triangular ``up`` by back substitution."""
    up = np.asarray(up, dtype=float)
    b = np.asarray(b, dtype=float)
    squeeze = b.ndim == 1
    x = np.array(b, dtype=float, ndmin=2)
    if squeeze:
        x = x.T
    x = x.copy()
    for i in range(up.shape[0] - 1, -1, -1):
        x[i] = (x[i] - up[i, i + 1 :] @ x[i + 1 :]) / up[i, i]
    return x[:, 0] if squeeze else x


def spd_inverse(a):
    """Inverse of a symmetric positive definite matrix via its Cholesky factor."""
    low = cholesky(a)
    eye = np.eye(a.shape[0])
    return solve_upper(low.T, solve_lower(low, eye))


def sqrtm_psd(a):
    """Symmetric PSD square root: returns S with ``S @ S = a``.

    Eigenvalues in [-1e-6, 0) are clamped to zero; anything below -1e-6
    means the input is not PSD and raises.
    """
    a = _check_square_symmetric(a, tol=1e-8, name="a")
    eig = sym_eig(a)
    if eig.values.size and eig.values.min() < -1e-6:
        raise NumericalError(
            f"matrix is not PSD: smallest eigenvalue {eig.values.min():.3e}"
        )
    vals = np.clip(eig.values, 0.0, None)
    root = (eig.vectors * np.sqrt(vals)) @ eig.vectors.T
    return 0.5 * (root + root.T)
