"""A script containing the dense, small-matrix linear algebra used by
the bounds and the stability certificate.

Matrices are two-dimensional float64 numpy arrays. Every function
validates that its inputs are finite and returns finite results.
"""

from typing import List, Tuple
import numpy as np
from numpy.typing import NDArray, ArrayLike
from lipscope.errors import (
    InputError, DimensionError, NotSymmetricError, ConvergenceError,
    SingularMatrixError, LyapunovError, HurwitzIndeterminateError
)
from lipscope.rng import stream_new

Matrix = NDArray[np.float64]
"""A dense real matrix stored row-major."""

SYMMETRY_TOLERANCE: float = 1e-12
"""Relative tolerance used by every symmetry check."""

POWER_TOLERANCE: float = 1e-13
"""Relative change of the Rayleigh estimate that counts as converged."""

POWER_MAX_ITERATIONS: int = 100_000
"""The iteration cap of the spectral-norm power iteration."""

SPECTRAL_START_SEED: int = 0x5EED
"""Seeds the stream drawing the second power-iteration start vector."""

JACOBI_TOLERANCE: float = 1e-12
"""Off-diagonal Frobenius norm, relative to the full norm, ending the Jacobi sweeps."""

JACOBI_MAX_SWEEPS: int = 100
"""The sweep cap of the cyclic Jacobi eigensolver."""

LYAPUNOV_MAX_DIM: int = 64
"""Largest state dimension accepted by the Kronecker Lyapunov solver."""

def as_matrix(values: ArrayLike, name: str = 'matrix') -> Matrix:
    """Converts the values to a finite, nonempty, two-dimensional float array.

    Parameters
    ----------
    values : array_like
        The entries, as nested rows or an array.
    name : str (default 'matrix')
        The name used in error messages.

    Returns
    -------
    Matrix
        The validated matrix.
    """
    mat: Matrix = np.array(values, dtype = np.float64)
    if mat.ndim != 2 or mat.size == 0:
        raise InputError(f'{name} must be a nonempty 2-D matrix, got shape {mat.shape}')
    if not np.all(np.isfinite(mat)):
        raise InputError(f'{name} contains non-finite entries')
    return mat

def _check_finite(result: Matrix, operation: str) -> Matrix:
    """Raises when an operation produced non-finite entries."""
    if not np.all(np.isfinite(result)):
        raise InputError(f'{operation} overflowed to non-finite values')
    return result

def _check_square(mat: Matrix, name: str) -> int:
    """Returns the dimension of a square matrix or raises."""
    if mat.shape[0] != mat.shape[1]:
        raise DimensionError(f'{name} must be square', mat.shape, mat.shape[::-1])
    return mat.shape[0]

def _check_symmetric(mat: Matrix) -> None:
    """Raises when a square matrix is not symmetric within the relative tolerance."""
    asymmetry: float = float(np.max(np.abs(mat - mat.T)))
    if asymmetry > SYMMETRY_TOLERANCE * float(np.max(np.abs(mat))):
        raise NotSymmetricError(asymmetry)

def mat_mul(a: ArrayLike, b: ArrayLike) -> Matrix:
    """Computes the matrix product `a · b`.

    Parameters
    ----------
    a : Matrix
        The left factor, of shape (m, k).
    b : Matrix
        The right factor, of shape (k, n).

    Returns
    -------
    Matrix
        The product, of shape (m, n).
    """
    a, b = as_matrix(a, 'a'), as_matrix(b, 'b')
    if a.shape[1] != b.shape[0]:
        raise DimensionError('Cannot multiply', a.shape, b.shape)
    return _check_finite(a @ b, 'mat_mul')

def spectral_norm(m: ArrayLike) -> float:
    """Computes the largest singular value by power iteration on `mᵀm`.

    The iteration applies `m` then `mᵀ` and never forms `mᵀm`. It runs
    from the normalized all-ones vector and again from a Gaussian vector
    drawn from a stream seeded with `SPECTRAL_START_SEED`, keeping the
    larger estimate. The all-ones vector may be a singular vector of a
    smaller singular value; the Gaussian start has no such symmetry.
    Each run stops once the relative change of the Rayleigh estimate
    ‖m v‖² stays below `POWER_TOLERANCE` for two consecutive steps.

    Parameters
    ----------
    m : Matrix
        The matrix.

    Returns
    -------
    float
        The spectral norm σ_max(m) ≥ 0.
    """
    m = as_matrix(m)
    if not np.any(m):
        return 0.0

    starts: List[NDArray[np.float64]] = [
        np.ones(m.shape[1]),
        stream_new(SPECTRAL_START_SEED).standard_normals(m.shape[1])
    ]
    norm: float = 0.0
    for start in starts:
        if not np.any(m @ start):
            # Start lies in the null space; the largest row does not
            start = m[int(np.argmax(np.linalg.norm(m, axis = 1)))].copy()
        norm = max(norm, _power_iteration(m, start / np.linalg.norm(start)))
    return norm

def _power_iteration(m: Matrix, vec: NDArray[np.float64]) -> float:
    """Runs the power iteration on `mᵀm` from a unit start vector with `m · vec ≠ 0`.

    Parameters
    ----------
    m : Matrix
        The matrix.
    vec : ndarray
        The unit start vector.

    Returns
    -------
    float
        The converged largest singular value.
    """
    image: NDArray[np.float64] = m @ vec
    estimate: float = float(np.dot(image, image))
    calm_steps: int = 0
    residual: float = np.inf
    for _ in range(POWER_MAX_ITERATIONS):
        gram: NDArray[np.float64] = m.T @ image
        vec = gram / np.linalg.norm(gram)
        image = m @ vec
        updated: float = float(np.dot(image, image))

        residual = abs(updated - estimate) / updated
        estimate = updated
        calm_steps = calm_steps + 1 if residual < POWER_TOLERANCE else 0
        if calm_steps >= 2:
            return float(np.sqrt(estimate))

    raise ConvergenceError('Spectral norm power iteration did not converge', vec, residual)

def sym_eigs(m: ArrayLike) -> NDArray[np.float64]:
    """Computes all eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    m : Matrix
        A square matrix, symmetric within `SYMMETRY_TOLERANCE` relative.

    Returns
    -------
    ndarray
        The eigenvalues in ascending order.
    """
    work: Matrix = as_matrix(m)
    size: int = _check_square(work, 'sym_eigs input')
    _check_symmetric(work)
    work = (work + work.T) / 2.0

    threshold: float = JACOBI_TOLERANCE * float(np.linalg.norm(work))
    off_diagonal: float = np.inf
    for _ in range(JACOBI_MAX_SWEEPS):
        off_diagonal = float(np.linalg.norm(work - np.diag(np.diag(work))))
        if off_diagonal <= threshold:
            return np.sort(np.diag(work))

        for p in range(size - 1):
            for q in range(p + 1, size):
                if work[p, q] == 0.0:
                    continue
                theta: float = (work[q, q] - work[p, p]) / (2.0 * work[p, q])
                tan: float = (1.0 if theta >= 0.0 else -1.0) \
                    / (abs(theta) + np.sqrt(theta * theta + 1.0))
                cos: float = 1.0 / np.sqrt(tan * tan + 1.0)
                sin: float = tan * cos

                # Rotate the (p, q) entry to zero
                rotation: Matrix = np.array([[cos, sin], [-sin, cos]])
                pair = [p, q]
                work[:, pair] = work[:, pair] @ rotation
                work[pair, :] = rotation.T @ work[pair, :]
                work[p, q] = work[q, p] = 0.0

    raise ConvergenceError('Jacobi eigensolver did not converge', np.diag(work), off_diagonal)

def solve_linear(a: ArrayLike, b: ArrayLike) -> Matrix:
    """Solves `a · x = b` by Gaussian elimination with partial pivoting.

    Parameters
    ----------
    a : Matrix
        The square coefficient matrix, of shape (n, n).
    b : Matrix
        The right-hand sides, of shape (n, k).

    Returns
    -------
    Matrix
        The solution `x`, of shape (n, k).
    """
    work: Matrix = as_matrix(a, 'a')
    rhs: Matrix = as_matrix(b, 'b')
    size: int = _check_square(work, 'a')
    if rhs.shape[0] != size:
        raise DimensionError('Right-hand side rows must match', work.shape, rhs.shape)

    # Pivots below this are zero to working precision
    tiny: float = size * np.finfo(np.float64).eps * float(np.max(np.abs(work)))

    for col in range(size):
        pivot: int = col + int(np.argmax(np.abs(work[col:, col])))
        if abs(work[pivot, col]) <= tiny:
            raise SingularMatrixError(col)
        # Swap the largest remaining entry onto the diagonal
        if pivot != col:
            work[[col, pivot]] = work[[pivot, col]]
            rhs[[col, pivot]] = rhs[[pivot, col]]

        factors: NDArray[np.float64] = work[col + 1:, col] / work[col, col]
        work[col + 1:, col:] -= np.outer(factors, work[col, col:])
        rhs[col + 1:] -= np.outer(factors, rhs[col])

    # Back substitution
    solution: Matrix = np.zeros_like(rhs)
    for row in range(size - 1, -1, -1):
        solution[row] = (rhs[row] - work[row, row + 1:] @ solution[row + 1:]) / work[row, row]
    return _check_finite(solution, 'solve_linear')

def lyapunov_solve(a: ArrayLike, q: ArrayLike) -> Matrix:
    """Solves the continuous Lyapunov equation `P·A + Aᵀ·P = −Q`.

    The equation is vectorized column-major into
    `(I ⊗ Aᵀ + Aᵀ ⊗ I) vec(P) = −vec(Q)`, solved with `solve_linear`,
    refined by one step of iterative refinement, and symmetrized.

    Parameters
    ----------
    a : Matrix
        The square state matrix, of dimension at most `LYAPUNOV_MAX_DIM`.
    q : Matrix
        The symmetric weight matrix.

    Returns
    -------
    Matrix
        The symmetric solution `P`.
    """
    a, q = as_matrix(a, 'a'), as_matrix(q, 'q')
    size: int = _check_square(a, 'a')
    if size > LYAPUNOV_MAX_DIM:
        raise InputError(f'Lyapunov solver supports n <= {LYAPUNOV_MAX_DIM}, got {size}')
    if q.shape != a.shape:
        raise DimensionError('Lyapunov weight must match the state matrix', a.shape, q.shape)
    _check_symmetric(q)

    identity: Matrix = np.eye(size)
    kron: Matrix = np.kron(identity, a.T) + np.kron(a.T, identity)
    rhs: Matrix = -q.reshape(-1, 1, order = 'F')

    try:
        vec_p: Matrix = solve_linear(kron, rhs)
        vec_p = vec_p + solve_linear(kron, rhs - kron @ vec_p)
    except SingularMatrixError as exc:
        raise LyapunovError() from exc

    solution: Matrix = vec_p.reshape(size, size, order = 'F')
    return (solution + solution.T) / 2.0

def is_spd(m: ArrayLike) -> bool:
    """Checks whether a symmetric matrix is positive definite by
    attempting a Cholesky factorization.

    Parameters
    ----------
    m : Matrix
        A square matrix, symmetric within `SYMMETRY_TOLERANCE` relative.

    Returns
    -------
    bool
        `True` if every Cholesky pivot is strictly positive.
    """
    m = as_matrix(m)
    _check_square(m, 'is_spd input')
    _check_symmetric(m)
    try:
        factor: Matrix = np.linalg.cholesky((m + m.T) / 2.0)
    except np.linalg.LinAlgError:
        return False
    return bool(np.all(np.diag(factor) > 0.0))

def is_hurwitz(a: ArrayLike) -> bool:
    """Checks whether every eigenvalue of `a` has a negative real part,
    using the Lyapunov characterization: `a` is Hurwitz exactly when
    `P·a + aᵀ·P = −I` has a positive definite solution.

    Parameters
    ----------
    a : Matrix
        The square matrix, of dimension at most `LYAPUNOV_MAX_DIM`.

    Returns
    -------
    bool
        `True` if `a` is Hurwitz.
    """
    a = as_matrix(a, 'a')
    size: int = _check_square(a, 'a')
    try:
        solution: Matrix = lyapunov_solve(a, np.eye(size))
    except LyapunovError as exc:
        raise HurwitzIndeterminateError() from exc
    return is_spd(solution)

def residual_norm(a: ArrayLike, q: ArrayLike, p: ArrayLike) -> Tuple[float, float]:
    """Computes the Frobenius norm of the Lyapunov residual `P·A + Aᵀ·P + Q`
    alongside ‖Q‖_F.

    Parameters
    ----------
    a : Matrix
        The state matrix.
    q : Matrix
        The weight matrix.
    p : Matrix
        A candidate solution.

    Returns
    -------
    (float, float)
        The residual norm and the norm of `q`.
    """
    a, q, p = as_matrix(a, 'a'), as_matrix(q, 'q'), as_matrix(p, 'p')
    return (float(np.linalg.norm(p @ a + a.T @ p + q)), float(np.linalg.norm(q)))
