"""Dense complex kernels: structured products, rank-one SVD, 3-way tensors.

Matrices are 2-D complex ``numpy`` arrays and vectors are 1-D arrays.
A third-order tensor is a 3-D array indexed ``T[i, j, k]``. Whenever a
matrix or tensor is linearized (debug dumps, folding), column-major order
is used: the first index runs fastest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

POWER_TOL = 1e-12
POWER_MAX_ITER = 10_000
# entries below this fraction of max |u| are not used as phase reference
_PHASE_REF_TOL = 1e-8


@dataclass(frozen=True)
class RankOneSVD:
    """Dominant singular triplet ``A ~= sigma * u @ v.conj().T``."""

    sigma: float
    u: np.ndarray
    v: np.ndarray
    iterations: int = 0


def _as_matrix(A, name="A") -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2:
        raise ValueError(f"{name} must be a matrix, got shape {A.shape}")
    return A


def kron(A, B) -> np.ndarray:
    """Kronecker product.

    Vectors are kept 1-D (``kron([1, 2], [1, -1]) == [1, -1, 2, -2]``);
    anything else is treated as a matrix.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    if A.ndim == 1 and B.ndim == 1:
        return np.kron(A, B)
    return np.kron(_as_matrix(A, "A"), _as_matrix(B, "B"))


def khatri_rao(A, B) -> np.ndarray:
    """Column-wise Kronecker product of ``A`` (I x R) and ``B`` (J x R)."""
    A = _as_matrix(A, "A")
    B = _as_matrix(B, "B")
    if A.shape[1] != B.shape[1]:
        raise ValueError(
            f"khatri_rao needs equal column counts, got {A.shape[1]} and {B.shape[1]}"
        )
    return (A[:, None, :] * B[None, :, :]).reshape(A.shape[0] * B.shape[0], A.shape[1])


def hadamard(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"hadamard needs equal shapes, got {a.shape} and {b.shape}")
    return a * b


def _phase_reference(u: np.ndarray) -> np.ndarray:
    """Unit phasor of the first significant entry along the last axis."""
    mag = np.abs(u)
    significant = mag > _PHASE_REF_TOL * mag.max(axis=-1, keepdims=True)
    idx = np.argmax(significant, axis=-1)
    ref = np.take_along_axis(u, idx[..., None], axis=-1)
    return ref / np.abs(ref)


def rank_one_svd_batch(A, tol: float = POWER_TOL, max_iter: int = POWER_MAX_ITER):
    """Dominant singular triplets of a stack of matrices.

    Power iteration on ``A^H A`` from a fixed start, the all-ones vector
    plus the first canonical basis vector (normalized). The iterates are
    propagated through whichever Gram matrix is smaller, ``A^H A`` or
    ``A A^H``; both produce the same sequence of right vectors. A matrix
    stops iterating once its singular value estimate changes by less than
    ``tol`` relative, or after ``max_iter`` steps.

    Parameters
    ----------
    A : array_like, shape (..., i, j)
        Stack of nonzero, finite complex matrices.

    Returns
    -------
    sigma : ndarray, shape (...)
    u : ndarray, shape (..., i)
        Unit-norm left vectors, first significant entry real and positive.
    v : ndarray, shape (..., j)
        Unit-norm right vectors carrying the compensating phase.
    iterations : ndarray of int, shape (...)
    """
    A = np.asarray(A, dtype=complex)
    if A.ndim < 2:
        raise ValueError(f"expected a (stack of) matrices, got shape {A.shape}")
    batch_shape = A.shape[:-2]
    rows, cols = A.shape[-2:]
    A = A.reshape(-1, rows, cols)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    if np.any(~A.any(axis=(1, 2))):
        raise ValueError("rank_one_svd of a zero matrix is undefined")
    AH = A.conj().transpose(0, 2, 1)

    v = np.ones((A.shape[0], cols), dtype=complex)
    v[:, 0] += 1.0
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    x = np.einsum("bij,bj->bi", A, v)
    # start vector orthogonal to the row space: restart from the largest row
    for b in np.flatnonzero(~x.any(axis=1)):
        r = np.argmax(np.linalg.norm(A[b], axis=1))
        v[b] = AH[b, :, r] / np.linalg.norm(AH[b, :, r])
        x[b] = A[b] @ v[b]

    wide = rows < cols
    if wide:
        # z is the direction of x_k = A v_k, advanced by A A^H
        C = A @ AH
        z = x / np.linalg.norm(x, axis=1, keepdims=True)
    else:
        C = AH @ A
        z = v
    Cz = np.einsum("bij,bj->bi", C, z)
    sigma = np.linalg.norm(x, axis=1)

    iterations = np.zeros(A.shape[0], dtype=int)
    active = np.ones(A.shape[0], dtype=bool)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        y = Cz[idx]
        y_norm = np.linalg.norm(y, axis=1)
        if wide:
            # ||A v_{k+1}|| with v_{k+1} = A^H x_k / ||A^H x_k||
            quad = np.einsum("bi,bi->b", z[idx].conj(), y).real
            s_new = y_norm / np.sqrt(quad)
        z[idx] = y / y_norm[:, None]
        Cz[idx] = np.einsum("bij,bj->bi", C[idx], z[idx])
        if not wide:
            # ||A v_{k+1}||
            s_new = np.sqrt(np.einsum("bi,bi->b", z[idx].conj(), Cz[idx]).real)
        done = np.abs(s_new - sigma[idx]) <= tol * s_new
        sigma[idx] = s_new
        iterations[idx] += 1
        active[idx[done]] = False

    if wide:
        v = np.einsum("bji,bi->bj", AH, z)
        v /= np.linalg.norm(v, axis=1, keepdims=True)
    else:
        v = z
    x = np.einsum("bij,bj->bi", A, v)
    sigma = np.linalg.norm(x, axis=1)
    u = x / sigma[:, None]
    phase = _phase_reference(u)
    u = u * phase.conj()
    v = v * phase.conj()
    # reference entry exactly real after the phase rotation
    ref = np.argmax(np.abs(u) > _PHASE_REF_TOL * np.abs(u).max(axis=1, keepdims=True), axis=1)
    rows_idx = np.arange(u.shape[0])
    u[rows_idx, ref] = np.abs(u[rows_idx, ref])
    return (
        sigma.reshape(batch_shape),
        u.reshape(*batch_shape, rows),
        v.reshape(*batch_shape, cols),
        iterations.reshape(batch_shape),
    )


def rank_one_svd(A, tol: float = POWER_TOL, max_iter: int = POWER_MAX_ITER) -> RankOneSVD:
    """Best rank-one approximation ``sigma * u v^H`` of a nonzero matrix.

    Raises ``ValueError`` for the zero matrix. When the two largest singular
    values tie, the result is whichever dominant pair the iteration reaches
    from its fixed start; it is deterministic but not unique.
    """
    A = _as_matrix(A)
    sigma, u, v, it = rank_one_svd_batch(A[None], tol=tol, max_iter=max_iter)
    return RankOneSVD(float(sigma[0]), u[0], v[0], int(it[0]))


def fold_to_tensor(F, K: int, M: int, N: int) -> np.ndarray:
    """Rearrange a (K*M) x N combined channel into a K x M x N tensor.

    Row ``m*K + k`` (0-based) of ``F`` becomes fiber ``T[k, m, :]``, which
    is the row layout produced by ``khatri_rao(H.T, G)``: a column
    ``kron(h, g)`` folds into the outer product ``g h^T``.
    """
    F = _as_matrix(F, "F")
    if F.shape != (K * M, N):
        raise ValueError(f"cannot fold {F.shape} matrix into ({K}, {M}, {N}) tensor")
    return F.reshape(K, M, N, order="F")


def unfold_tensor_to_matrix(T) -> np.ndarray:
    """Inverse of :func:`fold_to_tensor`."""
    T = np.asarray(T)
    K, M, N = T.shape
    return T.reshape(K * M, N, order="F")


def unfold(T, mode: int) -> np.ndarray:
    """Mode-``mode`` matricization (``mode`` in 1, 2, 3).

    Columns follow the remaining indices with the lower mode running
    fastest, so the mode-1 unfolding of an I x J x K tensor has column
    ``k*J + j`` and a rank-one ``a o b o c`` unfolds to ``a kron(c, b)^T``.
    """
    T = np.asarray(T)
    if T.ndim != 3:
        raise ValueError(f"expected a third-order tensor, got shape {T.shape}")
    if mode not in (1, 2, 3):
        raise ValueError(f"mode must be 1, 2 or 3, got {mode!r}")
    axis = mode - 1
    return np.moveaxis(T, axis, 0).reshape(T.shape[axis], -1, order="F")


def fold(M, mode: int, shape) -> np.ndarray:
    """Inverse of :func:`unfold` for a tensor of the given shape."""
    if mode not in (1, 2, 3):
        raise ValueError(f"mode must be 1, 2 or 3, got {mode!r}")
    shape = tuple(shape)
    axis = mode - 1
    moved = (shape[axis],) + tuple(s for i, s in enumerate(shape) if i != axis)
    M = np.asarray(M)
    if M.shape != (moved[0], int(np.prod(moved[1:]))):
        raise ValueError(f"matrix of shape {M.shape} does not fold into {shape}")
    return np.moveaxis(M.reshape(moved, order="F"), 0, axis)


def n_mode_product(T, A, mode: int) -> np.ndarray:
    """Contract mode ``mode`` of ``T`` with the columns of ``A``.

    A 1-D ``A`` is treated as a row vector and the contracted mode is kept
    with size one.
    """
    T = np.asarray(T)
    A = np.asarray(A)
    if A.ndim == 1:
        A = A[None, :]
    if T.ndim != 3:
        raise ValueError(f"expected a third-order tensor, got shape {T.shape}")
    if mode not in (1, 2, 3):
        raise ValueError(f"mode must be 1, 2 or 3, got {mode!r}")
    if A.shape[1] != T.shape[mode - 1]:
        raise ValueError(
            f"mode-{mode} product needs {T.shape[mode - 1]} columns, got {A.shape[1]}"
        )
    shape = list(T.shape)
    shape[mode - 1] = A.shape[0]
    return fold(A @ unfold(T, mode), mode, shape)


def hosvd_rank_one(T) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Dominant left singular vector of each unfolding of ``T``.

    Each vector is unit-norm with its first significant entry real and
    positive. For an exactly rank-one tensor ``a o b o c`` the three
    vectors are ``a, b, c`` up to unit-modulus scalars.
    """
    T = np.asarray(T, dtype=complex)
    if T.ndim != 3:
        raise ValueError(f"expected a third-order tensor, got shape {T.shape}")
    if not np.any(T):
        raise ValueError("hosvd_rank_one of a zero tensor is undefined")
    return tuple(rank_one_svd(unfold(T, n)).u for n in (1, 2, 3))


def multilinear_form(T, a, b, c) -> complex:
    """``sum_ijk T[i,j,k] a[i] b[j] c[k]`` (no conjugation)."""
    return complex(np.einsum("ijk,i,j,k->", np.asarray(T), a, b, c))
