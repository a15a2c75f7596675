"""Dense complex matrix kernel: Hermitian eigendecomposition, tensor products,
partial trace/transpose, and the special operators (flip, maximally entangled
state) used throughout.

Storage is row-major; composite systems are ordered left to right, so the
matrix index of a basis vector |i1,...,iN> is i1*prod(d2..dN) + ... + iN.
"""

from __future__ import annotations

import string

import numpy as np

from .errors import BadDims, DimensionOverflow, NoConvergence, NotHermitian, NotPositiveSemidefinite

# Largest matrix dimension tensor() and tensor_channels() will produce.
DIM_CAP = 4096

# Eigenvalues of states in [-NEG_EIG_TOL, 0) are treated as roundoff and
# clamped to zero; anything below is a genuine positivity failure.
NEG_EIG_TOL = 1e-10

_HERM_TOL = 1e-8


def dag(A: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return A.conj().T


def herm_norm_inf(A: np.ndarray) -> float:
    """Entrywise max-modulus norm."""
    return float(np.abs(A).max()) if A.size else 0.0


def eig_hermitian(H: np.ndarray, tol: float = _HERM_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues ascending, unitary of column eigenvectors).
    Raises NotHermitian if ||H - H+||_inf exceeds `tol`, NoConvergence if the
    iteration fails.
    """
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise BadDims(f"expected a square matrix, got shape {H.shape}")
    if herm_norm_inf(H - dag(H)) > tol:
        raise NotHermitian(f"symmetry residual {herm_norm_inf(H - dag(H)):.3e} > {tol:.0e}")
    try:
        w, V = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return w, V


def clamp_state_eigenvalues(w: np.ndarray) -> np.ndarray:
    """Clamp roundoff-negative eigenvalues to zero; reject genuine negativity."""
    w = np.asarray(w, dtype=float)
    if w.min(initial=0.0) < -NEG_EIG_TOL:
        raise NotPositiveSemidefinite(f"eigenvalue {w.min():.3e} below -{NEG_EIG_TOL:.0e}")
    return np.where(w < 0.0, 0.0, w)


def tensor(A: np.ndarray, B: np.ndarray, cap: int = DIM_CAP) -> np.ndarray:
    """Kronecker product with a dimension cap."""
    rows = A.shape[0] * B.shape[0]
    cols = A.shape[1] * B.shape[1]
    if max(rows, cols) > cap:
        raise DimensionOverflow(f"product dimension {max(rows, cols)} exceeds cap {cap}")
    return np.kron(A, B)


def tensor_many(ops, cap: int = DIM_CAP) -> np.ndarray:
    out = np.asarray(ops[0], dtype=complex)
    for o in ops[1:]:
        out = tensor(out, o, cap=cap)
    return out


def _check_dims(X: np.ndarray, dims) -> None:
    if int(np.prod(dims)) != X.shape[0] or X.shape[0] != X.shape[1]:
        raise BadDims(f"dims {tuple(dims)} incompatible with matrix shape {X.shape}")


def partial_trace(X: np.ndarray, dims, keep) -> np.ndarray:
    """Trace out every subsystem not listed in `keep` (order preserved)."""
    dims = list(dims)
    _check_dims(X, dims)
    keep = sorted(set(keep))
    N = len(dims)
    if keep == list(range(N)):
        return np.asarray(X, dtype=complex).copy()
    t = np.asarray(X, dtype=complex).reshape(dims + dims)
    letters = string.ascii_lowercase
    row = list(letters[:N])
    col = list(letters[N:2 * N])
    for i in range(N):
        if i not in keep:
            col[i] = row[i]
    spec = "".join(row) + "".join(col) + "->" + "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    return np.einsum(spec, t).reshape(dk, dk)


def partial_transpose(X: np.ndarray, dims, sys: int) -> np.ndarray:
    """Transpose one subsystem in place."""
    dims = list(dims)
    _check_dims(X, dims)
    N = len(dims)
    if not 0 <= sys < N:
        raise BadDims(f"subsystem {sys} out of range for {N} factors")
    t = np.asarray(X, dtype=complex).reshape(dims + dims)
    t = np.swapaxes(t, sys, N + sys)
    n = int(np.prod(dims))
    return t.reshape(n, n)


def permute_systems(X: np.ndarray, dims, perm) -> np.ndarray:
    """Reorder tensor factors of a square matrix: new factor k is old factor perm[k]."""
    dims = list(dims)
    _check_dims(X, dims)
    N = len(dims)
    perm = list(perm)
    if sorted(perm) != list(range(N)):
        raise BadDims(f"{perm} is not a permutation of {N} systems")
    t = np.asarray(X, dtype=complex).reshape(dims + dims)
    t = t.transpose(perm + [N + p for p in perm])
    n = int(np.prod(dims))
    return t.reshape(n, n)


def flip(d: int) -> np.ndarray:
    """Flip (swap) operator on C^d x C^d: F|i,j> = |j,i>."""
    F = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            F[j * d + i, i * d + j] = 1.0
    return F


def max_entangled_vector(d: int) -> np.ndarray:
    """|Omega> = sum_i |i,i> / sqrt(d)."""
    v = np.zeros(d * d, dtype=complex)
    v[:: d + 1] = 1.0 / np.sqrt(d)
    return v


def max_entangled(d: int) -> np.ndarray:
    """The maximally entangled state Omega = |Omega><Omega| on C^d x C^d."""
    v = max_entangled_vector(d)
    return np.outer(v, v.conj())


def basis_matrix_unit(d: int, i: int, j: int) -> np.ndarray:
    E = np.zeros((d, d), dtype=complex)
    E[i, j] = 1.0
    return E


def projector_from_vector(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    return np.outer(psi, psi.conj())
