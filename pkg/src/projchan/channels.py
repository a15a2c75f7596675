"""Channel representation, validation, conversion, tensoring, and extraction of
the projective form T(rho) = (I - m M(rho)) / (d - m).

Conventions fixed here:
  * Kraus action T(rho) = sum_k A_k rho A_k+, with sum_k A_k+ A_k = I.
  * Choi matrix (T x id)(Omega), trace 1, ordering (output, reference).
  * Superoperators act on row-major vec(X).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import linalg
from .errors import (
    BadDims,
    DimensionOverflow,
    DimMismatch,
    NonPureEnsemble,
    NotProjectiveClass,
    ParseError,
    ValidationError,
)
from .linalg import dag

TP_TOL = 1e-9
CHOI_KRAUS_CUTOFF = 1e-12
INTEGER_M_TOL = 1e-6
RECON_TOL = 1e-8


@dataclass
class DensityMatrix:
    """Hermitian, PSD (after roundoff clamping), unit-trace matrix."""

    dim: int
    mat: np.ndarray

    def __post_init__(self):
        self.mat = np.asarray(self.mat, dtype=complex)
        if self.mat.shape != (self.dim, self.dim):
            raise BadDims(f"state shape {self.mat.shape} != ({self.dim}, {self.dim})")
        if linalg.herm_norm_inf(self.mat - dag(self.mat)) > 1e-10:
            raise ValidationError("state is not Hermitian within 1e-10")
        w = np.linalg.eigvalsh((self.mat + dag(self.mat)) / 2)
        linalg.clamp_state_eigenvalues(w)
        if abs(np.trace(self.mat).real - 1.0) > 1e-10:
            raise ValidationError(f"trace {np.trace(self.mat).real!r} != 1 within 1e-10")

    @classmethod
    def from_vector(cls, psi: np.ndarray) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        psi = psi / np.linalg.norm(psi)
        return cls(len(psi), np.outer(psi, psi.conj()))

    def eigenvalues(self) -> np.ndarray:
        return linalg.clamp_state_eigenvalues(np.linalg.eigvalsh(self.mat))

    def purity(self) -> float:
        return float(np.trace(self.mat @ self.mat).real)

    def is_pure(self, tol: float = 1e-10) -> bool:
        return abs(self.purity() - 1.0) <= tol


@dataclass
class QuantumChannel:
    """Kraus-operator channel with a cached trace-1 Choi matrix."""

    dim_in: int
    dim_out: int
    kraus: tuple
    name: str = ""

    def __post_init__(self):
        self.kraus = tuple(np.asarray(A, dtype=complex) for A in self.kraus)
        for A in self.kraus:
            if A.shape != (self.dim_out, self.dim_in):
                raise BadDims(f"Kraus shape {A.shape} != ({self.dim_out}, {self.dim_in})")
        self._kstack = np.stack(self.kraus)

    @cached_property
    def choi(self) -> np.ndarray:
        # (T x id)(Omega) = sum_k vec(A_k) vec(A_k)+ / d_in with row-major vec,
        # index ordering (output, reference).
        K = self._kstack.reshape(len(self.kraus), -1)
        return (K.T @ K.conj()) / self.dim_in

    def apply_raw(self, rho: np.ndarray) -> np.ndarray:
        K = self._kstack
        return np.einsum("kij,jl,kml->im", K, rho, K.conj(), optimize=True)

    def apply_adjoint_raw(self, X: np.ndarray) -> np.ndarray:
        """Heisenberg-picture adjoint, sum_k A_k+ X A_k."""
        K = self._kstack
        return np.einsum("kji,jl,klm->im", K.conj(), X, K, optimize=True)

    def superoperator(self) -> np.ndarray:
        """(d_out^2 x d_in^2) matrix acting on row-major vec."""
        K = self._kstack
        return sum(np.kron(A, A.conj()) for A in K)


@dataclass
class LinearMap:
    """A linear map on d x d matrices stored as a superoperator, with the
    integer m of the projective form when applicable."""

    dim: int
    superop: np.ndarray
    m: int | None = None

    def apply(self, X: np.ndarray) -> np.ndarray:
        d = self.dim
        return (self.superop @ np.asarray(X, dtype=complex).reshape(-1)).reshape(d, d)

    @cached_property
    def choi(self) -> np.ndarray:
        """(M x id)(Omega), trace-1 convention."""
        d = self.dim
        C = np.zeros((d * d, d * d), dtype=complex)
        for i in range(d):
            for j in range(d):
                C += np.kron(self.apply(linalg.basis_matrix_unit(d, i, j)), linalg.basis_matrix_unit(d, i, j)) / d
        return C

    @classmethod
    def from_apply(cls, fn, d: int, m: int | None = None) -> "LinearMap":
        S = np.zeros((d * d, d * d), dtype=complex)
        for i in range(d):
            for j in range(d):
                S[:, i * d + j] = fn(linalg.basis_matrix_unit(d, i, j)).reshape(-1)
        return cls(d, S, m)


@dataclass
class ProjectiveForm:
    """The (M, m, d) data of the projective class, with witness input rho0."""

    m: int
    d: int
    M: LinearMap
    rho0: DensityMatrix
    projector: np.ndarray

    def reconstruct(self, X: np.ndarray) -> np.ndarray:
        """(tr X * I - m M(X)) / (d - m), the channel the form encodes."""
        return (np.trace(X) * np.eye(self.d) - self.m * self.M.apply(X)) / (self.d - self.m)


@dataclass
class Isometry:
    dim_in: int
    dim_out: int
    env_dim: int
    mat: np.ndarray

    def __post_init__(self):
        self.mat = np.asarray(self.mat, dtype=complex)
        expected = (self.dim_out * self.env_dim, self.dim_in)
        if self.mat.shape != expected:
            raise BadDims(f"isometry shape {self.mat.shape} != {expected}")
        if linalg.herm_norm_inf(dag(self.mat) @ self.mat - np.eye(self.dim_in)) > 1e-10:
            raise ValidationError("U+U != I within 1e-10")


@dataclass
class ValidationReport:
    trace_preserving: bool
    completely_positive: bool
    tp_residual: float
    min_choi_eigenvalue: float

    @property
    def valid(self) -> bool:
        return self.trace_preserving and self.completely_positive

    def to_dict(self) -> dict:
        return {
            "flags": {
                "trace_preserving": self.trace_preserving,
                "completely_positive": self.completely_positive,
            },
            "residuals": {
                "trace_preserving": self.tp_residual,
                "min_choi_eigenvalue": self.min_choi_eigenvalue,
            },
        }


def validate(T: QuantumChannel) -> ValidationReport:
    """Trace preservation and complete positivity, with residuals."""
    acc = sum(dag(A) @ A for A in T.kraus)
    tp_res = linalg.herm_norm_inf(acc - np.eye(T.dim_in))
    w = np.linalg.eigvalsh((T.choi + dag(T.choi)) / 2)
    return ValidationReport(
        trace_preserving=bool(tp_res <= TP_TOL),
        completely_positive=bool(w.min() >= -linalg.NEG_EIG_TOL),
        tp_residual=float(tp_res),
        min_choi_eigenvalue=float(w.min()),
    )


def apply(T: QuantumChannel, rho: DensityMatrix) -> DensityMatrix:
    if rho.dim != T.dim_in:
        raise DimMismatch(f"state dim {rho.dim} != channel input dim {T.dim_in}")
    return DensityMatrix(T.dim_out, T.apply_raw(rho.mat))


def tensor_channels(channels, cap: int = linalg.DIM_CAP) -> QuantumChannel:
    """Tensor product channel; Kraus set is all products of constituents."""
    channels = list(channels)
    if not channels:
        raise BadDims("need at least one channel")
    din = int(np.prod([T.dim_in for T in channels]))
    dout = int(np.prod([T.dim_out for T in channels]))
    if max(din, dout) > cap:
        raise DimensionOverflow(f"product dimension {max(din, dout)} exceeds cap {cap}")
    kraus = [np.array([[1.0 + 0j]])]
    for T in channels:
        kraus = [np.kron(A, B) for A in kraus for B in T.kraus]
    name = " (x) ".join(T.name or "?" for T in channels)
    return QuantumChannel(din, dout, tuple(kraus), name=name)


def kraus_from_choi(choi: np.ndarray, dim_in: int, dim_out: int, cutoff: float = CHOI_KRAUS_CUTOFF):
    """Minimal Kraus set from the trace-1 Choi via eigendecomposition."""
    w, V = linalg.eig_hermitian(choi)
    ops = []
    for k in range(len(w)):
        lam = w[k] * dim_in
        if lam > cutoff:
            ops.append(np.sqrt(lam) * V[:, k].reshape(dim_out, dim_in))
    return ops


def channel_from_choi(choi: np.ndarray, dim: int, name: str = "") -> QuantumChannel:
    return QuantumChannel(dim, dim, tuple(kraus_from_choi(choi, dim, dim)), name=name)


def extract_projective_form(T: QuantumChannel, argmax_state: DensityMatrix, norm_value: float) -> ProjectiveForm:
    """Recover (M, m, rho0) from a norm-achieving input with projection output.

    The maximal output norm of a class member is 1/m0 for integer m0; the map
    M(X) = m0/(d-m0) * (tr X / m0 * I - T(X)) is trace preserving and sends
    rho0 to a rank-(d-m0) projection over d-m0.
    """
    d = T.dim_in
    inv = 1.0 / norm_value
    m0 = int(round(inv))
    if abs(inv - m0) > INTEGER_M_TOL or m0 < 1:
        raise NotProjectiveClass(f"1/norm = {inv!r} is not near an integer")
    if m0 >= d:
        raise NotProjectiveClass(f"m0 = {m0} leaves no projective part (m = d - m0 = {d - m0})")
    m = d - m0

    def M_fn(X):
        return (m0 / (d - m0)) * ((np.trace(X) / m0) * np.eye(d) - T.apply_raw(X))

    M = LinearMap.from_apply(M_fn, d, m=m)
    projector = m * M.apply(argmax_state.mat)
    idem = linalg.herm_norm_inf(projector @ projector - projector)
    tr_err = abs(np.trace(projector).real - m)
    if idem > RECON_TOL or tr_err > RECON_TOL:
        raise NotProjectiveClass(
            f"m*M(rho0) is not a rank-{m} projection (idempotency {idem:.2e}, trace error {tr_err:.2e})"
        )
    form = ProjectiveForm(m=m, d=d, M=M, rho0=argmax_state, projector=projector)
    resid = reconstruction_residual(T, form)
    if resid > RECON_TOL:
        raise NotProjectiveClass(f"reconstruction residual {resid:.2e} > {RECON_TOL:.0e}")
    return form


def reconstruction_residual(T: QuantumChannel, form: ProjectiveForm) -> float:
    """Max over matrix units of ||T(E) - (tr E * I - m M(E))/(d - m)||_inf."""
    d = T.dim_in
    resid = 0.0
    for i in range(d):
        for j in range(d):
            E = linalg.basis_matrix_unit(d, i, j)
            resid = max(resid, linalg.herm_norm_inf(T.apply_raw(E) - form.reconstruct(E)))
    return resid


def stinespring(T: QuantumChannel) -> Isometry:
    """Dilation isometry U with tr_env(U rho U+) = T(rho); env indexes Kraus operators."""
    kraus = [A for A in T.kraus if np.linalg.norm(A) >= 1e-12]
    K = len(kraus)
    U = np.zeros((T.dim_out * K, T.dim_in), dtype=complex)
    for k, A in enumerate(kraus):
        U[k :: K, :] = A  # row (a*K + k) <- A[a, :]
    return Isometry(T.dim_in, T.dim_out, K, U)


def is_ppt_choi(T: QuantumChannel):
    """Partial transpose test on the Choi matrix; PPT is necessary for
    entanglement breaking."""
    d_in, d_out = T.dim_in, T.dim_out
    pt = linalg.partial_transpose(T.choi, [d_out, d_in], 1)
    w = np.linalg.eigvalsh((pt + dag(pt)) / 2)
    return bool(w.min() >= -linalg.NEG_EIG_TOL), float(w.min())


def is_normalized_projection(rho: DensityMatrix, tol: float = 1e-8):
    """True iff all nonzero eigenvalues equal 1/rank within tol; returns (flag, rank)."""
    w = rho.eigenvalues()
    nz = w[w > tol]
    if len(nz) == 0:
        return False, 0
    rank = len(nz)
    flag = bool(np.abs(nz - 1.0 / rank).max() <= tol)
    return flag, rank


# ---------------------------------------------------------------------------
# JSON wire format: {"dim": int, "kraus": [{"re": [[...]], "im": [[...]]}]}
# ---------------------------------------------------------------------------


def matrix_to_json(A: np.ndarray) -> dict:
    A = np.asarray(A, dtype=complex)
    return {"re": A.real.tolist(), "im": A.imag.tolist()}


def matrix_from_json(obj, field_name: str = "matrix") -> np.ndarray:
    if not isinstance(obj, dict):
        raise ParseError(f"{field_name}: expected an object with 're'/'im' fields")
    for key in ("re", "im"):
        if key not in obj:
            raise ParseError(f"{field_name}: missing '{key}' field")
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{field_name}: ragged or non-numeric entries ({exc})") from exc
    if re.shape != im.shape or re.ndim != 2:
        raise ParseError(f"{field_name}: 're' shape {re.shape} and 'im' shape {im.shape} must be equal 2-d")
    return re + 1j * im


def channel_to_json(T: QuantumChannel) -> dict:
    return {"dim": T.dim_in, "kraus": [matrix_to_json(A) for A in T.kraus]}


def channel_from_json(obj) -> QuantumChannel:
    if not isinstance(obj, dict):
        raise ParseError("channel: expected a JSON object")
    if "dim" not in obj:
        raise ParseError("channel: missing 'dim' field")
    if "kraus" not in obj or not isinstance(obj["kraus"], list) or not obj["kraus"]:
        raise ParseError("channel: missing or empty 'kraus' field")
    d = int(obj["dim"])
    ops = [matrix_from_json(k, field_name=f"kraus[{i}]") for i, k in enumerate(obj["kraus"])]
    for i, A in enumerate(ops):
        if A.shape != (d, d):
            raise ValidationError(f"kraus[{i}] has shape {A.shape}, expected ({d}, {d})")
    T = QuantumChannel(d, d, tuple(ops), name="file")
    report = validate(T)
    if not report.valid:
        raise ValidationError(
            f"channel fails validation (tp residual {report.tp_residual:.3e}, "
            f"min choi eig {report.min_choi_eigenvalue:.3e})",
            residuals=report.to_dict()["residuals"],
        )
    return T


def ensure_pure_members(states, tol: float = 1e-10):
    for i, s in enumerate(states):
        if not s.is_pure(tol):
            raise NonPureEnsemble(f"ensemble member {i} has purity {s.purity()!r}")
