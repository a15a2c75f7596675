"""Constructors for the channel families under study.

Every builder returns a validated QuantumChannel plus, where the family admits
one, the ProjectiveForm witness (M, m, rho0) with m * M(rho0) a rank-m
projection. Transposition is always taken in the computational basis.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import channels as ch
from . import linalg
from .errors import ParseError, SpecInvalid
from .linalg import dag


# ---------------------------------------------------------------------------
# Channel specs (tagged union as one dataclass per variant)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WernerHolevo:
    d: int


@dataclass(frozen=True)
class Stretching:
    d: int
    lam: float
    omega: np.ndarray | None = None  # pure state matrix; defaults to |0><0|


@dataclass(frozen=True)
class WeylShift:
    d: int


@dataclass(frozen=True)
class Pinching:
    d: int
    projections: tuple = ()


@dataclass(frozen=True)
class CasimirIrreducible:
    d: int


@dataclass(frozen=True)
class CasimirReducibleExample:
    pass


@dataclass(frozen=True)
class ShiftsPinching:
    d: int
    K: tuple = (1,)  # subset of {1..d}


@dataclass(frozen=True)
class CoarseGraining:
    n: int
    D: int


@dataclass(frozen=True)
class Diagonal:
    d: int
    diagonals: tuple = ()  # sequence of length-d complex vectors


# ---------------------------------------------------------------------------
# Building blocks
# ---------------------------------------------------------------------------


def weyl_unitaries(d: int):
    """Shift operators W_i |j> = |j+i mod d>, i = 1..d (W_d = identity)."""
    out = []
    for i in range(1, d + 1):
        W = np.zeros((d, d), dtype=complex)
        for j in range(d):
            W[(j + i) % d, j] = 1.0
        out.append(W)
    return out


def phase_unitaries(d: int):
    """U_j = sum_l exp(2 pi i l j / d) |l><l|, j = 1..d."""
    return [np.diag([np.exp(2j * np.pi * l * j / d) for l in range(d)]) for j in range(1, d + 1)]


def heisenberg_weyl_unitaries(d: int):
    """The d^2 products W^a Z^b of shift and clock operators."""
    W = weyl_unitaries(d)[0]
    Z = phase_unitaries(d)[0]
    out = []
    Wa = np.eye(d, dtype=complex)
    for _ in range(d):
        Zb = np.eye(d, dtype=complex)
        for _ in range(d):
            out.append(Wa @ Zb)
            Zb = Zb @ Z
        Wa = Wa @ W
    return out


def su2_generators(d: int):
    """Spin-j matrices (Jx, Jy, Jz) for j = (d-1)/2, built from ladder operators.

    Satisfy [J_i, J_j] = i eps_ijk J_k and sum_k J_k^2 = (d-1)(d+1)/4 * I.
    """
    if d < 2:
        raise SpecInvalid("spin construction needs d >= 2")
    j = (d - 1) / 2
    m = np.arange(j, -j - 1, -1)
    Jp = np.zeros((d, d))
    for k in range(d - 1):
        mm = m[k + 1]
        Jp[k, k + 1] = np.sqrt(j * (j + 1) - mm * (mm + 1))
    Jm = Jp.T
    Jx = (Jp + Jm) / 2 + 0j
    Jy = (Jp - Jm) / 2j
    Jz = np.diag(m).astype(complex)
    return [Jx, Jy, Jz]


def _wh_kraus(d: int):
    c = 1.0 / np.sqrt(d - 1)
    ops = []
    for i in range(d):
        for j in range(i + 1, d):
            A = np.zeros((d, d), dtype=complex)
            A[i, j] = c
            A[j, i] = -c
            ops.append(A)
    return ops


def _flat_state(d: int) -> ch.DensityMatrix:
    return ch.DensityMatrix(d, np.full((d, d), 1.0 / d, dtype=complex))


def transpose_map(d: int) -> ch.LinearMap:
    """X -> X^T as a superoperator (equals the flip operator), m = 1."""
    return ch.LinearMap(d, linalg.flip(d).astype(complex), m=1)


def weyl_m_map(d: int) -> ch.LinearMap:
    W = weyl_unitaries(d)
    return ch.LinearMap.from_apply(lambda X: sum(Wi @ X.T @ dag(Wi) for Wi in W) / d, d, m=1)


def pinching_m_map(projections) -> ch.LinearMap:
    projections = [np.asarray(P, dtype=complex) for P in projections]
    d = projections[0].shape[0]
    return ch.LinearMap.from_apply(lambda X: sum(P @ X.T @ P for P in projections), d, m=1)


def coarse_m_map(n: int, D: int) -> ch.LinearMap:
    d = n * D

    def M_fn(X):
        Xn = np.trace(X.reshape(n, D, n, D), axis1=1, axis2=3)
        return np.kron(Xn.T, np.eye(D)) / D

    return ch.LinearMap.from_apply(M_fn, d, m=D)


def block_projectors(d: int, sizes) -> tuple:
    """Diagonal projectors of the given block sizes (must sum to d)."""
    if sum(sizes) != d:
        raise SpecInvalid(f"block sizes {sizes} do not sum to d={d}")
    out = []
    at = 0
    for s in sizes:
        P = np.zeros((d, d), dtype=complex)
        for k in range(at, at + s):
            P[k, k] = 1.0
        out.append(P)
        at += s
    return tuple(out)


def casimir_reducible_generators():
    """The printed 4-dimensional reducible generators (computational basis)."""
    J1 = np.zeros((4, 4), dtype=complex)
    J1[1, 2] = 1; J1[3, 0] = 1; J1[0, 3] = -1; J1[2, 1] = -1
    J2 = np.zeros((4, 4), dtype=complex)
    J2[2, 0] = 1; J2[3, 1] = 1; J2[0, 2] = -1; J2[1, 3] = -1
    J3 = np.zeros((4, 4), dtype=complex)
    J3[0, 1] = 1; J3[3, 2] = 1; J3[1, 0] = -1; J3[2, 3] = -1
    return [(1j / 2) * J1, (1j / 2) * J2, (1j / 2) * J3]


def casimir_reducible_rho0() -> ch.DensityMatrix:
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1; rho[0, 3] = 1j; rho[3, 0] = -1j; rho[3, 3] = 1
    return ch.DensityMatrix(4, rho / 2)


def casimir_reducible_complementary_generators():
    """SU(2) generators acting on the multiplicity factor of the reducible
    representation.

    The printed generators decompose as two spin-1/2 copies; outputs of the
    example channel commute with them, so the capacity twirl has to rotate the
    multiplicity qubit instead. Built by pairing the J3 eigenspaces through
    the ladder operator (for these generators [J1, J2] = -i J3, so J1 + i J2
    lowers).
    """
    J1, J2, J3 = casimir_reducible_generators()
    w, V = np.linalg.eigh(J3)
    plus = V[:, np.isclose(w, 0.5)]
    a = []
    for k in range(plus.shape[1]):
        v = plus[:, k]
        idx = int(np.argmax(np.abs(v)))
        a.append(v * np.exp(-1j * np.angle(v[idx])))
    lower = J1 + 1j * J2
    cols = []
    for v in a:
        b = lower @ v
        cols += [v, b / np.linalg.norm(b)]
    R = np.stack(cols, axis=1)  # columns ordered (mu, s) with s minor
    jx = np.array([[0, 1], [1, 0]], dtype=complex) / 2
    jy = np.array([[0, -1j], [1j, 0]], dtype=complex) / 2
    jz = np.diag([0.5, -0.5]).astype(complex)
    return [R @ np.kron(j, np.eye(2)) @ dag(R) for j in (jx, jy, jz)]


# ---------------------------------------------------------------------------
# build()
# ---------------------------------------------------------------------------


def build(spec):
    """Construct (QuantumChannel, ProjectiveForm or None) for a channel spec."""
    if isinstance(spec, WernerHolevo):
        return _build_wh(spec)
    if isinstance(spec, Stretching):
        return _build_stretch(spec)
    if isinstance(spec, WeylShift):
        return _build_weyl(spec)
    if isinstance(spec, Pinching):
        return _build_pinching(spec)
    if isinstance(spec, CasimirIrreducible):
        return _build_casimir(spec)
    if isinstance(spec, CasimirReducibleExample):
        return _build_casred()
    if isinstance(spec, ShiftsPinching):
        return _build_shiftpinch(spec)
    if isinstance(spec, CoarseGraining):
        return _build_coarse(spec)
    if isinstance(spec, Diagonal):
        return _build_diagonal(spec)
    raise SpecInvalid(f"unknown channel spec {spec!r}")


def _finish(T: ch.QuantumChannel, form: ch.ProjectiveForm | None):
    report = ch.validate(T)
    if not report.valid:
        raise SpecInvalid(
            f"built channel fails validation: tp residual {report.tp_residual:.3e}, "
            f"min choi eig {report.min_choi_eigenvalue:.3e}"
        )
    if form is not None:
        resid = ch.reconstruction_residual(T, form)
        if resid > 1e-9:
            raise SpecInvalid(f"projective form reconstruction residual {resid:.3e}")
        P = form.projector
        if linalg.herm_norm_inf(P @ P - P) > 1e-8 or abs(np.trace(P).real - form.m) > 1e-8:
            raise SpecInvalid("witness m*M(rho0) is not a rank-m projection")
    return T, form


def _build_wh(spec: WernerHolevo):
    d = spec.d
    if d < 2:
        raise SpecInvalid("Werner-Holevo needs d >= 2")
    T = ch.QuantumChannel(d, d, tuple(_wh_kraus(d)), name=f"wh:d={d}")
    rho0 = ch.DensityMatrix.from_vector(np.eye(d)[:, 0])
    M = transpose_map(d)
    form = ch.ProjectiveForm(m=1, d=d, M=M, rho0=rho0, projector=M.apply(rho0.mat))
    return _finish(T, form)


def _build_stretch(spec: Stretching):
    d, lam = spec.d, float(spec.lam)
    if not 0.0 <= lam <= 1.0:
        raise SpecInvalid(f"lambda {lam} outside [0, 1]")
    omega = spec.omega if spec.omega is not None else linalg.projector_from_vector(np.eye(d)[:, 0])
    omega = np.asarray(omega, dtype=complex)
    if linalg.herm_norm_inf(omega @ omega - omega) > 1e-10 or abs(np.trace(omega).real - 1) > 1e-10:
        raise SpecInvalid("stretching omega must be a pure state")
    kraus = [np.sqrt(lam) * A for A in _wh_kraus(d)]
    w, V = np.linalg.eigh(omega)
    comp = [V[:, k] for k in range(d) if w[k] < 0.5]
    for v in comp:
        for b in range(d):
            A = np.sqrt((1 - lam) / (d - 1)) * np.outer(v, np.eye(d)[:, b])
            kraus.append(A)
    T = ch.QuantumChannel(d, d, tuple(kraus), name=f"stretch:d={d},lambda={lam}")
    M = ch.LinearMap.from_apply(lambda X: lam * X.T + (1 - lam) * omega * np.trace(X), d, m=1)
    rho0 = ch.DensityMatrix(d, omega.T.copy())
    form = ch.ProjectiveForm(m=1, d=d, M=M, rho0=rho0, projector=M.apply(rho0.mat))
    return _finish(T, form)


def _build_weyl(spec: WeylShift):
    d = spec.d
    W = weyl_unitaries(d)
    kraus = [Wi @ A / np.sqrt(d) for Wi in W for A in _wh_kraus(d)]
    T = ch.QuantumChannel(d, d, tuple(kraus), name=f"weyl:d={d}")
    rho0 = _flat_state(d)
    M = weyl_m_map(d)
    form = ch.ProjectiveForm(m=1, d=d, M=M, rho0=rho0, projector=M.apply(rho0.mat))
    return _finish(T, form)


def _build_pinching(spec: Pinching):
    d = spec.d
    projs = [np.asarray(P, dtype=complex) for P in spec.projections]
    if not projs:
        raise SpecInvalid("pinching needs at least one projection")
    acc = sum(projs)
    if linalg.herm_norm_inf(acc - np.eye(d)) > 1e-10:
        raise SpecInvalid("projections do not resolve the identity")
    for i, P in enumerate(projs):
        for j, Q in enumerate(projs):
            want = P if i == j else np.zeros_like(P)
            if linalg.herm_norm_inf(P @ Q - want) > 1e-10:
                raise SpecInvalid(f"projections {i},{j} are not orthogonal idempotents")
    kraus = [P @ A for P in projs for A in _wh_kraus(d)]
    kraus = [A for A in kraus if np.linalg.norm(A) > 1e-14]
    T = ch.QuantumChannel(d, d, tuple(kraus), name=f"pinch:d={d}")
    # witness: a vector inside the support of the first projection
    j_star = int(np.argmax(np.diag(projs[0]).real))
    v = projs[0] @ np.eye(d)[:, j_star]
    v = v / np.linalg.norm(v)
    rho0 = ch.DensityMatrix(d, linalg.projector_from_vector(v).T.copy())
    M = pinching_m_map(projs)
    form = ch.ProjectiveForm(m=1, d=d, M=M, rho0=rho0, projector=M.apply(rho0.mat))
    return _finish(T, form)


def _build_casimir(spec: CasimirIrreducible):
    d = spec.d
    Js = su2_generators(d)
    lam_pi = (d - 1) * (d + 1) / 4
    kraus = tuple(J / np.sqrt(lam_pi) for J in Js)
    T = ch.QuantumChannel(d, d, kraus, name=f"casimir:d={d}")
    return _finish(T, None)


def _build_casred():
    Js = casimir_reducible_generators()
    kraus = tuple(Js) + (np.eye(4, dtype=complex) / 2,)
    T = ch.QuantumChannel(4, 4, kraus, name="casimir-reducible")
    rho0 = casimir_reducible_rho0()
    M = ch.LinearMap.from_apply(lambda X: np.trace(X) * np.eye(4) / 2 - T.apply_raw(X), 4, m=2)
    form = ch.ProjectiveForm(m=2, d=4, M=M, rho0=rho0, projector=2 * M.apply(rho0.mat))
    return _finish(T, form)


def _build_shiftpinch(spec: ShiftsPinching):
    d = spec.d
    K = tuple(sorted(set(int(k) for k in spec.K)))
    if not K or any(k < 1 or k > d for k in K):
        raise SpecInvalid(f"K={K} must be a nonempty subset of 1..{d}")
    if len(K) >= d:
        raise SpecInvalid("K must be a proper subset (d - |K| >= 1)")
    rest = [k for k in range(1, d + 1) if k not in K]
    kraus = []
    for i in range(d):
        for k in rest:
            A = np.zeros((d, d), dtype=complex)
            A[(i - k) % d, i] = 1.0 / np.sqrt(d - len(K))
            kraus.append(A)
    T = ch.QuantumChannel(d, d, tuple(kraus), name=f"shiftpinch:d={d},K={','.join(map(str, K))}")
    W = weyl_unitaries(d)

    def M_fn(X):
        out = np.zeros((d, d), dtype=complex)
        for k in K:
            Y = dag(W[k - 1]) @ X @ W[k - 1]
            out += np.diag(np.diag(Y))
        return out / len(K)

    M = ch.LinearMap.from_apply(M_fn, d, m=len(K))
    rho0 = ch.DensityMatrix.from_vector(np.eye(d)[:, 0])
    form = ch.ProjectiveForm(m=len(K), d=d, M=M, rho0=rho0, projector=len(K) * M.apply(rho0.mat))
    return _finish(T, form)


def _build_coarse(spec: CoarseGraining):
    n, D = spec.n, spec.D
    if n < 2 or D < 1:
        raise SpecInvalid("coarse graining needs n >= 2 and D >= 1")
    d = n * D
    kraus = []
    for A in _wh_kraus(n):
        for e in range(D):
            for f in range(D):
                Kf = np.zeros((D, D), dtype=complex)
                Kf[f, e] = 1.0 / np.sqrt(D)
                kraus.append(np.kron(A, Kf))
    T = ch.QuantumChannel(d, d, tuple(kraus), name=f"coarse:n={n},D={D}")
    M = coarse_m_map(n, D)
    rho0 = _flat_state(d)
    form = ch.ProjectiveForm(m=D, d=d, M=M, rho0=rho0, projector=D * M.apply(rho0.mat))
    return _finish(T, form)


def _build_diagonal(spec: Diagonal):
    d = spec.d
    diags = [np.asarray(a, dtype=complex).reshape(-1) for a in spec.diagonals]
    if not diags or any(len(a) != d for a in diags):
        raise SpecInvalid("diagonal channel needs length-d diagonals")
    col = np.stack(diags)
    if np.abs((np.abs(col) ** 2).sum(axis=0) - 1.0).max() > 1e-10:
        raise SpecInvalid("diagonal amplitudes do not preserve trace (sum_k |a_k(i)|^2 != 1)")
    kraus = tuple(np.diag(a) for a in diags)
    T = ch.QuantumChannel(d, d, kraus, name=f"diag:d={d}")
    return _finish(T, None)


def dephasing(d: int) -> Diagonal:
    """Complete dephasing in the computational basis."""
    return Diagonal(d, tuple(tuple(row) for row in np.eye(d)))


# ---------------------------------------------------------------------------
# CLI spec-string grammar
# ---------------------------------------------------------------------------


def parse_spec(text: str):
    """Parse a channel spec string, e.g. 'wh:d=3' or 'shiftpinch:d=4,K=1,2'."""
    text = text.strip()
    head, _, rest = text.partition(":")
    head = head.lower()
    params: dict[str, list[str]] = {}
    if rest:
        key = None
        for token in rest.split(","):
            if "=" in token:
                key, _, val = token.partition("=")
                key = key.strip()
                params[key] = [val.strip()]
            elif key is not None:
                params[key].append(token.strip())
            else:
                raise ParseError(f"cannot parse spec parameter {token!r} in {text!r}")

    def one(name, cast=int, default=None):
        if name not in params:
            if default is not None:
                return default
            raise ParseError(f"spec {text!r} is missing parameter {name!r}")
        if len(params[name]) != 1:
            raise ParseError(f"parameter {name!r} expects a single value")
        return cast(params[name][0])

    if head == "wh":
        return WernerHolevo(one("d"))
    if head == "stretch":
        return Stretching(one("d"), one("lambda", float))
    if head == "weyl":
        return WeylShift(one("d"))
    if head == "pinch":
        d = one("d")
        sizes = [int(s) for s in one("blocks", str).split("+")]
        return Pinching(d, block_projectors(d, sizes))
    if head == "casimir":
        return CasimirIrreducible(one("d"))
    if head == "casimir-reducible":
        return CasimirReducibleExample()
    if head == "shiftpinch":
        return ShiftsPinching(one("d"), tuple(int(k) for k in params.get("K", [])))
    if head == "coarse":
        return CoarseGraining(one("n"), one("D"))
    if head == "diag":
        if "file" in params:
            return _diagonal_from_file(params["file"][0])
        return dephasing(one("d"))
    raise ParseError(f"unknown channel spec {text!r}")


def _diagonal_from_file(path: str) -> Diagonal:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    if "dim" not in obj or "diagonals" not in obj:
        raise ParseError(f"{path}: diagonal channel file needs 'dim' and 'diagonals'")
    d = int(obj["dim"])
    diags = []
    for i, a in enumerate(obj["diagonals"]):
        if not isinstance(a, dict) or "re" not in a or "im" not in a:
            raise ParseError(f"{path}: diagonals[{i}] needs 're' and 'im' vectors")
        diags.append(tuple(np.asarray(a["re"], dtype=float) + 1j * np.asarray(a["im"], dtype=float)))
    return Diagonal(d, tuple(diags))
