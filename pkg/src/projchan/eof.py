"""Bipartite states from channel dilations and entanglement-of-formation
upper bounds.

eof_upper optimizes over pure-state decompositions of a rank-r state: any
size-k ensemble is W applied to the subnormalized eigenvectors for a k x r
isometry W, so the search runs multistart gradient descent on the Stiefel
manifold (QR retraction) with the same seeding contract as the entropy
module. The average entanglement entropy of the induced ensemble is an upper
bound on E_F for every W.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import channels as ch
from . import linalg
from .capacity import Ensemble
from .errors import BadDims, DimMismatch
from .linalg import dag
from .sampling import split_seed


@dataclass
class BipartiteState:
    dimA: int
    dimB: int
    mat: ch.DensityMatrix

    def __post_init__(self):
        if self.mat.dim != self.dimA * self.dimB:
            raise BadDims(f"joint dim {self.mat.dim} != {self.dimA} * {self.dimB}")


@dataclass
class EofConfig:
    starts: int = 64
    seed: int = 12648430
    max_iters: int = 2000
    tol: float = 1e-12
    k: int | None = None  # ensemble size; defaults to rank^2


@dataclass
class EofReport:
    value: float
    ensemble: Ensemble
    converged: bool
    seed: int
    per_start_values: list

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "ensemble_size": len(self.ensemble.states),
            "probs": self.ensemble.probs.tolist(),
            "converged": self.converged,
            "seed": self.seed,
            "per_start_values": list(self.per_start_values),
        }


def example9_state() -> BipartiteState:
    """The explicit four-vector mixture on C^4 x C^4 (kets written 1-based)."""

    def ket(i, j):
        v = np.zeros(16, dtype=complex)
        v[(i - 1) * 4 + (j - 1)] = 1.0
        return v

    psi1 = (1j * (ket(1, 4) + ket(2, 3) - ket(3, 2)) + ket(4, 1)) / 2
    psi2 = (1j * (-ket(1, 3) + ket(2, 4) + ket(3, 1)) + ket(4, 2)) / 2
    psi3 = (1j * (ket(1, 2) - ket(2, 1) + ket(3, 4)) + ket(4, 3)) / 2
    psi4 = (1j * (-ket(1, 1) - ket(2, 2) - ket(3, 3)) + ket(4, 4)) / 2
    rho = sum(np.outer(p, p.conj()) for p in (psi1, psi2, psi3, psi4)) / 4
    return BipartiteState(4, 4, ch.DensityMatrix(16, rho))


def channel_optimal_state(T: ch.QuantumChannel, e: Ensemble) -> BipartiteState:
    """Dilate T and push the ensemble through: rho = sum_i p_i U rho_i U+ on
    (output x environment)."""
    if e.dim != T.dim_in:
        raise DimMismatch(f"ensemble dim {e.dim} != channel input dim {T.dim_in}")
    ch.ensure_pure_members(e.states)
    U = ch.stinespring(T)
    acc = np.zeros((U.mat.shape[0], U.mat.shape[0]), dtype=complex)
    for p, s in zip(e.probs, e.states):
        w, V = np.linalg.eigh(s.mat)
        phi = V[:, -1]
        out = U.mat @ phi
        acc += p * np.outer(out, out.conj())
    return BipartiteState(T.dim_out, U.env_dim, ch.DensityMatrix(acc.shape[0], acc))


def entanglement_entropy(psi: np.ndarray, dimA: int, dimB: int) -> float:
    C = np.asarray(psi, dtype=complex).reshape(dimA, dimB)
    w = np.linalg.eigvalsh(C @ dag(C))
    w = np.clip(w, 0.0, None)
    nz = w[w > 1e-18]
    return float(-np.sum(nz * np.log2(nz)))


def _qr_retract(W: np.ndarray) -> np.ndarray:
    Q, R = np.linalg.qr(W)
    s = np.sign(np.real(np.diag(R)))
    s[s == 0] = 1.0
    return Q * s


def eof_upper(state: BipartiteState, cfg: EofConfig | None = None) -> EofReport:
    """Upper bound on E_F by ensemble-search over k x r isometries."""
    cfg = cfg or EofConfig()
    dA, dB = state.dimA, state.dimB
    w, V = np.linalg.eigh(state.mat.mat)
    keep = w > 1e-12
    lam = w[keep]
    E = (V[:, keep] * np.sqrt(lam)).T  # r x (dA dB), subnormalized eigvecs
    r = E.shape[0]
    k = cfg.k or r * r

    def value_and_grad(W, need_grad=True):
        Phi = W @ E
        C = Phi.reshape(k, dA, dB)
        tau = np.einsum("jab,jcb->jac", C, C.conj())
        p = np.real(np.einsum("jaa->j", tau))
        val = 0.0
        G = np.zeros((k, r), dtype=complex) if need_grad else None
        for j in range(k):
            if p[j] < 1e-14:
                continue
            lj, Vj = np.linalg.eigh(tau[j] / p[j])
            lj = np.clip(lj, 1e-18, None)
            val += p[j] * float(-np.sum(np.where(lj > 1e-17, lj * np.log2(lj), 0.0)))
            if need_grad:
                logs = (Vj * np.log2(lj)) @ dag(Vj)
                G[j] = E.conj() @ (-(logs @ C[j])).reshape(-1)
        return float(val), G

    def one_start(idx):
        rng = split_seed(cfg.seed, idx)
        W = _qr_retract(rng.standard_normal((k, r)) + 1j * rng.standard_normal((k, r)))
        f, G = value_and_grad(W)
        t = 1.0
        for _ in range(cfg.max_iters):
            gn2 = float(np.real(np.sum(G.conj() * G)))
            if gn2 < 1e-30:
                return f, W, True
            t = min(t * 2.0, 1e2)
            accepted = False
            while t > 1e-18:
                W2 = _qr_retract(W - t * G)
                f2, G2 = value_and_grad(W2)
                if f2 <= f - 1e-4 * t * gn2:
                    accepted = True
                    break
                t *= 0.5
            if not accepted:
                return f, W, True
            df = f - f2
            W, f, G = W2, f2, G2
            if df < cfg.tol:
                return f, W, True
        return f, W, False

    values, args, convs = [], [], []
    for i in range(cfg.starts):
        f, W, conv = one_start(i)
        values.append(f)
        args.append(W)
        convs.append(conv)
    best = int(np.argmin(values))
    for i, v in enumerate(values):
        if v <= values[best] + 1e-12:
            best = i
            break
    W = args[best]
    Phi = W @ E
    probs = np.real(np.einsum("ji,ji->j", Phi.conj(), Phi))
    keep_members = probs > 1e-12
    members = tuple(
        ch.DensityMatrix.from_vector(Phi[j] / np.sqrt(probs[j]))
        for j in range(k) if keep_members[j]
    )
    ensemble = Ensemble(probs[keep_members] / probs[keep_members].sum(), members)
    return EofReport(
        value=float(values[best]),
        ensemble=ensemble,
        converged=bool(any(convs)),
        seed=cfg.seed,
        per_start_values=[float(v) for v in values],
    )
