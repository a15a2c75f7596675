"""Holevo quantity for explicit ensembles, weak-covariance verification, and
the capacity formula S(T(rho_bar)) - nu_1 for weakly covariant channels.

Twirl specs:
  * FiniteGroup: exact sum over an explicit unitary family (closed under
    products up to global phase).
  * SU2Euler: Gauss-Legendre product quadrature in z-y-z Euler angles on
    [0,4pi] x [0,pi] x [0,2pi] with weight sin(x2)/(16 pi^2). The nested
    conjugation structure lets the triple sum factor into three passes.
  * BlockUnitaryHaar: seeded Haar samples of V (x) 1_D; the sampled averaging
    map is iterated to its fixed point, which converges to the exact Haar
    twirl (the deviation enters the k-th iterate at order delta^k).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import channels as ch
from . import linalg
from .entropy import OptConfig, min_output_entropy, renyi_entropy
from .errors import (
    DimMismatch,
    NotWeaklyCovariant,
    OptimalStateMismatch,
    SpecInvalid,
    SpecMismatch,
)
from .linalg import dag
from .sampling import flat_simplex, haar_state_vector, haar_unitary, split_seed

COVARIANCE_GATE = 1e-6
COVARIANCE_SAMPLES = 64


@dataclass
class Ensemble:
    probs: np.ndarray
    states: tuple

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float)
        self.states = tuple(self.states)
        if len(self.probs) != len(self.states):
            raise DimMismatch("probs and states length differ")
        if self.probs.min(initial=0.0) < 0:
            raise SpecInvalid("negative probability")
        if abs(self.probs.sum() - 1.0) > 1e-12:
            raise SpecInvalid(f"probabilities sum to {self.probs.sum()!r}")
        dims = {s.dim for s in self.states}
        if len(dims) != 1:
            raise DimMismatch(f"mixed state dimensions {dims}")
        d = self.states[0].dim
        if len(self.states) > d * d:
            warnings.warn(f"ensemble size {len(self.states)} exceeds d^2 = {d * d}", stacklevel=2)

    @property
    def dim(self) -> int:
        return self.states[0].dim

    def average(self) -> np.ndarray:
        return sum(p * s.mat for p, s in zip(self.probs, self.states))


# ---------------------------------------------------------------------------
# Twirl specs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteGroup:
    unitaries: tuple

    def __post_init__(self):
        us = tuple(np.asarray(U, dtype=complex) for U in self.unitaries)
        object.__setattr__(self, "unitaries", us)
        for k, U in enumerate(us):
            if linalg.herm_norm_inf(dag(U) @ U - np.eye(U.shape[0])) > 1e-10:
                raise SpecInvalid(f"group element {k} is not unitary within 1e-10")
        _check_closure(us)

    def average(self, X: np.ndarray) -> np.ndarray:
        return sum(U @ X @ dag(U) for U in self.unitaries) / len(self.unitaries)


def _phase_aligned_distance(U: np.ndarray, V: np.ndarray) -> float:
    tr = np.trace(dag(V) @ U)
    ph = tr / abs(tr) if abs(tr) > 1e-12 else 1.0
    return linalg.herm_norm_inf(U - ph * V)


def _check_closure(us, tol: float = 1e-8) -> None:
    for A in us:
        for B in us:
            P = A @ B
            if min(_phase_aligned_distance(P, U) for U in us) > tol:
                raise SpecInvalid("unitary family is not closed under products (up to phase)")


@dataclass(frozen=True)
class SU2Euler:
    generators: tuple
    grid: tuple = (32, 32, 32)

    def __post_init__(self):
        gs = tuple(np.asarray(J, dtype=complex) for J in self.generators)
        if len(gs) != 3:
            raise SpecInvalid("SU2Euler needs three generators")
        object.__setattr__(self, "generators", gs)

    def _expm_factory(self, J):
        w, V = np.linalg.eigh(J)
        return lambda t: (V * np.exp(1j * t * w)) @ dag(V)

    def element(self, x1: float, x2: float, x3: float) -> np.ndarray:
        """U = exp(i x3 J3) exp(i x2 J2) exp(i x1 J3), z-y-z angles."""
        _, J2, J3 = self.generators
        e2 = self._expm_factory(J2)
        e3 = self._expm_factory(J3)
        return e3(x3) @ e2(x2) @ e3(x1)

    def average(self, X: np.ndarray) -> np.ndarray:
        n1, n2, n3 = self.grid
        _, J2, J3 = self.generators
        e2 = self._expm_factory(J2)
        e3 = self._expm_factory(J3)

        def pass_axis(Y, efac, angles, wts):
            acc = np.zeros_like(Y)
            for t, w in zip(angles, wts):
                U = efac(t)
                acc += w * (U @ Y @ dag(U))
            return acc

        x, w = np.polynomial.legendre.leggauss(n1)
        Y = pass_axis(X, e3, (x + 1) * 2 * np.pi, w * 2 * np.pi)
        x, w = np.polynomial.legendre.leggauss(n2)
        a2 = (x + 1) * np.pi / 2
        Y = pass_axis(Y, e2, a2, w * (np.pi / 2) * np.sin(a2))
        x, w = np.polynomial.legendre.leggauss(n3)
        Y = pass_axis(Y, e3, (x + 1) * np.pi, w * np.pi)
        return Y / (16 * np.pi ** 2)


@dataclass(frozen=True)
class BlockUnitaryHaar:
    n: int
    D: int
    samples: int = 512
    seed: int = 12648430
    conjugate: bool = False

    def _blocks(self):
        rng = split_seed(self.seed, 11, self.n, self.D)
        eye = np.eye(self.D)
        out = []
        for _ in range(self.samples):
            V = haar_unitary(rng, self.n)
            if self.conjugate:
                V = V.conj()
            out.append(np.kron(V, eye))
        return out

    def average(self, X: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100) -> np.ndarray:
        """Fixed point of the sampled averaging map (converges to the Haar twirl)."""
        blocks = self._blocks()
        Y = np.asarray(X, dtype=complex)
        for _ in range(max_sweeps):
            Z = sum(P @ Y @ dag(P) for P in blocks) / len(blocks)
            if linalg.herm_norm_inf(Z - Y) < tol:
                return Z
            Y = Z
        return Y


def paired_elements(pi, Pi, count: int = COVARIANCE_SAMPLES, seed: int = 12648430):
    """Matched (pi(g), Pi(g)) samples for the covariance check."""
    if type(pi) is not type(Pi):
        raise SpecMismatch(f"group specs differ: {type(pi).__name__} vs {type(Pi).__name__}")
    if isinstance(pi, FiniteGroup):
        if len(pi.unitaries) != len(Pi.unitaries):
            raise SpecMismatch("finite groups have different cardinality")
        return list(zip(pi.unitaries, Pi.unitaries))
    if isinstance(pi, SU2Euler):
        if pi.grid != Pi.grid:
            raise SpecMismatch("SU2Euler grids differ")
        rng = split_seed(seed, 13)
        out = []
        for _ in range(count):
            x1 = rng.uniform(0, 4 * np.pi)
            x2 = float(np.arccos(1 - 2 * rng.uniform()))
            x3 = rng.uniform(0, 2 * np.pi)
            out.append((pi.element(x1, x2, x3), Pi.element(x1, x2, x3)))
        return out
    if isinstance(pi, BlockUnitaryHaar):
        if (pi.n, pi.D, pi.samples, pi.seed) != (Pi.n, Pi.D, Pi.samples, Pi.seed):
            raise SpecMismatch("BlockUnitaryHaar parameters differ")
        rng = split_seed(pi.seed, 11, pi.n, pi.D)
        eye = np.eye(pi.D)
        out = []
        for _ in range(min(count, pi.samples)):
            V = haar_unitary(rng, pi.n)
            A = np.kron(V.conj() if pi.conjugate else V, eye)
            B = np.kron(V.conj() if Pi.conjugate else V, eye)
            out.append((A, B))
        return out
    raise SpecMismatch(f"unsupported twirl spec {type(pi).__name__}")


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def holevo_chi(T: ch.QuantumChannel, e: Ensemble) -> float:
    """chi = S(sum p_i T(rho_i)) - sum p_i S(T(rho_i)), in bits."""
    if e.dim != T.dim_in:
        raise DimMismatch(f"ensemble dim {e.dim} != channel input dim {T.dim_in}")
    outputs = [T.apply_raw(s.mat) for s in e.states]
    avg = sum(p * out for p, out in zip(e.probs, outputs))
    mixed = renyi_entropy(ch.DensityMatrix(T.dim_out, avg), 1.0)
    members = sum(p * renyi_entropy(ch.DensityMatrix(T.dim_out, out), 1.0)
                  for p, out in zip(e.probs, outputs))
    return float(mixed - members)


def orbit_average(T: ch.QuantumChannel, rho0: ch.DensityMatrix, g) -> tuple:
    """Average of Pi(g) T(rho0) Pi(g)+ over the twirl spec, with its distance
    from the maximally mixed state."""
    out = T.apply_raw(rho0.mat)
    avg = g.average(out)
    resid = linalg.herm_norm_inf(avg - np.eye(T.dim_out) / T.dim_out)
    return ch.DensityMatrix(T.dim_out, (avg + dag(avg)) / 2), float(resid)


def verify_weak_covariance(T: ch.QuantumChannel, rho0: ch.DensityMatrix, pi, Pi,
                           count: int = COVARIANCE_SAMPLES, seed: int = 12648430) -> tuple:
    """Max on-orbit covariance defect and the output-average defect.

    covariance_residual = max_g || T(pi(g) rho0 pi(g)+) - Pi(g) T(rho0) Pi(g)+ ||_inf
    over the sampled (finite groups: all) elements.
    """
    out0 = T.apply_raw(rho0.mat)
    resid = 0.0
    for A, B in paired_elements(pi, Pi, count=count, seed=seed):
        lhs = T.apply_raw(A @ rho0.mat @ dag(A))
        rhs = B @ out0 @ dag(B)
        resid = max(resid, linalg.herm_norm_inf(lhs - rhs))
    _, avg_resid = orbit_average(T, rho0, Pi)
    return float(resid), float(avg_resid)


@dataclass
class CapacityReport:
    capacity: float
    max_term: float
    min_term: float
    covariance_residual: float
    average_residual: float

    def to_dict(self) -> dict:
        return {
            "capacity": self.capacity,
            "max_term": self.max_term,
            "min_term": self.min_term,
            "covariance_residual": self.covariance_residual,
            "average_residual": self.average_residual,
        }


def capacity_weakcov(T: ch.QuantumChannel, rho0: ch.DensityMatrix, pi, Pi,
                     cfg: OptConfig | None = None) -> CapacityReport:
    """Holevo capacity S(T(rho_bar)) - nu_1 for a weakly covariant channel.

    Gates on the on-orbit covariance residual; the output-average residual is
    reported, and additionally gated for exact (finite group / quadrature)
    twirls where Monte Carlo noise is not in play.
    """
    cfg = cfg or OptConfig()
    cov_res, avg_res = verify_weak_covariance(T, rho0, pi, Pi, seed=cfg.seed)
    if cov_res > COVARIANCE_GATE:
        raise NotWeaklyCovariant(f"covariance residual {cov_res:.3e} > {COVARIANCE_GATE:.0e}")
    if not isinstance(Pi, BlockUnitaryHaar) and avg_res > COVARIANCE_GATE:
        raise NotWeaklyCovariant(f"orbit average residual {avg_res:.3e} > {COVARIANCE_GATE:.0e}")

    w, V = np.linalg.eigh(rho0.mat)
    nu1 = min_output_entropy(T, 1.0, cfg.with_warm_starts([V[:, -1]]))
    s_rho0 = renyi_entropy(ch.apply(T, rho0), 1.0)
    if s_rho0 > nu1.value + 1e-6:
        raise OptimalStateMismatch(
            f"S(T(rho0)) = {s_rho0!r} exceeds the nu_1 estimate {nu1.value!r} by more than 1e-6"
        )

    rho_bar = pi.average(rho0.mat)
    rho_bar = (rho_bar + dag(rho_bar)) / 2
    max_term = renyi_entropy(ch.DensityMatrix(T.dim_out, T.apply_raw(rho_bar)), 1.0)
    return CapacityReport(
        capacity=float(max_term - nu1.value),
        max_term=float(max_term),
        min_term=float(nu1.value),
        covariance_residual=cov_res,
        average_residual=avg_res,
    )


def chi_product_bound_check(T: ch.QuantumChannel, capacity: float, trials: int,
                            cfg: OptConfig | None = None) -> float:
    """Randomized one-sided additivity check at N = 2.

    Over `trials` seeded random entangled ensembles on the doubled input
    space, returns max chi(T x T, ensemble) - 2 * capacity.
    """
    cfg = cfg or OptConfig()
    T2 = ch.tensor_channels([T, T])
    d2 = T.dim_in ** 2
    max_chi = -np.inf
    for trial in range(trials):
        rng = split_seed(cfg.seed, 17, trial)
        size = int(rng.integers(2, T.dim_in ** 4 + 1))
        probs = flat_simplex(rng, size)
        states = tuple(ch.DensityMatrix.from_vector(haar_state_vector(rng, d2)) for _ in range(size))
        max_chi = max(max_chi, holevo_chi(T2, Ensemble(probs, states)))
    return float(max_chi - 2.0 * capacity)


# ---------------------------------------------------------------------------
# Auto group selection for the zoo families
# ---------------------------------------------------------------------------


def auto_group(spec, form=None):
    """(rho0, pi, Pi) for a zoo spec, following the constructions that make
    each family weakly covariant.

    Families with a transpose inside M need the conjugate family on the
    output side.
    """
    from . import zoo

    if isinstance(spec, zoo.WernerHolevo):
        us = zoo.heisenberg_weyl_unitaries(spec.d)
        rho0 = ch.DensityMatrix.from_vector(np.eye(spec.d)[:, 0])
        return rho0, FiniteGroup(tuple(us)), FiniteGroup(tuple(U.conj() for U in us))
    if isinstance(spec, zoo.WeylShift):
        us = zoo.phase_unitaries(spec.d)
        rho0 = ch.DensityMatrix(spec.d, np.full((spec.d, spec.d), 1.0 / spec.d, dtype=complex))
        return rho0, FiniteGroup(tuple(us)), FiniteGroup(tuple(U.conj() for U in us))
    if isinstance(spec, zoo.Pinching):
        us = zoo.weyl_unitaries(spec.d)
        rho0 = form.rho0 if form is not None else ch.DensityMatrix.from_vector(np.eye(spec.d)[:, 0])
        return rho0, FiniteGroup(tuple(us)), FiniteGroup(tuple(us))
    if isinstance(spec, zoo.CasimirReducibleExample):
        gens = tuple(zoo.casimir_reducible_complementary_generators())
        rho0 = zoo.casimir_reducible_rho0()
        tw = SU2Euler(gens, (32, 32, 32))
        return rho0, tw, tw
    if isinstance(spec, zoo.CasimirIrreducible):
        gens = tuple(zoo.su2_generators(spec.d))
        rho0 = ch.DensityMatrix.from_vector(np.eye(spec.d)[:, 0])
        tw = SU2Euler(gens, (32, 32, 32))
        return rho0, tw, tw
    if isinstance(spec, zoo.CoarseGraining):
        rho0 = ch.DensityMatrix(spec.n * spec.D,
                                np.full((spec.n * spec.D,) * 2, 1.0 / (spec.n * spec.D), dtype=complex))
        pi = BlockUnitaryHaar(spec.n, spec.D)
        Pi = BlockUnitaryHaar(spec.n, spec.D, conjugate=True)
        return rho0, pi, Pi
    if isinstance(spec, zoo.Diagonal):
        us = zoo.weyl_unitaries(spec.d)
        rho0 = ch.DensityMatrix.from_vector(np.eye(spec.d)[:, 0])
        return rho0, FiniteGroup(tuple(us)), FiniteGroup(tuple(us))
    if isinstance(spec, zoo.Stretching):
        # only a single optimal input exists; any nontrivial group fails the gate
        us = zoo.weyl_unitaries(spec.d)
        omega = spec.omega if spec.omega is not None else linalg.projector_from_vector(np.eye(spec.d)[:, 0])
        rho0 = ch.DensityMatrix(spec.d, np.asarray(omega, dtype=complex).T.copy())
        return rho0, FiniteGroup(tuple(us)), FiniteGroup(tuple(us))
    raise SpecInvalid(f"no automatic group for {spec!r}")
