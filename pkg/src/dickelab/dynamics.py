"""Time evolution from an excited-atom state, full model against the rotating-wave model.

Times are in units of 1/Omega, where Omega = gamma / N^(3/2) is the atomic Rabi
frequency (in units of the field frequency).  Propagation is spectral: the
Hamiltonian is diagonalized once and each sample is a phase rotation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .eigen import DENSE_CEILING
from .hamiltonian import (
    HilbertSpec,
    build_hamiltonian,
    build_hamiltonian_rwa,
    jz_diagonal,
    lambda_diagonal,
    parity_signs,
)
from .model import BasisLabel, ModelParams

LEAKAGE_TOL = 1e-8


class TruncationLeakError(RuntimeError):
    pass


@dataclass(frozen=True)
class EvolutionSpec:
    duration: float = 10.0
    samples: int = 1001
    rwa: bool = False
    nu_max: int = 60
    # None means |nu=0> (x) |j, m=+j>
    initial: dict[BasisLabel, complex] | None = field(default=None, hash=False)

    def __post_init__(self) -> None:
        if not self.duration > 0:
            raise ValueError(f"duration must be positive, got {self.duration}")
        if self.samples < 2:
            raise ValueError(f"need at least 2 samples, got {self.samples}")


@dataclass
class Evolution:
    times: np.ndarray  # units of 1/Omega
    p_excited: np.ndarray
    norm: np.ndarray
    energy: np.ndarray
    lambda_mean: np.ndarray
    parity_mean: np.ndarray
    leakage: float


def rabi_frequency(params: ModelParams) -> float:
    return params.gamma / params.n_atoms**1.5


def initial_vector(params: ModelParams, spec: EvolutionSpec, basis: HilbertSpec) -> np.ndarray:
    amps = spec.initial or {BasisLabel(0, params.two_j): 1.0}
    psi = np.zeros(basis.dim, dtype=complex)
    for label, amp in amps.items():
        psi[basis.index_of(label.nu, label.m)] += amp
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValueError("initial state has zero norm")
    return psi / norm


def evolve(params: ModelParams, spec: EvolutionSpec) -> Evolution:
    """P_e(t) = (<J_z> + j) / N, the excitation probability of any one atom.

    For a single atom this is the weight on m = +1/2.
    """
    omega = rabi_frequency(params)
    if omega == 0:
        raise ValueError("gamma = 0 gives no Rabi frequency to set the time unit")
    basis = HilbertSpec.for_params(params, spec.nu_max)
    if basis.dim > DENSE_CEILING:
        raise ValueError(f"dimension {basis.dim} too large for spectral propagation")
    build = build_hamiltonian_rwa if spec.rwa else build_hamiltonian
    h = build(params, basis).toarray()
    energies, vectors = sla.eigh(h)
    psi0 = initial_vector(params, spec, basis)
    coeffs = vectors.T @ psi0

    times = np.linspace(0.0, spec.duration, spec.samples)
    phases = np.exp(-1j * np.outer(times / abs(omega), energies))
    states = (phases * coeffs) @ vectors.T  # rows are psi(t)
    prob = np.abs(states) ** 2

    jz = jz_diagonal(basis)
    nu = basis.arrays()[0]
    levels = max(1, (spec.nu_max + 1) // 10)
    top = nu > spec.nu_max - levels
    leakage = float(prob[:, top].sum(axis=1).max())
    if leakage > LEAKAGE_TOL:
        raise TruncationLeakError(
            f"weight {leakage:.3g} reached the top Fock decile (nu_max={spec.nu_max}); increase nu_max"
        )
    energy = np.real(np.einsum("ti,ij,tj->t", states.conj(), h, states))
    return Evolution(
        times=times,
        p_excited=(prob @ jz + params.j) / params.n_atoms,
        norm=np.sqrt(prob.sum(axis=1)),
        energy=energy,
        lambda_mean=prob @ lambda_diagonal(basis),
        parity_mean=prob @ parity_signs(basis),
        leakage=leakage,
    )


def rwa_deviation(
    params_small: ModelParams, params_large: ModelParams, spec: EvolutionSpec
) -> tuple[float, float]:
    """max_t |P_full - P_rwa| for two parameter sets evolved with the same spec."""
    out = []
    for params in (params_small, params_large):
        if params.gamma == 0:
            out.append(0.0)
            continue
        full = evolve(params, EvolutionSpec(spec.duration, spec.samples, False, spec.nu_max, spec.initial))
        rwa = evolve(params, EvolutionSpec(spec.duration, spec.samples, True, spec.nu_max, spec.initial))
        out.append(float(np.max(np.abs(full.p_excited - rwa.p_excited))))
    return out[0], out[1]


def resonant_params(atomic_over_rabi: float, n_atoms: int = 1) -> ModelParams:
    """Parameters with the atomic and field frequencies equal to ``atomic_over_rabi`` Rabi frequencies."""
    if not atomic_over_rabi > 0:
        raise ValueError("frequency ratio must be positive")
    return ModelParams(1.0, n_atoms**1.5 / atomic_over_rabi, n_atoms)


def vacuum_rabi(times: np.ndarray) -> np.ndarray:
    """Resonant single-atom vacuum Rabi law cos^2(Omega t), t in units of 1/Omega."""
    return np.cos(times) ** 2
