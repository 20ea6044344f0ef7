"""Coherent-state variational analysis.

Trial state: a field coherent state |alpha> times an SU(2) coherent state
|zeta>, with alpha = (q + i p)/sqrt(2) and zeta = tan(theta/2) exp(i phi).
All energies here are per particle (eigenvalues of the intensive H); the
extensive values are N times these.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .hamiltonian import (
    HilbertSpec,
    build_hamiltonian,
    jz_diagonal,
    lambda_diagonal,
    number_diagonal,
)
from .model import ModelParams


@dataclass(frozen=True)
class PhasePoint:
    q: float
    p: float
    theta: float
    phi: float

    @property
    def alpha(self) -> complex:
        return complex(self.q, self.p) / math.sqrt(2)

    @property
    def zeta(self) -> complex:
        return math.tan(self.theta / 2) * complex(math.cos(self.phi), math.sin(self.phi))

    @classmethod
    def from_alpha_zeta(cls, alpha: complex, zeta: complex) -> "PhasePoint":
        alpha, zeta = complex(alpha), complex(zeta)
        phi = math.atan2(zeta.imag, zeta.real) % (2 * math.pi)
        theta = 2 * math.atan(abs(zeta))
        return cls(math.sqrt(2) * alpha.real, math.sqrt(2) * alpha.imag, theta, phi)


class Branch(enum.Enum):
    NORMAL = "normal"
    SUPER_RADIANT = "super-radiant"


@dataclass(frozen=True)
class CriticalPoint:
    branch: Branch
    q_c: float
    p_c: float
    theta_c: float
    phi_c: float
    energy_per_particle: float

    @property
    def point(self) -> PhasePoint:
        return PhasePoint(self.q_c, self.p_c, self.theta_c, self.phi_c)


@dataclass(frozen=True)
class CSObservables:
    lambda_mean: float
    lambda_fluct: float
    energy_extensive: float


def cs_energy_surface(params: ModelParams, point: PhasePoint) -> float:
    q, p, theta, phi = point.q, point.p, point.theta, point.phi
    return (
        (p * p + q * q) / (2 * params.n_atoms)
        - params.omega_a / 2 * math.cos(theta)
        + params.gamma / math.sqrt(params.j) * q * math.sin(theta) * math.cos(phi)
    )


def cs_critical_points(params: ModelParams) -> tuple[CriticalPoint, CriticalPoint]:
    """Global minima of the CS energy surface for phi_c = 0 and phi_c = pi (in that order)."""
    gc = params.gamma_c
    g = params.gamma
    energy = cs_minimum_energy(params) / params.n_atoms
    if abs(g) <= gc:
        return tuple(
            CriticalPoint(Branch.NORMAL, 0.0, 0.0, 0.0, phi, energy) for phi in (0.0, math.pi)
        )
    ratio = (gc / g) ** 2
    theta = math.acos(ratio)
    amp = 2 * math.sqrt(params.j) * g * math.sqrt(1 - ratio * ratio)
    return (
        CriticalPoint(Branch.SUPER_RADIANT, -amp, 0.0, theta, 0.0, energy),
        CriticalPoint(Branch.SUPER_RADIANT, amp, 0.0, theta, math.pi, energy),
    )


def universal_curve(theta, omega_a: float, phi: float = 0.0):
    """q_c / sqrt(N) as a function of the Bloch angle along the super-radiant branch.

    Accepts scalars or arrays; theta must lie in [0, pi/2).
    """
    th = np.asarray(theta, dtype=float)
    if np.any(th < 0) or np.any(np.cos(th) <= 0) or np.any(th >= math.pi / 2):
        raise ValueError("universal curve needs 0 <= theta < pi/2")
    val = -math.sqrt(omega_a) * np.sin(th) / np.sqrt(2 * np.cos(th)) * math.cos(phi)
    return float(val) if np.ndim(val) == 0 else val


def theta_critical(params: ModelParams) -> float:
    return cs_critical_points(params)[0].theta_c


def normal_branch(n_atoms: int, gamma_c: float) -> tuple[float, float, float]:
    """(extensive energy, <Lambda>, Delta Lambda) on the normal branch."""
    return -2 * n_atoms * gamma_c**2, 0.0, 0.0


def superradiant_branch(n_atoms: int, gamma_c: float, x: float) -> tuple[float, float, float]:
    """(extensive energy, <Lambda>, Delta Lambda) on the super-radiant branch, for |x| >= 1."""
    if abs(x) < 1:
        raise ValueError(f"super-radiant branch needs |x| >= 1, got {x}")
    gc2 = gamma_c**2
    energy = -n_atoms * gc2 * x * x * (1 + x**-4)
    lam = n_atoms / 2 * (1 - x**-2 + 2 * gc2 * x * x * (1 - x**-4))
    fluct = math.sqrt(n_atoms / 2 * (0.5 + 2 * gc2 * x * x) * (1 - x**-4))
    return energy, lam, fluct


def _branch(params: ModelParams) -> tuple[float, float, float]:
    if abs(params.x) <= 1:
        return normal_branch(params.n_atoms, params.gamma_c)
    return superradiant_branch(params.n_atoms, params.gamma_c, params.x)


def cs_minimum_energy(params: ModelParams) -> float:
    """Extensive minimum energy: -2 N gc^2 (normal) or -N gc^2 x^2 (1 + x^-4)."""
    return _branch(params)[0]


def cs_observables(params: ModelParams) -> CSObservables:
    energy, lam, dlam = _branch(params)
    return CSObservables(lam, dlam, energy)


def cs_lambda_and_fluctuation(params: ModelParams) -> tuple[float, float]:
    """<Lambda> and Delta Lambda at the CS minimum; both vanish in the normal phase."""
    return _branch(params)[1:]


# --- truncated-basis oracle -------------------------------------------------

ORACLE_TAGS = ("H", "Lambda", "Lambda2", "n", "Jz")


def coherent_state_vector(alpha: complex, zeta: complex, spec: HilbertSpec) -> np.ndarray:
    """Amplitudes of |alpha> (x) |zeta> over ``spec``'s basis, built term by term.

    Raises if more than 1e-12 of the norm lies in the top Fock decile.
    """
    if spec.sector is not None:
        raise ValueError("coherent states mix parity sectors; use the unfiltered basis")
    alpha, zeta = complex(alpha), complex(zeta)
    nu, two_m = spec.arrays()
    k = (two_m + spec.two_j) // 2  # j + m
    two_j = spec.two_j

    log_mag = (
        -abs(alpha) ** 2 / 2
        - gammaln(nu + 1) / 2
        + (gammaln(two_j + 1) - gammaln(k + 1) - gammaln(two_j - k + 1)) / 2
        - two_j / 2 * math.log1p(abs(zeta) ** 2)
    )
    with np.errstate(divide="ignore"):
        log_mag = log_mag + np.where(nu > 0, nu * np.log(abs(alpha)) if alpha else -np.inf, 0.0)
        log_mag = log_mag + np.where(k > 0, k * np.log(abs(zeta)) if zeta else -np.inf, 0.0)
    phase = nu * np.angle(alpha) + k * np.angle(zeta)
    vec = np.exp(log_mag) * np.exp(1j * phase)

    levels = max(1, (spec.nu_max + 1) // 10)
    tail = float(np.sum(np.abs(vec[nu > spec.nu_max - levels]) ** 2))
    if tail > 1e-12:
        raise ValueError(
            f"nu_max={spec.nu_max} too small for |alpha|^2={abs(alpha) ** 2:.4g} "
            f"(top-decile weight {tail:.3g})"
        )
    return vec / np.linalg.norm(vec)


def operator_expectation(
    vec: np.ndarray, tag: str, spec: HilbertSpec, params: ModelParams | None = None
) -> float:
    if tag == "H":
        if params is None:
            raise ValueError("the 'H' tag needs model parameters")
        h = build_hamiltonian(params, spec).matrix
        return float(np.real(np.vdot(vec, h @ vec)) / np.vdot(vec, vec).real)
    diag = {
        "Lambda": lambda_diagonal(spec),
        "Lambda2": lambda_diagonal(spec) ** 2,
        "n": number_diagonal(spec),
        "Jz": jz_diagonal(spec),
    }.get(tag)
    if diag is None:
        raise ValueError(f"unknown operator tag {tag!r}; choose from {ORACLE_TAGS}")
    weights = np.abs(vec) ** 2
    return float(np.dot(weights, diag) / weights.sum())


def cs_expectation_oracle(
    alpha: complex,
    zeta: complex,
    tag: str,
    spec: HilbertSpec,
    params: ModelParams | None = None,
) -> float:
    """Expectation value in the explicitly constructed product coherent state."""
    return operator_expectation(coherent_state_vector(alpha, zeta, spec), tag, spec, params)


def oracle_nu_max(alpha: complex, margin: float = 12.0) -> int:
    """Fock cutoff holding a coherent state of amplitude ``alpha`` to well below 1e-12 tail."""
    n = abs(alpha) ** 2
    return int(math.ceil((n + margin * math.sqrt(n + 1) + 30) * 10 / 9))
