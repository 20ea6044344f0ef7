"""Parameter records and the excitation-number / parity algebra of the Dicke model.

Frequencies are measured in units of the field frequency, so the field
frequency is fixed to 1 and never appears as a parameter.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"

    @property
    def sign(self) -> int:
        return 1 if self is Parity.EVEN else -1

    @classmethod
    def parse(cls, value: "str | Parity") -> "Parity":
        if isinstance(value, Parity):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown parity sector {value!r}; use 'even' or 'odd'") from None


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless Dicke parameters: atomic frequency, coupling and atom count."""

    omega_a: float
    gamma: float
    n_atoms: int

    def __post_init__(self) -> None:
        if not (self.omega_a > 0 and math.isfinite(self.omega_a)):
            raise ValueError(f"omega_a must be positive and finite, got {self.omega_a}")
        if not math.isfinite(self.gamma):
            raise ValueError(f"gamma must be finite, got {self.gamma}")
        if int(self.n_atoms) != self.n_atoms or self.n_atoms < 1:
            raise ValueError(f"n_atoms must be a positive integer, got {self.n_atoms}")
        object.__setattr__(self, "n_atoms", int(self.n_atoms))

    @property
    def two_j(self) -> int:
        return self.n_atoms

    @property
    def j(self) -> float:
        return self.n_atoms / 2

    @property
    def gamma_c(self) -> float:
        return gamma_critical(self.omega_a)

    @property
    def x(self) -> float:
        return coupling_ratio(self.gamma, self.gamma_c)

    def with_gamma(self, gamma: float) -> "ModelParams":
        return ModelParams(self.omega_a, gamma, self.n_atoms)

    @classmethod
    def from_j(cls, omega_a: float, gamma: float, j: float) -> "ModelParams":
        return cls(omega_a, gamma, two_j_of(j))


def two_j_of(j: float) -> int:
    """Return 2j as an int, rejecting anything that is not a positive half-integer."""
    twice = 2 * j
    if twice != int(twice) or twice < 1:
        raise ValueError(f"j must be a positive half-integer, got {j}")
    return int(twice)


@dataclass(frozen=True, order=True)
class BasisLabel:
    """Fock x spin basis state |nu> (x) |j, m>.

    ``two_m`` stores 2m so that half-integer m stays exact.
    """

    nu: int
    two_m: int

    @property
    def m(self) -> float:
        return self.two_m / 2

    @classmethod
    def of(cls, nu: int, m: float) -> "BasisLabel":
        twice = 2 * m
        if twice != int(twice):
            raise ValueError(f"m must be a half-integer, got {m}")
        if nu < 0:
            raise ValueError(f"photon number must be >= 0, got {nu}")
        return cls(int(nu), int(twice))


def _check_label(label: BasisLabel, two_j: int) -> None:
    if label.nu < 0:
        raise ValueError(f"photon number must be >= 0, got {label.nu}")
    if abs(label.two_m) > two_j or (label.two_m + two_j) % 2:
        raise ValueError(f"m={label.m} is not a valid projection for j={two_j / 2}")


def lambda_eigenvalue(label: BasisLabel, j: float) -> int:
    """Excitation number nu + m + j of a basis state."""
    two_j = two_j_of(j)
    _check_label(label, two_j)
    return label.nu + (label.two_m + two_j) // 2


def parity_of(label: BasisLabel, j: float) -> Parity:
    return Parity.EVEN if lambda_eigenvalue(label, j) % 2 == 0 else Parity.ODD


def gamma_critical(omega_a: float) -> float:
    if not omega_a > 0:
        raise ValueError(f"omega_a must be positive, got {omega_a}")
    return math.sqrt(omega_a) / 2


def coupling_ratio(gamma: float, gamma_c: float) -> float:
    if not gamma_c > 0:
        raise ValueError(f"gamma_c must be positive, got {gamma_c}")
    return gamma / gamma_c
