"""Truncated Fock x spin basis and sparse assembly of the intensive Dicke Hamiltonian.

    H = a+a / N + omega_a J_z / N + gamma / (N sqrt N) (a+ + a)(J+ + J-)

Basis order is photon-number major, then m ascending.  Couplings that would
leave the basis at nu = nu_max are dropped (hard truncation); matrices built
this way carry ``truncated=True`` so callers know convergence in nu_max is
their responsibility.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .model import BasisLabel, ModelParams, Parity, two_j_of


@dataclass(frozen=True)
class HilbertSpec:
    two_j: int
    nu_max: int
    sector: Parity | None = None

    def __post_init__(self) -> None:
        if self.two_j < 1:
            raise ValueError(f"2j must be >= 1, got {self.two_j}")
        if self.nu_max < 0:
            raise ValueError(f"nu_max must be >= 0, got {self.nu_max}")
        if self.sector is not None:
            object.__setattr__(self, "sector", Parity.parse(self.sector))

    @classmethod
    def for_params(cls, params: ModelParams, nu_max: int, sector: Parity | str | None = None):
        return cls(params.two_j, nu_max, None if sector is None else Parity.parse(sector))

    @classmethod
    def from_j(cls, j: float, nu_max: int, sector: Parity | str | None = None):
        return cls(two_j_of(j), nu_max, None if sector is None else Parity.parse(sector))

    @property
    def j(self) -> float:
        return self.two_j / 2

    @property
    def full_dim(self) -> int:
        return (self.two_j + 1) * (self.nu_max + 1)

    @property
    def dim(self) -> int:
        return len(self.arrays()[0])

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Return (nu, two_m) integer arrays in basis order."""
        return _basis_arrays(self.two_j, self.nu_max, self.sector)

    def index_map(self) -> np.ndarray:
        """Dense lookup: full-basis position nu*(2j+1) + (m+j) -> row, or -1 if filtered out."""
        nu, two_m = self.arrays()
        lookup = np.full(self.full_dim, -1, dtype=np.int64)
        lookup[nu * (self.two_j + 1) + (two_m + self.two_j) // 2] = np.arange(len(nu))
        return lookup

    def index_of(self, nu: int, m: float) -> int:
        label = BasisLabel.of(nu, m)
        if label.nu > self.nu_max or abs(label.two_m) > self.two_j:
            raise KeyError(f"({nu}, {m}) lies outside the truncated basis")
        pos = self.index_map()[label.nu * (self.two_j + 1) + (label.two_m + self.two_j) // 2]
        if pos < 0:
            raise KeyError(f"({nu}, {m}) is not in the {self.sector.value} sector")
        return int(pos)


_BASIS_CACHE: dict[tuple[int, int, Parity | None], tuple[np.ndarray, np.ndarray]] = {}


def _basis_arrays(two_j: int, nu_max: int, sector: Parity | None):
    key = (two_j, nu_max, sector)
    if key not in _BASIS_CACHE:
        nu = np.repeat(np.arange(nu_max + 1), two_j + 1)
        two_m = np.tile(np.arange(-two_j, two_j + 1, 2), nu_max + 1)
        if sector is not None:
            lam = nu + (two_m + two_j) // 2
            keep = lam % 2 == (0 if sector is Parity.EVEN else 1)
            nu, two_m = nu[keep], two_m[keep]
        nu.setflags(write=False)
        two_m.setflags(write=False)
        if len(_BASIS_CACHE) > 64:
            _BASIS_CACHE.clear()
        _BASIS_CACHE[key] = (nu, two_m)
    return _BASIS_CACHE[key]


def enumerate_basis(spec: HilbertSpec) -> list[BasisLabel]:
    nu, two_m = spec.arrays()
    return [BasisLabel(int(n), int(m)) for n, m in zip(nu, two_m)]


@dataclass(frozen=True)
class SparseSymmetricMatrix:
    """Real symmetric matrix over a :class:`HilbertSpec` basis."""

    matrix: sp.csr_matrix
    spec: HilbertSpec
    truncated: bool = False
    params: ModelParams | None = field(default=None, compare=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def entries(self) -> list[tuple[int, int, float]]:
        """Upper-triangle (row <= col) nonzero coordinates."""
        upper = sp.triu(self.matrix, format="coo")
        order = np.lexsort((upper.col, upper.row))
        return [
            (int(upper.row[k]), int(upper.col[k]), float(upper.data[k]))
            for k in order
            if upper.data[k] != 0.0
        ]

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def dump(self, path: str | Path) -> None:
        """Write the upper triangle as 'dim nnz' then 'row col value' lines."""
        rows = self.entries()
        with open(path, "w") as fh:
            fh.write(f"{self.dim} {len(rows)}\n")
            for r, c, v in rows:
                fh.write(f"{r} {c} {v!r}\n")


def load_coordinate(path: str | Path) -> sp.csr_matrix:
    """Read a dump written by :meth:`SparseSymmetricMatrix.dump` back as a full symmetric matrix."""
    with open(path) as fh:
        dim, nnz = (int(t) for t in fh.readline().split())
        data = np.loadtxt(fh, ndmin=2) if nnz else np.zeros((0, 3))
    if len(data) != nnz:
        raise ValueError(f"expected {nnz} entries, found {len(data)}")
    r, c, v = data[:, 0].astype(int), data[:, 1].astype(int), data[:, 2]
    off = r != c
    rows = np.concatenate([r, c[off]])
    cols = np.concatenate([c, r[off]])
    vals = np.concatenate([v, v[off]])
    return sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim))


def _assemble(params: ModelParams, spec: HilbertSpec, rwa: bool) -> SparseSymmetricMatrix:
    if spec.two_j != params.two_j:
        raise ValueError(f"basis has 2j={spec.two_j} but params have N={params.n_atoms}")
    n = params.n_atoms
    nu, two_m = spec.arrays()
    dim = len(nu)
    diag = nu / n + params.omega_a * (two_m / 2) / n

    rows = [np.arange(dim)]
    cols = [np.arange(dim)]
    vals = [diag]
    if params.gamma != 0.0:
        lookup = spec.index_map()
        width = spec.two_j + 1
        # j(j+1) in quarter units: 4 j(j+1) = 2j(2j+2)
        jj4 = spec.two_j * (spec.two_j + 2)
        scale = params.gamma / (n * np.sqrt(n))
        # a+ J-  (rotating) and a+ J+ (counter-rotating); Hermitian partners via symmetry
        steps = (-2,) if rwa else (-2, 2)
        src = nu < spec.nu_max
        for dm in steps:
            tm = two_m + dm
            ok = src & (np.abs(tm) <= spec.two_j)
            tgt = lookup[(nu[ok] + 1) * width + (tm[ok] + spec.two_j) // 2]
            if np.any(tgt < 0):
                raise AssertionError("coupling crossed the parity sector boundary")
            # sqrt(j(j+1) - m m') with integer-exact argument (units of 1/4)
            root = np.sqrt((jj4 - two_m[ok] * tm[ok]) / 4.0)
            val = scale * np.sqrt(nu[ok] + 1.0) * root
            src_idx = np.flatnonzero(ok)
            rows += [src_idx, tgt]
            cols += [tgt, src_idx]
            vals += [val, val]
    mat = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
    )
    mat.sum_duplicates()
    mat.sort_indices()
    return SparseSymmetricMatrix(mat, spec, truncated=params.gamma != 0.0, params=params)


def build_hamiltonian(params: ModelParams, spec: HilbertSpec) -> SparseSymmetricMatrix:
    return _assemble(params, spec, rwa=False)


def build_hamiltonian_rwa(params: ModelParams, spec: HilbertSpec) -> SparseSymmetricMatrix:
    """Rotating-wave (Tavis-Cummings) Hamiltonian: only a+ J- + a J+ survive."""
    return _assemble(params, spec, rwa=True)


def number_diagonal(spec: HilbertSpec) -> np.ndarray:
    return spec.arrays()[0].astype(float)


def jz_diagonal(spec: HilbertSpec) -> np.ndarray:
    return spec.arrays()[1] / 2.0


def lambda_diagonal(spec: HilbertSpec) -> np.ndarray:
    nu, two_m = spec.arrays()
    return (nu + (two_m + spec.two_j) // 2).astype(float)


def parity_signs(spec: HilbertSpec) -> np.ndarray:
    return np.where(lambda_diagonal(spec) % 2 == 0, 1.0, -1.0)


def parity_commutator_check(
    params: ModelParams, spec: HilbertSpec, *, rwa: bool = False
) -> float:
    """Max-norm of [Pi, H] where Pi = exp(i pi Lambda) is diagonal in the basis."""
    if spec.sector is not None:
        raise ValueError("parity commutator check needs the unfiltered basis")
    h = _assemble(params, spec, rwa).matrix.tocoo()
    s = parity_signs(spec)
    comm = (s[h.row] - s[h.col]) * h.data
    return float(np.max(np.abs(comm))) if comm.size else 0.0
