"""Lowest eigenpairs of parity blocks, dense and Krylov, plus the adaptive
Fock-truncation loop used for converged ground states."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .hamiltonian import HilbertSpec, SparseSymmetricMatrix, build_hamiltonian
from .model import ModelParams, Parity

DENSE_CEILING = 4000
ENERGY_TOL = 1e-10
RESIDUAL_TOL = 1e-10
TAIL_TOL = 1e-10
NU_MAX_CAP = 20000


class ConvergenceError(RuntimeError):
    """An iterative solve or truncation loop failed to reach its tolerance."""


@dataclass
class EigenPair:
    energy: float
    vector: np.ndarray
    sector: Parity | None = None
    residual: float = 0.0


@dataclass(frozen=True)
class ConvergenceReport:
    nu_max_used: int
    tail_weight: float
    energy_delta: float
    iterations: int


def _as_operator(matrix) -> sp.csr_matrix | np.ndarray:
    if isinstance(matrix, SparseSymmetricMatrix):
        return matrix.matrix
    return matrix


def _fix_sign(vec: np.ndarray) -> np.ndarray:
    # largest-magnitude component made positive, so repeated solves agree bitwise in sign
    k = int(np.argmax(np.abs(vec)))
    return -vec if vec[k] < 0 else vec


def _pairs(matrix, values, vectors, sector) -> list[EigenPair]:
    op = _as_operator(matrix)
    out = []
    for e, v in zip(values, vectors.T):
        v = _fix_sign(v / np.linalg.norm(v))
        res = float(np.linalg.norm(op @ v - e * v))
        out.append(EigenPair(float(e), v, sector, res))
    return out


def _sector_of(matrix) -> Parity | None:
    return matrix.spec.sector if isinstance(matrix, SparseSymmetricMatrix) else None


def dense_lowest(matrix, k: int = 1, *, ceiling: int = DENSE_CEILING) -> list[EigenPair]:
    """k lowest eigenpairs by full LAPACK diagonalization."""
    op = _as_operator(matrix)
    dim = op.shape[0]
    if dim > ceiling:
        raise ValueError(f"dimension {dim} exceeds the dense ceiling {ceiling}")
    if not 1 <= k <= dim:
        raise ValueError(f"k must lie in [1, {dim}], got {k}")
    dense = op.toarray() if sp.issparse(op) else np.asarray(op, dtype=float)
    values, vectors = sla.eigh(dense, subset_by_index=(0, k - 1))
    return _pairs(matrix, values, vectors, _sector_of(matrix))


def iterative_lowest(
    matrix,
    k: int = 1,
    tol: float = RESIDUAL_TOL,
    *,
    basis_size: int | None = None,
    max_restarts: int = 500,
    start: np.ndarray | None = None,
) -> list[EigenPair]:
    """k lowest eigenpairs by thick-restart Lanczos with full reorthogonalization.

    The start vector defaults to the normalized all-ones vector so that scans
    are reproducible.  Convergence means every returned pair has residual
    ``||H v - E v|| <= tol``; otherwise :class:`ConvergenceError` is raised.
    """
    op = _as_operator(matrix)
    n = op.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    m = min(n, basis_size or max(2 * k + 40, 80))
    keep = min(max(k + 10, m // 3), m - 1) if m > k else k

    V = np.zeros((n, m + 1))
    T = np.zeros((m + 1, m + 1))
    v = np.ones(n) if start is None else np.asarray(start, dtype=float).copy()
    V[:, 0] = v / np.linalg.norm(v)
    filled = 0  # columns of V whose images have been projected
    fresh = np.random.default_rng(12345)  # only used after exact breakdown

    for restart in range(max_restarts + 1):
        size = m
        for col in range(filled, m):
            w = op @ V[:, col]
            h = V[:, : col + 1].T @ w
            w -= V[:, : col + 1] @ h
            h2 = V[:, : col + 1].T @ w
            w -= V[:, : col + 1] @ h2
            h += h2
            T[: col + 1, col] = h
            T[col, : col + 1] = h
            beta = np.linalg.norm(w)
            if col + 1 == n:
                size = n
                beta = 0.0
                break
            if beta <= 1e-13 * max(1.0, np.abs(h).max()):
                # invariant subspace; continue with a fresh orthogonal direction
                w = fresh.standard_normal(n)
                for _ in range(2):
                    w -= V[:, : col + 1] @ (V[:, : col + 1].T @ w)
                w /= np.linalg.norm(w)
                T[col + 1, col] = T[col, col + 1] = 0.0
                V[:, col + 1] = w
                continue
            V[:, col + 1] = w / beta
            T[col + 1, col] = T[col, col + 1] = beta
        beta_last = T[size, size - 1] if size < n and size == m else 0.0
        theta, Y = np.linalg.eigh(T[:size, :size])
        resid = np.abs(beta_last * Y[size - 1, :k])
        if np.all(resid <= tol * 0.5) or size == n:
            vecs = V[:, :size] @ Y[:, :k]
            pairs = _pairs(matrix, theta[:k], vecs, _sector_of(matrix))
            worst = max(p.residual for p in pairs)
            if worst <= tol or size == n:
                return pairs
            # explicit residual disagrees with the projected one: restart from the Ritz vectors
        if restart == max_restarts:
            break
        kk = min(keep, size - 1)
        Vk = V[:, :size] @ Y[:, :kk]
        V[:, :kk] = Vk
        V[:, kk] = V[:, size]
        V[:, kk + 1 :] = 0.0
        T[:] = 0.0
        T[np.arange(kk), np.arange(kk)] = theta[:kk]
        T[kk, :kk] = T[:kk, kk] = beta_last * Y[size - 1, :kk]
        filled = kk
    raise ConvergenceError(
        f"Lanczos did not converge after {max_restarts} restarts (dim={n}, k={k}, "
        f"residuals={resid.tolist()}, tol={tol})"
    )


def lowest(matrix, k: int = 1, tol: float = RESIDUAL_TOL, *, dense_below: int = 600):
    """Dense LAPACK for small blocks, Lanczos otherwise."""
    dim = _as_operator(matrix).shape[0]
    if dim <= dense_below:
        return dense_lowest(matrix, k)
    return iterative_lowest(matrix, k, tol)


def tail_weight(vector: np.ndarray, spec: HilbertSpec) -> float:
    """Probability on the top tenth of Fock levels (at least the last level)."""
    nu = spec.arrays()[0]
    levels = max(1, (spec.nu_max + 1) // 10)
    return float(np.sum(vector[nu > spec.nu_max - levels] ** 2))


def initial_nu_max(params: ModelParams) -> int:
    x = params.x
    shrink = 1.0 - x**-4 if abs(x) > 1 else 0.0
    return max(20, math.ceil(4 * params.n_atoms * params.gamma**2 * shrink) + 20)


def converged_ground(
    params: ModelParams,
    sector: Parity | str | None = Parity.EVEN,
    tol: float = ENERGY_TOL,
    *,
    k: int = 1,
    nu_max: int | None = None,
    nu_max_cap: int = NU_MAX_CAP,
    tail_tol: float = TAIL_TOL,
) -> tuple[EigenPair, ConvergenceReport] | tuple[list[EigenPair], ConvergenceReport]:
    """Lowest state(s) of one parity block, doubling nu_max until stable.

    Acceptance needs both the energy change under doubling and the tail
    weight in the top Fock decile to be below tolerance.  With ``k > 1`` the
    list of the k lowest pairs is returned and every one must satisfy the
    criteria.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    sector = None if sector is None else Parity.parse(sector)
    nmax = nu_max if nu_max is not None else initial_nu_max(params)
    prev = None
    iterations = 0
    history = []
    while True:
        if nmax > nu_max_cap:
            raise ConvergenceError(
                f"nu_max cap {nu_max_cap} exceeded for {params}; history (nu_max, E, tail): {history}"
            )
        spec = HilbertSpec.for_params(params, nmax, sector)
        pairs = lowest(build_hamiltonian(params, spec), k)
        iterations += 1
        tails = [tail_weight(p.vector, spec) for p in pairs]
        energies = np.array([p.energy for p in pairs])
        history.append((nmax, float(energies[0]), max(tails)))
        if prev is not None:
            delta = float(np.max(np.abs(energies - prev)))
            if delta <= tol and max(tails) <= tail_tol:
                report = ConvergenceReport(nmax, max(tails), delta, iterations)
                return (pairs[0] if k == 1 else pairs), report
        prev = energies
        nmax *= 2


def expectation(vector: np.ndarray, diagonal: np.ndarray) -> float:
    return float(np.dot(vector**2, diagonal))
