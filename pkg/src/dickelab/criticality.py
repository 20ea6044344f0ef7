"""Transition detection on exact eigenstates and power-law fits of gamma_c(j).

The fidelity susceptibility uses the second-order expansion
chi = 2 (1 - F) / dgamma^2 with F = |<psi(g)|psi(g + dg)>|^2.
"""

from __future__ import annotations

import enum
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats
from scipy.optimize import minimize_scalar

from .coherent import PhasePoint
from .eigen import (
    NU_MAX_CAP,
    TAIL_TOL,
    ConvergenceError,
    EigenPair,
    converged_ground,
    dense_lowest,
    iterative_lowest,
    tail_weight,
)
from .hamiltonian import HilbertSpec, build_hamiltonian, jz_diagonal, number_diagonal
from .model import ModelParams, Parity, gamma_critical, two_j_of
from .sas import sas_transition

log = logging.getLogger(__name__)

PEAK_TOL = 1e-5
DELTA_GAMMA = 1e-4


class Method(enum.Enum):
    EXACT_EVEN = "exact-even"
    EXACT_ODD = "exact-odd"
    SAS = "sas"

    @classmethod
    def parse(cls, value: "str | Method") -> "Method":
        if isinstance(value, Method):
            return value
        aliases = {"even": "exact-even", "odd": "exact-odd", "exact": "exact-even"}
        value = str(value).lower()
        return cls(aliases.get(value, value))


@dataclass
class FidelityScan:
    gamma_grid: np.ndarray
    fidelity: np.ndarray
    susceptibility: np.ndarray
    gamma_peak: float
    delta_gamma: float
    chi_peak: float = float("nan")
    nu_max: int = 0
    sector: Parity = Parity.EVEN


@dataclass(frozen=True)
class FitResult:
    exponent: float
    amplitude: float
    intercept: float
    sigma: float
    ci95: tuple[float, float]
    n_points: int

    def as_dict(self) -> dict:
        return asdict(self)


def fidelity(state_a: np.ndarray, state_b: np.ndarray) -> float:
    """Squared overlap of two states; global phases and signs drop out."""
    a = np.asarray(state_a)
    b = np.asarray(state_b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    ov = abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b))
    return float(min(ov * ov, 1.0))


def infidelity(state_a: np.ndarray, state_b: np.ndarray) -> float:
    """1 - F computed from the sign-aligned difference, avoiding cancellation for near-equal states."""
    a = np.asarray(state_a, dtype=float)
    b = np.asarray(state_b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    ov = float(np.dot(a, b))
    if ov < 0:
        b, ov = -b, -ov
    # 1 - ov = |a - b|^2 / 2 for unit vectors, and 1 - ov^2 = (1 - ov)(1 + ov)
    return float(0.5 * np.dot(a - b, a - b) * (1 + ov))


class _BlockSolver:
    """Lowest state of one parity block at fixed truncation, warm-started along a scan."""

    def __init__(self, omega_a: float, n_atoms: int, sector: Parity, nu_max: int, tol: float):
        self.omega_a = omega_a
        self.n_atoms = n_atoms
        self.spec = HilbertSpec(n_atoms, nu_max, sector)
        self.tol = tol
        self.last: np.ndarray | None = None
        self.max_tail = 0.0

    def __call__(self, gamma: float) -> EigenPair:
        params = ModelParams(self.omega_a, gamma, self.n_atoms)
        h = build_hamiltonian(params, self.spec)
        if h.dim <= 600:
            pair = dense_lowest(h, 1)[0]
        else:
            pair = iterative_lowest(h, 1, self.tol, start=self.last)[0]
        self.last = pair.vector
        tail = tail_weight(pair.vector, self.spec)
        self.max_tail = max(self.max_tail, tail)
        if tail > TAIL_TOL:
            raise ConvergenceError(
                f"tail weight {tail:.3g} at gamma={gamma} with nu_max={self.spec.nu_max}; raise nu_max"
            )
        return pair


def scan_nu_max(
    omega_a: float, n_atoms: int, gamma_max: float, sector: Parity, tol: float, nu_max_cap: int = NU_MAX_CAP
) -> int:
    """Truncation converged at the strongest coupling of a scan (photon number grows with gamma)."""
    _, report = converged_ground(
        ModelParams(omega_a, gamma_max, n_atoms), sector, tol, nu_max_cap=nu_max_cap
    )
    return report.nu_max_used


def susceptibility_scan(
    omega_a: float,
    n_atoms: int,
    grid,
    delta_gamma: float = DELTA_GAMMA,
    sector: Parity | str = Parity.EVEN,
    *,
    nu_max: int | None = None,
    tol: float = 1e-10,
    peak_tol: float = PEAK_TOL,
    nu_max_cap: int = NU_MAX_CAP,
) -> FidelityScan:
    """Fidelity and its susceptibility on a coupling grid, with the peak refined.

    Refinement: a parabola through the three grid points around the maximum,
    then golden-section search on chi inside that bracket.
    """
    sector = Parity.parse(sector)
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 3 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly ascending with at least 3 points")
    if not 0 < delta_gamma < np.min(np.diff(grid)):
        raise ValueError("delta_gamma must be positive and smaller than the grid spacing")
    if nu_max is None:
        nu_max = scan_nu_max(omega_a, n_atoms, grid[-1] + delta_gamma, sector, tol, nu_max_cap)
    solve = _BlockSolver(omega_a, n_atoms, sector, nu_max, tol)
    cache: dict[float, tuple[float, float]] = {}

    def point(g: float) -> tuple[float, float]:
        if g not in cache:
            a = solve(g).vector
            b = solve(g + delta_gamma).vector
            omf = infidelity(a, b)
            cache[g] = (1.0 - omf, 2.0 * omf / delta_gamma**2)
        return cache[g]

    fid = np.empty(len(grid))
    chi = np.empty(len(grid))
    for i, g in enumerate(grid):
        fid[i], chi[i] = point(float(g))
    k = int(np.argmax(chi))
    if k == 0 or k == len(grid) - 1:
        raise ValueError(
            f"susceptibility peak at the grid boundary (gamma={grid[k]:.6g}); use a wider grid"
        )
    a, b, c = grid[k - 1 : k + 2]
    fa, fb, fc = chi[k - 1 : k + 2]
    middle, f_mid = b, fb
    denom = (b - a) * (fb - fc) - (b - c) * (fb - fa)
    if denom != 0:
        vertex = b - 0.5 * ((b - a) ** 2 * (fb - fc) - (b - c) ** 2 * (fb - fa)) / denom
        if a < vertex < c:
            fv = point(float(vertex))[1]
            if fv > f_mid:
                middle, f_mid = vertex, fv
    res = minimize_scalar(
        lambda g: -point(float(g))[1],
        bracket=(a, middle, c),
        method="golden",
        options={"xtol": peak_tol / max(abs(middle), 1.0)},
    )
    peak = float(res.x)
    if not a <= peak <= c:
        raise RuntimeError(f"golden-section left the bracket [{a}, {c}]: {peak}")
    chi_peak = -float(res.fun)
    if chi_peak < f_mid:
        peak, chi_peak = float(middle), float(f_mid)
    return FidelityScan(grid, fid, chi, peak, delta_gamma, chi_peak, nu_max, sector)


def correspondence_map(
    n_photons_mean: float, jz_mean: float, j: float, phi_branch: float = 0.0
) -> PhasePoint:
    """Phase-space point attached to an exact state through <a+a> and <J_z>."""
    if n_photons_mean < -1e-12:
        raise ValueError(f"<a+a> must be non-negative, got {n_photons_mean}")
    ratio = -jz_mean / j
    if abs(ratio) > 1 + 1e-12:
        raise ValueError(f"|<J_z>| = {abs(jz_mean)} exceeds j = {j}")
    ratio = min(1.0, max(-1.0, ratio))
    sign = -1.0 if math.cos(phi_branch) >= 0 else 1.0
    q = sign * math.sqrt(2 * max(n_photons_mean, 0.0))
    return PhasePoint(q, 0.0, math.acos(ratio), phi_branch % (2 * math.pi))


@dataclass(frozen=True)
class ExactState:
    params: ModelParams
    sector: Parity
    energy: float
    n_photons: float
    jz: float
    nu_max: int

    @property
    def point(self) -> PhasePoint:
        return correspondence_map(self.n_photons, self.jz, self.params.j)


def exact_state(
    params: ModelParams,
    sector: Parity | str = Parity.EVEN,
    tol: float = 1e-10,
    nu_max_cap: int = NU_MAX_CAP,
) -> ExactState:
    sector = Parity.parse(sector)
    pair, report = converged_ground(params, sector, tol, nu_max_cap=nu_max_cap)
    spec = HilbertSpec.for_params(params, report.nu_max_used, sector)
    w = pair.vector**2
    return ExactState(
        params,
        sector,
        pair.energy,
        float(w @ number_diagonal(spec)),
        float(w @ jz_diagonal(spec)),
        report.nu_max_used,
    )


@dataclass(frozen=True)
class TableSettings:
    omega_a: float = 1.0
    delta_gamma: float = DELTA_GAMMA
    grid_points: int = 16
    window: float = 2.4  # exact grid spans [gc, gc (1 + window / sqrt(j))]
    tol: float = 1e-10
    peak_tol: float = PEAK_TOL
    sas_tol: float = 1e-7
    nu_max_cap: int = NU_MAX_CAP
    threads: int = 1

    def as_dict(self) -> dict:
        return asdict(self)


def exact_grid(j: float, settings: TableSettings) -> np.ndarray:
    gc = gamma_critical(settings.omega_a)
    return np.linspace(gc, gc * (1 + settings.window / math.sqrt(j)), settings.grid_points)


def _gamma_c_one(args) -> tuple[float, float]:
    j, method, settings = args
    n = two_j_of(j)
    if method is Method.SAS:
        return j, sas_transition(settings.omega_a, n, tol=settings.sas_tol).gamma_c_sc
    sector = Parity.EVEN if method is Method.EXACT_EVEN else Parity.ODD
    scan = susceptibility_scan(
        settings.omega_a,
        n,
        exact_grid(j, settings),
        settings.delta_gamma,
        sector,
        tol=settings.tol,
        peak_tol=settings.peak_tol,
        nu_max_cap=settings.nu_max_cap,
    )
    log.info("j=%s %s gamma_peak=%.8f nu_max=%d", j, method.value, scan.gamma_peak, scan.nu_max)
    return j, scan.gamma_peak


def gamma_c_table(
    j_list, method: Method | str, settings: TableSettings | None = None
) -> list[tuple[float, float]]:
    """Finite-size critical coupling per j: susceptibility peak (exact) or well swap (SAS)."""
    method = Method.parse(method)
    settings = settings or TableSettings()
    j_list = [float(j) for j in j_list]
    if any(b <= a for a, b in zip(j_list, j_list[1:])):
        raise ValueError("j_list must be strictly ascending")
    jobs = [(j, method, settings) for j in j_list]
    if settings.threads > 1:
        with ProcessPoolExecutor(settings.threads) as pool:
            return list(pool.map(_gamma_c_one, jobs))
    return [_gamma_c_one(job) for job in jobs]


def fit_power_law(table, asymptote: float = 0.5, *, confidence: float = 0.95) -> FitResult:
    """Least squares of ln(gamma_c - asymptote) against ln j with a t-based slope interval."""
    pts = []
    for j, g in table:
        off = g - asymptote
        if off <= 0:
            raise ValueError(f"gamma_c={g} at j={j} is not above {asymptote}")
        if off <= 1e-9:
            log.warning("dropping j=%s: gamma_c within 1e-9 of %s", j, asymptote)
            continue
        pts.append((math.log(j), math.log(off)))
    if len(pts) < 3:
        raise ValueError(f"need at least 3 usable points, got {len(pts)}")
    x, y = np.array(pts).T
    reg = stats.linregress(x, y)
    dof = len(x) - 2
    resid = y - (reg.intercept + reg.slope * x)
    sigma = math.sqrt(float(resid @ resid) / dof) if dof > 0 else 0.0
    half = stats.t.ppf(0.5 + confidence / 2, dof) * reg.stderr
    return FitResult(
        float(reg.slope),
        math.exp(reg.intercept),
        float(reg.intercept),
        sigma,
        (float(reg.slope - half), float(reg.slope + half)),
        len(x),
    )
