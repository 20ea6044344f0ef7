"""Symmetry-adapted (parity-projected) coherent states.

The even/odd trial states are N_+- (|alpha, zeta> +- |-alpha, -zeta>).  With
the overlap w = <alpha,zeta|-alpha,-zeta> = exp(-(p^2+q^2)) cos(theta)^N the
projected energy per particle is

    E_+- = (E_cs +- w R) / (1 +- w)

where R is the off-diagonal (transition) energy between the two coherent
components.  Everything is written through L = -ln w >= 0 so that
cos(theta)^(-N) never has to be formed; at N = 900 it overflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit

from .coherent import PhasePoint, coherent_state_vector, cs_critical_points, cs_energy_surface
from .hamiltonian import HilbertSpec, build_hamiltonian
from .model import ModelParams, Parity

DISTINCT = 1e-4  # local minima closer than this in both q and theta are the same well


class SASConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class SASMinimum:
    parity: Parity
    point: PhasePoint
    energy_per_particle: float
    local_minima: list[tuple[PhasePoint, float]] = field(default_factory=list)


@dataclass(frozen=True)
class SASTransition:
    gamma_c_sc: float
    jump_size: float
    bracket: tuple[float, float]
    near_well: PhasePoint
    far_well: PhasePoint

    @property
    def theta_gap(self) -> tuple[float, float]:
        """Interval of Bloch angles skipped by the even global minimum."""
        return (self.near_well.theta, self.far_well.theta)


def _exponent(params: ModelParams, point: PhasePoint) -> float:
    c = math.cos(point.theta)
    if c <= 0:
        raise ValueError(f"theta={point.theta} outside [0, pi/2); cos(theta) must be positive")
    # ln cos(theta) via log1p so tiny angles are not rounded away
    log_c = math.log1p(-2 * math.sin(point.theta / 2) ** 2)
    return point.p**2 + point.q**2 - params.n_atoms * log_c


def _transition_minus_diagonal(params: ModelParams, point: PhasePoint) -> float:
    """R - E_cs, the cross energy minus the diagonal CS energy (per particle)."""
    q, p, th, ph = point.q, point.p, point.theta, point.phi
    return (
        -(p * p + q * q) / params.n_atoms
        - params.omega_a / 2 * math.sin(th) * math.tan(th)
        - params.gamma / math.sqrt(params.j) * (p * math.tan(th) * math.sin(ph) + q * math.sin(th) * math.cos(ph))
    )


def odd_origin_limit(params: ModelParams, dq: float = -1.0, dtheta: float = 1.0) -> float:
    """Limit of the odd surface at the origin along the ray (q, theta) = t (dq, dtheta), p = 0, phi = 0.

    Near the origin the odd state is dominated by the one-excitation states
    |1, -j> and |0, -j+1> with amplitudes q/sqrt(2) and sqrt(2j) theta/2.
    """
    n = params.n_atoms
    a = dq / math.sqrt(2)
    b = math.sqrt(n) * dtheta / 2
    if a == 0 and b == 0:
        raise ValueError("direction must be nonzero")
    e_photon = 1 / n - params.omega_a / 2
    e_spin = -params.omega_a / 2 + params.omega_a / n
    coupling = params.gamma / (n * math.sqrt(n)) * math.sqrt(n)
    return (a * a * e_photon + b * b * e_spin + 2 * a * b * coupling) / (a * a + b * b)


def sas_energy_surface(params: ModelParams, point: PhasePoint, parity: Parity | str) -> float:
    parity = Parity.parse(parity)
    L = _exponent(params, point)
    ecs = cs_energy_surface(params, point)
    if parity is Parity.EVEN:
        # w / (1 + w) = sigmoid(-L)
        return ecs + expit(-L) * _transition_minus_diagonal(params, point)
    if L == 0.0:
        return odd_origin_limit(params)
    # -w / (1 - w) = -1 / (e^L - 1) = e^-L / expm1(-L), finite for any L > 0
    return ecs + _transition_minus_diagonal(params, point) * math.exp(-L) / math.expm1(-L)


def projected_state_vector(
    alpha: complex, zeta: complex, parity: Parity | str, spec: HilbertSpec
) -> np.ndarray:
    """Normalized |alpha, zeta> +- |-alpha, -zeta> built explicitly in the truncated basis."""
    sign = Parity.parse(parity).sign
    vec = coherent_state_vector(alpha, zeta, spec) + sign * coherent_state_vector(-alpha, -zeta, spec)
    norm = np.linalg.norm(vec)
    if norm < 1e-7:
        raise ValueError("projected state vanishes at this point")
    return vec / norm


def sas_expectation_oracle(
    params: ModelParams, point: PhasePoint, parity: Parity | str, spec: HilbertSpec
) -> float:
    vec = projected_state_vector(point.alpha, point.zeta, parity, spec)
    h = build_hamiltonian(params, spec).matrix
    return float(np.real(np.vdot(vec, h @ vec)))


# --- minimization -------------------------------------------------------------


def _surface_qu(params: ModelParams, parity: Parity):
    # u = tan(theta) keeps cos(theta) > 0 without bounds; (q, -u) is the mirror image
    def f(x):
        return sas_energy_surface(params, PhasePoint(x[0], 0.0, math.atan(x[1]), 0.0), parity)

    return f


def _local_min(f, seed, max_restarts: int = 6):
    x = np.asarray(seed, dtype=float)
    best = None
    for _ in range(max_restarts):
        res = minimize(
            f,
            x,
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-15, "maxiter": 40000, "adaptive": True},
        )
        if not np.isfinite(res.fun):
            raise SASConvergenceError(f"non-finite energy from seed {seed}: {res}")
        if best is not None and best.fun - res.fun <= 1e-15:
            best = res if res.fun < best.fun else best
            break
        best, x = res, res.x
    else:
        if not best.success:
            raise SASConvergenceError(f"Nelder-Mead failed from seed {seed}: {best.message}")
    q, u = best.x
    theta = math.atan(u)
    if theta < 0:
        q, theta = -q, -theta
    return PhasePoint(float(q), 0.0, float(theta), 0.0), float(best.fun)


def _seeds(params: ModelParams, parity: Parity) -> list[tuple[float, float]]:
    sgn = -1.0 if params.gamma >= 0 else 1.0
    seeds = [(0.1 * sgn, 0.1)]
    gc = params.gamma_c
    ref = params if abs(params.gamma) > gc * 1.05 else params.with_gamma(1.05 * gc * (1 if params.gamma >= 0 else -1))
    cs = cs_critical_points(ref)[0]
    seeds.append((cs.q_c, math.tan(cs.theta_c)))
    q_scale = 2 * math.sqrt(params.j) * max(abs(params.gamma), gc)
    for qf in (0.05, 0.3, 0.6, 1.0):
        for th in (0.1, 0.4, 0.8, 1.2):
            seeds.append((sgn * qf * q_scale, math.tan(th)))
    return seeds


def _dedupe(found: list[tuple[PhasePoint, float]]) -> list[tuple[PhasePoint, float]]:
    out: list[tuple[PhasePoint, float]] = []
    for pt, e in sorted(found, key=lambda t: t[1]):
        if not any(abs(pt.q - o.q) <= DISTINCT and abs(pt.theta - o.theta) <= DISTINCT for o, _ in out):
            out.append((pt, e))
    return out


def sas_minimize(
    params: ModelParams, parity: Parity | str, extra_seeds: tuple[tuple[float, float], ...] = ()
) -> SASMinimum:
    """Global and local minima of the projected surface over (q, theta) with p = 0, phi = 0.

    Seeds: just off the origin, the CS super-radiant minimum, and a coarse
    (q, theta) grid.  Seeds are fixed, so results are reproducible.
    """
    parity = Parity.parse(parity)
    f = _surface_qu(params, parity)
    seeds = _seeds(params, parity) + [(q, math.tan(t)) for q, t in extra_seeds]
    minima = _dedupe([_local_min(f, s) for s in seeds])
    best_pt, best_e = minima[0]
    return SASMinimum(parity, best_pt, best_e, minima)


def _dist(a: PhasePoint, b: PhasePoint, n: int) -> float:
    return math.hypot((a.q - b.q) / math.sqrt(n), a.theta - b.theta)


def _swap_state(params, near_seed: PhasePoint, far_seed: PhasePoint):
    """Track both even wells from their seeds by local descent.

    Returns (far well is global, wells distinct, near minimum, far minimum).
    When only one well survives, it is attributed to whichever seed it is
    closer to; callers decide whether that attribution is trustworthy.
    """
    f = _surface_qu(params, Parity.EVEN)
    near = _local_min(f, (near_seed.q, math.tan(near_seed.theta)))
    far = _local_min(f, (far_seed.q, math.tan(far_seed.theta)))
    distinct = abs(near[0].q - far[0].q) > DISTINCT or abs(near[0].theta - far[0].theta) > DISTINCT
    if distinct:
        return far[1] < near[1], True, near, far
    n = params.n_atoms
    is_far = _dist(near[0], far_seed, n) < _dist(near[0], near_seed, n)
    return is_far, False, near, far


def sas_transition(
    omega_a: float,
    n_atoms: int,
    bracket: tuple[float, float] | None = None,
    tol: float = 1e-6,
) -> SASTransition:
    """Coupling at which the even-surface global minimum jumps between wells, by bisection.

    The global minima at the bracket ends seed two tracked wells; each
    bisection step keeps the lower of the two.  A swap is confirmed only if
    both wells coexist as distinct minima at the final coupling.
    """
    if bracket is None:
        bracket = find_swap_bracket(omega_a, n_atoms)
    lo, hi = map(float, bracket)
    if not lo < hi:
        raise ValueError(f"bracket must be increasing, got {bracket}")
    ends = []
    for g in (lo, hi):
        found = sas_minimize(ModelParams(omega_a, g, n_atoms), Parity.EVEN)
        if len(found.local_minima) > 2:
            raise ValueError(
                f"more than two candidate wells at gamma={g}: "
                f"{[(round(w.q, 6), round(w.theta, 6), e) for w, e in found.local_minima]}"
            )
        ends.append(found.point)
    near_track, far_track = ends
    if _dist(near_track, far_track, n_atoms) <= DISTINCT:
        raise ValueError(f"no swap in bracket {bracket}: same global well at both ends")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        swapped, _, near, far = _swap_state(ModelParams(omega_a, mid, n_atoms), near_track, far_track)
        if swapped:
            hi, far_track = mid, far[0]
        else:
            lo, near_track = mid, near[0]
    gamma = 0.5 * (lo + hi)
    _, distinct, near, far = _swap_state(ModelParams(omega_a, gamma, n_atoms), near_track, far_track)
    if not distinct:
        raise ValueError(
            f"no swap in bracket {bracket}: the global minimum moves continuously near gamma={gamma}"
        )
    return SASTransition(gamma, abs(far[0].q - near[0].q), (lo, hi), near[0], far[0])


def find_swap_bracket(
    omega_a: float, n_atoms: int, lo: float | None = None, hi: float | None = None, steps: int = 40
) -> tuple[float, float]:
    """Scan a coarse coupling grid for adjacent points where the even global minimum changes well.

    Only grid points where both wells exist (distinct local minima) are
    classified; the first near-global to far-global step is returned.
    """
    gc = math.sqrt(omega_a) / 2
    j = n_atoms / 2
    lo = gc if lo is None else lo
    hi = gc + 0.6 * gc * j**-0.5 if hi is None else hi
    grid = np.linspace(lo, hi, steps)
    prev = None
    near_seed = PhasePoint(-0.1, 0.0, 0.1, 0.0)
    for g in grid:
        p = ModelParams(omega_a, float(g), n_atoms)
        cs = cs_critical_points(p if p.x > 1.05 else p.with_gamma(1.05 * gc))[0]
        far_seed = PhasePoint(cs.q_c, 0.0, cs.theta_c, 0.0)
        swapped, distinct, _, _ = _swap_state(p, near_seed, far_seed)
        state = swapped if distinct else None
        if state is True and prev is not None and prev[1] is False:
            return (prev[0], float(g))
        prev = (float(g), state)
    raise ValueError(f"no even-well swap found in [{lo}, {hi}] for N={n_atoms}; widen the range")
