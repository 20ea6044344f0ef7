"""Coupling scans producing the (gamma, theta, q/sqrt(N)) series behind the figures."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coherent import cs_critical_points
from .criticality import exact_state
from .eigen import NU_MAX_CAP
from .model import ModelParams, Parity
from .sas import sas_minimize

METHODS = ("cs", "sas", "exact")


@dataclass(frozen=True)
class ScanRow:
    method: str
    sector: str
    gamma: float
    theta: float
    q_over_sqrt_n: float
    energy: float


def phase_scan(
    omega_a: float,
    n_atoms: int,
    gammas,
    methods=METHODS,
    sectors=(Parity.EVEN, Parity.ODD),
    tol: float = 1e-10,
    nu_max_cap: int = NU_MAX_CAP,
) -> list[ScanRow]:
    """Minimum location per method along a gamma grid (phi_c = 0 branch, q <= 0).

    The CS minimum has no parity, so it is reported once with sector ``none``.
    Exact states are mapped to phase space through <a+a> and <J_z>.
    """
    rows: list[ScanRow] = []
    root_n = math.sqrt(n_atoms)
    gammas = [float(g) for g in np.atleast_1d(gammas)]
    for method in methods:
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
        for g in gammas:
            params = ModelParams(omega_a, g, n_atoms)
            if method == "cs":
                cp = cs_critical_points(params)[0]
                rows.append(ScanRow("cs", "none", g, cp.theta_c, cp.q_c / root_n, cp.energy_per_particle))
                continue
            for sector in sectors:
                sector = Parity.parse(sector)
                if method == "sas":
                    m = sas_minimize(params, sector)
                    rows.append(
                        ScanRow("sas", sector.value, g, m.point.theta, m.point.q / root_n, m.energy_per_particle)
                    )
                else:
                    st = exact_state(params, sector, tol, nu_max_cap)
                    pt = st.point
                    rows.append(ScanRow("exact", sector.value, g, pt.theta, pt.q / root_n, st.energy))
    return rows
