import math

import numpy as np
import pytest

from dickelab.coherent import PhasePoint, cs_critical_points, cs_energy_surface, oracle_nu_max
from dickelab.hamiltonian import HilbertSpec, build_hamiltonian, parity_signs
from dickelab.model import ModelParams, Parity
from dickelab.sas import (
    odd_origin_limit,
    projected_state_vector,
    sas_energy_surface,
    sas_expectation_oracle,
    sas_minimize,
    sas_transition,
)


def test_even_origin_is_normal_value():
    params = ModelParams(1.0, 0.7, 20)
    assert sas_energy_surface(params, PhasePoint(0, 0, 0, 0), "even") == -0.5


def test_odd_surface_continuous_at_origin():
    params = ModelParams(1.0, 0.6, 6)
    limit = odd_origin_limit(params)
    for t in (1e-4, 1e-8, 1e-12):
        val = sas_energy_surface(params, PhasePoint(-t, 0, t, 0), Parity.ODD)
        assert val == pytest.approx(limit, abs=1e-6 if t > 1e-6 else 1e-10)


def test_odd_origin_limit_is_one_excitation_state():
    # along (dq, dtheta) = (-1, 1) the odd projection tends to the normalized
    # derivative of the coherent state: alpha ~ -t/sqrt2 on |1,-j>, zeta ~ t/2 on |0,-j+1>
    params = ModelParams(1.0, 0.6, 6)
    spec = HilbertSpec.for_params(params, 4, Parity.ODD)
    h = build_hamiltonian(params, spec).toarray()
    v = np.zeros(spec.dim)
    v[spec.index_of(1, -3)] = -1 / math.sqrt(2)
    v[spec.index_of(0, -2)] = math.sqrt(6) / 2
    v /= np.linalg.norm(v)
    assert odd_origin_limit(params) == pytest.approx(v @ h @ v, abs=1e-12)


@pytest.mark.parametrize("parity", [Parity.EVEN, Parity.ODD])
def test_surface_matches_projection_oracle(parity):
    rng = np.random.default_rng(7 if parity is Parity.EVEN else 8)
    for _ in range(20):
        params = ModelParams(rng.uniform(0.3, 2.0), rng.uniform(-1.2, 1.2), int(rng.integers(1, 12)))
        pt = PhasePoint(rng.uniform(-3, 3), rng.uniform(-2, 2), rng.uniform(0.05, 1.5), rng.uniform(0, 2 * math.pi))
        spec = HilbertSpec.for_params(params, oracle_nu_max(pt.alpha))
        assert sas_expectation_oracle(params, pt, parity, spec) == pytest.approx(
            sas_energy_surface(params, pt, parity), abs=1e-8
        )


def test_projected_vector_has_definite_parity():
    spec = HilbertSpec.from_j(2, 40)
    vec = projected_state_vector(1.2, 0.4, "odd", spec)
    assert np.linalg.norm(vec[parity_signs(spec) > 0]) < 1e-14


def test_even_approaches_cs_at_large_n():
    n = 400
    params = ModelParams(1.0, 0.9, n)
    for qs, th in ((-1.0, 0.8), (-1.5, 1.1)):
        pt = PhasePoint(qs * math.sqrt(n), 0.0, th, 0.0)
        assert sas_energy_surface(params, pt, "even") == pytest.approx(cs_energy_surface(params, pt), abs=1e-3)


def test_deep_normal_even_minimum():
    m = sas_minimize(ModelParams(1.0, 0.3, 20), "even")
    assert abs(m.point.q) / math.sqrt(20) < 0.15
    assert m.point.p == 0.0
    assert m.energy_per_particle <= -0.5


def test_displaced_well_at_0560():
    m = sas_minimize(ModelParams(1.0, 0.56, 20), "even")
    assert m.point.theta > 0.55


def test_odd_minimum_continuous():
    qs = [sas_minimize(ModelParams(1.0, g, 20), "odd").point.q for g in np.linspace(0.4, 0.8, 21)]
    assert np.max(np.abs(np.diff(qs))) < 0.5


def test_even_minimum_below_cs():
    for g in (0.3, 0.55, 0.9):
        params = ModelParams(1.0, g, 10)
        assert sas_minimize(params, "even").energy_per_particle <= cs_critical_points(params)[0].energy_per_particle + 1e-8


def test_transition_n20():
    tr = sas_transition(1.0, 20)
    assert 0.545 <= tr.gamma_c_sc <= 0.560
    lo, hi = tr.theta_gap
    assert lo < 0.35 and hi > 0.55
    assert tr.jump_size > 0


def test_transition_j10_near_fit():
    # j = 10 is N = 20; the power-law fit gives 0.5 + j^(-11/21) / 6
    assert sas_transition(1.0, 20).gamma_c_sc == pytest.approx(0.5 + 10 ** (-11 / 21) / 6, abs=0.005)


def test_transition_moves_toward_half():
    assert sas_transition(1.0, 80).gamma_c_sc < sas_transition(1.0, 20).gamma_c_sc


def test_surfaces_finite_far_from_origin():
    params = ModelParams(1.0, 0.9, 60)
    pt = PhasePoint(-40.0, 0.0, 1.4, 0.0)
    for parity in Parity:
        assert sas_energy_surface(params, pt, parity) == pytest.approx(cs_energy_surface(params, pt), abs=1e-12)
