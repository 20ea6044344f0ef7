import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize

from dickelab.coherent import (
    Branch,
    PhasePoint,
    coherent_state_vector,
    cs_critical_points,
    cs_energy_surface,
    cs_expectation_oracle,
    cs_lambda_and_fluctuation,
    cs_minimum_energy,
    normal_branch,
    superradiant_branch,
    oracle_nu_max,
    theta_critical,
    universal_curve,
)
from dickelab.hamiltonian import HilbertSpec
from dickelab.model import ModelParams


def test_surface_examples():
    p1 = ModelParams(1.0, 0.8, 6)
    assert cs_energy_surface(p1, PhasePoint(0, 0, 0, 1.2)) == -0.5
    assert cs_energy_surface(p1, PhasePoint(0, 1.5, math.pi / 2, 0.3)) == pytest.approx(1.5**2 / 12)
    p2 = ModelParams(1.0, 1.0, 2)
    assert cs_energy_surface(p2, PhasePoint(-1.93649, 0, 1.31812, 0)) == pytest.approx(-1.0625, abs=1e-9)


def test_critical_points_examples():
    normal = cs_critical_points(ModelParams(1.0, 0.3, 20))[0]
    assert normal.branch is Branch.NORMAL
    assert (normal.q_c, normal.theta_c, normal.energy_per_particle) == (0.0, 0.0, -0.5)
    sr0, sr_pi = cs_critical_points(ModelParams(1.0, 1.0, 20))
    assert sr0.theta_c == pytest.approx(1.31812, abs=1e-5)
    assert sr0.q_c / math.sqrt(20) == pytest.approx(-1.36931, abs=1e-5)
    assert sr_pi.q_c == -sr0.q_c and sr_pi.phi_c == math.pi
    at_c = cs_critical_points(ModelParams(1.0, 0.5, 20))
    assert at_c[0].q_c == at_c[1].q_c == 0.0 and at_c[0].theta_c == 0.0


def test_universal_curve_examples():
    assert universal_curve(0.0, 1.0) == 0.0
    assert universal_curve(math.pi / 3, 1.0) == pytest.approx(-0.86603, abs=1e-5)
    assert universal_curve(1.31812, 1.0) == pytest.approx(-1.36931, abs=1e-5)
    with pytest.raises(ValueError):
        universal_curve(math.pi / 2, 1.0)
    assert universal_curve(np.array([0.1, 0.2]), 1.0).shape == (2,)


def test_minimum_energy_examples():
    assert cs_minimum_energy(ModelParams(1.0, 1.0, 2)) == pytest.approx(-2.125, abs=1e-14)
    assert cs_minimum_energy(ModelParams(1.0, 0.5, 7)) == -2 * 7 * 0.25
    assert cs_minimum_energy(ModelParams(1.0, 10.0, 4)) / 4 == pytest.approx(-100, rel=1e-3)


def test_lambda_examples():
    assert cs_lambda_and_fluctuation(ModelParams(1.0, 0.4, 20)) == (0.0, 0.0)
    assert cs_lambda_and_fluctuation(ModelParams(1.0, 0.5, 20)) == (0.0, 0.0)
    lam, dlam = cs_lambda_and_fluctuation(ModelParams(1.0, 1.0, 20))
    assert lam == pytest.approx(26.25, abs=1e-12)
    assert dlam == pytest.approx(4.84123, abs=1e-5)


def test_lambda_against_oracle():
    params = ModelParams(1.0, 1.0, 20)
    cp = cs_critical_points(params)[0]
    spec = HilbertSpec.for_params(params, oracle_nu_max(cp.point.alpha))
    lam, dlam = cs_lambda_and_fluctuation(params)
    a, z = cp.point.alpha, cp.point.zeta
    assert cs_expectation_oracle(a, z, "Lambda", spec) == pytest.approx(lam, abs=1e-8)
    var = cs_expectation_oracle(a, z, "Lambda2", spec) - lam**2
    assert math.sqrt(var) == pytest.approx(dlam, abs=1e-8)


def test_vacuum_oracle():
    params = ModelParams(1.3, 0.7, 4)
    spec = HilbertSpec.for_params(params, 20)
    assert cs_expectation_oracle(0, 0, "H", spec, params) == pytest.approx(-0.65, abs=1e-14)


def test_coherent_vector_normalized():
    spec = HilbertSpec.from_j(3, 60)
    vec = coherent_state_vector(1.5 - 0.4j, 0.3 + 0.8j, spec)
    assert np.linalg.norm(vec) == pytest.approx(1.0, abs=1e-12)


def test_coherent_vector_rejects_short_truncation():
    with pytest.raises(ValueError):
        coherent_state_vector(4.0, 0.0, HilbertSpec.from_j(1, 5))


def test_unknown_tag():
    with pytest.raises(ValueError):
        cs_expectation_oracle(0.1, 0.1, "spin", HilbertSpec.from_j(1, 10))


@settings(max_examples=25, deadline=None)
@given(
    st.sampled_from([1, 2, 5, 8]),
    st.floats(0.2, 3.0),
    st.floats(-1.5, 1.5),
    st.floats(-3.0, 3.0),
    st.floats(-3.0, 3.0),
    st.floats(0.0, math.pi - 0.01),
    st.floats(0.0, 2 * math.pi),
)
def test_surface_equals_oracle(n_atoms, omega_a, gamma, q, p, theta, phi):
    params = ModelParams(omega_a, gamma, n_atoms)
    pt = PhasePoint(q, p, theta, phi)
    spec = HilbertSpec.for_params(params, oracle_nu_max(pt.alpha))
    assert cs_expectation_oracle(pt.alpha, pt.zeta, "H", spec, params) == pytest.approx(
        cs_energy_surface(params, pt), abs=1e-10
    )


def test_generic_minimizer_agrees():
    rng = np.random.default_rng(11)
    for _ in range(10):
        params = ModelParams(rng.uniform(0.2, 4), rng.uniform(0.1, 3), int(rng.integers(1, 30)))
        cp = cs_critical_points(params)[0]
        f = lambda v: cs_energy_surface(params, PhasePoint(*v))
        best = min(
            (minimize(f, x0, method="BFGS", options={"gtol": 1e-12}) for x0 in ([-1, 0.1, 0.5, 0.2], [1, 0, 1.0, 3.0])),
            key=lambda r: r.fun,
        )
        assert best.fun == pytest.approx(cp.energy_per_particle, abs=1e-9)
        assert abs(abs(best.x[0]) - abs(cp.q_c)) < 1e-5


def test_theta_critical_relation():
    params = ModelParams(2.0, 1.3, 10)
    assert math.cos(theta_critical(params)) == pytest.approx(params.gamma_c**2 / 1.3**2)


def test_branches_meet_at_threshold():
    for n in (2, 20, 61):
        for gc in (0.25, 0.5, 1.3):
            assert superradiant_branch(n, gc, 1.0) == normal_branch(n, gc)
    with pytest.raises(ValueError):
        superradiant_branch(4, 0.5, 0.9)


def test_observables_bundle():
    from dickelab.coherent import cs_observables

    obs = cs_observables(ModelParams(1.0, 1.0, 20))
    assert obs.energy_extensive == pytest.approx(-21.25)
