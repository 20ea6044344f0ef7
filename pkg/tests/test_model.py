import math

import pytest
from hypothesis import given, strategies as st

from dickelab.model import (
    BasisLabel,
    ModelParams,
    Parity,
    coupling_ratio,
    gamma_critical,
    lambda_eigenvalue,
    parity_of,
    two_j_of,
)


def test_gamma_critical_values():
    assert gamma_critical(1.0) == 0.5
    assert gamma_critical(4.0) == 1.0
    with pytest.raises(ValueError):
        gamma_critical(0.0)


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(1.0, 0.5, 0)
    with pytest.raises(ValueError):
        ModelParams(-1.0, 0.5, 2)
    p = ModelParams(1.0, 1.0, 20)
    assert p.two_j == 20 and p.j == 10.0
    assert p.x == pytest.approx(2.0)
    assert p.with_gamma(0.3).gamma == 0.3
    assert ModelParams.from_j(1.0, 0.5, 2.5).n_atoms == 5


def test_two_j_rejects_non_half_integer():
    assert two_j_of(2.5) == 5
    with pytest.raises(ValueError):
        two_j_of(0.3)


def test_lambda_and_parity():
    j = 0.5
    assert lambda_eigenvalue(BasisLabel.of(0, -0.5), j) == 0
    assert lambda_eigenvalue(BasisLabel.of(1, 0.5), j) == 2
    assert parity_of(BasisLabel.of(0, 0.5), j) is Parity.ODD
    assert parity_of(BasisLabel.of(1, 0.5), j) is Parity.EVEN


def test_label_range_checked():
    with pytest.raises(ValueError):
        lambda_eigenvalue(BasisLabel.of(0, 2.0), 1.0)


def test_coupling_ratio():
    assert coupling_ratio(1.0, 0.5) == 2.0


def test_parity_parse():
    assert Parity.parse("even") is Parity.EVEN
    assert Parity.parse(Parity.ODD) is Parity.ODD
    assert Parity.EVEN.sign == 1 and Parity.ODD.sign == -1
    with pytest.raises(ValueError):
        Parity.parse("sideways")


@given(st.floats(0.01, 100))
def test_gamma_critical_square_law(w):
    assert gamma_critical(w) ** 2 == pytest.approx(w / 4, rel=1e-14)
    assert math.isfinite(gamma_critical(w))
