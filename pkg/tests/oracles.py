"""Independent reference constructions used only by the tests."""

import numpy as np


def spin_ops(two_j: int):
    """Dense J_z, J_+ in the |j, m> basis ordered by ascending m."""
    j = two_j / 2
    m = -j + np.arange(two_j + 1)
    jz = np.diag(m)
    jp = np.zeros((two_j + 1, two_j + 1))
    for k in range(two_j):
        jp[k + 1, k] = np.sqrt(j * (j + 1) - m[k] * (m[k] + 1))
    return jz, jp


def field_ops(nu_max: int):
    a = np.diag(np.sqrt(np.arange(1, nu_max + 1)), 1)
    return a


def dicke_kron(omega_a, gamma, n_atoms, nu_max, rwa=False):
    """H = a+a/N + w J_z/N + g/N^1.5 (a+ + a)(J+ + J-) as an explicit tensor product."""
    jz, jp = spin_ops(n_atoms)
    a = field_ops(nu_max)
    one_f, one_s = np.eye(nu_max + 1), np.eye(n_atoms + 1)
    h = np.kron(a.T @ a, one_s) / n_atoms + omega_a * np.kron(one_f, jz) / n_atoms
    if rwa:
        inter = np.kron(a.T, jp.T) + np.kron(a, jp)
    else:
        inter = np.kron(a.T + a, jp + jp.T)
    return h + gamma / n_atoms**1.5 * inter
