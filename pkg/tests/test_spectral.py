import math

import numpy as np
import pytest

from neargroup.abelian import (
    FiniteAbelianGroup,
    Phase,
    enumerate_bicharacters,
    enumerate_quadratic_forms,
    even_quadratic_forms,
)
from neargroup.spectral import (
    ZETA3,
    AntiUnitary,
    conjugation,
    cube_root_scalars,
    eigenspace_basis,
    fixed_real_eigenbasis,
    rotation,
)


def data_zn(n, k=1, aval=None):
    G = FiniteAbelianGroup((n,))
    from neargroup.abelian import Bicharacter

    b = Bicharacter(G, ((Phase(k, n),),))
    forms = enumerate_quadratic_forms(b)
    if aval is not None:
        forms = [f for f in forms if f.phase((1,)) == aval]
    return G, b, forms[0]


def test_z2_rotation_matches_display():
    _, b, a = data_zn(2, aval=Phase(1, 4))
    R = rotation(b, a, np.exp(-1j * np.pi / 12))
    target = ((math.sqrt(3) + 1 + (math.sqrt(3) - 1) * 1j) / 4) \
        * np.array([[1, 1], [-1j, 1j]])
    assert np.allclose(R.matrix, target)
    assert R.is_cube_root_of_identity()


def test_z3_rotation_matches_display():
    _, b, a = data_zn(3)
    R = rotation(b, a, np.exp(-1j * np.pi / 6))
    target = np.exp(1j * np.pi / 6) / math.sqrt(3) * np.array(
        [[1, 1, 1], [ZETA3**2, 1, ZETA3], [ZETA3**2, ZETA3, 1]])
    assert np.allclose(R.matrix, target)
    assert R.is_cube_root_of_identity()


def test_rotation_unitary_and_c_validation():
    _, b, a = data_zn(4, aval=Phase(7, 8))
    for c in cube_root_scalars(a):
        R = rotation(b, a, c)
        assert np.allclose(R.matrix.conj().T @ R.matrix, np.eye(4), atol=1e-12)
        assert R.is_cube_root_of_identity()
    with pytest.raises(ValueError):
        rotation(b, a, 2.0)


def test_jrj_is_r_squared_over_small_groups():
    for factors in [(2,), (3,), (4,), (2, 2), (5,), (6,), (2, 4), (8,), (2, 2, 2)]:
        G = FiniteAbelianGroup(factors)
        for b in enumerate_bicharacters(G, nondegenerate_only=True):
            for a in even_quadratic_forms(b):
                c = cube_root_scalars(a)[0]
                R = rotation(b, a, c)
                J = conjugation(a)
                assert R.is_cube_root_of_identity()
                JRJ = J.matrix @ np.conj(R.matrix) @ np.conj(J.matrix)
                assert np.linalg.norm(JRJ - R.matrix @ R.matrix) < 1e-12


def test_eigenvalue_multiplicities_sum():
    _, b, a = data_zn(5)
    R = rotation(b, a, cube_root_scalars(a)[0])
    dims = [eigenspace_basis(R, ZETA3**k).shape[1] for k in range(3)]
    assert sum(dims) == 5


def test_z3_fixed_real_eigenbasis():
    _, b, a = data_zn(3)
    R = rotation(b, a, np.exp(-1j * np.pi / 6))
    J = conjugation(a)
    E1 = fixed_real_eigenbasis(R, J, 1.0)
    assert len(E1) == 2
    f0 = np.array([1, -ZETA3 / 2, -ZETA3 / 2])
    f0p = np.array([0, ZETA3 * 1j, -ZETA3 * 1j])

    def in_real_span(vs, f):
        A = np.concatenate([
            np.stack([np.real(v) for v in vs], 1),
            np.stack([np.imag(v) for v in vs], 1)])
        t = np.concatenate([np.real(f), np.imag(f)])
        x, *_ = np.linalg.lstsq(A, t, rcond=None)
        return np.linalg.norm(A @ x - t) < 1e-9

    assert in_real_span(E1, f0)
    assert in_real_span(E1, f0p)
    assert fixed_real_eigenbasis(R, J, ZETA3**2) == []
    assert len(fixed_real_eigenbasis(R, J, ZETA3)) == 1


def test_z2_fixed_basis_dimension():
    _, b, a = data_zn(2, aval=Phase(1, 4))
    R = rotation(b, a, np.exp(-1j * np.pi / 12))
    J = conjugation(a)
    assert len(fixed_real_eigenbasis(R, J, 1.0)) == 1


def test_real_form_spans_eigenspace():
    _, b, a = data_zn(5)
    R = rotation(b, a, cube_root_scalars(a)[0])
    J = conjugation(a)
    for k in range(3):
        E = eigenspace_basis(R, ZETA3**k)
        F = fixed_real_eigenbasis(R, J, ZETA3**k)
        assert len(F) == E.shape[1]  # complex span of the real form = eigenspace


def test_antiunitary_composition_and_square():
    U = np.array([[0, 1], [1, 0]], dtype=complex)
    j = AntiUnitary(U)
    assert np.allclose(j.square(), np.eye(2))
    j2 = AntiUnitary(1j * np.eye(2))
    comp = j.compose_linear(j2)  # matrix U1 conj(U2)
    assert np.allclose(comp, U @ (-1j * np.eye(2)))
    with pytest.raises(ValueError):
        AntiUnitary(2 * np.eye(2))


def test_j_must_normalize_eigenspace():
    # pair R of one form with J of another: inconsistent inputs are flagged
    _, b, a1 = data_zn(4, aval=Phase(7, 8))
    _, _, a2 = data_zn(4, aval=Phase(3, 8))
    R = rotation(b, a1, cube_root_scalars(a1)[0])
    J_wrong = conjugation(a2)
    with pytest.raises(ValueError):
        fixed_real_eigenbasis(R, J_wrong, 1.0)
