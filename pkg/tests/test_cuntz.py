import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neargroup.corpus import z2_m2, z3_m3
from neargroup.cuntz import (
    CuntzElement,
    build_endomorphism,
    fs_indicators,
    generator,
    normalize,
    normalize_residual,
    oracle_check,
)
from neargroup.solutions import MNSolution
from neargroup.tuples import build_extraspecial_tuple, build_z2_m1_tuple, to_tuple

ZETA3 = np.exp(2j * np.pi / 3)


# --- engine basics -----------------------------------------------------------

def test_completeness_relation_normalizes_to_identity():
    x = CuntzElement.word(2, (0,), (0,)) + CuntzElement.word(2, (1,), (1,))
    assert normalize_residual(x - CuntzElement.one(2)) == 0.0
    # raising the identity to level 1 gives the completeness table
    raised = normalize(CuntzElement.one(2), level=0)
    assert raised.terms == {((), ()): 1.0 + 0.0j}


def test_orthogonality_reduction():
    prod = CuntzElement.word(2, (), (0,)) * CuntzElement.word(2, (1,))
    assert prod.support() == 0


def test_one_step_reduction():
    prod = CuntzElement.word(2, (0,), (1,)) * CuntzElement.word(2, (1,), (0,))
    assert normalize_residual(prod - CuntzElement.word(2, (0,), (0,))) == 0.0


def test_normalize_idempotent_and_level_error():
    x = CuntzElement.word(3, (0,), ()) + CuntzElement.word(3, (1, 2), (0,)) * 0.5
    y = normalize(x, level=2)
    assert normalize_residual(y - x) == 0.0
    with pytest.raises(ValueError):
        normalize(x, level=1)


def _random_element(rng, N=3, max_len=2, terms=3):
    out = CuntzElement.zero(N)
    for _ in range(terms):
        mu = tuple(rng.integers(0, N, size=rng.integers(0, max_len + 1)))
        nu = tuple(rng.integers(0, N, size=rng.integers(0, max_len + 1)))
        coeff = complex(rng.normal(), rng.normal())
        out = out + CuntzElement.word(N, mu, nu, coeff)
    return out


def test_algebra_laws_bulk(rng):
    for _ in range(300):
        x = _random_element(rng)
        y = _random_element(rng)
        z = _random_element(rng)
        lhs = (x * y) * z
        rhs = x * (y * z)
        assert normalize_residual(lhs - rhs) < 1e-12
        assert normalize_residual((x * y).adjoint() - y.adjoint() * x.adjoint()) < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_algebra_laws_hypothesis(seed):
    rng = np.random.default_rng(seed)
    x, y, z = (_random_element(rng) for _ in range(3))
    assert normalize_residual((x * y) * z - x * (y * z)) < 1e-12
    assert normalize_residual((x * y).adjoint() - y.adjoint() * x.adjoint()) < 1e-12
    assert normalize_residual((x + y).adjoint() - (x.adjoint() + y.adjoint())) < 1e-12


# --- the oracle ----------------------------------------------------------------

def test_oracle_z2_m2():
    rep = oracle_check(to_tuple(z2_m2()), tolerance=1e-9)
    assert rep.passed
    assert rep.max_residual < 1e-12


def test_oracle_z2_m1_in_O3():
    t = build_z2_m1_tuple(1.0)
    assert t.alphabet == 3
    rep = oracle_check(t, tolerance=1e-9)
    assert rep.passed


def test_oracle_detects_perturbation():
    s = z2_m2()
    b = s.b.copy()
    b[1] += 1e-3
    bad = MNSolution(s.group, s.bichar, s.form, b, s.c)
    t = to_tuple(bad, check=False)
    rep = oracle_check(t, tolerance=1e-9)
    assert rep.per_equation["rho_squared"] >= 1e-4
    assert not rep.passed


def test_alpha_is_homomorphism():
    rho = build_endomorphism(to_tuple(z3_m3()))
    rng = np.random.default_rng(5)
    for _ in range(10):
        x = _random_element(rng, N=rho.N, max_len=2, terms=2)
        y = _random_element(rng, N=rho.N, max_len=2, terms=2)
        lhs = rho.alpha(1, x * y)
        rhs = rho.alpha(1, x) * rho.alpha(1, y)
        assert normalize_residual(lhs - rhs) < 1e-10


# --- Frobenius-Schur indicators ---------------------------------------------

def test_fs_extraspecial_signs():
    (nu21, _, _), rep = fs_indicators(build_extraspecial_tuple(1, "D", 1.0))
    assert nu21 == 1 and rep.passed
    (nu21, _, _), rep = fs_indicators(build_extraspecial_tuple(1, "Q", 1.0))
    assert nu21 == -1 and rep.passed


def test_fs_z2_m1_distinguishes_categories():
    vals = []
    for zeta in (1.0, ZETA3, ZETA3**2):
        (_, nu31, _), rep = fs_indicators(build_z2_m1_tuple(zeta))
        assert rep.passed
        vals.append(nu31)
        assert abs(nu31 - np.conj(zeta)) < 1e-12
    assert len({np.round(v, 8) for v in vals}) == 3


def test_fs_z3_m3_value():
    (_, nu31, _), rep = fs_indicators(to_tuple(z3_m3()))
    assert rep.passed
    assert abs(nu31 - np.sqrt(3) * np.exp(-1j * np.pi / 6)) < 1e-9


def test_dump_format():
    x = CuntzElement.word(3, (0, 1), (2,), 0.5 + 0.25j)
    dump = x.dump()
    assert dump == [{"word": [0, 1, "*", 2], "coeff": [0.5, 0.25]}]


def test_normalize_idempotent_fixed_level():
    x = (CuntzElement.word(3, (0,), ()) * 0.3
         + CuntzElement.word(3, (1, 2), (0,)) * (1 - 2j))
    y = normalize(x, level=3)
    z = normalize(y, level=3)
    assert sorted(y.terms) == sorted(z.terms)
    for k in y.terms:
        assert abs(y.terms[k] - z.terms[k]) < 1e-15
