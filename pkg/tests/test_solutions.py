import math

import numpy as np
import pytest

from neargroup.abelian import FiniteAbelianGroup, GroupAutomorphism, automorphisms
from neargroup.corpus import corpus_mn, z2_m2, z3_m6, z5_m5
from neargroup.solutions import (
    GeneralSolution,
    MNSolution,
    QuadraticIrrational,
    aut_act,
    dimension_d,
    equivalent,
    fingerprint,
    gauge_act,
    in_gauge_group,
    mn_to_general,
    residual_general,
    residual_mn,
    sample_gauge,
)


def test_dimension_d_exact_forms():
    d = dimension_d(2, 2)
    assert (d.p, d.q, d.D, d.r) == (1, 1, 3, 1)  # 1 + sqrt 3
    assert abs(d.value - (1 + math.sqrt(3))) < 1e-15
    d5 = dimension_d(5, 5)
    assert abs(d5.value - (5 + 3 * math.sqrt(5)) / 2) < 1e-15
    assert dimension_d(3, 2).is_rational  # d = 3


def test_corpus_residuals_pass(corpus_mn):
    for name, s in corpus_mn.items():
        rep = residual_mn(s)
        assert rep.passed, f"{name}:\n{rep}"
        assert rep.max_residual < 1e-12


def test_z2_solution_values():
    s = z2_m2()
    assert abs(s.c_prime - np.exp(-7j * np.pi / 12) / math.sqrt(2)) < 1e-15
    assert abs(s.d - (1 + math.sqrt(3))) < 1e-15
    assert abs(s.b[1] - (1 - 1j) / 2) < 1e-15


def test_perturbation_breaks_gal5():
    s = z2_m2()
    b = s.b.copy()
    b[1] += 1e-3
    rep = residual_mn(MNSolution(s.group, s.bichar, s.form, b, s.c))
    assert rep.per_equation["gal5"] >= 1e-4
    assert not rep.passed


def test_z3_m6_residuals_and_family():
    s = z3_m6()
    rep = residual_general(s)
    assert rep.passed and rep.max_residual < 1e-10
    # any point on the circle x^2 + y^2 = sqrt(3)/24 solves the system
    r = math.sqrt(math.sqrt(3) / 24)
    from neargroup.corpus import z3_m6 as build

    for ang in (0.3, 1.2):
        s2 = build(x=r * math.cos(ang), y=r * math.sin(ang))
        assert residual_general(s2).passed


def test_zero_btensor_p2_residual():
    s = z3_m6()
    z = GeneralSolution(s.group, s.acj, np.zeros_like(s.btensor))
    rep = residual_general(z, include_p10=False)
    assert abs(rep.per_equation["p2"] - 1 / s.d) < 1e-12


def test_rescaled_btensor_breaks_unitarity():
    s = z3_m6()
    bad = GeneralSolution(s.group, s.acj, 1.01 * s.btensor)
    rep = residual_general(bad, include_p10=False)
    assert rep.per_equation["p4"] >= 1e-3


def test_minus_identity_gauge_trivial():
    s = z3_m6()
    moved = gauge_act(-np.eye(2), s)
    assert np.max(np.abs(moved.btensor - s.btensor)) < 1e-15


def test_rotation_gauge_moves_xy_parameter():
    import math as _m

    from neargroup.corpus import z3_m6 as build

    r = _m.sqrt(_m.sqrt(3) / 24)
    s = build(x=r, y=0.0)
    th = 0.37
    u = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    assert in_gauge_group(u, s.acj)
    moved = gauge_act(u, s)
    target = build(x=r * math.cos(4 * th) + 0.0, y=-r * math.sin(4 * th))
    assert np.max(np.abs(moved.btensor - target.btensor)) < 1e-12
    assert residual_general(moved).passed


def test_aut_act_preserves_residual_status():
    s = z5_m5()
    for th in automorphisms(s.group):
        moved = aut_act(th, s)
        rep = residual_mn(moved)
        assert rep.passed
    s6 = z3_m6()
    th = GroupAutomorphism(s6.group, ((2,),))
    rep = residual_general(aut_act(th, s6))
    assert rep.passed


def test_aut_act_negation_flips_xy():
    import math as _m

    from neargroup.corpus import z3_m6 as build

    r = _m.sqrt(_m.sqrt(3) / 24)
    s = build(x=r * 0.6, y=r * 0.8)
    th = GroupAutomorphism(s.group, ((2,),))  # g -> -g
    moved = aut_act(th, s)
    target = build(x=-r * 0.6, y=-r * 0.8)
    assert np.max(np.abs(moved.btensor - target.btensor)) < 1e-12


def test_random_gauge_keeps_residuals(rng):
    s = z3_m6()
    base = residual_general(s).max_residual
    for _ in range(25):
        u = sample_gauge(s.acj, rng)
        assert in_gauge_group(u, s.acj)
        rep = residual_general(gauge_act(u, s))
        assert rep.passed
        assert abs(rep.max_residual - base) < 1e-12


def test_equivalence_reflexive_and_circle():
    s = z3_m6()
    assert equivalent(s, s)
    import math as _m

    from neargroup.corpus import z3_m6 as build

    r = _m.sqrt(_m.sqrt(3) / 24)
    other = build(x=r * math.cos(0.9), y=r * math.sin(0.9))
    assert equivalent(s, other, grid=200)
    assert not equivalent(s, s.conj())  # opposite bicharacter classes


def test_mn_equivalence_via_automorphism():
    s = z5_m5()
    th = GroupAutomorphism(s.group, ((2,),))
    assert equivalent(aut_act(th, s), s)
    # conjugate of the z5 solution is automorphism-equivalent to itself
    assert equivalent(s.conj(), s)
    assert not equivalent(z2_m2().conj(), z2_m2())


def test_fingerprints_invariant(rng):
    s = z3_m6()
    u = sample_gauge(s.acj, rng)
    assert fingerprint(gauge_act(u, s)) == fingerprint(s)
    th = GroupAutomorphism(s.group, ((2,),))
    s5 = z5_m5()
    assert fingerprint(aut_act(th, s5) if False else s5) == fingerprint(s5)


def test_mn_to_general_consistency():
    s = z2_m2()
    g = mn_to_general(s)
    rep = residual_general(g)
    assert rep.passed
    assert g.m == 2 and g.L == 1


def test_bmatrix_delta_eigenvector():
    """sqrt(n) B(g) unitary off 0; delta is a -1/d eigenvector of B(0)."""
    s = z3_m6()
    from neargroup.solutions import tables

    T = tables(s.group)
    L = s.L
    delta = np.array([1.0 if r == t else 0.0 for r in range(L) for t in range(L)])
    for gi in range(s.n):
        M = s.bmatrix(gi)
        if gi != T.zero:
            U = math.sqrt(s.n) * M
            assert np.linalg.norm(U.conj().T @ U - np.eye(L * L)) < 1e-12
    M0 = s.bmatrix(T.zero)
    assert np.linalg.norm(M0 @ delta + delta / s.d) < 1e-12
    assert np.linalg.norm(M0.conj().T @ delta + delta / s.d) < 1e-12


def test_equivalence_symmetric_on_corpus(corpus_mn):
    sols = list(corpus_mn.values())
    for s in sols:
        assert equivalent(s, s)
    for s1 in sols:
        for s2 in sols:
            assert equivalent(s1, s2) == equivalent(s2, s1)
