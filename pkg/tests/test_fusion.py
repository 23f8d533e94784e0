import json
import math

import numpy as np
import pytest

from neargroup.abelian import (
    FiniteAbelianGroup,
    GroupAutomorphism,
    Phase,
    QuadraticForm,
    Bicharacter,
    lagrangian_subgroups,
    subgroup_generated_by,
)
from neargroup.corpus import z2_m2, z2z2_m4, z2z2z3_m12, z3_m3, z3_m6, z4_m4, z5_m5
from neargroup.fusion import (
    d8_rep_data,
    dequiv_fusion,
    dequiv_twisted,
    dimension_diagnosis,
    equiv_fusion,
    find_near_group_subring,
    near_group_ring,
    out_group,
    principal_graph,
)


# --- dimension diagnosis -----------------------------------------------------

def test_dimension_diagnosis_rational():
    d = dimension_diagnosis(3, 2)
    assert d.rational and (d.s, d.t) == (3, 1) and d.d.value == 3.0


def test_dimension_diagnosis_irrational():
    d = dimension_diagnosis(2, 2)
    assert not d.rational
    assert abs(d.d.value - (1 + math.sqrt(3))) < 1e-15


def test_dimension_diagnosis_extraspecial_regime():
    # n = 2 t^2, m = t, d = 2t: here t = 2 gives (n, m) = (8, 2)
    d = dimension_diagnosis(8, 2)
    assert d.rational and (d.s, d.t) == (2, 2) and d.d.value == 4.0
    # the (8, 4) variant is irrational (m^2 + 4n = 48)
    assert not dimension_diagnosis(8, 4).rational


def test_dimension_diagnosis_inconsistent():
    d = dimension_diagnosis(6, 1)  # d = 3 but 6 != s t^2 with st = 3
    assert d.rational and d.inconsistent


# --- K(G, m) and graphs ------------------------------------------------------

def test_near_group_ring_z2():
    ring = near_group_ring(FiniteAbelianGroup((2,)), 2)
    assert ring.associativity_residual() == 0
    rho = ring.index[("rho",)]
    assert ring.N[rho, rho, rho] == 2
    assert abs(ring.dimension_of(("rho",)) - (1 + math.sqrt(3))) < 1e-12
    assert ring.dimension_residual() < 1e-9


def test_fibonacci_ring():
    ring = near_group_ring(None, 1)
    assert abs(ring.dimension_of(("rho",)) - (1 + math.sqrt(5)) / 2) < 1e-12


def test_ring_d_squared_identity(corpus_all):
    for name, s in corpus_all.items():
        ring = near_group_ring(s.group, s.m)
        d = ring.dimension_of(("rho",))
        assert abs(d * d - (s.n + s.m * d)) < 1e-12, name


def test_principal_graph_norm():
    G = FiniteAbelianGroup((3,))
    gr = principal_graph(G, 2)
    d = (6 + math.sqrt(36 + 12)) / 2
    assert abs(gr.norm_squared() - (1 + 2 * d)) < 1e-9
    # figure shape: each w_g meets v_g once and v_rho twice; w_pi meets v_rho
    M = gr.incidence
    assert M.shape == (4, 4)
    assert np.allclose(M[:3, :3], np.eye(3))
    assert np.allclose(M[3, :3], 2.0)
    assert M[3, 3] == 1.0
    dot = gr.to_dot()
    assert dot.count('"v_rho" -- "w_(0,)"') == 2
    assert gr.metadata["self_dual_note"]


def test_principal_graph_invalid_l():
    with pytest.raises(ValueError):
        principal_graph(FiniteAbelianGroup((2,)), 0)


# --- Out groups ----------------------------------------------------------------

def test_out_groups_mn():
    assert out_group(z2_m2()).order == 1
    assert out_group(z3_m3()).order == 1
    assert out_group(z4_m4()).order == 1
    res = out_group(z5_m5())
    assert res.order == 2 and res.isomorphism_type == "Z2"
    assert out_group(z2z2z3_m12()).order == 2


@pytest.mark.slow
def test_out_group_z3_m6_dihedral():
    res = out_group(z3_m6(), grid=120)
    assert res.order == 8
    assert res.isomorphism_type == "D8"


# --- de-equivariantization -------------------------------------------------------

def _z3z3_data():
    Z33 = FiniteAbelianGroup((3, 3))
    b = Bicharacter(Z33, ((Phase(1, 3), Phase(0)), (Phase(0), Phase(2, 3))))
    a = QuadraticForm(b, tuple(Phase((g[0] ** 2 - g[1] ** 2) % 3, 3) for g in Z33))
    return Z33, b, a


def test_dequiv_haagerup_pattern():
    Z33, b, a = _z3z3_data()
    lags = lagrangian_subgroups(Z33, b, a)
    assert len(lags) == 2
    for H in lags:
        ring = dequiv_fusion(Z33, b, a, H)
        s0 = ring.index[("sigma", min(l[1] for l in ring.labels if l[0] == "sigma"))]
        row = ring.N[s0, s0]
        # sigma^2 = 1 (+) sum_g alpha~_g sigma
        unit = ring.index[ring.unit_label()]
        assert row[unit] == 1
        sigma_idx = [ring.index[l] for l in ring.labels if l[0] == "sigma"]
        assert all(row[i] == 1 for i in sigma_idx)
        d_sigma = ring.dimensions()[s0]
        assert abs(d_sigma - (3 + math.sqrt(13)) / 2) < 1e-9


def test_dequiv_a7_even_part():
    s = z2z2_m4()
    G = s.group
    H = subgroup_generated_by(G, [(1, 1)])
    ring = dequiv_fusion(G, s.bichar, s.form, H)
    assert ring.rank == 4
    si = [i for i, l in enumerate(ring.labels) if l[0] == "sigma"][0]
    assert abs(ring.dimensions()[si] - (1 + math.sqrt(2))) < 1e-10


def test_dequiv_trivial_subgroup():
    s = z2z2_m4()
    H = subgroup_generated_by(s.group, [])
    ring = dequiv_fusion(s.group, s.bichar, s.form, H)
    assert ring.isomorphic_to(near_group_ring(s.group, 4))


def test_dequiv_rejects_nonisotropic():
    s = z2z2_m4()
    H = subgroup_generated_by(s.group, [(1, 0)])  # <g1, g1> = -1
    with pytest.raises(ValueError):
        dequiv_fusion(s.group, s.bichar, s.form, H)


def test_dequiv_dimension_bookkeeping():
    Z33, b, a = _z3z3_data()
    H = lagrangian_subgroups(Z33, b, a)[0]
    ring = dequiv_fusion(Z33, b, a, H)
    d_big = (9 + math.sqrt(81 + 36)) / 2
    s0 = ring.index[("sigma", (0, 0))]
    assert abs(ring.dimensions()[s0] - d_big / 3) < 1e-9  # d(sigma) = d / |H|


# --- twisted case ---------------------------------------------------------------

def _omega_table(G):
    two = {
        ((0, 0), (0, 0)): 1, ((0, 0), (1, 0)): 1, ((0, 0), (0, 1)): 1, ((0, 0), (1, 1)): 1,
        ((1, 0), (0, 0)): 1, ((1, 0), (1, 0)): 1, ((1, 0), (0, 1)): 1j, ((1, 0), (1, 1)): -1j,
        ((0, 1), (0, 0)): 1, ((0, 1), (1, 0)): -1j, ((0, 1), (0, 1)): 1, ((0, 1), (1, 1)): 1j,
        ((1, 1), (0, 0)): 1, ((1, 1), (1, 0)): 1j, ((1, 1), (0, 1)): -1j, ((1, 1), (1, 1)): 1,
    }
    return {((h[0], h[1], 0), (k[0], k[1], 0)): v for (h, k), v in two.items()}


def test_dequiv_twisted_z2z2z3_to_z3_m6():
    s = z2z2z3_m12()
    G = s.group
    H = subgroup_generated_by(G, [(1, 0, 0), (0, 1, 0)])
    ring = dequiv_twisted(G, s.bichar, s.form, H, _omega_table(G))
    assert ring.isomorphic_to(near_group_ring(FiniteAbelianGroup((3,)), 6))


def test_dequiv_twisted_rejects_bad_cocycle():
    s = z2z2z3_m12()
    G = s.group
    H = subgroup_generated_by(G, [(1, 0, 0), (0, 1, 0)])
    trivial = {(h, k): 1.0 for h in H.elements for k in H.elements}
    with pytest.raises(ValueError):
        dequiv_twisted(G, s.bichar, s.form, H, trivial)


def test_dequiv_twisted_s0_identity():
    # trivial H: s = 0, the transform returns K(G, m) itself
    s = z2_m2()
    H = subgroup_generated_by(s.group, [])
    ring = dequiv_twisted(s.group, s.bichar, s.form, H,
                          {((0,), (0,)): 1.0})
    assert ring.isomorphic_to(near_group_ring(s.group, 2))


# --- equivariantization -----------------------------------------------------------

def test_equiv_d8_contains_z2z2z3_m12():
    ring = equiv_fusion(FiniteAbelianGroup((3,)), 6, d8_rep_data())
    assert ring.associativity_residual() == 0
    sub = find_near_group_subring(ring)
    assert sub is not None
    target = near_group_ring(FiniteAbelianGroup((2, 2, 3)), 12)
    assert sub.isomorphic_to(target)


def test_equiv_z5_order_two():
    G = FiniteAbelianGroup((5,))
    theta = GroupAutomorphism(G, ((4,),))  # g -> -g
    ring = equiv_fusion(G, 5, theta)
    r1 = ring.index[("rho", 1)]
    row = ring.N[r1, r1]
    # rho~^2 = 1 + pi_1 + pi_2 + 3 rho~ + 2 gamma^ rho~
    assert row[ring.index[("g", (0,), 1)]] == 1
    assert row[ring.index[("pi", (1,))]] == 1
    assert row[ring.index[("pi", (2,))]] == 1
    assert row[r1] == 3
    assert row[ring.index[("rho", -1)]] == 2
    d = ring.dimensions()
    assert abs(d[r1] ** 2 - (5 + 5 * d[r1])) < 1e-8


def test_equiv_identity_doubles_trivially():
    G = FiniteAbelianGroup((5,))
    theta = GroupAutomorphism(G, ((1,),))
    ring = equiv_fusion(G, 5, theta)
    r1 = ring.index[("rho", 1)]
    assert ring.N[r1, r1, r1] == 5
    assert ring.N[r1, r1, ring.index[("rho", -1)]] == 0
