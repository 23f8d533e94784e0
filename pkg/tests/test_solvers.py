import math

import numpy as np
import pytest

from neargroup.abelian import (
    FiniteAbelianGroup,
    Phase,
    enumerate_bicharacters,
    even_quadratic_forms,
)
from neargroup.corpus import (
    corpus_mn,
    z2_m2,
    z2z2_gram2,
    z2z2_m4,
    z3_m6,
    z4_m4,
)
from neargroup.solutions import equivalent
from neargroup.solvers import SolveConfig, classify, pair_classes, solve_m2n, solve_mn

FAST = SolveConfig(random_starts=40)


def _pair(n, k=1, which=0):
    G = FiniteAbelianGroup((n,))
    b = [x for x in enumerate_bicharacters(G, True) if x.gram[0][0] == Phase(k, n)][0]
    return G, b, even_quadratic_forms(b)[which]


def test_solve_mn_z2_unique():
    G, b, a = _pair(2)
    a = [f for f in even_quadratic_forms(b) if f.phase((1,)) == Phase(1, 4)][0]
    sols = solve_mn(G, b, a, FAST)
    assert len(sols) == 1
    assert abs(sols[0].b[1] - (1 - 1j) / 2) < 1e-9
    assert abs(sols[0].d - (1 + math.sqrt(3))) < 1e-12
    assert equivalent(sols[0], z2_m2())


def test_solve_mn_z4_unique_class():
    G = FiniteAbelianGroup((4,))
    b = [x for x in enumerate_bicharacters(G, True) if x.gram[0][0] == Phase(1, 4)][0]
    good = [f for f in even_quadratic_forms(b) if f.phase((1,)) == Phase(7, 8)][0]
    sols = solve_mn(G, b, good, FAST)
    assert sols and all(equivalent(s, z4_m4()) for s in sols)
    assert abs(sols[0].d - (2 + 2 * math.sqrt(2))) < 1e-12
    other = [f for f in even_quadratic_forms(b) if f.phase((1,)) == Phase(3, 8)][0]
    assert solve_mn(G, b, other, FAST) == []


def test_solve_mn_z2z2_second_bicharacter_empty():
    G = FiniteAbelianGroup((2, 2))
    b2 = z2z2_gram2()
    for a in even_quadratic_forms(b2):
        assert solve_mn(G, b2, a, FAST) == []


def test_solve_m2n_z3_family():
    G, b, a = _pair(3)
    sols, feas = solve_m2n(G, b, a, SolveConfig(random_starts=10))
    assert len(sols) == 1
    assert equivalent(sols[0], z3_m6(), grid=200)
    surviving = [f for f in feas if f.feasible]
    assert len(surviving) == 1


def test_solve_m2n_z2_empty_certified():
    G, b, a = _pair(2)
    sols, feas = solve_m2n(G, b, a, SolveConfig(random_starts=5))
    assert sols == []
    assert all(not f.feasible for f in feas)


def test_pair_classes_galois_orbits():
    # Z5: the two Aut-orbits of pairs lie in one Galois orbit
    G = FiniteAbelianGroup((5,))
    pairs = pair_classes(G)
    assert len(pairs) == 2
    assert len({orbit for _, _, orbit in pairs}) == 1
    # Z3: the two bicharacters are Galois partners as well
    pairs3 = pair_classes(FiniteAbelianGroup((3,)))
    assert len(pairs3) == 2
    assert len({orbit for _, _, orbit in pairs3}) == 1


def test_classify_counts_mn():
    for factors, m in [((2,), 2), ((3,), 3), ((2, 2), 4)]:
        res = classify(FiniteAbelianGroup(factors), m, FAST)
        assert res.num_classes == 1, (factors, res.summary())
        assert res.completeness == "COMPLETE"


def test_classify_z2z2_m4_matches_bundled():
    res = classify(FiniteAbelianGroup((2, 2)), 4, FAST)
    assert res.num_classes == 1
    assert equivalent(res.classes[0].solution, z2z2_m4())


def test_classify_rejects_bad_m():
    with pytest.raises(ValueError):
        classify(FiniteAbelianGroup((2,)), 3, FAST)  # not a multiple of |G|
    with pytest.raises(ValueError):
        classify(FiniteAbelianGroup((3,)), 0, FAST)


def test_classify_dedup_idempotence():
    """Different seeds give equal class counts with pairwise-equivalent reps."""
    G = FiniteAbelianGroup((3,))
    r1 = classify(G, 3, SolveConfig(seed=1, random_starts=40))
    r2 = classify(G, 3, SolveConfig(seed=2, random_starts=40))
    assert r1.num_classes == r2.num_classes == 1
    assert r1.num_classes_absolute == r2.num_classes_absolute
    for c1 in r1.classes:
        assert any(equivalent(c1.solution, c2.solution) for c2 in r2.classes)
    assert {c.fingerprint for c in r1.classes} == {c.fingerprint for c in r2.classes}


def test_emitted_solutions_pass_oracle():
    """Solver outputs pass the residual system at 1e-10 and the Cuntz oracle
    at 1e-9 (checked on the cheapest alphabet)."""
    from neargroup.cuntz import oracle_check
    from neargroup.solutions import residual_mn
    from neargroup.tuples import to_tuple

    G, b, a = _pair(2)
    a = [f for f in even_quadratic_forms(b) if f.phase((1,)) == Phase(1, 4)][0]
    (s,) = solve_mn(G, b, a, FAST)
    assert residual_mn(s, 1e-10).passed
    assert oracle_check(to_tuple(s), tolerance=1e-9).passed


def test_heuristic_search_smoke():
    """m > 2n fallback runs and finds nothing for (Z2, m=6), as expected."""
    from neargroup.solvers import heuristic_search

    G, b, a = _pair(2)
    out = heuristic_search(G, b, a, 6, SolveConfig(heuristic_starts=2))
    assert out == []
