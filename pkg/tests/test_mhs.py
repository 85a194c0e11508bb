from __future__ import annotations

import random
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mhsctl.fixtures import four_dim_orbit, pure_orbit, random_pure_orbit, three_nilpotent_orbit
from mhsctl.linalg import Matrix, Subspace
from mhsctl.mhs import (
    DecreasingFiltration,
    FiltrationError,
    IncreasingFiltration,
    MixedHodgeStructure,
    Pairing,
    check_mhs,
    direct_sum,
    gr_W,
    has_type,
    hom_from_Q,
    real_spanning_vectors,
    subquotient,
    tate_twist,
)
from mhsctl.scalars import GaussScalar

U = [tuple(1 if i == j else 0 for i in range(4)) for j in range(4)]


def _fixture():
    return four_dim_orbit().limit


def test_fixture_is_a_mixed_hodge_structure():
    assert check_mhs(_fixture())


def test_graded_pieces_of_the_fixture():
    H = _fixture()
    assert [gr_W(H, k).dim for k in (-2, -1, 0)] == [1, 2, 1]
    for k in (-2, -1, 0):
        assert check_mhs(gr_W(H, k))
    # types: u3 is (-1,-1), u1 is (1,-2), u4 is (-2,1), u2 is (0,0)
    assert has_type(H, -2, U[2], -1, -1)
    assert has_type(H, -1, U[0], 1, -2)
    assert has_type(H, -1, U[3], -2, 1)
    assert has_type(H, 0, U[1], 0, 0)


def test_swapped_hodge_step_fails_purity_with_witness():
    H = _fixture()
    half = GaussScalar(1) / 2
    F = DecreasingFiltration(
        4,
        {2: [], 1: [U[0], U[3]], 0: [U[0], U[3], (0, 1, half, 0)], -1: U},
    )
    v = check_mhs(replace(H, F=F))
    assert not v
    assert v.clause == "purity"
    assert (v.witness["k"], v.witness["p"]) == (-1, 1)


def test_non_real_weight_filtration_is_rejected():
    H = _fixture()
    W = IncreasingFiltration(4, {-3: [], -2: [U[0]], -1: [U[0], U[2], U[3]], 0: U})
    v = check_mhs(replace(H, W=W))
    assert not v and v.clause == "W"


def test_non_involutive_conjugation_is_rejected():
    H = _fixture()
    v = check_mhs(replace(H, J=Matrix.identity(4).scale(2)))
    assert not v and v.clause == "J"


def test_filtrations_validate_monotonicity():
    with pytest.raises(FiltrationError):
        IncreasingFiltration(2, {0: [(1, 0)], 1: [(0, 1)]})
    with pytest.raises(FiltrationError):
        DecreasingFiltration(2, {0: [(1, 0)], 1: [(0, 1)]})


def test_filtration_lookup_conventions():
    W = IncreasingFiltration(2, {-1: [(1, 0)], 1: [(1, 0), (0, 1)]})
    assert W[-5].is_zero() and W[0].dim == 1 and W[7].is_full()
    F = DecreasingFiltration(2, {0: [(1, 0), (0, 1)], 2: [(1, 0)]})
    assert F[3].is_zero() and F[1].dim == 1 and F[-4].is_full()


def test_tate_twist_shifts_both_filtrations():
    H = _fixture()
    T = tate_twist(H, -1)
    for k in range(-4, 3):
        assert T.W[k] == H.W[k - 2]
    for p in range(-3, 3):
        assert T.F[p] == H.F[p - 1]
    assert T.F[0] == H.F[-1]
    assert T.twist == H.twist - 1
    assert T.J == -H.J
    assert check_mhs(T)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(-2, 2), st.integers(-2, 2))
def test_twists_compose_and_preserve_the_axioms(seed, a, b):
    H = random_pure_orbit(random.Random(seed)).limit
    Tab = tate_twist(tate_twist(H, a), b)
    T = tate_twist(H, a + b)
    assert Tab.W == T.W and Tab.F == T.F and Tab.J == T.J and Tab.twist == T.twist
    assert bool(check_mhs(Tab)) == bool(check_mhs(H))


def test_direct_sum_and_subquotient():
    H = _fixture()
    S = direct_sum([H, MixedHodgeStructure.unit()])
    assert S.dim == 5 and check_mhs(S)
    G, q = subquotient(H, H.W[-2], H.W[-1])
    assert G.dim == 2 and check_mhs(G)
    assert q.dim == 2


def test_hom_from_unit_structures():
    assert hom_from_Q(MixedHodgeStructure.unit()).dim == 1
    assert hom_from_Q(pure_orbit().limit).dim == 0
    assert hom_from_Q(_fixture()).dim == 0
    assert hom_from_Q(tate_twist(MixedHodgeStructure.unit(), 1)).dim == 0
    # Gr^W_0 of the three-nilpotent example is Q^2
    H = three_nilpotent_orbit().limit
    G, _ = subquotient(H, H.W[-1], H.W[0])
    assert hom_from_Q(G).dim == 2


def test_hom_from_rejects_non_structures():
    H = _fixture()
    bad = replace(H, F=DecreasingFiltration.trivial(4, 0))
    with pytest.raises(ValueError):
        hom_from_Q(bad)


def test_real_spanning_vectors_are_real():
    H = _fixture()
    vecs = real_spanning_vectors(H, H.W[-1])
    assert len(vecs) == 3
    assert all(H.is_real(v) for v in vecs)


def test_pairing_predicates():
    P = four_dim_orbit().pairing
    assert P.is_skew() and not P.is_symmetric() and P.is_nondegenerate()
    assert P(U[1], U[2]) == 1 and P(U[0], U[3]) == GaussScalar(1) / 2
    assert P.orthogonal(Subspace(4, [U[0]]), Subspace(4, [U[1], U[2]])) is None
    assert P.orthogonal(Subspace(4, [U[0]]), Subspace(4, [U[3]])) is not None
    assert not Pairing(Matrix([[1, 0], [0, 0]]), 0).is_nondegenerate()
