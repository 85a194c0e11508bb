from __future__ import annotations

import random
from dataclasses import replace
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import monodromy_properties_hold, random_nilpotent

from mhsctl.fixtures import (
    four_dim_orbit,
    pure_orbit,
    random_pure_orbit,
    split_tate_orbit,
    three_nilpotent_orbit,
    transform_orbit,
    random_real_change,
)
from mhsctl.linalg import Matrix, Subspace
from mhsctl.mhs import DecreasingFiltration, IncreasingFiltration
from mhsctl.orbits import (
    NilpotentOrbit,
    check_griffiths,
    check_pure_nilpotent_orbit,
    check_real_operator,
    cone_weights,
    construct_four_vector_basis,
    jordan_chains,
    monodromy_filtration,
    relative_monodromy_filtration,
    validate_four_vector_basis,
    verify_monodromy_filtration,
    verify_relative_filtration,
)
from mhsctl.scalars import GaussScalar

U = [tuple(1 if i == j else 0 for i in range(4)) for j in range(4)]


# monodromy filtration --------------------------------------------------------

def _steps_window(M: IncreasingFiltration, lo: int, hi: int) -> dict:
    return {k: list(M[k].basis) for k in range(lo, hi + 1)}


def test_jordan_block_matches_brute_force_search():
    # N e1 = e2; search every increasing filtration indexed -2..1 built from
    # the lines of Q^2 spanned by small vectors and keep those with both properties
    N = [[0, 0], [1, 0]]
    candidates = [[], [(1, 0)], [(0, 1)], [(1, 1)], [(1, -1)], [(1, 0), (0, 1)]]
    dims = {0: 0, 1: 1, 2: 1, 3: 1, 4: 1, 5: 2}
    valid = []
    for choice in product(range(len(candidates)), repeat=4):
        ds = [dims[c] for c in choice]
        if ds != sorted(ds):
            continue
        spaces = [Subspace(2, candidates[c]) for c in choice]
        if any(not a <= b for a, b in zip(spaces, spaces[1:])):
            continue
        steps = {k: candidates[c] for k, c in zip(range(-2, 2), choice)}
        if monodromy_properties_hold(N, steps, 0):
            valid.append(tuple(spaces))
    assert len(set(valid)) == 1
    M = monodromy_filtration(Matrix(N), 0)
    assert tuple(M[k] for k in range(-2, 2)) == valid[0]


def test_fixture_weight_is_the_monodromy_filtration():
    orbit = four_dim_orbit()
    assert monodromy_filtration(orbit.N[0], -1) == orbit.limit.W


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6), st.integers(-2, 2))
def test_monodromy_filtration_has_both_defining_properties(seed, d, center):
    N = random_nilpotent(random.Random(seed), d)
    M = monodromy_filtration(Matrix(N), center)
    lo, hi = M.span()
    assert monodromy_properties_hold(N, _steps_window(M, lo - 1, hi), center)
    assert verify_monodromy_filtration(Matrix(N), M, center)


def test_monodromy_rejects_non_nilpotent():
    with pytest.raises(ValueError):
        monodromy_filtration(Matrix([[1, 0], [0, 0]]))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6))
def test_jordan_chains_form_a_basis(seed, d):
    N = Matrix(random_nilpotent(random.Random(seed), d))
    vecs = []
    for top, length in jordan_chains(N):
        w = top
        for _ in range(length):
            vecs.append(w)
            w = N.apply(w)
        assert not any(w)
    assert len(vecs) == d and Subspace(d, vecs).dim == d


# relative filtration -----------------------------------------------------------

def test_relative_filtration_exists_for_a_split_extension():
    # e (weight 0) maps to f (weight -2)
    N = Matrix([[0, 0], [1, 0]])
    Wp = IncreasingFiltration(2, {-3: [], -2: [(0, 1)], 0: [(1, 0), (0, 1)]})
    M = relative_monodromy_filtration(N, Wp)
    assert M is not None and verify_relative_filtration(N, Wp, M)
    assert M[-2] == Subspace(2, [(0, 1)]) and M[-1] == M[-2] and M[0].is_full()


def test_relative_filtration_absent_when_n_lowers_weight_by_one():
    N = Matrix([[0, 0], [1, 0]])
    Wp = IncreasingFiltration(2, {-2: [], -1: [(0, 1)], 0: [(1, 0), (0, 1)]})
    assert relative_monodromy_filtration(N, Wp) is None


def test_relative_filtration_rejects_non_preserving_operator():
    N = Matrix([[0, 1], [0, 0]])
    Wp = IncreasingFiltration(2, {-1: [], 0: [(0, 1)], 1: [(1, 0), (0, 1)]})
    with pytest.raises(ValueError):
        relative_monodromy_filtration(N, Wp)


def test_relative_filtration_with_nontrivial_graded_pieces():
    # Wp_{-1} = <u1..u4> carries the fixture N; e maps onto u3 (weight -2)
    d = 5
    rows = [[0] * d for _ in range(d)]
    rows[2][1] = 1
    rows[2][4] = 1
    N = Matrix(rows)
    base = [tuple(1 if i == j else 0 for i in range(d)) for j in range(d)]
    Wp = IncreasingFiltration(d, {-2: [], -1: base[:4], 0: base})
    M = relative_monodromy_filtration(N, Wp)
    assert M is not None
    assert verify_relative_filtration(N, Wp, M)


# pure orbit check ----------------------------------------------------------------

@pytest.mark.parametrize(
    "make", [four_dim_orbit, three_nilpotent_orbit, split_tate_orbit, pure_orbit, lambda: four_dim_orbit(n=3)]
)
def test_known_orbits_pass(make):
    v = check_pure_nilpotent_orbit(make())
    assert v, v.summary()


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_random_orbits_pass_and_survive_real_base_change(seed):
    rng = random.Random(seed)
    orbit = random_pure_orbit(rng, change_basis=False)
    assert check_pure_nilpotent_orbit(orbit)
    g = random_real_change(rng, orbit.limit.J)
    assert check_pure_nilpotent_orbit(transform_orbit(orbit, g))


def test_non_real_nilpotent_fails_real_clause():
    orbit = four_dim_orbit()
    N = orbit.N[0].scale(GaussScalar(0, 1))
    v = check_pure_nilpotent_orbit(orbit.with_N([N]))
    assert not v and "real" in v.clauses
    assert not check_real_operator(orbit.limit.J, N)


def test_griffiths_violation_reports_the_step():
    orbit = four_dim_orbit()
    # u1 -> u4 sends F^0 (which contains u1) outside F^{-1}
    rows = [[0] * 4 for _ in range(4)]
    rows[3][0] = 1
    N = Matrix(rows)
    p, vec = check_griffiths(orbit.limit.F, N)
    assert p == 0 and not orbit.limit.F[-1].contains(N.apply(vec))
    v = check_pure_nilpotent_orbit(orbit.with_N([N]))
    assert not v and "transversality" in v.clauses


def test_wrong_weight_filtration_fails_weight_clause():
    orbit = four_dim_orbit()
    v = check_pure_nilpotent_orbit(orbit.with_N([orbit.N[0].scale(0)]))
    assert not v and v.clause == "weight"


def test_polarization_clauses():
    orbit = four_dim_orbit()
    P = orbit.pairing
    v = check_pure_nilpotent_orbit(replace(orbit, pairing=replace(P, weight=0)))
    assert "polarization:symmetry" in v.clauses


    def with_entry(i, j):
        rows = [list(r) for r in P.matrix.rows]
        rows[i][j] += 1
        rows[j][i] -= 1
        return replace(orbit, pairing=replace(P, matrix=Matrix(rows)))

    assert "polarization:isometry" in check_pure_nilpotent_orbit(with_entry(2, 3)).clauses
    assert "polarization:hodge-orthogonality" in check_pure_nilpotent_orbit(with_entry(0, 1)).clauses


def test_cone_weights_are_positive_and_seeded():
    a = cone_weights(3, seed=5)
    assert a == cone_weights(3, seed=5)
    assert all(all(x > 0 for x in w) for w in a)
    assert cone_weights(1) == [(1,)]


def test_three_nilpotent_faces_differ_from_the_cone():
    # a single N_i has rank 1 while W has Gr_0 of dimension 2, so faces
    # of the cone carry a different filtration than W
    orbit = three_nilpotent_orbit()
    W = orbit.limit.W
    assert monodromy_filtration(orbit.N[0], -1) != W
    assert monodromy_filtration(orbit.total(), -1) == W


# four-vector basis ------------------------------------------------------------------

def test_basis_construction_on_the_fixture():
    orbit = four_dim_orbit()
    b = construct_four_vector_basis(orbit)
    assert validate_four_vector_basis(orbit, b.u, b.a)
    assert b.a == GaussScalar(1) / 2
    assert b.H2.dim == 0
    s, r = b.pairing_constants(orbit.pairing)
    assert (s, r) == (1, GaussScalar(1) / 2)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_basis_construction_survives_real_base_change(seed):
    rng = random.Random(seed)
    orbit = four_dim_orbit()
    g = random_real_change(rng, orbit.limit.J)
    moved = transform_orbit(orbit, g)
    b = construct_four_vector_basis(moved)
    v = validate_four_vector_basis(moved, b.u, b.a)
    assert v, v.summary()


def test_basis_validation_clauses():
    orbit = four_dim_orbit()
    b = construct_four_vector_basis(orbit)
    u = list(b.u)
    assert validate_four_vector_basis(orbit, [u[0], u[0], u[2], u[3]], b.a).clause == "independence"
    assert not validate_four_vector_basis(orbit, [u[3], u[1], u[2], u[0]], b.a)
    assert not validate_four_vector_basis(orbit, u, b.a + 1)


def test_basis_needs_rank_one_square_zero():
    orbit = pure_orbit()
    with pytest.raises(ValueError):
        construct_four_vector_basis(orbit)
    with pytest.raises(ValueError):
        construct_four_vector_basis(four_dim_orbit(n=2))


def test_orbit_helpers():
    o = four_dim_orbit()
    assert o.pullback(3).n == 3 and o.dim == 4
    assert isinstance(o.with_N([o.N[0]]), NilpotentOrbit)
    with pytest.raises(ValueError):
        o.pullback(2).pullback(2)
    F = DecreasingFiltration.from_frame(4, [U[0], U[1]], 1)
    assert F[1].dim == 0 and F[0].dim == 1 and F[-1].dim == 2
