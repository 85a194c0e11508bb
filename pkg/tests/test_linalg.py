from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mhsctl.linalg import DimensionError, Matrix, QuotientMap, Subspace, image, kernel, preimage, solve
from mhsctl.scalars import ONE, ZERO, GaussScalar

entries = st.builds(GaussScalar, st.integers(-2, 2), st.integers(-1, 1))


def matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(entries, min_size=c, max_size=c), min_size=r, max_size=r).map(Matrix)
        )
    )


def vectors_in(d, max_count=3):
    return st.lists(st.lists(entries, min_size=d, max_size=d).map(tuple), max_size=max_count)


def _numeric(M: Matrix) -> np.ndarray:
    return np.array([[complex(x) for x in row] for row in M.rows], dtype=complex).reshape(M.nrows, M.ncols)


@settings(max_examples=80)
@given(matrices())
def test_rank_matches_numeric_rank(M):
    assert M.rank() == np.linalg.matrix_rank(_numeric(M), tol=1e-9)


@settings(max_examples=80)
@given(matrices())
def test_rank_nullity_and_kernel(M):
    K = kernel(M)
    assert K.dim + M.rank() == M.ncols
    for v in K.basis:
        assert all(x == 0 for x in M.apply(v))
    assert image(M).dim == M.rank()


@settings(max_examples=60)
@given(matrices(), st.data())
def test_solve_finds_solutions_of_consistent_systems(M, data):
    x = data.draw(st.lists(entries, min_size=M.ncols, max_size=M.ncols))
    b = M.apply(x)
    y = solve(M, b)
    assert y is not None and M.apply(y) == b


def test_solve_reports_inconsistency():
    M = Matrix([[1, 0], [0, 0]])
    assert solve(M, [0, 1]) is None


@settings(max_examples=60)
@given(st.integers(1, 4).flatmap(lambda d: st.tuples(st.just(d), vectors_in(d), vectors_in(d))))
def test_sum_and_intersection_dimensions(args):
    d, a, b = args
    A, B = Subspace(d, a), Subspace(d, b)
    S, X = A + B, A & B
    assert S.dim + X.dim == A.dim + B.dim
    assert X <= A and X <= B and A <= S and B <= S


@settings(max_examples=60)
@given(st.integers(1, 4).flatmap(lambda d: st.tuples(st.just(d), vectors_in(d))))
def test_annihilator_cuts_out_the_subspace(args):
    d, a = args
    A = Subspace(d, a)
    ann = A.annihilator()
    assert kernel(ann) == A if ann.nrows else A.is_full()


def test_subspace_equality_is_basis_independent():
    A = Subspace(3, [(1, 1, 0), (0, 1, 1)])
    B = Subspace(3, [(1, 2, 1), (1, 0, -1)])
    assert A == B and hash(A) == hash(B)


@settings(max_examples=40)
@given(st.integers(2, 4).flatmap(lambda d: st.tuples(st.just(d), vectors_in(d), vectors_in(d))))
def test_quotient_coordinates_round_trip(args):
    d, a, b = args
    A = Subspace(d, a)
    B = A + Subspace(d, b)
    q = QuotientMap(A, B)
    assert q.dim == B.dim - A.dim
    for coords in ([ONE if i == j else ZERO for i in range(q.dim)] for j in range(q.dim)):
        assert q(q.lift(coords)) == tuple(coords)
    for v in A.basis:
        assert q(v) == tuple([ZERO] * q.dim)


def test_quotient_requires_containment():
    with pytest.raises(ValueError):
        QuotientMap(Subspace(2, [(1, 0)]), Subspace(2, [(0, 1)]))


def test_induced_map_on_quotients():
    # N: e1 -> e2 -> e3 induces e1 -> e2 on <e1,e2,e3>/<e3> -> <e2,e3>/<e3>
    N = Matrix([[0, 0, 0], [1, 0, 0], [0, 1, 0]])
    full = Subspace.full(3)
    e3 = Subspace(3, [(0, 0, 1)])
    src = QuotientMap(e3, full)
    tgt = QuotientMap(e3, Subspace(3, [(0, 1, 0), (0, 0, 1)]))
    ind = src.induced(N, tgt)
    assert ind.rank() == 1


def test_preimage():
    N = Matrix([[0, 0], [1, 0]])
    assert preimage(N, Subspace.zero(2)) == kernel(N)
    assert preimage(N, Subspace(2, [(0, 1)])).is_full()


def test_inverse_and_dimension_errors():
    M = Matrix([[1, 2], [3, GaussScalar(0, 1)]])
    assert M @ M.inverse() == Matrix.identity(2)
    with pytest.raises(DimensionError):
        Subspace(2, [(1, 2, 3)])
    with pytest.raises(DimensionError):
        solve(M, [1])


def test_string_round_trip():
    M = Matrix([[GaussScalar(1, -1), 0], [GaussScalar(0, 1) / 2, 3]])
    assert Matrix.from_strings(M.to_strings()) == M
