"""Independent reference computations used by the tests.

Nothing here calls into the library's linear algebra: ranks are computed
by a separate Fraction-based elimination or numerically with numpy.
"""
from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

import numpy as np


def frac_rank(rows) -> int:
    """Rank of a rational matrix by plain Gaussian elimination."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][c] != 0:
                f = m[r][c] / m[rank][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def _as_fracs(M) -> list:
    return [[Fraction(x.re) if hasattr(x, "re") else Fraction(x) for x in row] for row in M]


def _mul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def _identity(d):
    return [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]


def _columns_basis(M) -> list:
    """Independent columns of ``M`` (greedy)."""
    cols = [[row[j] for row in M] for j in range(len(M[0]))]
    picked: list = []
    for c in cols:
        if frac_rank(picked + [c]) > len(picked):
            picked.append(c)
    return picked


def image_complex_h1(Ns) -> int:
    """``dim H^1`` of the image subcomplex of the Koszul complex of rational ``Ns``."""
    Ns = [_as_fracs(N.rows) for N in Ns]
    n, d = len(Ns), len(Ns[0])
    pairs = list(combinations(range(n), 2))
    # I^1 = ⊕ Im N_i, I^2 = ⊕ Im N_i N_j
    basis1 = []
    for i, N in enumerate(Ns):
        for v in _columns_basis(N):
            vec = [Fraction(0)] * (n * d)
            vec[i * d : (i + 1) * d] = v
            basis1.append(vec)
    # d_1(x)_{(i,j)} = N_i x_j - N_j x_i  for i < j
    def d1(x):
        out = []
        for i, j in pairs:
            xi, xj = x[i * d : (i + 1) * d], x[j * d : (j + 1) * d]
            Ni_xj = [sum(Ns[i][r][c] * xj[c] for c in range(d)) for r in range(d)]
            Nj_xi = [sum(Ns[j][r][c] * xi[c] for c in range(d)) for r in range(d)]
            out.extend(a - b for a, b in zip(Ni_xj, Nj_xi))
        return out

    if pairs and basis1:
        images = [d1(v) for v in basis1]
        cycles = len(basis1) - frac_rank(images)
    else:
        cycles = len(basis1)
    # d_0(x) = (N_i x)_i on I^0 = H
    d0_cols = []
    for c in range(d):
        e = [Fraction(int(r == c)) for r in range(d)]
        col = []
        for N in Ns:
            col.extend(sum(N[r][k] * e[k] for k in range(d)) for r in range(d))
        d0_cols.append(col)
    boundaries = frac_rank(d0_cols)
    return cycles - boundaries


def random_nilpotent(rng: random.Random, d: int) -> list:
    """``P L P^{-1}`` with ``L`` strictly lower triangular and ``P`` unimodular."""
    L = [[Fraction(rng.randint(-2, 2)) if r > c and rng.random() < 0.6 else Fraction(0) for c in range(d)] for r in range(d)]
    lower = _identity(d)
    upper = _identity(d)
    for r in range(d):
        for c in range(d):
            if r > c:
                lower[r][c] = Fraction(rng.randint(-1, 1))
            elif r < c:
                upper[r][c] = Fraction(rng.randint(-1, 1))
    P = _mul(lower, upper)
    Pinv = np.linalg.inv(np.array(P, dtype=float))
    Pinv = [[Fraction(round(x)) for x in row] for row in Pinv]
    assert _mul(P, Pinv) == _identity(d)
    return _mul(_mul(P, L), Pinv)


def _np(M) -> np.ndarray:
    return np.array([[complex(x) for x in row] for row in M], dtype=complex)


def _rank(vectors, d) -> int:
    if not vectors:
        return 0
    return int(np.linalg.matrix_rank(np.array(vectors, dtype=complex).reshape(len(vectors), d), tol=1e-8))


def monodromy_properties_hold(N, steps: dict, center: int) -> bool:
    """``N M_k ⊆ M_{k-2}`` and ``N^j`` maps ``Gr_{c+j}`` isomorphically onto ``Gr_{c-j}``.

    ``N`` is a square list of numbers, ``steps`` maps ``k`` to spanning vectors
    for every ``k`` in a window that covers all jumps (zero below, full above).
    """
    A = _np(N)
    d = A.shape[0]
    keys = sorted(steps)
    lo, hi = keys[0], keys[-1]

    def M(k):
        if k < lo:
            return []
        if k > hi:
            return [list(r) for r in np.eye(d)]
        return [list(map(complex, v)) for v in steps[k]]

    for k in range(lo - 1, hi + 2):
        Mk2 = M(k - 2)
        imgs = [list(A @ np.array(v)) for v in M(k)]
        if _rank(Mk2 + imgs, d) != _rank(Mk2, d):
            return False
    reach = max(hi - center, center - lo) + 2
    for j in range(1, reach):
        Aj = np.linalg.matrix_power(A, j)
        gr_top = _rank(M(center + j), d) - _rank(M(center + j - 1), d)
        gr_bot = _rank(M(center - j), d) - _rank(M(center - j - 1), d)
        if gr_top != gr_bot:
            return False
        imgs = [list(Aj @ np.array(v)) for v in M(center + j)]
        if _rank(imgs + M(center - j - 1), d) != _rank(M(center - j), d):
            return False
    return True


def koszul_dims(Ns, d: int) -> list:
    """``dim H^k`` of the full Koszul complex of ``Ns`` on ``C^d``, numerically."""
    A = [_np(N.rows) for N in Ns]
    n = len(A)
    subsets = [list(combinations(range(n), k)) for k in range(n + 1)]

    def diff(k):
        src, tgt = subsets[k], subsets[k + 1]
        D = np.zeros((len(tgt) * d, len(src) * d), dtype=complex)
        for r, J in enumerate(tgt):
            for pos, j in enumerate(J):
                I = J[:pos] + J[pos + 1 :]
                c = src.index(I)
                D[r * d : (r + 1) * d, c * d : (c + 1) * d] += (-1) ** pos * A[j]
        return D

    ranks = [int(np.linalg.matrix_rank(diff(k), tol=1e-8)) if n else 0 for k in range(n)]
    out = []
    for k in range(n + 1):
        size = len(subsets[k]) * d
        kernel = size - (ranks[k] if k < n else 0)
        out.append(kernel - (ranks[k - 1] if k > 0 else 0))
    return out
