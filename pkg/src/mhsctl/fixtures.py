"""Built-in nilpotent orbits and random orbit generators.

The four-dimensional orbit is written in the basis ``u_1..u_4``:
``conj u_1 = u_4``, ``u_2`` real, ``u_3`` imaginary, ``N u_2 = u_3``.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .linalg import Matrix, Subspace
from .mhs import DecreasingFiltration, IncreasingFiltration, MixedHodgeStructure, Pairing
from .orbits import NilpotentOrbit
from .scalars import ONE, ZERO, GaussScalar, as_scalar

__all__ = [
    "four_dim_orbit",
    "four_dim_conj",
    "four_dim_N",
    "four_dim_pairing",
    "three_nilpotent_orbit",
    "split_tate_orbit",
    "pure_orbit",
    "random_pure_orbit",
    "random_commuting_family",
    "random_real_change",
    "transform_orbit",
    "DEFAULT_A",
    "DEFAULT_S",
    "DEFAULT_R",
]

# u_2 + a u_3 ∈ F^0, <u_2, u_3> = s, <u_1, u_4> = r; r/s is the constant C.
DEFAULT_A = Fraction(1, 2)
DEFAULT_S = Fraction(1)
DEFAULT_R = Fraction(1, 2)


def _unit(n: int, i: int) -> tuple:
    return tuple(ONE if k == i else ZERO for k in range(n))


def four_dim_conj() -> Matrix:
    return Matrix([[0, 0, 0, 1], [0, 1, 0, 0], [0, 0, -1, 0], [1, 0, 0, 0]])


def four_dim_N() -> Matrix:
    return Matrix([[0, 0, 0, 0], [0, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 0]])


def four_dim_pairing(s=DEFAULT_S, r=DEFAULT_R) -> Pairing:
    s, r = as_scalar(s), as_scalar(r)
    Q = Matrix([[0, 0, 0, r], [0, 0, s, 0], [0, -s, 0, 0], [-r, 0, 0, 0]])
    return Pairing(Q, -1)


def four_dim_orbit(a=DEFAULT_A, s=DEFAULT_S, r=DEFAULT_R, n: int = 1) -> NilpotentOrbit:
    """Weight ``-1`` orbit on ``u_1..u_4`` with ``F^1 = <u_1>``,
    ``F^0 = <u_1, u_2 + a u_3>``, ``F^{-1} = <u_1, u_2, u_3>``."""
    a = as_scalar(a)
    u1, u2, u3, u4 = (_unit(4, i) for i in range(4))
    W = IncreasingFiltration(4, {-3: [], -2: [u3], -1: [u1, u3, u4], 0: [u1, u2, u3, u4]})
    F = DecreasingFiltration(
        4,
        {
            2: [],
            1: [u1],
            0: [u1, tuple(x + a * y for x, y in zip(u2, u3))],
            -1: [u1, u2, u3],
            -2: [u1, u2, u3, u4],
        },
    )
    H = MixedHodgeStructure(4, W, F, four_dim_conj(), labels=("u1", "u2", "u3", "u4"))
    return NilpotentOrbit(H, tuple([four_dim_N()] * n), four_dim_pairing(s, r), -1)


def three_nilpotent_orbit() -> NilpotentOrbit:
    """``Gr^W_0 = Q^2`` (basis ``e_1, e_2``), ``Gr^W_{-2} = Q(1)^2`` (basis
    ``f_1, f_2``) and three nilpotents ``e -> f`` given by the symmetric
    matrices ``[[1,0],[0,0]]``, ``[[0,0],[0,1]]``, ``[[1,1],[1,1]]``."""
    blocks = ([[1, 0], [0, 0]], [[0, 0], [0, 1]], [[1, 1], [1, 1]])
    Ns = []
    for A in blocks:
        rows = [[0] * 4 for _ in range(4)]
        for i in range(2):
            for j in range(2):
                rows[2 + i][j] = A[i][j]
        Ns.append(Matrix(rows))
    e1, e2, f1, f2 = (_unit(4, i) for i in range(4))
    W = IncreasingFiltration(4, {-3: [], -2: [f1, f2], 0: [e1, e2, f1, f2]})
    F = DecreasingFiltration(4, {1: [], 0: [e1, e2], -1: [e1, e2, f1, f2]})
    J = Matrix([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]])
    H = MixedHodgeStructure(4, W, F, J, labels=("e1", "e2", "f1", "f2"))
    Q = Matrix([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]])
    return NilpotentOrbit(H, tuple(Ns), Pairing(Q, -1), -1)


def split_tate_orbit() -> NilpotentOrbit:
    """``Gr^W_0`` of types ``(1,-1), (-1,1)`` mapped by ``N`` onto ``Gr^W_{-2}``
    of types ``(0,-2), (-2,0)``; no real class of ``Gr^W_{-2}`` lies in ``F^{-1}``."""
    e1, e2, f1, f2 = (_unit(4, i) for i in range(4))
    J = Matrix([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, -1, 0]])
    N = Matrix([[0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 0], [0, 1, 0, 0]])
    W = IncreasingFiltration(4, {-3: [], -2: [f1, f2], 0: [e1, e2, f1, f2]})
    F = DecreasingFiltration(4, {2: [], 1: [e1], 0: [e1, f1], -1: [e1, f1, e2], -2: [e1, e2, f1, f2]})
    Q = Matrix([[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]])
    H = MixedHodgeStructure(4, W, F, J, labels=("e1", "e2", "f1", "f2"))
    return NilpotentOrbit(H, (N,), Pairing(Q, -1), -1)


def pure_orbit(p: int = 1, r=1, n: int = 1) -> NilpotentOrbit:
    """Weight ``-1`` Hodge structure ``<x, conj x>`` of types ``(p, -1-p)`` and
    its conjugate, with ``N = 0``."""
    return _assemble([_pair_block(p, as_scalar(r))], n)


# Blocks are (dim, J, N, W steps, F steps, Q) on coordinates 0..dim-1, weight -1.

def _tate_block(a: GaussScalar, s: GaussScalar):
    e, f = _unit(2, 0), _unit(2, 1)
    J = Matrix([[1, 0], [0, -1]])
    N = Matrix([[0, 0], [1, 0]])
    W = {-3: [], -2: [f], 0: [e, f]}
    F = {1: [], 0: [(ONE, a)], -1: [e, f]}
    Q = Matrix([[0, s], [-s, 0]])
    return 2, J, N, W, F, Q


def _pair_block(p: int, r: GaussScalar):
    if p < 0:
        raise ValueError("use p >= 0; the conjugate type is -1-p")
    x, y = _unit(2, 0), _unit(2, 1)
    J = Matrix([[0, 1], [1, 0]])
    N = Matrix.zeros(2, 2)
    W = {-2: [], -1: [x, y]}
    F = {p + 1: [], p: [x], -1 - p: [x, y]}
    Q = Matrix([[0, r], [-r, 0]])
    return 2, J, N, W, F, Q


def _four_block(a: GaussScalar, s: GaussScalar, r: GaussScalar):
    o = four_dim_orbit(a, s, r)
    H = o.limit
    return 4, H.J, o.N[0], dict(H.W.steps), dict(H.F.steps), o.pairing.matrix


def _chain_block(r: GaussScalar):
    """Two length-3 chains ``x_i = N^i v``, ``y_i = N^i conj v``; ``conj x_i = (-1)^i y_i``."""
    idx = {("x", i): i for i in range(3)} | {("y", i): 3 + i for i in range(3)}
    d = 6
    Jrows = [[0] * d for _ in range(d)]
    Nrows = [[0] * d for _ in range(d)]
    Qrows = [[0] * d for _ in range(d)]
    for i in range(3):
        sgn = 1 if i % 2 == 0 else -1
        Jrows[idx[("y", i)]][idx[("x", i)]] = sgn
        Jrows[idx[("x", i)]][idx[("y", i)]] = sgn
        if i < 2:
            Nrows[idx[("x", i + 1)]][idx[("x", i)]] = 1
            Nrows[idx[("y", i + 1)]][idx[("y", i)]] = 1
        j = 2 - i
        Qrows[idx[("x", i)]][idx[("y", j)]] = r * sgn
        Qrows[idx[("y", j)]][idx[("x", i)]] = -r * sgn
    u = lambda key: _unit(d, idx[key])
    x0, x1, x2, y0, y1, y2 = u(("x", 0)), u(("x", 1)), u(("x", 2)), u(("y", 0)), u(("y", 1)), u(("y", 2))
    W = {-4: [], -3: [x2, y2], -2: [x2, y2], -1: [x1, y1, x2, y2], 0: [x1, y1, x2, y2], 1: [x0, x1, x2, y0, y1, y2]}
    F = {2: [], 1: [x0], 0: [x0, y0, x1], -1: [x0, y0, x1, y1, x2], -2: [x0, x1, x2, y0, y1, y2]}
    return d, Matrix(Jrows), Matrix(Nrows), W, F, Matrix(Qrows)


def _assemble(blocks, n: int = 1, Ns_per_block=None) -> NilpotentOrbit:
    d = sum(b[0] for b in blocks)
    offs = []
    o = 0
    for b in blocks:
        offs.append(o)
        o += b[0]

    def embed(v, off):
        return tuple([ZERO] * off) + tuple(v) + tuple([ZERO] * (d - off - len(v)))

    def merge(key_sets, decreasing):
        keys = sorted({k for ks in key_sets for k in ks})
        out = {}
        for k in keys:
            vecs = []
            for b, off, steps in zip(blocks, offs, key_sets):
                S = _step_at(steps, k, b[0], decreasing)
                vecs.extend(embed(v, off) for v in S)
            out[k] = vecs
        return out

    W = merge([b[3] for b in blocks], False)
    F = merge([b[4] for b in blocks], True)
    J = Matrix.block_diag([b[1] for b in blocks])
    N = Matrix.block_diag([b[2] for b in blocks])
    Q = Matrix.block_diag([b[5] for b in blocks])
    H = MixedHodgeStructure(d, IncreasingFiltration(d, W), DecreasingFiltration(d, F), J)
    return NilpotentOrbit(H, tuple([N] * n), Pairing(Q, -1), -1)


def _step_at(steps: dict, k: int, dim: int, decreasing: bool) -> list:
    keys = sorted(steps)
    if decreasing:
        for key in keys:
            if key >= k:
                return list(_basis(steps[key], dim))
        return []
    best = None
    for key in keys:
        if key <= k:
            best = key
    return [] if best is None else list(_basis(steps[best], dim))


def _basis(S, dim):
    if isinstance(S, Subspace):
        return S.basis
    return [tuple(as_scalar(x) for x in v) for v in S]


def _rand_q(rng: random.Random, bound: int = 4) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def _rand_g(rng: random.Random, bound: int = 3) -> GaussScalar:
    return GaussScalar(_rand_q(rng, bound), _rand_q(rng, bound))


def _nonzero_q(rng: random.Random) -> Fraction:
    x = Fraction(0)
    while x == 0:
        x = _rand_q(rng)
    return x


def random_pure_orbit(rng: random.Random, max_dim: int = 6, change_basis: bool = True) -> NilpotentOrbit:
    """A weight ``-1`` one-variable orbit of dimension ``<= max_dim``, assembled
    from blocks and moved by a random real change of basis."""
    blocks = []
    dim = 0
    while True:
        options = []
        room = max_dim - dim
        if room >= 2:
            options += ["tate", "pair"]
        if room >= 4:
            options.append("four")
        if room >= 6:
            options.append("chain")
        if not options or (blocks and rng.random() < 0.35):
            break
        kind = rng.choice(options)
        if kind == "tate":
            blocks.append(_tate_block(_rand_g(rng), as_scalar(abs(_nonzero_q(rng)))))
        elif kind == "pair":
            blocks.append(_pair_block(rng.randint(0, 2), as_scalar(_nonzero_q(rng))))
        elif kind == "four":
            blocks.append(_four_block(_rand_g(rng), as_scalar(abs(_nonzero_q(rng))), as_scalar(abs(_nonzero_q(rng)))))
        else:
            blocks.append(_chain_block(as_scalar(_nonzero_q(rng))))
        dim += blocks[-1][0]
    orbit = _assemble(blocks)
    if change_basis:
        orbit = transform_orbit(orbit, random_real_change(rng, orbit.limit.J))
    return orbit


def random_real_change(rng: random.Random, J: Matrix) -> Matrix:
    """An invertible ``g`` commuting with the real structure (``g J = J conj(g)``)."""
    d = J.nrows
    while True:
        Y = Matrix([[_rand_g(rng, 2) for _ in range(d)] for _ in range(d)])
        g = Y + J @ Y.conj() @ J.conj()
        if g.rank() == d:
            return g


def transform_orbit(orbit: NilpotentOrbit, g: Matrix) -> NilpotentOrbit:
    """Express ``orbit`` in new coordinates ``x' = g x``."""
    H = orbit.limit
    gi = g.inverse()
    move = lambda S: S.image_under(g)
    W = H.W.map(move)
    F = H.F.map(move)
    J = g @ H.J @ g.conj().inverse()
    Ns = tuple(g @ N @ gi for N in orbit.N)
    P = orbit.pairing
    if P is not None:
        P = Pairing(gi.T @ P.matrix @ gi, P.weight, P.skew)
    return NilpotentOrbit(MixedHodgeStructure(H.dim, W, F, J), Ns, P, orbit.weight)


def random_commuting_family(rng: random.Random, dim: int, n: int) -> tuple:
    """``n`` commuting nilpotents, each a polynomial without constant term in
    one random strictly lower-triangular matrix."""
    base = Matrix([[(_rand_q(rng, 3) if j < i else 0) for j in range(dim)] for i in range(dim)])
    powers = [base ** k for k in range(1, max(dim, 1))]
    out = []
    for _ in range(n):
        M = Matrix.zeros(dim, dim)
        for P in powers:
            c = rng.randint(-2, 2)
            if c:
                M = M + P.scale(c)
        out.append(M)
    return tuple(out)
