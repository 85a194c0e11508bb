"""Nilpotent orbits, monodromy filtrations and the four-vector basis ``u_1..u_4``."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .linalg import Matrix, QuotientMap, Subspace, image, kernel, preimage, solve, vec
from .mhs import (
    DecreasingFiltration,
    IncreasingFiltration,
    MixedHodgeStructure,
    Pairing,
    Verdict,
    check_mhs,
    has_type,
    subquotient,
)
from .scalars import I, ZERO, GaussScalar, as_scalar

__all__ = [
    "NilpotentOrbit",
    "MixedNilpotentOrbit",
    "FourVectorBasis",
    "is_nilpotent",
    "commute",
    "nilpotency_index",
    "monodromy_filtration",
    "verify_monodromy_filtration",
    "jordan_chains",
    "relative_monodromy_filtration",
    "verify_relative_filtration",
    "cone_weights",
    "check_real_operator",
    "check_griffiths",
    "check_pure_nilpotent_orbit",
    "check_mixed_nilpotent_orbit",
    "construct_four_vector_basis",
    "validate_four_vector_basis",
]


def is_nilpotent(N: Matrix) -> bool:
    return (N ** N.nrows).is_zero() if N.nrows else True


def commute(A: Matrix, B: Matrix) -> bool:
    return A @ B == B @ A


def nilpotency_index(N: Matrix) -> int:
    """Largest ``l`` with ``N^l != 0`` (``0`` for ``N = 0``)."""
    l = 0
    P = N
    while not P.is_zero():
        l += 1
        P = P @ N
        if l > N.nrows:
            raise ValueError("operator is not nilpotent")
    return l


def _sum(mats: Sequence[Matrix], weights=None) -> Matrix:
    d = mats[0].nrows
    out = Matrix.zeros(d, d)
    for i, M in enumerate(mats):
        out = out + (M if weights is None else M.scale(weights[i]))
    return out


def monodromy_filtration(N: Matrix, center: int = 0) -> IncreasingFiltration:
    """The unique ``M`` with ``N M_k ⊆ M_{k-2}`` and ``N^j: Gr_{c+j} ≅ Gr_{c-j}``."""
    d = N.nrows
    if not is_nilpotent(N):
        raise ValueError("monodromy filtration needs a nilpotent operator")
    l = nilpotency_index(N)
    steps = {center - l - 1: Subspace.zero(d), center + l: Subspace.full(d)}
    L, U = Subspace.zero(d), Subspace.full(d)
    for j in range(l, 0, -1):
        Nj = N ** j
        K = U & preimage(Nj, L)
        Im = U.image_under(Nj) + L
        steps[center + j - 1] = K
        steps[center - j] = Im
        L, U = Im, K
    return IncreasingFiltration(d, steps)


def verify_monodromy_filtration(N: Matrix, M: IncreasingFiltration, center: int = 0) -> Verdict:
    """Check the two defining properties of ``M(N, center)`` directly."""
    v = Verdict()
    if not M.is_exhaustive():
        return v.fail("exhaustive", "top step is not the whole space")
    lo, hi = M.span()
    for k in range(lo - 1, hi + 1):
        if not M[k].image_under(N) <= M[k - 2]:
            v.fail("shift", f"N M_{k} is not inside M_{k - 2}")
    reach = max(abs(hi - center), abs(lo - center)) + 1
    for j in range(1, reach + 1):
        Nj = N ** j
        top_lo, top_hi = M[center + j - 1], M[center + j]
        bot_lo, bot_hi = M[center - j - 1], M[center - j]
        if top_hi.dim - top_lo.dim != bot_hi.dim - bot_lo.dim:
            v.fail("iso", f"dim Gr_{center + j} != dim Gr_{center - j}")
            continue
        if not (top_hi & preimage(Nj, bot_lo)) <= top_lo:
            v.fail("iso", f"N^{j} is not injective on Gr_{center + j}")
    return v


def jordan_chains(N: Matrix) -> list:
    """``[(top vector, length)]`` with ``N^{length-1} top != 0 = N^length top``,
    the chains together forming a Jordan basis."""
    d = N.nrows
    if d == 0:
        return []
    kernels = [Subspace.zero(d)]
    P = Matrix.identity(d)
    while not kernels[-1].is_full():
        P = P @ N
        kernels.append(kernel(P))
        if len(kernels) > d + 1:
            raise ValueError("operator is not nilpotent")
    chains: list = []
    for k in range(len(kernels) - 1, 0, -1):
        covered = kernels[k - 1]
        for top, length in chains:
            covered = covered + Subspace(d, [(N ** (length - k)).apply(top)])
        for row in kernels[k].basis:
            if not covered.contains(row):
                chains.append((row, k))
                covered = covered + Subspace(d, [row])
    return chains


def relative_monodromy_filtration(N: Matrix, Wp: IncreasingFiltration) -> IncreasingFiltration | None:
    """``M`` with ``N M_k ⊆ M_{k-2}`` and ``M`` inducing ``M(N, j)`` on each
    ``Gr^{Wp}_j``; ``None`` when no such filtration exists.

    Built level by level: each Jordan chain of ``N`` on ``Gr^{Wp}_j`` is
    lifted so that its end lands deep enough in the filtration already
    built on ``Wp_{j-1}``.
    """
    d = N.nrows
    for k, S in Wp.steps.items():
        if not S.image_under(N) <= S:
            raise ValueError(f"N does not preserve W'_{k}")
    if not Wp.is_exhaustive():
        raise ValueError("W' is not exhaustive")
    contribs: list = []

    def M_at(k: int) -> Subspace:
        return Subspace(d, [v for lev, v in contribs if lev <= k])

    for j in Wp.jumps():
        A, B = Wp[j - 1], Wp[j]
        q = QuotientMap(A, B)
        Ng = q.induced(N, q)
        new: list = []
        for b, length in jordan_chains(Ng):
            ell = length - 1
            v0 = q.lift(b)
            NL = N ** length
            target = M_at(j - length - 1)
            if target.is_full():
                vt = v0
            else:
                ann = target.annihilator()
                rhs = (ann @ NL).apply(v0)
                if A.is_zero():
                    if any(rhs):
                        return None
                    vt = v0
                else:
                    Amat = Matrix.from_columns(A.basis)
                    x = solve(ann @ NL @ Amat, [-c for c in rhs])
                    if x is None:
                        return None
                    vt = tuple(p + r for p, r in zip(v0, Amat.apply(x)))
            w = vt
            for i in range(length):
                new.append((j + ell - 2 * i, w))
                w = N.apply(w)
        contribs.extend(new)

    levels = sorted({lev for lev, _ in contribs})
    if not levels:
        return IncreasingFiltration(d, {0: Subspace.full(d)})
    steps = {levels[0] - 1: Subspace.zero(d)}
    for k in range(levels[0], levels[-1] + 1):
        steps[k] = M_at(k)
    M = IncreasingFiltration(d, steps)
    if not verify_relative_filtration(N, Wp, M):
        return None
    return M


def verify_relative_filtration(N: Matrix, Wp: IncreasingFiltration, M: IncreasingFiltration) -> Verdict:
    """``N M_k ⊆ M_{k-2}`` and ``M`` induces ``M(Gr N, j)`` on every ``Gr^{Wp}_j``."""
    v = Verdict()
    if not M.is_exhaustive():
        return v.fail("exhaustive", "M does not exhaust the space")
    lo, hi = M.span()
    for k in range(lo - 1, hi + 1):
        if not M[k].image_under(N) <= M[k - 2]:
            v.fail("shift", f"N M_{k} is not inside M_{k - 2}")
    for j in Wp.jumps():
        q = QuotientMap(Wp[j - 1], Wp[j])
        Ng = q.induced(N, q)
        induced = IncreasingFiltration(q.dim, {k: q.subspace(M[k]) for k in range(lo - 1, hi + 1)})
        if induced != monodromy_filtration(Ng, j):
            v.fail("graded", f"induced filtration on Gr^W'_{j} is not M(N, {j})")
    return v


def cone_weights(n: int, seed: int = 0, extra: int = 3) -> list:
    """Positive weight vectors sampling the open cone: all ones, one doubled
    entry per index, and a few seeded random ones."""
    out = [tuple([1] * n)]
    if n > 1:
        for i in range(n):
            out.append(tuple(2 if k == i else 1 for k in range(n)))
        rng = random.Random(seed)
        for _ in range(extra):
            out.append(tuple(rng.randint(1, 7) for _ in range(n)))
    return out


def check_real_operator(J: Matrix, N: Matrix) -> bool:
    """``N`` is a real morphism ``H -> H(-1)``, i.e. ``N J = -J conj(N)``."""
    return N @ J == -(J @ N.conj())


def check_griffiths(F: DecreasingFiltration, N: Matrix) -> tuple | None:
    """``None`` if ``N F^p ⊆ F^{p-1}`` for all ``p``, else ``(p, vector)``."""
    lo, hi = F.span()
    for p in range(lo, hi + 1):
        target = F[p - 1]
        for b in F[p].basis:
            if not target.contains(N.apply(b)):
                return (p, b)
    return None


@dataclass(frozen=True)
class NilpotentOrbit:
    """Limit mixed Hodge structure with commuting nilpotents and a pairing."""

    limit: MixedHodgeStructure
    N: tuple
    pairing: Pairing | None = None
    weight: int = -1

    @property
    def n(self) -> int:
        return len(self.N)

    @property
    def dim(self) -> int:
        return self.limit.dim

    def total(self, weights=None) -> Matrix:
        return _sum(self.N, weights)

    def with_N(self, N: Sequence[Matrix]) -> "NilpotentOrbit":
        return NilpotentOrbit(self.limit, tuple(N), self.pairing, self.weight)

    def pullback(self, n: int) -> "NilpotentOrbit":
        """Pull-back along ``(t_1, ..., t_n) -> t_1 ... t_n`` of a one-variable orbit."""
        if self.n != 1:
            raise ValueError("pull-back along the product map needs a one-variable orbit")
        return self.with_N([self.N[0]] * n)


def check_pure_nilpotent_orbit(orbit: NilpotentOrbit, seed: int = 0) -> Verdict:
    """Clauses: ``mhs``, ``family``, ``real``, ``transversality``, ``weight``, ``polarization``.

    The weight clause compares ``W`` with ``M(sum l_i N_i, w)`` for weights
    ``l_i`` in the open cone; faces of the cone may carry other filtrations.
    """
    v = Verdict()
    H = orbit.limit
    if H.dim == 0:
        return v
    v.merge(check_mhs(H), "mhs:")
    Ns = orbit.N
    if not Ns:
        v.fail("family", "no nilpotent operators")
        return v
    for i, N in enumerate(Ns):
        if N.shape != (H.dim, H.dim):
            return v.fail("family", f"N_{i + 1} has shape {N.shape}")
        if not is_nilpotent(N):
            v.fail("family", f"N_{i + 1} is not nilpotent")
        for j in range(i):
            if not commute(N, Ns[j]):
                v.fail("family", f"N_{j + 1} and N_{i + 1} do not commute")
        if not check_real_operator(H.J, N):
            v.fail("real", f"N_{i + 1} is not defined over the real structure")
        bad = check_griffiths(H.F, N)
        if bad is not None:
            v.fail("transversality", f"N_{i + 1} F^{bad[0]} is not inside F^{bad[0] - 1}", bad[1])
    if not v:
        return v
    for lam in cone_weights(len(Ns), seed):
        M = monodromy_filtration(_sum(Ns, lam), orbit.weight)
        if M != H.W:
            v.fail("weight", f"W differs from M(N) for weights {list(lam)}", lam)
            break
    P = orbit.pairing
    if P is not None:
        v.merge(_check_polarization(orbit, P), "polarization:")
    return v


def _check_polarization(orbit: NilpotentOrbit, P: Pairing) -> Verdict:
    v = Verdict()
    H = orbit.limit
    w = P.weight
    if P.dim != H.dim:
        return v.fail("shape", "pairing has the wrong size")
    if w % 2 and not P.is_skew():
        v.fail("symmetry", "odd weight needs a skew-symmetric form")
    if w % 2 == 0 and not P.is_symmetric():
        v.fail("symmetry", "even weight needs a symmetric form")
    if not P.is_nondegenerate():
        v.fail("nondegenerate", "pairing is degenerate")
    basis = Matrix.identity(H.dim).rows
    for i, N in enumerate(orbit.N):
        for x in basis:
            Nx = N.apply(x)
            for y in basis:
                if P(Nx, y) + P(x, N.apply(y)):
                    v.fail("isometry", f"<N_{i + 1}x, y> + <x, N_{i + 1}y> != 0", (x, y))
                    break
            else:
                continue
            break
    lo, hi = H.W.span()
    for k in range(lo, hi + 1):
        for l in range(lo, hi + 1):
            if k + l < 2 * w:
                wit = P.orthogonal(H.W[k], H.W[l])
                if wit is not None:
                    v.fail("weight-orthogonality", f"<W_{k}, W_{l}> != 0", wit)
    flo, fhi = H.F.span()
    for p in range(flo, fhi + 1):
        for q in range(flo, fhi + 1):
            if p + q > w:
                wit = P.orthogonal(H.F[p], H.F[q])
                if wit is not None:
                    v.fail("hodge-orthogonality", f"<F^{p}, F^{q}> != 0", wit)
    return v


@dataclass(frozen=True)
class MixedNilpotentOrbit:
    """Commuting nilpotents on a space with weight filtration ``Wp``,
    Hodge filtration ``F`` and real structure ``J``."""

    dim: int
    Wp: IncreasingFiltration
    F: DecreasingFiltration
    J: Matrix
    N: tuple
    graded_pairings: dict = field(default_factory=dict)

    def total(self, weights=None) -> Matrix:
        return _sum(self.N, weights)


def check_mixed_nilpotent_orbit(orbit: MixedNilpotentOrbit, seed: int = 0) -> Verdict:
    """Clauses: ``family``, ``real``, ``relative``, ``transversality``, ``graded``, ``limit``.

    The relative monodromy filtration must exist for every ``N_i`` and for
    cone combinations; each ``Gr^{Wp}_k`` must be a pure nilpotent orbit of
    weight ``k``; ``(M(sum N, Wp), F)`` must be a mixed Hodge structure.
    """
    v = Verdict()
    d = orbit.dim
    for i, N in enumerate(orbit.N):
        if not is_nilpotent(N):
            v.fail("family", f"N_{i + 1} is not nilpotent")
        for j in range(i):
            if not commute(N, orbit.N[j]):
                v.fail("family", f"N_{j + 1} and N_{i + 1} do not commute")
        if not check_real_operator(orbit.J, N):
            v.fail("real", f"N_{i + 1} is not defined over the real structure")
        for k, S in orbit.Wp.steps.items():
            if not S.image_under(N) <= S:
                v.fail("family", f"N_{i + 1} does not preserve W'_{k}")
        bad = check_griffiths(orbit.F, N)
        if bad is not None:
            v.fail("transversality", f"N_{i + 1} F^{bad[0]} is not inside F^{bad[0] - 1}", bad[1])
    if not v:
        return v
    for i, N in enumerate(orbit.N):
        if relative_monodromy_filtration(N, orbit.Wp) is None:
            v.fail("relative", f"no relative monodromy filtration for N_{i + 1}")
    total_M = None
    for lam in cone_weights(len(orbit.N), seed):
        M = relative_monodromy_filtration(orbit.total(lam), orbit.Wp)
        if M is None:
            v.fail("relative", f"no relative monodromy filtration for weights {list(lam)}")
            break
        if total_M is None:
            total_M = M
        elif M != total_M:
            v.fail("relative", f"relative filtration changes inside the cone at {list(lam)}")
    if not v:
        return v
    space = MixedHodgeStructure(d, orbit.Wp, orbit.F, orbit.J)
    for k in orbit.Wp.jumps():
        G, q = subquotient(space, orbit.Wp[k - 1], orbit.Wp[k])
        Ng = tuple(q.induced(N, q) for N in orbit.N)
        W = monodromy_filtration(_sum(Ng), k)
        limit = MixedHodgeStructure(G.dim, W, G.F, G.J)
        gr_orbit = NilpotentOrbit(limit, Ng, orbit.graded_pairings.get(k), k)
        v.merge(check_pure_nilpotent_orbit(gr_orbit, seed), f"graded[{k}]:")
    v.merge(check_mhs(MixedHodgeStructure(d, total_M, orbit.F, orbit.J)), "limit:")
    return v


@dataclass(frozen=True)
class FourVectorBasis:
    """``u_1..u_4`` with ``u_2 + a u_3 ∈ F^0``; ``H1`` their span, ``H2`` its
    orthogonal complement."""

    u: tuple
    a: GaussScalar
    H1: Subspace
    H2: Subspace

    def pairing_constants(self, P: Pairing) -> tuple:
        """``(s, r) = (<u_2, u_3>, <u_1, u_4>)``."""
        return P(self.u[1], self.u[2]), P(self.u[0], self.u[3])

    def change_of_basis(self) -> Matrix:
        return Matrix.from_columns(self.u)


def _imaginary_generator(H: MixedHodgeStructure, b: tuple) -> tuple:
    cb = H.conj(b)
    if cb == tuple(-x for x in b):
        return b
    if cb == b:
        return tuple(I * x for x in b)
    return tuple(x - y for x, y in zip(b, cb))


def construct_four_vector_basis(orbit: NilpotentOrbit) -> FourVectorBasis:
    """Build ``u_1..u_4`` for a weight ``-1`` orbit with one nilpotent of rank 1,
    ``Gr^W_{-2}`` of type ``(-1,-1)`` and a class of type ``(1,-2)``."""
    H = orbit.limit
    if orbit.n != 1:
        raise ValueError("expected a single nilpotent operator")
    N = orbit.N[0]
    P = orbit.pairing
    if P is None:
        raise ValueError("a pairing is required")
    if N.rank() != 1 or not (N @ N).is_zero():
        raise ValueError("N must have rank 1 and square zero")
    W = H.W
    if W[-3].dim or W[-2] != image(N) or W[-1] != kernel(N) or not W[0].is_full():
        raise ValueError("weight filtration is not (0, Im N, Ker N, H)")
    d = H.dim

    F1W = H.F[1] & W[-1]
    type_space = (F1W & ((H.conj_subspace(H.F[-2]) & W[-1]) + W[-2])) + W[-2]
    u1 = next((b for b in (F1W & type_space).basis if not W[-2].contains(b) and P(b, H.conj(b))), None)
    if u1 is None:
        raise ValueError("no class of type (1,-2) in Gr^W_{-1}")
    u4 = H.conj(u1)

    u3 = _imaginary_generator(H, W[-2].basis[0])
    if not H.F[-1].contains(u3):
        raise ValueError("Gr^W_{-2} is not of type (-1,-1)")

    F0 = H.F[0]
    x = solve(N @ Matrix.from_columns(F0.basis), u3) if F0.dim else None
    if x is None:
        raise ValueError("N F^0 does not reach W_{-2}")
    v = Matrix.from_columns(F0.basis).apply(x)
    y = tuple(I * (p - c) for p, c in zip(v, H.conj(v)))
    q = QuotientMap(W[-2], W[-1])
    F0g = q.subspace(F0)
    cF0g = q.subspace(H.conj_subspace(F0))
    split = solve(Matrix.from_columns(list(F0g.basis) + list(cF0g.basis), q.dim), q(y))
    if split is None:
        raise ValueError("Gr^W_{-1} is not the sum of F^0 and its conjugate")
    a_g = Matrix.from_columns(F0g.basis, q.dim).apply(split[: F0g.dim]) if F0g.dim else tuple([ZERO] * q.dim)
    F0W = F0 & W[-1]
    if F0W.dim:
        xl = solve(Matrix.from_columns([q(b) for b in F0W.basis], q.dim), a_g)
        w = Matrix.from_columns(F0W.basis).apply(xl)
    else:
        w = tuple([ZERO] * d)
    v = tuple(p + I * r for p, r in zip(v, w))
    diff = tuple(p - c for p, c in zip(v, H.conj(v)))
    i0 = next(i for i, x in enumerate(u3) if x)
    c = diff[i0] / u3[i0]
    if diff != tuple(c * x for x in u3):
        raise ValueError("failed to make the lift real modulo W_{-2}")
    half = c / 2
    u2 = tuple(p - half * r for p, r in zip(v, u3))
    u = (tuple(u1), u2, tuple(u3), tuple(u4))
    H1 = Subspace(d, u)
    rows = [P.matrix.apply(ui) for ui in u]
    H2 = kernel(Matrix(rows, d))
    return FourVectorBasis(u, half, H1, H2)


def validate_four_vector_basis(orbit: NilpotentOrbit, u: Sequence, a) -> Verdict:
    """Conditions on ``u_1..u_4``: Hodge positions, conjugation, action of
    ``N``, types in ``Gr^W_{-1}``, ``u_2 + a u_3 ∈ F^0`` and the pairing."""
    H = orbit.limit
    N = orbit.N[0]
    P = orbit.pairing
    a = as_scalar(a)
    v = Verdict()
    u = [vec(x) for x in u]
    if len(u) != 4 or Subspace(H.dim, u).dim != 4:
        return v.fail("independence", "need four independent vectors")
    u1, u2, u3, u4 = u
    W, F = H.W, H.F
    if not (F[1] & W[-1]).contains(u1):
        v.fail("positions", "u_1 is not in F^1 W_{-1}")
    if not W[0].contains(u2) or not H.is_real(u2):
        v.fail("positions", "u_2 is not a real vector of W_0")
    if not W[-2].contains(u3):
        v.fail("positions", "u_3 is not in W_{-2}")
    if not (F[-2] & W[-1]).contains(u4):
        v.fail("positions", "u_4 is not in F^{-2} W_{-1}")
    if H.conj(u1) != u4:
        v.fail("conjugation", "conj u_1 != u_4")
    if H.conj(u2) != u2:
        v.fail("conjugation", "conj u_2 != u_2")
    if H.conj(u3) != tuple(-x for x in u3):
        v.fail("conjugation", "conj u_3 != -u_3")
    if N.apply(u2) != u3:
        v.fail("action", "N u_2 != u_3")
    for j, x in ((1, u1), (3, u3), (4, u4)):
        if any(N.apply(x)):
            v.fail("action", f"N u_{j} != 0")
    if not has_type(H, -1, u1, 1, -2):
        v.fail("types", "[u_1] is not of type (1,-2)")
    if not has_type(H, -1, u4, -2, 1):
        v.fail("types", "[u_4] is not of type (-2,1)")
    if not (F[0] & W[0]).contains(tuple(p + a * r for p, r in zip(u2, u3))):
        v.fail("hodge", "u_2 + a u_3 is not in F^0 W_0")
    if P is not None:
        for i in range(4):
            for j in range(4):
                if {i, j} in ({0, 3}, {1, 2}):
                    continue
                if P(u[i], u[j]):
                    v.fail("pairing", f"<u_{i + 1}, u_{j + 1}> != 0")
        if not P(u2, u3) or not P(u1, u4):
            v.fail("pairing", "<u_2, u_3> or <u_1, u_4> vanishes")
    return v
