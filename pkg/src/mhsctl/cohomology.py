"""Koszul complex of commuting nilpotents, its image subcomplex, their
cohomology, and extensions of ``Q`` by a nilpotent orbit.

Term ``k`` of the Koszul complex is ``⊕_{|I|=k} H(-k)``, one block of
``dim H`` coordinates per subset ``I`` (lexicographic order).  The map into
the block ``I ∪ {j}`` is ``(-1)^{#{i in I : i < j}} N_j``.  The image complex
has ``Im(prod_{i in I} N_i)`` in block ``I``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .linalg import Matrix, QuotientMap, Subspace, image, kernel, solve, vec
from .mhs import (
    DecreasingFiltration,
    IncreasingFiltration,
    MixedHodgeStructure,
    Verdict,
    direct_sum,
    hom_from_Q,
    real_points,
    subquotient,
    tate_twist,
)
from .orbits import (
    MixedNilpotentOrbit,
    NilpotentOrbit,
    check_mixed_nilpotent_orbit,
    check_pure_nilpotent_orbit,
    commute,
    is_nilpotent,
    relative_monodromy_filtration,
)
from .scalars import ONE, ZERO

__all__ = [
    "ChainComplex",
    "Cohomology",
    "NormalFunctionClass",
    "ExtensionData",
    "VanishingResult",
    "koszul_complex",
    "ic_complex",
    "cohomology",
    "h",
    "cohomology_dim",
    "h1_inclusion",
    "class_of_extension",
    "class_from_representative",
    "build_extension",
    "extension_from_lift",
    "check_target_vanishing",
]


def _subsets(n: int, k: int) -> list:
    return list(combinations(range(n), k))


def _validate_family(Ns: Sequence[Matrix], d: int):
    for i, N in enumerate(Ns):
        if N.shape != (d, d):
            raise ValueError(f"N_{i + 1} has shape {N.shape}, expected {(d, d)}")
        if not is_nilpotent(N):
            raise ValueError(f"N_{i + 1} is not nilpotent")
        for j in range(i):
            if not commute(N, Ns[j]):
                raise ValueError(f"N_{j + 1} and N_{i + 1} do not commute")


def _koszul_differential(Ns: Sequence[Matrix], d: int, k: int) -> Matrix:
    n = len(Ns)
    src = _subsets(n, k)
    dst = _subsets(n, k + 1)
    pos = {I: m for m, I in enumerate(dst)}
    rows = [[ZERO] * (len(src) * d) for _ in range(len(dst) * d)]
    for c, I in enumerate(src):
        for j in range(n):
            if j in I:
                continue
            J = tuple(sorted(I + (j,)))
            sign = -1 if sum(1 for i in I if i < j) % 2 else 1
            r = pos[J]
            for a, row in enumerate(Ns[j].rows):
                for b, x in enumerate(row):
                    if x:
                        rows[r * d + a][c * d + b] = x if sign > 0 else -x
    return Matrix(rows, len(src) * d) if rows else Matrix([], len(src) * d)


@dataclass(frozen=True)
class ChainComplex:
    """Subcomplex ``spaces[k]`` of the Koszul terms ``⊕_I H(-k)``.

    ``base`` may be ``None`` for a bare family of matrices; then only
    dimensions are available.
    """

    d: int
    N: tuple
    spaces: tuple
    differentials: tuple
    base: MixedHodgeStructure | None = None

    @property
    def n(self) -> int:
        return len(self.N)

    @property
    def length(self) -> int:
        return len(self.spaces)

    def dims(self) -> tuple:
        return tuple(S.dim for S in self.spaces)

    def subsets(self, k: int) -> list:
        return _subsets(self.n, k)

    def block(self, v: Sequence, k: int, I: tuple) -> tuple:
        m = self.subsets(k).index(tuple(I))
        return tuple(v[m * self.d : (m + 1) * self.d])

    def term(self, k: int) -> MixedHodgeStructure:
        """Ambient Koszul term ``⊕_{|I|=k} H(-k)``."""
        if self.base is None:
            raise ValueError("complex has no Hodge data")
        count = len(self.subsets(k))
        tw = tate_twist(self.base, -k)
        return direct_sum([tw] * count) if count else MixedHodgeStructure.zero()

    def differential(self, k: int) -> Matrix:
        return self.differentials[k]

    def check_d_squared(self) -> bool:
        for k in range(len(self.differentials) - 1):
            if not (self.differentials[k + 1] @ self.differentials[k]).is_zero():
                return False
        return True

    def check_subcomplex(self) -> bool:
        for k, D in enumerate(self.differentials):
            if not self.spaces[k].image_under(D) <= self.spaces[k + 1]:
                return False
        return True


def _family(H, family) -> tuple:
    if isinstance(H, NilpotentOrbit):
        return H.limit, tuple(H.N if family is None else family)
    if isinstance(H, MixedHodgeStructure):
        return H, tuple(family)
    if isinstance(H, int):
        return None, tuple(family)
    raise TypeError("expected a nilpotent orbit, a mixed Hodge structure or a dimension")


def koszul_complex(H, family=None) -> ChainComplex:
    """``K^k = ⊕_{|I|=k} H(-k)``; ``H`` may be an orbit, a structure, or a bare dimension."""
    base, Ns = _family(H, family)
    d = base.dim if base is not None else H
    _validate_family(Ns, d)
    n = len(Ns)
    diffs = tuple(_koszul_differential(Ns, d, k) for k in range(n))
    spaces = tuple(Subspace.full(len(_subsets(n, k)) * d) for k in range(n + 1))
    return ChainComplex(d, Ns, spaces, diffs, base)


def _product(Ns: Sequence[Matrix], I: tuple, d: int) -> Matrix:
    out = Matrix.identity(d)
    for i in I:
        out = out @ Ns[i]
    return out


def ic_complex(H, family=None) -> ChainComplex:
    """Subcomplex with ``Im(prod_{i in I} N_i)`` in block ``I``."""
    K = koszul_complex(H, family)
    n, d = K.n, K.d
    spaces = []
    for k in range(n + 1):
        subsets = _subsets(n, k)
        total = len(subsets) * d
        vecs = []
        for m, I in enumerate(subsets):
            for col in image(_product(K.N, I, d)).basis:
                vecs.append(tuple([ZERO] * (m * d)) + col + tuple([ZERO] * (total - (m + 1) * d)))
        spaces.append(Subspace(total, vecs))
    return ChainComplex(d, K.N, tuple(spaces), K.differentials, K.base)


def _cycles(C: ChainComplex, k: int) -> Subspace:
    S = C.spaces[k]
    if k >= len(C.differentials):
        return S
    return S & kernel(C.differentials[k])


def _boundaries(C: ChainComplex, k: int) -> Subspace:
    if k == 0:
        return Subspace.zero(C.spaces[0].ambient)
    return C.spaces[k - 1].image_under(C.differentials[k - 1])


def cohomology_dim(C: ChainComplex, k: int) -> int:
    if k < 0 or k >= C.length:
        return 0
    return _cycles(C, k).dim - _boundaries(C, k).dim


@dataclass(frozen=True)
class Cohomology:
    """``H^k`` as a subquotient ``cycles / boundaries`` of the Koszul term."""

    complex: ChainComplex
    degree: int
    cycles: Subspace
    boundaries: Subspace
    quotient: QuotientMap
    mhs: MixedHodgeStructure | None

    @property
    def dim(self) -> int:
        return self.quotient.dim

    def classify(self, v: Sequence) -> tuple:
        """Coordinates of the class of the cycle ``v``."""
        return self.quotient(v)

    def hodge_classes(self) -> Subspace:
        if self.mhs is None:
            raise ValueError("no Hodge data")
        return hom_from_Q(self.mhs)


def cohomology(C: ChainComplex, k: int) -> Cohomology:
    """``Ker d_k / Im d_{k-1}`` on the subcomplex, with the induced ``W``, ``F``."""
    if k < 0 or k >= C.length:
        raise ValueError(f"degree {k} outside the complex")
    Z, B = _cycles(C, k), _boundaries(C, k)
    q = QuotientMap(B, Z)
    mhs = None
    if C.base is not None:
        mhs, q = subquotient(C.term(k), B, Z)
    return Cohomology(C, k, Z, B, q, mhs)


h = cohomology


def h1_inclusion(H, family=None) -> Matrix:
    """Matrix of ``H^1(image complex) -> H^1(Koszul complex)``; checked injective."""
    Ic = ic_complex(H, family)
    K = koszul_complex(H, family)
    hi, hk = cohomology(Ic, 1), cohomology(K, 1)
    cols = [hk.classify(c) for c in hi.quotient.complement]
    M = Matrix.from_columns(cols, hk.dim)
    if M.rank() != hi.dim:
        raise AssertionError("H^1 of the image complex does not inject into Koszul H^1")
    return M


@dataclass(frozen=True)
class NormalFunctionClass:
    """Representative in ``⊕_i Im N_i`` and its coordinates in ``H^1``."""

    representative: tuple
    coords: tuple

    def is_zero(self) -> bool:
        return not any(self.coords)


def class_from_representative(C: ChainComplex, rep: Sequence) -> NormalFunctionClass:
    H1 = cohomology(C, 1)
    rep = vec(rep)
    if not H1.cycles.contains(rep):
        raise ValueError("representative is not a cycle of the image complex")
    return NormalFunctionClass(rep, H1.classify(rep))


@dataclass(frozen=True)
class ExtensionData:
    """Extension ``0 -> H -> H' -> Q -> 0`` of limit data.

    Coordinates on ``H'`` are ``(a, b)`` with ``a`` in ``H`` and ``b`` in
    ``Q``; ``sigma(1) = (0, 1)``.
    """

    base: NilpotentOrbit
    alpha_Q: tuple
    alpha_F: tuple
    beta: tuple
    N: tuple
    F: DecreasingFiltration
    Wp: IncreasingFiltration
    J: Matrix

    @property
    def dim(self) -> int:
        return self.base.dim + 1

    def as_mixed_orbit(self) -> MixedNilpotentOrbit:
        graded = {}
        if self.base.pairing is not None:
            graded[self.base.weight] = self.base.pairing
        return MixedNilpotentOrbit(self.dim, self.Wp, self.F, self.J, self.N, graded)

    def validate(self) -> Verdict:
        return check_mixed_nilpotent_orbit(self.as_mixed_orbit())

    def relative_filtration(self):
        return relative_monodromy_filtration(self.as_mixed_orbit().total(), self.Wp)


def extension_from_lift(orbit: NilpotentOrbit, alpha_Q: Sequence, beta: Sequence, alpha_F: Sequence | None = None) -> ExtensionData:
    """Assemble ``N'_i(a, b) = (N_i a + b alpha_i, 0)`` and
    ``F'^p = F^p`` for ``p > 0``, ``F^p + C(beta, 1)`` for ``p <= 0``."""
    H = orbit.limit
    d = H.dim
    if orbit.weight >= 0:
        raise ValueError("extensions of Q need a base of negative weight")
    alpha_Q = vec(alpha_Q)
    beta = vec(beta)
    if len(alpha_Q) != orbit.n * d or len(beta) != d:
        raise ValueError("lift data has the wrong length")
    Ns = []
    for i, N in enumerate(orbit.N):
        col = alpha_Q[i * d : (i + 1) * d]
        rows = [list(r) + [col[a]] for a, r in enumerate(N.rows)] + [[ZERO] * (d + 1)]
        Ns.append(Matrix(rows, d + 1))
    emb = lambda v: tuple(v) + (ZERO,)
    top = tuple(beta) + (ONE,)
    keys = set(H.F.steps) | {0, 1}
    steps = {}
    for p in sorted(keys):
        vecs = [emb(v) for v in H.F[p].basis]
        if p <= 0:
            vecs.append(top)
        steps[p] = vecs
    lo = min(steps)
    if len(steps[lo]) < d + 1:
        steps[lo - 1] = Matrix.identity(d + 1).rows
    F = DecreasingFiltration(d + 1, steps)
    Wp = IncreasingFiltration(
        d + 1,
        {
            orbit.weight - 1: [],
            orbit.weight: [emb(v) for v in Matrix.identity(d).rows],
            0: Matrix.identity(d + 1).rows,
        },
    )
    J = Matrix.block_diag([H.J, Matrix.identity(1)])
    return ExtensionData(orbit, alpha_Q, vec(alpha_F) if alpha_F is not None else alpha_Q, beta, tuple(Ns), F, Wp, J)


def class_of_extension(E: ExtensionData, validate: bool = True) -> NormalFunctionClass:
    """Class of ``(N'_i sigma(1))_i`` in ``H^1`` of the image complex."""
    if validate:
        verdict = E.validate()
        if not verdict:
            raise ValueError(f"extension is not a mixed nilpotent orbit: {verdict.summary()}")
    d = E.base.dim
    rep = []
    for N in E.N:
        rep.extend(N.col(d)[:d])
        if N.rows[d][d] or any(N.rows[d]):
            raise ValueError("N'_i does not vanish on the quotient")
    return class_from_representative(ic_complex(E.base), rep)


def build_extension(orbit: NilpotentOrbit, alpha, check: bool = True) -> ExtensionData:
    """Extension realizing the Hodge class ``alpha`` of ``H^1`` (given as a
    :class:`NormalFunctionClass` or as coordinates).

    ``alpha_Q`` is the real lift of the canonical preimage, ``alpha_F`` the
    first canonical lift through ``F^0`` of the cycles, and ``beta`` the
    canonical solution of ``d_0 beta = alpha_F - alpha_Q``.
    """
    if check:
        verdict = check_pure_nilpotent_orbit(orbit)
        if not verdict:
            raise ValueError(f"base is not a pure nilpotent orbit: {verdict.summary()}")
    C = ic_complex(orbit)
    H1 = cohomology(C, 1)
    coords = vec(alpha.coords if isinstance(alpha, NormalFunctionClass) else alpha)
    if len(coords) != H1.dim:
        raise ValueError(f"class has {len(coords)} coordinates, H^1 has dimension {H1.dim}")
    if not H1.mhs.is_real(coords) or not H1.hodge_classes().contains(coords):
        raise ValueError("class is not a real Hodge class of H^1")
    term1 = C.term(1)
    x = H1.quotient.lift(coords)
    xc = term1.conj(x)
    alpha_Q = tuple((p + c) / 2 for p, c in zip(x, xc))
    assert H1.classify(alpha_Q) == coords, "real lift changed the class"

    Fz = term1.F[0] & H1.cycles
    B = H1.boundaries
    cols = list(Fz.basis) + [tuple(-c for c in b) for b in B.basis]
    sol = solve(Matrix.from_columns(cols, len(alpha_Q)), alpha_Q) if cols else None
    assert sol is not None, "class has no lift through F^0"
    alpha_F = Matrix.from_columns(Fz.basis, len(alpha_Q)).apply(sol[: Fz.dim]) if Fz.dim else tuple([ZERO] * len(alpha_Q))
    target = tuple(p - q for p, q in zip(alpha_F, alpha_Q))
    beta = solve(C.differentials[0], target)
    assert beta is not None, "Hodge and real lifts do not differ by a boundary"
    E = extension_from_lift(orbit, alpha_Q, beta, alpha_F)
    if check:
        verdict = E.validate()
        assert verdict, f"built extension fails validation: {verdict.summary()}"
    return E


@dataclass(frozen=True)
class VanishingResult:
    """Whether real classes of ``F^{-1} Gr^W_{-2}`` killed by ``Gr^W N`` vanish."""

    holds: bool
    witness_dim: int
    target_dim: int | None

    def __bool__(self):
        return self.holds


def check_target_vanishing(H, family=None) -> VanishingResult:
    """Sufficient criterion for ``Hom(Q, H^1) = 0`` when all ``N_i`` agree:
    no nonzero real class in ``F^{-1} Gr^W_{-2}`` is killed by ``Gr^W N``.

    When the criterion holds, the vanishing of the Hodge classes of ``H^1``
    is recomputed and asserted.
    """
    base, Ns = _family(H, family)
    if base is None:
        raise ValueError("needs Hodge data")
    if not Ns:
        raise ValueError("empty family")
    if any(N != Ns[0] for N in Ns):
        raise ValueError("criterion applies only when all N_i are equal")
    N = Ns[0]
    W = base.W
    G, q = subquotient(base, W[-3], W[-2])
    q4 = QuotientMap(W[-5], W[-4])
    if not W[-2].image_under(N) <= W[-4]:
        raise ValueError("N does not lower weights by two")
    Ngr = q.induced(N, q4)
    X = G.F[-1] & kernel(Ngr)
    witness = real_points(G, X).dim
    holds = witness == 0
    target = None
    if holds:
        target = hom_from_Q(cohomology(ic_complex(base, Ns), 1).mhs).dim
        assert target == 0, "criterion holds but Hodge classes of H^1 survive"
    return VanishingResult(holds, witness, target)
