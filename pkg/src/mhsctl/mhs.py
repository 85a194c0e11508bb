"""Filtrations, mixed Hodge structures, Tate twists and pairings.

A :class:`MixedHodgeStructure` lives on ``Q(i)^dim``.  Its real (or
rational) form is encoded by an antilinear involution ``v -> J conj(v)``;
``J`` is the identity for a rational basis, and a signed permutation for
bases such as ``u_1, ..., u_4`` where some vectors are conjugate pairs or
purely imaginary.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .linalg import DimensionError, Matrix, QuotientMap, Subspace, conj_vec, vec
from .scalars import I, ZERO, GaussScalar, as_scalar

__all__ = [
    "FiltrationError",
    "Verdict",
    "IncreasingFiltration",
    "DecreasingFiltration",
    "MixedHodgeStructure",
    "Pairing",
    "direct_sum",
    "subquotient",
    "gr_W",
    "check_mhs",
    "tate_twist",
    "hom_from_Q",
    "real_points",
    "real_spanning_vectors",
    "has_type",
]


class FiltrationError(ValueError):
    """A filtration is not nested, not exhaustive, or has the wrong ambient space."""


@dataclass
class Verdict:
    """Outcome of a check: ``ok`` plus the failing clauses with witnesses."""

    ok: bool = True
    failures: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def fail(self, clause: str, detail: str = "", witness=None) -> "Verdict":
        self.ok = False
        self.failures.append((clause, detail, witness))
        return self

    @property
    def clause(self) -> str | None:
        return self.failures[0][0] if self.failures else None

    @property
    def witness(self):
        return self.failures[0][2] if self.failures else None

    @property
    def clauses(self) -> list:
        return [c for c, _, _ in self.failures]

    def merge(self, other: "Verdict", prefix: str = "") -> "Verdict":
        for c, d, w in other.failures:
            self.fail(prefix + c, d, w)
        return self

    def __bool__(self):
        return self.ok

    def summary(self) -> str:
        if self.ok:
            return "pass"
        return "; ".join(f"{c}: {d}" if d else c for c, d, _ in self.failures)


def _as_subspace(ambient: int, s) -> Subspace:
    if isinstance(s, Subspace):
        if s.ambient != ambient:
            raise FiltrationError(f"subspace in ambient {s.ambient}, expected {ambient}")
        return s
    return Subspace(ambient, s)


class IncreasingFiltration:
    """``k -> W_k``.  Below the smallest stored index the filtration is zero;
    above the largest it equals the top step."""

    __slots__ = ("ambient", "steps")

    def __init__(self, ambient: int, steps: Mapping[int, object]):
        self.ambient = ambient
        self.steps = {int(k): _as_subspace(ambient, v) for k, v in sorted(steps.items())}
        keys = list(self.steps)
        for k0, k1 in zip(keys, keys[1:]):
            if not self.steps[k0] <= self.steps[k1]:
                raise FiltrationError(f"W_{k0} is not contained in W_{k1}")

    @classmethod
    def trivial(cls, ambient: int, k: int) -> "IncreasingFiltration":
        """Single jump: zero below ``k``, everything from ``k`` on."""
        return cls(ambient, {k - 1: Subspace.zero(ambient), k: Subspace.full(ambient)})

    def __getitem__(self, k: int) -> Subspace:
        best = None
        for key in self.steps:
            if key <= k:
                best = key
            else:
                break
        return Subspace.zero(self.ambient) if best is None else self.steps[best]

    at = __getitem__

    @property
    def top(self) -> Subspace:
        return self.steps[max(self.steps)] if self.steps else Subspace.zero(self.ambient)

    def is_exhaustive(self) -> bool:
        return self.top.is_full()

    def span(self) -> tuple:
        """``(lo, hi)``: ``W_{lo-1} = 0`` and ``W_hi`` is the top."""
        if not self.steps:
            return (0, 0)
        keys = list(self.steps)
        lo = next((k for k in keys if not self.steps[k].is_zero()), keys[-1])
        return lo, keys[-1]

    def jumps(self) -> list:
        """Indices ``k`` with ``Gr_k != 0``."""
        out = []
        prev = 0
        for k, s in self.steps.items():
            if s.dim > prev:
                out.append(k)
            prev = s.dim
        return out

    def shift(self, s: int) -> "IncreasingFiltration":
        """The filtration ``k -> W_{k+s}``."""
        return IncreasingFiltration(self.ambient, {k - s: v for k, v in self.steps.items()})

    def map(self, fn) -> "IncreasingFiltration":
        return IncreasingFiltration(self.ambient, {k: fn(v) for k, v in self.steps.items()})

    def canonical(self) -> dict:
        lo, hi = self.span()
        return {k: self[k] for k in range(lo - 1, hi + 1)}

    def __eq__(self, other):
        if not isinstance(other, IncreasingFiltration) or other.ambient != self.ambient:
            return False
        lo = min(self.span()[0], other.span()[0]) - 1
        hi = max(self.span()[1], other.span()[1])
        return all(self[k] == other[k] for k in range(lo, hi + 1))

    def __repr__(self):
        return "IncreasingFiltration({" + ", ".join(f"{k}: dim {v.dim}" for k, v in self.canonical().items()) + "})"


class DecreasingFiltration:
    """``p -> F^p``.  Above the largest stored index the filtration is zero;
    below the smallest it equals the bottom step."""

    __slots__ = ("ambient", "steps")

    def __init__(self, ambient: int, steps: Mapping[int, object]):
        self.ambient = ambient
        self.steps = {int(k): _as_subspace(ambient, v) for k, v in sorted(steps.items())}
        keys = list(self.steps)
        for k0, k1 in zip(keys, keys[1:]):
            if not self.steps[k1] <= self.steps[k0]:
                raise FiltrationError(f"F^{k1} is not contained in F^{k0}")

    @classmethod
    def trivial(cls, ambient: int, p: int) -> "DecreasingFiltration":
        return cls(ambient, {p: Subspace.full(ambient), p + 1: Subspace.zero(ambient)})

    @classmethod
    def from_frame(cls, ambient: int, frame: Sequence, top: int) -> "DecreasingFiltration":
        """``F^p`` spanned by the first ``top - p`` frame vectors."""
        steps = {}
        for m in range(len(frame) + 1):
            steps[top - m] = Subspace(ambient, frame[:m])
        return cls(ambient, steps)

    def __getitem__(self, p: int) -> Subspace:
        for key in self.steps:
            if key >= p:
                return self.steps[key]
        return Subspace.zero(self.ambient)

    at = __getitem__

    @property
    def bottom(self) -> Subspace:
        return self.steps[min(self.steps)] if self.steps else Subspace.zero(self.ambient)

    def is_exhaustive(self) -> bool:
        return self.bottom.is_full()

    def span(self) -> tuple:
        """``(lo, hi)``: ``F^lo`` is everything and ``F^{hi+1} = 0``."""
        if not self.steps:
            return (0, -1)
        keys = list(self.steps)
        lo = max((k for k in keys if self.steps[k].is_full()), default=keys[0])
        hi = max((k for k in keys if not self.steps[k].is_zero()), default=lo - 1)
        return lo, hi

    def shift(self, s: int) -> "DecreasingFiltration":
        """The filtration ``p -> F^{p+s}``."""
        return DecreasingFiltration(self.ambient, {k - s: v for k, v in self.steps.items()})

    def map(self, fn) -> "DecreasingFiltration":
        return DecreasingFiltration(self.ambient, {k: fn(v) for k, v in self.steps.items()})

    def canonical(self) -> dict:
        lo, hi = self.span()
        return {p: self[p] for p in range(lo, hi + 2)}

    def __eq__(self, other):
        if not isinstance(other, DecreasingFiltration) or other.ambient != self.ambient:
            return False
        lo = min(self.span()[0], other.span()[0])
        hi = max(self.span()[1], other.span()[1]) + 1
        return all(self[p] == other[p] for p in range(lo, hi + 1))

    def __repr__(self):
        return "DecreasingFiltration({" + ", ".join(f"{k}: dim {v.dim}" for k, v in self.canonical().items()) + "})"


@dataclass(frozen=True)
class MixedHodgeStructure:
    """Weight filtration ``W``, Hodge filtration ``F`` and real structure ``J``.

    ``twist`` records the accumulated Tate twist.  Nothing is validated at
    construction beyond shapes; use :func:`check_mhs`.
    """

    dim: int
    W: IncreasingFiltration
    F: DecreasingFiltration
    J: Matrix
    twist: int = 0
    labels: tuple | None = None

    def __post_init__(self):
        if self.W.ambient != self.dim or self.F.ambient != self.dim:
            raise DimensionError("filtrations live in a different ambient space")
        if self.J.shape != (self.dim, self.dim):
            raise DimensionError("conjugation matrix has the wrong shape")

    @classmethod
    def unit(cls) -> "MixedHodgeStructure":
        """The structure ``Q`` of weight 0 and type (0, 0)."""
        return cls(1, IncreasingFiltration.trivial(1, 0), DecreasingFiltration.trivial(1, 0), Matrix.identity(1))

    @classmethod
    def zero(cls) -> "MixedHodgeStructure":
        return cls(0, IncreasingFiltration(0, {}), DecreasingFiltration(0, {}), Matrix([], 0))

    def conj(self, v: Sequence) -> tuple:
        return self.J.apply(conj_vec(vec(v)))

    def conj_subspace(self, S: Subspace) -> Subspace:
        return S.conj(self.J)

    def is_real(self, v: Sequence) -> bool:
        return self.conj(v) == vec(v)

    def weights(self) -> list:
        return self.W.jumps()


def direct_sum(parts: Sequence[MixedHodgeStructure]) -> MixedHodgeStructure:
    parts = list(parts)
    if not parts:
        return MixedHodgeStructure.zero()
    dim = sum(p.dim for p in parts)
    offsets = []
    o = 0
    for p in parts:
        offsets.append(o)
        o += p.dim

    def embed(S: Subspace, off: int) -> list:
        return [tuple([ZERO] * off) + b + tuple([ZERO] * (dim - off - len(b))) for b in S.basis]

    wkeys = sorted({k for p in parts for k in p.W.steps})
    fkeys = sorted({k for p in parts for k in p.F.steps})
    W = {k: Subspace(dim, [v for p, off in zip(parts, offsets) for v in embed(p.W[k], off)]) for k in wkeys}
    F = {k: Subspace(dim, [v for p, off in zip(parts, offsets) for v in embed(p.F[k], off)]) for k in fkeys}
    if fkeys:
        lo = fkeys[0]
        if not F[lo].is_full():
            F[lo - 1] = Subspace.full(dim)
    twists = {p.twist for p in parts}
    return MixedHodgeStructure(
        dim,
        IncreasingFiltration(dim, W),
        DecreasingFiltration(dim, F),
        Matrix.block_diag([p.J for p in parts]),
        twists.pop() if len(twists) == 1 else 0,
    )


def tate_twist(M: MixedHodgeStructure, m: int) -> MixedHodgeStructure:
    """``M(m)``: ``W_k M(m) = W_{k+2m} M``, ``F^p M(m) = F^{p+m} M``.

    The real structure of ``M(m)`` is ``(2 pi i)^m`` times that of ``M``,
    which in the same coordinates multiplies ``J`` by ``(-1)^m``.
    """
    if m == 0:
        return M
    J = M.J if m % 2 == 0 else -M.J
    return MixedHodgeStructure(M.dim, M.W.shift(2 * m), M.F.shift(m), J, M.twist + m, M.labels)


def _check_conj_stable(M: MixedHodgeStructure, S: Subspace, name: str):
    if M.conj_subspace(S) != S:
        raise ValueError(f"{name} is not defined over the real structure")


def subquotient(M: MixedHodgeStructure, sub: Subspace, sup: Subspace, check_real: bool = True):
    """Induced structure on ``sup/sub``; returns ``(structure, quotient map)``."""
    if check_real:
        _check_conj_stable(M, sub, "denominator")
        _check_conj_stable(M, sup, "numerator")
    q = QuotientMap(sub, sup)
    d = q.dim
    W = IncreasingFiltration(d, {k: q.subspace(S) for k, S in M.W.steps.items()})
    if W.steps and not W.top.is_full():
        W = IncreasingFiltration(d, {**W.steps, max(W.steps) + 1: Subspace.full(d)})
    F = DecreasingFiltration(d, {p: q.subspace(S) for p, S in M.F.steps.items()})
    if F.steps and not F.bottom.is_full():
        F = DecreasingFiltration(d, {**F.steps, min(F.steps) - 1: Subspace.full(d)})
    if d:
        J = Matrix.from_columns([q(M.conj(c)) for c in q.complement])
    else:
        J = Matrix([], 0)
    return MixedHodgeStructure(d, W, F, J, M.twist), q


def gr_W(M: MixedHodgeStructure, k: int) -> MixedHodgeStructure:
    """``Gr^W_k`` with the induced Hodge filtration and a single weight ``k``."""
    G, _ = subquotient(M, M.W[k - 1], M.W[k])
    return replace(G, W=IncreasingFiltration.trivial(G.dim, k))


def _p_range(F: DecreasingFiltration, k: int) -> range:
    lo, hi = F.span()
    return range(max(hi, k - lo) + 1, min(lo, k - hi) - 1, -1)


def check_mhs(M: MixedHodgeStructure) -> Verdict:
    """Each ``Gr^W_k`` must satisfy ``F^p + conj F^{k-p+1} = Gr`` as a direct sum.

    Failures report ``(k, p)`` and a witness vector in ambient coordinates.
    """
    v = Verdict()
    if M.dim == 0:
        return v
    if not M.W.is_exhaustive():
        return v.fail("W", "weight filtration is not exhaustive")
    if not M.F.is_exhaustive():
        return v.fail("F", "Hodge filtration is not exhaustive")
    if M.J @ M.J.conj() != Matrix.identity(M.dim):
        return v.fail("J", "conjugation is not an involution")
    for k, S in M.W.steps.items():
        if M.conj_subspace(S) != S:
            return v.fail("W", f"W_{k} is not defined over the real structure", S.basis[0] if S.basis else None)
    for k in M.W.jumps():
        lower, upper = M.W[k - 1], M.W[k]
        for p in _p_range(M.F, k):
            A = (M.F[p] & upper) + lower
            B = M.conj_subspace(M.F[k - p + 1]) & upper
            B = B + lower
            inter = A & B
            if inter.dim > lower.dim:
                witness = next(b for b in inter.basis if not lower.contains(b))
                return v.fail("purity", f"Gr^W_{k}: F^{p} meets conj F^{k - p + 1}", {"k": k, "p": p, "vector": witness})
            total = A + B
            if total.dim < upper.dim:
                witness = next(b for b in upper.basis if not total.contains(b))
                return v.fail("purity", f"Gr^W_{k}: F^{p} + conj F^{k - p + 1} misses a class", {"k": k, "p": p, "vector": witness})
    return v


def real_points(M: MixedHodgeStructure, S: Subspace) -> Subspace:
    """Complex span of the real vectors of ``S`` (that is ``S ∩ conj S``)."""
    return S & M.conj_subspace(S)


def real_spanning_vectors(M: MixedHodgeStructure, S: Subspace) -> list:
    """Real vectors spanning ``S ∩ conj S``."""
    R = real_points(M, S)
    picked: list = []
    span = Subspace.zero(M.dim)
    for b in R.basis:
        cb = M.conj(b)
        for cand in (tuple(x + y for x, y in zip(b, cb)), tuple(I * (x - y) for x, y in zip(b, cb))):
            if any(cand) and not span.contains(cand):
                picked.append(cand)
                span = span + Subspace(M.dim, [cand])
        if span.dim == R.dim:
            break
    return picked


def hom_from_Q(M: MixedHodgeStructure) -> Subspace:
    """Hodge classes: real vectors in ``W_0 ∩ F^0``."""
    verdict = check_mhs(M)
    if not verdict:
        raise ValueError(f"not a mixed Hodge structure: {verdict.summary()}")
    return real_points(M, M.W[0] & M.F[0])


def has_type(M: MixedHodgeStructure, k: int, v: Sequence, p: int, q: int) -> bool:
    """Whether ``[v]`` is a nonzero class of type ``(p, q)`` in ``Gr^W_k``."""
    if p + q != k:
        return False
    lower, upper = M.W[k - 1], M.W[k]
    if not upper.contains(v) or lower.contains(v):
        return False
    Fp = (M.F[p] & upper) + lower
    cFq = (M.conj_subspace(M.F[q]) & upper) + lower
    return Fp.contains(v) and cFq.contains(v)


@dataclass(frozen=True)
class Pairing:
    """Bilinear form ``<x, y> = x^T Q y`` (no conjugation)."""

    matrix: Matrix
    weight: int = -1
    skew: bool = True

    def __call__(self, x: Sequence, y: Sequence) -> GaussScalar:
        Qy = self.matrix.apply(y)
        out = ZERO
        for a, b in zip(vec(x), Qy):
            if a and b:
                out = out + a * b
        return out

    @property
    def dim(self) -> int:
        return self.matrix.nrows

    def is_skew(self) -> bool:
        return self.matrix.T == -self.matrix

    def is_symmetric(self) -> bool:
        return self.matrix.T == self.matrix

    def is_nondegenerate(self) -> bool:
        return self.matrix.rank() == self.matrix.nrows

    def orthogonal(self, S: Subspace, T: Subspace):
        """``None`` if ``<S, T> = 0``, else a witness ``(s, t, value)``."""
        for s in S.basis:
            for t in T.basis:
                val = self(s, t)
                if val:
                    return (s, t, val)
        return None

    def restrict(self, vectors: Sequence) -> "Pairing":
        vs = [vec(v) for v in vectors]
        return Pairing(Matrix([[self(x, y) for y in vs] for x in vs], len(vs)), self.weight, self.skew)

    def scaled(self, c) -> "Pairing":
        return Pairing(self.matrix.scale(as_scalar(c)), self.weight, self.skew)
