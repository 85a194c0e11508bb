"""Exact linear algebra over Q(i).

Vectors are tuples of :class:`GaussScalar`; matrices act on column vectors.
Subspaces carry their reduced row-echelon basis, so two subspaces are equal
exactly when their bases are equal.
"""
from __future__ import annotations

from typing import Iterable, Sequence

from .scalars import ONE, ZERO, GaussScalar, as_scalar, format_scalar, parse_scalar

__all__ = [
    "Matrix",
    "Subspace",
    "QuotientMap",
    "DimensionError",
    "rref",
    "rank",
    "kernel",
    "image",
    "preimage",
    "solve",
    "quotient_map",
    "vec",
    "conj_vec",
]


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


def vec(values: Iterable) -> tuple:
    return tuple(as_scalar(x) for x in values)


def conj_vec(v: Sequence[GaussScalar]) -> tuple:
    return tuple(x.conjugate() for x in v)


def _axpy(a: GaussScalar, x: Sequence, y: Sequence) -> list:
    return [yi + a * xi if xi else yi for xi, yi in zip(x, y)]


def rref(rows: Iterable[Sequence], ncols: int | None = None):
    """Reduced row-echelon form; returns ``(nonzero rows, pivot columns)``.

    Pivots are the leftmost nonzero column of each row.
    """
    m = [list(map(as_scalar, r)) for r in rows]
    if not m:
        return [], []
    width = len(m[0]) if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(width):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = ONE / m[r][c]
        if inv != 1:
            m[r] = [x * inv if x else x for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                m[i] = _axpy(-m[i][c], m[r], m[i])
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return [tuple(row) for row in m[:r]], pivots


class Matrix:
    """Dense exact matrix."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Sequence], ncols: int | None = None):
        self.rows = tuple(vec(r) for r in rows)
        self.nrows = len(self.rows)
        if self.nrows:
            widths = {len(r) for r in self.rows}
            if len(widths) != 1:
                raise DimensionError("ragged matrix rows")
            self.ncols = widths.pop()
            if ncols is not None and ncols != self.ncols:
                raise DimensionError(f"expected {ncols} columns, got {self.ncols}")
        else:
            if ncols is None:
                raise DimensionError("empty matrix needs an explicit column count")
            self.ncols = ncols

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Matrix":
        return cls([[ZERO] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int | None = None) -> "Matrix":
        cols = [vec(c) for c in cols]
        if not cols:
            if nrows is None:
                raise DimensionError("need nrows for an empty column list")
            return cls([[] for _ in range(nrows)], 0) if nrows else cls([], 0)
        return cls(list(zip(*cols)), len(cols))

    @classmethod
    def block_diag(cls, blocks: Sequence["Matrix"]) -> "Matrix":
        R = sum(b.nrows for b in blocks)
        C = sum(b.ncols for b in blocks)
        rows = [[ZERO] * C for _ in range(R)]
        r0 = c0 = 0
        for b in blocks:
            for i, row in enumerate(b.rows):
                rows[r0 + i][c0 : c0 + b.ncols] = row
            r0 += b.nrows
            c0 += b.ncols
        return cls(rows, C)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list:
        return [self.col(j) for j in range(self.ncols)]

    @property
    def T(self) -> "Matrix":
        return Matrix([self.col(j) for j in range(self.ncols)], self.nrows)

    def apply(self, v: Sequence) -> tuple:
        if len(v) != self.ncols:
            raise DimensionError(f"vector of length {len(v)} for a {self.shape} matrix")
        v = vec(v)
        out = []
        for r in self.rows:
            s = ZERO
            for a, b in zip(r, v):
                if a and b:
                    s = s + a * b
            out.append(s)
        return tuple(out)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
            cols = [self.apply(c) for c in other.columns()]
            if not cols:
                return Matrix([[] for _ in range(self.nrows)], 0) if self.nrows else Matrix([], 0)
            return Matrix.from_columns(cols)
        return self.apply(other)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return Matrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __neg__(self):
        return Matrix([[-a for a in r] for r in self.rows], self.ncols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, c) -> "Matrix":
        c = as_scalar(c)
        return Matrix([[c * a for a in r] for r in self.rows], self.ncols)

    def __pow__(self, k: int) -> "Matrix":
        if self.nrows != self.ncols:
            raise DimensionError("power of a non-square matrix")
        out = Matrix.identity(self.nrows)
        for _ in range(k):
            out = out @ self
        return out

    def conj(self) -> "Matrix":
        return Matrix([conj_vec(r) for r in self.rows], self.ncols)

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.rows)

    def rank(self) -> int:
        return len(rref(self.rows, self.ncols)[1]) if self.nrows else 0

    def inverse(self) -> "Matrix":
        n = self.nrows
        if n != self.ncols:
            raise DimensionError("inverse of a non-square matrix")
        aug = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(self.rows)]
        red, piv = rref(aug, 2 * n)
        if piv[:n] != list(range(n)) or len(red) < n:
            raise ZeroDivisionError("singular matrix")
        return Matrix([r[n:] for r in red], n)

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def to_strings(self) -> list:
        return [[format_scalar(x) for x in r] for r in self.rows]

    @classmethod
    def from_strings(cls, rows) -> "Matrix":
        return cls([[parse_scalar(str(x)) for x in r] for r in rows])

    def __repr__(self):
        return f"Matrix({self.to_strings()})"


class Subspace:
    """A subspace of ``Q(i)^ambient`` with canonical echelon basis."""

    __slots__ = ("ambient", "basis", "pivots")

    def __init__(self, ambient: int, vectors: Iterable[Sequence] = ()):
        vectors = [vec(v) for v in vectors]
        for v in vectors:
            if len(v) != ambient:
                raise DimensionError(f"vector of length {len(v)} in ambient dimension {ambient}")
        self.ambient = ambient
        if vectors:
            self.basis, self.pivots = rref(vectors, ambient)
            self.basis = tuple(self.basis)
            self.pivots = tuple(self.pivots)
        else:
            self.basis, self.pivots = (), ()

    @classmethod
    def zero(cls, ambient: int) -> "Subspace":
        return cls(ambient)

    @classmethod
    def full(cls, ambient: int) -> "Subspace":
        return cls(ambient, Matrix.identity(ambient).rows)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __len__(self):
        return self.dim

    def is_zero(self) -> bool:
        return not self.basis

    def is_full(self) -> bool:
        return self.dim == self.ambient

    def _check(self, other: "Subspace"):
        if self.ambient != other.ambient:
            raise DimensionError(f"ambient dimensions {self.ambient} and {other.ambient} differ")

    def contains(self, v: Sequence) -> bool:
        v = list(vec(v))
        if len(v) != self.ambient:
            raise DimensionError("membership test with wrong vector length")
        for row, p in zip(self.basis, self.pivots):
            if v[p]:
                v = _axpy(-v[p], row, v)
        return not any(v)

    def coordinates(self, v: Sequence) -> tuple | None:
        """Coefficients of ``v`` in the echelon basis, or ``None`` if ``v`` is outside."""
        v = list(vec(v))
        coeffs = []
        for row, p in zip(self.basis, self.pivots):
            c = v[p]
            coeffs.append(c)
            if c:
                v = _axpy(-c, row, v)
        return tuple(coeffs) if not any(v) else None

    def __contains__(self, v):
        return self.contains(v)

    def __le__(self, other: "Subspace") -> bool:
        self._check(other)
        return all(other.contains(b) for b in self.basis)

    def __ge__(self, other: "Subspace") -> bool:
        return other <= self

    def __add__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace(self.ambient, self.basis + other.basis)

    def __and__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if self.is_zero() or other.is_zero():
            return Subspace.zero(self.ambient)
        if self.is_full():
            return other
        if other.is_full():
            return self
        ann = self.annihilator().rows + other.annihilator().rows
        return kernel(Matrix(ann, self.ambient))

    def annihilator(self) -> Matrix:
        """Rows spanning ``{y : sum_i y_i s_i = 0 for s in self}``."""
        if not self.basis:
            return Matrix.identity(self.ambient)
        return Matrix(kernel(Matrix(self.basis, self.ambient)).basis, self.ambient)

    def complement_in(self, other: "Subspace") -> list:
        """Echelon rows of ``other`` extending a basis of ``self`` (which must lie inside)."""
        if not self <= other:
            raise ValueError("subspace is not contained in the target")
        picked = []
        current = self
        for row in other.basis:
            if not current.contains(row):
                picked.append(row)
                current = Subspace(self.ambient, current.basis + (row,))
        return picked

    def conj(self, J: Matrix | None = None) -> "Subspace":
        """Image under ``v -> J * conj(v)``; ``J=None`` means entrywise conjugation."""
        vs = [conj_vec(b) for b in self.basis]
        if J is not None:
            vs = [J.apply(v) for v in vs]
        return Subspace(self.ambient, vs)

    def image_under(self, M: Matrix) -> "Subspace":
        if M.ncols != self.ambient:
            raise DimensionError("map does not act on this ambient space")
        return Subspace(M.nrows, [M.apply(b) for b in self.basis])

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.ambient == other.ambient and self.basis == other.basis

    def __hash__(self):
        return hash((self.ambient, self.basis))

    def to_strings(self) -> list:
        return [[format_scalar(x) for x in b] for b in self.basis]

    def __repr__(self):
        return f"Subspace(ambient={self.ambient}, dim={self.dim}, basis={self.to_strings()})"


def rank(M: Matrix) -> int:
    return M.rank()


def kernel(M: Matrix) -> Subspace:
    n = M.ncols
    if not M.nrows:
        return Subspace.full(n)
    red, piv = rref(M.rows, n)
    free = [c for c in range(n) if c not in piv]
    vecs = []
    for f in free:
        v = [ZERO] * n
        v[f] = ONE
        for row, p in zip(red, piv):
            v[p] = -row[f]
        vecs.append(v)
    return Subspace(n, vecs)


def image(M: Matrix) -> Subspace:
    return Subspace(M.nrows, M.columns())


def preimage(M: Matrix, S: Subspace) -> Subspace:
    """``{v : M v in S}``."""
    if S.ambient != M.nrows:
        raise DimensionError("target subspace does not live in the codomain")
    if S.is_full():
        return Subspace.full(M.ncols)
    return kernel(S.annihilator() @ M)


def solve(M: Matrix, b: Sequence) -> tuple | None:
    """Some ``x`` with ``M x = b`` (free variables set to zero), or ``None``."""
    b = vec(b)
    if len(b) != M.nrows:
        raise DimensionError("right-hand side has the wrong length")
    n = M.ncols
    if not M.nrows:
        return tuple([ZERO] * n)
    aug = [list(r) + [bi] for r, bi in zip(M.rows, b)]
    red, piv = rref(aug, n + 1)
    if piv and piv[-1] == n:
        return None
    x = [ZERO] * n
    for row, p in zip(red, piv):
        x[p] = row[n]
    return tuple(x)


class QuotientMap:
    """Coordinates on ``B/A`` for subspaces ``A <= B``.

    ``complement`` lists vectors of ``B`` whose classes form the quotient basis.
    """

    __slots__ = ("sub", "sup", "complement", "_frame")

    def __init__(self, sub: Subspace, sup: Subspace):
        if sub.ambient != sup.ambient:
            raise DimensionError("ambient dimensions differ")
        if not sub <= sup:
            raise ValueError("quotient requires A to be contained in B")
        self.sub = sub
        self.sup = sup
        self.complement = tuple(sub.complement_in(sup))
        frame = list(sub.basis) + list(self.complement)
        self._frame = Matrix.from_columns(frame) if frame else None

    @property
    def dim(self) -> int:
        return len(self.complement)

    def __call__(self, v: Sequence) -> tuple:
        if self._frame is None:
            if self.sup.contains(v):
                return ()
            raise ValueError("vector lies outside the quotient's numerator")
        x = solve(self._frame, v)
        if x is None:
            raise ValueError("vector lies outside the quotient's numerator")
        return x[self.sub.dim :]

    def lift(self, coords: Sequence) -> tuple:
        coords = vec(coords)
        if len(coords) != self.dim:
            raise DimensionError("quotient coordinates have the wrong length")
        out = [ZERO] * self.sup.ambient
        for c, v in zip(coords, self.complement):
            if c:
                out = _axpy(c, v, out)
        return tuple(out)

    def subspace(self, S: Subspace) -> Subspace:
        """Image of ``(S ∩ B) + A`` in the quotient coordinates."""
        inside = S & self.sup
        return Subspace(self.dim, [self(v) for v in inside.basis])

    def induced(self, M: Matrix, target: "QuotientMap") -> Matrix:
        """Matrix of the map ``B/A -> B'/A'`` induced by ``M`` (which must respect both)."""
        cols = [target(M.apply(c)) for c in self.complement]
        if not cols:
            return Matrix([[] for _ in range(target.dim)], 0) if target.dim else Matrix([], 0)
        return Matrix.from_columns(cols)


def quotient_map(sub: Subspace, sup: Subspace) -> QuotientMap:
    return QuotientMap(sub, sup)
