"""Exact coefficients.

Rationals are :class:`fractions.Fraction`.  :class:`GaussScalar` is an exact
element of Q(i).  :class:`ParamElement` is a truncated polynomial over Q(i) in
the paired variables ``t_k, t̄_k, z_k, z̄_k, λ, λ̄`` used for the one-parameter
deformations; ``z_k`` stands for ``log t_k``.
"""
from __future__ import annotations

import cmath
import math
import re
from fractions import Fraction
from typing import Iterable, Mapping

__all__ = [
    "Fraction",
    "GaussScalar",
    "I",
    "ONE",
    "ZERO",
    "as_scalar",
    "parse_scalar",
    "format_scalar",
    "ParamRing",
    "ParamElement",
]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


class GaussScalar:
    """An exact Gaussian rational, stored as ``(a + b i) / d`` in lowest terms."""

    __slots__ = ("_a", "_b", "_d")

    def __init__(self, re=0, im=0):
        re, im = _frac(re), _frac(im)
        d = re.denominator * im.denominator // math.gcd(re.denominator, im.denominator)
        self._a = re.numerator * (d // re.denominator)
        self._b = im.numerator * (d // im.denominator)
        self._d = d

    @classmethod
    def _make(cls, a: int, b: int, d: int) -> "GaussScalar":
        if d != 1:
            g = math.gcd(math.gcd(a, b), d)
            if d < 0:
                g = -g
            if g != 1:
                a //= g
                b //= g
                d //= g
        x = object.__new__(cls)
        x._a = a
        x._b = b
        x._d = d
        return x

    @property
    def re(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def im(self) -> Fraction:
        return Fraction(self._b, self._d)

    # construction -------------------------------------------------------
    @staticmethod
    def coerce(x) -> "GaussScalar":
        if isinstance(x, GaussScalar):
            return x
        if isinstance(x, int):
            return GaussScalar._make(x, 0, 1)
        if isinstance(x, Fraction):
            return GaussScalar._make(x.numerator, 0, x.denominator)
        if isinstance(x, str):
            return parse_scalar(x)
        if isinstance(x, complex):
            raise TypeError("floating point complex numbers are not exact scalars")
        raise TypeError(f"cannot interpret {x!r} as a Gaussian rational")

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, GaussScalar):
            try:
                other = GaussScalar.coerce(other)
            except TypeError:
                return NotImplemented
        d1, d2 = self._d, other._d
        if d1 == d2:
            return GaussScalar._make(self._a + other._a, self._b + other._b, d1)
        return GaussScalar._make(self._a * d2 + other._a * d1, self._b * d2 + other._b * d1, d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        return GaussScalar._make(-self._a, -self._b, self._d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if not isinstance(other, GaussScalar):
            try:
                other = GaussScalar.coerce(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        try:
            o = GaussScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if not isinstance(other, GaussScalar):
            if isinstance(other, ParamElement):
                return NotImplemented
            try:
                other = GaussScalar.coerce(other)
            except TypeError:
                return NotImplemented
        a1, b1, a2, b2 = self._a, self._b, other._a, other._b
        if not b1 and not b2:
            return GaussScalar._make(a1 * a2, 0, self._d * other._d)
        return GaussScalar._make(a1 * a2 - b1 * b2, a1 * b2 + b1 * a2, self._d * other._d)

    __rmul__ = __mul__

    def inverse(self) -> "GaussScalar":
        a, b, d = self._a, self._b, self._d
        n = a * a + b * b
        if not n:
            raise ZeroDivisionError("division by zero in Q(i)")
        # d / (a + b i) = d (a - b i) / n
        return GaussScalar._make(d * a, -d * b, n)

    def __truediv__(self, other):
        try:
            o = GaussScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return GaussScalar.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "GaussScalar":
        if not self._b:
            return self
        return GaussScalar._make(self._a, -self._b, self._d)

    def norm(self) -> Fraction:
        return Fraction(self._a * self._a + self._b * self._b, self._d * self._d)

    # comparison ---------------------------------------------------------
    def __bool__(self):
        return bool(self._a) or bool(self._b)

    def __eq__(self, other):
        if isinstance(other, GaussScalar):
            return self._a == other._a and self._b == other._b and self._d == other._d
        if isinstance(other, (int, Fraction)):
            return not self._b and Fraction(self._a, self._d) == other
        return NotImplemented

    def __hash__(self):
        if not self._b:
            return hash(Fraction(self._a, self._d))
        return hash((self._a, self._b, self._d))

    @property
    def is_real(self) -> bool:
        return not self._b

    def __complex__(self):
        return complex(self._a / self._d, self._b / self._d)

    def __repr__(self):
        return f"GaussScalar({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


ZERO = GaussScalar(0)
ONE = GaussScalar(1)
I = GaussScalar(0, 1)


def as_scalar(x) -> GaussScalar:
    return GaussScalar.coerce(x)


_TERM = re.compile(r"([+-]?)([0-9]*(?:/[0-9]+)?)(i?)")


def parse_scalar(text: str) -> GaussScalar:
    """Parse ``"p/q"``, ``"p/q+r/s i"``, ``"-i"``, ``"3/2i"`` and similar."""
    s = str(text).replace(" ", "").replace("−", "-").replace("*", "")
    if not s:
        raise ValueError("empty scalar")
    re_part, im_part = Fraction(0), Fraction(0)
    pos = 0
    seen = False
    while pos < len(s):
        m = _TERM.match(s, pos)
        if m is None or m.end() == pos:
            raise ValueError(f"malformed scalar {text!r}")
        sign, num, imag = m.groups()
        if not num and not imag:
            raise ValueError(f"malformed scalar {text!r}")
        if seen and not sign:
            raise ValueError(f"malformed scalar {text!r}")
        if num.startswith("/"):
            raise ValueError(f"malformed scalar {text!r}")
        value = Fraction(num) if num else Fraction(1)
        if sign == "-":
            value = -value
        if imag:
            im_part += value
        else:
            re_part += value
        seen = True
        pos = m.end()
    return GaussScalar(re_part, im_part)


def format_scalar(x) -> str:
    x = GaussScalar.coerce(x)
    if not x.im:
        return str(x.re)
    im = "" if abs(x.im) == 1 else str(abs(x.im))
    if not x.re:
        return f"{'-' if x.im < 0 else ''}{im}i"
    return f"{x.re}{'-' if x.im < 0 else '+'}{im}i"


# ---------------------------------------------------------------------------
# truncated parameter ring
# ---------------------------------------------------------------------------

_KINDS = ("t", "tb", "z", "zb")


class ParamRing:
    """Polynomials in ``t_k, t̄_k, z_k, z̄_k`` (k = 1..n) and ``λ, λ̄``.

    Terms whose total degree in the t-type and λ-type variables exceeds
    ``truncation`` are discarded; z-type variables are never truncated.
    """

    __slots__ = ("n", "truncation", "nvars", "_weights")

    def __init__(self, n: int, truncation: int = 6):
        if n < 1:
            raise ValueError("need at least one disk variable")
        if truncation < 0:
            raise ValueError("truncation order must be non-negative")
        self.n = n
        self.truncation = truncation
        self.nvars = 4 * n + 2
        self._weights = tuple([1] * (2 * n) + [0] * (2 * n) + [1, 1])

    def __eq__(self, other):
        return isinstance(other, ParamRing) and (self.n, self.truncation) == (other.n, other.truncation)

    def __hash__(self):
        return hash((self.n, self.truncation))

    def __repr__(self):
        return f"ParamRing(n={self.n}, truncation={self.truncation})"

    # variable indices
    def index(self, kind: str, k: int = 0) -> int:
        if kind == "lam":
            return 4 * self.n
        if kind == "lamb":
            return 4 * self.n + 1
        if not 1 <= k <= self.n:
            raise IndexError(f"variable index {k} out of range 1..{self.n}")
        return _KINDS.index(kind) * self.n + (k - 1)

    def partner(self, idx: int) -> int:
        n = self.n
        if idx >= 4 * n:
            return 4 * n + (1 - (idx - 4 * n))
        block, k = divmod(idx, n)
        return {0: 1, 1: 0, 2: 3, 3: 2}[block] * n + k

    def degree(self, mono: tuple) -> int:
        return sum(w * e for w, e in zip(self._weights, mono))

    def var_name(self, idx: int) -> str:
        n = self.n
        if idx == 4 * n:
            return "λ"
        if idx == 4 * n + 1:
            return "λ̄"
        block, k = divmod(idx, n)
        base = ("t", "t̄", "z", "z̄")[block]
        return f"{base}{k + 1}"

    # constructors
    def zero(self) -> "ParamElement":
        return ParamElement(self, {})

    def one(self) -> "ParamElement":
        return self.const(1)

    def const(self, c) -> "ParamElement":
        c = as_scalar(c)
        return ParamElement(self, {(0,) * self.nvars: c} if c else {})

    def var(self, kind: str, k: int = 0) -> "ParamElement":
        mono = [0] * self.nvars
        mono[self.index(kind, k)] = 1
        return ParamElement(self, {tuple(mono): ONE})

    def t(self, k: int) -> "ParamElement":
        return self.var("t", k)

    def tbar(self, k: int) -> "ParamElement":
        return self.var("tb", k)

    def z(self, k: int) -> "ParamElement":
        return self.var("z", k)

    def zbar(self, k: int) -> "ParamElement":
        return self.var("zb", k)

    @property
    def lam(self) -> "ParamElement":
        return self.var("lam")

    @property
    def lambar(self) -> "ParamElement":
        return self.var("lamb")

    def t_product(self) -> "ParamElement":
        """``t_1 t_2 ... t_n``."""
        return ParamElement(self, {tuple([1] * self.n + [0] * (3 * self.n + 2)): ONE})

    def lift(self, x) -> "ParamElement":
        if isinstance(x, ParamElement):
            if x.ring != self:
                raise ValueError(f"element of {x.ring!r} used in {self!r}")
            return x
        return self.const(x)

    def from_terms(self, pairs: Iterable) -> "ParamElement":
        """Build from ``(exponent map, coefficient)`` pairs; names as in :meth:`var_name`."""
        names = {self.var_name(i): i for i in range(self.nvars)}
        aliases = {"lam": 4 * self.n, "lamb": 4 * self.n + 1}
        terms: dict = {}
        for expo, coeff in pairs:
            mono = [0] * self.nvars
            for name, e in dict(expo).items():
                idx = names.get(name, aliases.get(name))
                if idx is None:
                    m = re.fullmatch(r"(t|tb|z|zb)(\d+)", name)
                    if m is None:
                        raise ValueError(f"unknown variable {name!r}")
                    idx = self.index(m.group(1), int(m.group(2)))
                mono[idx] += int(e)
            key = tuple(mono)
            terms[key] = terms.get(key, ZERO) + as_scalar(coeff)
        return ParamElement(self, terms)


class ParamElement:
    """Immutable truncated polynomial; see :class:`ParamRing`."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: ParamRing, terms: Mapping[tuple, GaussScalar]):
        D = ring.truncation
        clean = {}
        for mono, c in terms.items():
            if c and ring.degree(mono) <= D:
                clean[mono] = c
        self.ring = ring
        self.terms = clean

    # arithmetic ---------------------------------------------------------
    def _other(self, other):
        if isinstance(other, ParamElement):
            if other.ring != self.ring:
                raise ValueError("mixing elements of different parameter rings")
            return other
        return self.ring.const(other)

    def __add__(self, other):
        try:
            o = self._other(other)
        except TypeError:
            return NotImplemented
        out = dict(self.terms)
        for m, c in o.terms.items():
            out[m] = out.get(m, ZERO) + c
        return ParamElement(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return ParamElement(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        try:
            o = self._other(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, ParamElement):
            try:
                c = as_scalar(other)
            except TypeError:
                return NotImplemented
            if not c:
                return self.ring.zero()
            return ParamElement(self.ring, {m: v * c for m, v in self.terms.items()})
        o = self._other(other)
        ring = self.ring
        D = ring.truncation
        out: dict = {}
        for m1, c1 in self.terms.items():
            d1 = ring.degree(m1)
            for m2, c2 in o.terms.items():
                if d1 + ring.degree(m2) > D:
                    continue
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, ZERO) + c1 * c2
        return ParamElement(ring, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = self.ring.one()
        for _ in range(k):
            out = out * self
        return out

    # structure ------------------------------------------------------------
    def conj(self) -> "ParamElement":
        ring = self.ring
        perm = [ring.partner(i) for i in range(ring.nvars)]
        out = {}
        for m, c in self.terms.items():
            nm = [0] * ring.nvars
            for i, e in enumerate(m):
                if e:
                    nm[perm[i]] = e
            out[tuple(nm)] = c.conjugate()
        return ParamElement(ring, out)

    def xi(self, k: int) -> "ParamElement":
        """Apply ``t_k d/dt_k`` (with ``z_k = log t_k``); barred variables are constants."""
        ring = self.ring
        it = ring.index("t", k)
        iz = ring.index("z", k)
        out: dict = {}
        for m, c in self.terms.items():
            if m[it]:
                out[m] = out.get(m, ZERO) + c * m[it]
            if m[iz]:
                nm = list(m)
                nm[iz] -= 1
                nm = tuple(nm)
                out[nm] = out.get(nm, ZERO) + c * m[iz]
        return ParamElement(ring, out)

    def truncate(self, D: int) -> "ParamElement":
        ring = self.ring
        return ParamElement(ring, {m: c for m, c in self.terms.items() if ring.degree(m) <= D})

    def substitute(self, values: Mapping[int, "ParamElement | GaussScalar | int"]) -> "ParamElement":
        """Substitute variables (by index) with constants or ring elements."""
        ring = self.ring
        out = ring.zero()
        cache: dict = {}
        for m, c in self.terms.items():
            term = ring.const(c)
            rest = list(m)
            for idx, val in values.items():
                e = m[idx]
                if not e:
                    continue
                rest[idx] = 0
                key = (idx, e)
                if key not in cache:
                    cache[key] = ring.lift(val) ** e
                term = term * cache[key]
            out = out + term * ParamElement(ring, {tuple(rest): ONE})
        return out

    def at_lambda(self, value) -> "ParamElement":
        """Substitute ``λ = value`` and ``λ̄ = conj(value)``."""
        value = as_scalar(value)
        ring = self.ring
        return self.substitute({ring.index("lam"): value, ring.index("lamb"): value.conjugate()})

    def at_t_zero(self) -> "ParamElement":
        """Set every ``t_k`` and ``t̄_k`` to zero (the fibre over the origin)."""
        n = self.ring.n
        return ParamElement(self.ring, {m: c for m, c in self.terms.items() if not any(m[: 2 * n])})

    def depends_on(self, idx: int) -> bool:
        return any(m[idx] for m in self.terms)

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def constant_value(self) -> GaussScalar:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return self.terms.get((0,) * self.ring.nvars, ZERO)

    def coefficient(self, mono: tuple) -> GaussScalar:
        return self.terms.get(tuple(mono), ZERO)

    def t_coefficient(self, texps: tuple) -> "ParamElement":
        """Coefficient of the holomorphic monomial ``t^texps`` (other variables kept)."""
        n = self.ring.n
        texps = tuple(texps)
        out = {}
        for m, c in self.terms.items():
            if m[:n] == texps:
                out[(0,) * n + m[n:]] = c
        return ParamElement(self.ring, out)

    def t_support(self) -> set:
        n = self.ring.n
        return {m[:n] for m in self.terms}

    def evaluate(self, t: Iterable[complex], lam: complex = 0.0) -> complex:
        """Numeric value with ``z_k = log t_k``, ``Im z_k`` in ``[0, 2π)``."""
        ring = self.ring
        t = [complex(x) for x in t]
        if len(t) != ring.n:
            raise ValueError(f"expected {ring.n} disk coordinates, got {len(t)}")
        for x in t:
            if x == 0:
                raise ValueError("log t is undefined at t = 0")
            if abs(x) >= 1:
                raise ValueError("sample points must lie in the punctured unit disk")
        zs = [principal_log(x) for x in t]
        point = t + [x.conjugate() for x in t] + zs + [z.conjugate() for z in zs]
        lam = complex(lam)
        point += [lam, lam.conjugate()]
        total = 0j
        for m, c in self.terms.items():
            v = complex(c)
            for x, e in zip(point, m):
                if e:
                    v *= x**e
            total += v
        return total

    # comparison / display -------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, ParamElement):
            return self.ring == other.ring and self.terms == other.terms
        try:
            return self == self.ring.const(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def sorted_terms(self):
        ring = self.ring
        return sorted(self.terms.items(), key=lambda mc: (ring.degree(mc[0]), sum(mc[0]), tuple(-e for e in mc[0])))

    def to_pairs(self) -> list:
        ring = self.ring
        return [
            [{ring.var_name(i): e for i, e in enumerate(m) if e}, format_scalar(c)]
            for m, c in self.sorted_terms()
        ]

    def __str__(self):
        if not self.terms:
            return "0"
        ring = self.ring
        parts = []
        for m, c in self.sorted_terms():
            factors = []
            for i, e in enumerate(m):
                if e:
                    factors.append(ring.var_name(i) + (f"^{e}" if e > 1 else ""))
            mono = "·".join(factors)
            cs = format_scalar(c)
            if c.im and c.re:
                cs = f"({cs})"
            if not mono:
                parts.append(cs)
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}·{mono}")
        out = " + ".join(parts)
        return out.replace("+ -", "- ")

    def __repr__(self):
        return f"ParamElement({self})"


def principal_log(t: complex) -> complex:
    """``log t`` with imaginary part in ``[0, 2π)``."""
    z = cmath.log(t)
    if z.imag < 0:
        z += 2j * math.pi
    return z
