"""One-parameter deformation of the four-dimensional nilpotent orbit.

Sections are written in the horizontal (multivalued) frame ``u_1..u_4``;
``t_k d/dt_k`` then acts on coefficients only.  The Deligne frame is
``ũ = exp(-sum_k z_k N) u`` and the Hodge frame ``w_1..w_4`` is given in
``ũ``-coordinates (``T = t_1 ... t_n``)::

    w_1 = ũ_1 + C λ T (ũ_2 + a ũ_3 + λ T ũ_4 / 2)
    w_2 = ũ_2 + (a - 1) ũ_3 + λ T ũ_4
    w_3 = -ũ_3 + λ T ũ_4
    w_4 = ũ_4

with ``F^p`` spanned by ``w_1 .. w_{2-p}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import combinations, permutations
from typing import Sequence

import numpy as np

from .linalg import Matrix, solve
from .mhs import DecreasingFiltration, MixedHodgeStructure, Pairing, Verdict, check_mhs, hom_from_Q
from .orbits import FourVectorBasis, NilpotentOrbit, monodromy_filtration, validate_four_vector_basis
from .scalars import ONE, ZERO, Fraction, GaussScalar, ParamElement, ParamRing, as_scalar

__all__ = [
    "DeformationFamily",
    "Sample",
    "SampleResult",
    "PositivityReport",
    "FrameIndependence",
    "LimitFiber",
    "HypothesisResult",
    "LinearForm",
    "Feasibility",
    "Certificate",
    "deligne_matrix",
    "horizontal_to_deligne",
    "standard_tilde_frame",
    "build_family",
    "family_from_orbit",
    "check_transversality",
    "connection_matrix",
    "check_orthogonality",
    "conjugate_frame_closed_form",
    "check_conjugate_frame",
    "frame_determinant",
    "check_frame_independence",
    "default_samples",
    "check_positivity",
    "limit_fiber",
    "check_surjectivity_hypothesis",
    "vanishing_certificate",
]

Vector = tuple  # of ParamElement


# ---------------------------------------------------------------------------
# matrices over the parameter ring
# ---------------------------------------------------------------------------

def _pmat(ring: ParamRing, M: Matrix) -> list:
    return [[ring.const(x) for x in row] for row in M.rows]


def _pmul(A: list, B: list, ring: ParamRing) -> list:
    n, m, p = len(A), len(B), len(B[0]) if B else 0
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            s = ring.zero()
            for k in range(m):
                if A[i][k] and B[k][j]:
                    s = s + A[i][k] * B[k][j]
            row.append(s)
        out.append(row)
    return out


def _papply(A: list, v: Sequence, ring: ParamRing) -> Vector:
    out = []
    for row in A:
        s = ring.zero()
        for a, x in zip(row, v):
            if a and x:
                s = s + a * x
        out.append(s)
    return tuple(out)


def _identity(ring: ParamRing, d: int) -> list:
    return [[ring.one() if i == j else ring.zero() for j in range(d)] for i in range(d)]


def _padd(A: list, B: list) -> list:
    return [[a + b for a, b in zip(r, s)] for r, s in zip(A, B)]


def _columns(A: list) -> list:
    return [tuple(row[j] for row in A) for j in range(len(A[0]))]


def _from_columns(cols: Sequence) -> list:
    return [[c[i] for c in cols] for i in range(len(cols[0]))]


def _is_zero_vec(v) -> bool:
    return not any(bool(x) for x in v)


def _exp_nilpotent(X: list, ring: ParamRing) -> list:
    d = len(X)
    out = _identity(ring, d)
    term = _identity(ring, d)
    for m in range(1, d + 1):
        term = _pmul(term, X, ring)
        term = [[x * Fraction(1, m) for x in row] for row in term]
        if all(not x for row in term for x in row):
            break
        out = _padd(out, term)
    return out


def deligne_matrix(ring: ParamRing, Ns: Sequence[Matrix], sign: int = -1) -> list:
    """``exp(sign * sum_k z_k N_k)``; columns are the Deligne frame in horizontal coordinates."""
    d = Ns[0].nrows
    X = [[ring.zero() for _ in range(d)] for _ in range(d)]
    for k, N in enumerate(Ns, start=1):
        z = ring.z(k) * sign
        X = _padd(X, [[z * x if x else ring.zero() for x in row] for row in N.rows])
    return _exp_nilpotent(X, ring)


def horizontal_to_deligne(v: Sequence, Ns: Sequence[Matrix], ring: ParamRing) -> Vector:
    """``exp(-sum_k z_k N_k) v`` in horizontal coordinates."""
    return _papply(deligne_matrix(ring, Ns), [ring.lift(x) for x in v], ring)


def _frame_inverse(cols: Sequence[Vector], ring: ParamRing) -> list:
    """Inverse of the frame matrix as a truncated power series in the t/λ degree."""
    d = len(cols)
    Wm = _from_columns(cols)
    D = ring.truncation
    W0 = Matrix([[_degree_zero(x) for x in row] for row in Wm])
    W0i = _pmat(ring, W0.inverse())
    W1 = [[x - ring.const(_degree_zero(x)) for x in row] for row in Wm]
    step = _pmul(W0i, W1, ring)
    step = [[-x for x in row] for row in step]
    total = _identity(ring, d)
    power = _identity(ring, d)
    for _ in range(D):
        power = _pmul(power, step, ring)
        if all(not x for row in power for x in row):
            break
        total = _padd(total, power)
    return _pmul(total, W0i, ring)


def _degree_zero(x: ParamElement) -> GaussScalar:
    ring = x.ring
    out = ZERO
    for m, c in x.terms.items():
        if ring.degree(m) == 0:
            if any(m):
                raise ValueError("frame has a logarithmic term at degree zero; not invertible as a power series")
            out = c
    return out


# ---------------------------------------------------------------------------
# the family
# ---------------------------------------------------------------------------

def standard_tilde_frame(ring: ParamRing, a, C, lam: ParamElement) -> tuple:
    """The four Hodge frame vectors in ``ũ``-coordinates."""
    a, C = as_scalar(a), as_scalar(C)
    L = lam * ring.t_product()
    zero, one = ring.zero(), ring.one()
    half = Fraction(1, 2)
    w1 = (one, L * C, L * (C * a), L * L * (C * half))
    w2 = (zero, one, ring.const(a - 1), L)
    w3 = (zero, zero, -one, L)
    w4 = (zero, zero, zero, one)
    return (w1, w2, w3, w4)


@dataclass(frozen=True)
class DeformationFamily:
    """Hodge frame over the parameter ring for the pull-back to ``n`` disks.

    ``lam_value`` is ``None`` for a symbolic ``λ``.  ``tilde_frame`` may be
    replaced (``dataclasses.replace``) to study perturbed frames.
    """

    ring: ParamRing
    a: GaussScalar
    C: GaussScalar
    lam_value: GaussScalar | None
    J: Matrix
    N: Matrix
    pairing: Pairing
    tilde_frame: tuple
    c: tuple | None = None

    @property
    def n(self) -> int:
        return self.ring.n

    @property
    def lam(self) -> ParamElement:
        return self.ring.lam if self.lam_value is None else self.ring.const(self.lam_value)

    @property
    def T(self) -> ParamElement:
        return self.ring.t_product()

    @property
    def Ns(self) -> tuple:
        return tuple([self.N] * self.n)

    def deligne(self) -> list:
        return deligne_matrix(self.ring, self.Ns)

    def frame(self) -> tuple:
        """``w_1..w_4`` in horizontal coordinates."""
        E = self.deligne()
        return tuple(_papply(E, w, self.ring) for w in self.tilde_frame)

    def conj_vector(self, v: Vector) -> Vector:
        cv = [x.conj() for x in v]
        return _papply(_pmat(self.ring, self.J), cv, self.ring)

    def conj_frame(self) -> tuple:
        return tuple(self.conj_vector(w) for w in self.frame())

    def xi(self, v: Vector, k: int) -> Vector:
        return tuple(x.xi(k) for x in v)

    def pair(self, x: Vector, y: Vector) -> ParamElement:
        Q = self.pairing.matrix
        s = self.ring.zero()
        for i, row in enumerate(Q.rows):
            if not x[i]:
                continue
            for j, q in enumerate(row):
                if q and y[j]:
                    s = s + x[i] * y[j] * q
        return s

    def to_tilde(self, v: Vector) -> Vector:
        return _papply(deligne_matrix(self.ring, self.Ns, sign=1), v, self.ring)

    def with_lambda(self, value) -> "DeformationFamily":
        """Substitute a numeric ``λ`` into the frame."""
        value = as_scalar(value)
        frame = tuple(tuple(x.at_lambda(value) for x in w) for w in self.tilde_frame)
        return replace(self, lam_value=value, tilde_frame=frame)

    def numeric_frame(self, t: Sequence[complex], lam: complex = 0.0) -> np.ndarray:
        """Frame vectors as columns of a complex matrix."""
        cols = [[x.evaluate(t, lam) for x in w] for w in self.frame()]
        return np.array(cols, dtype=complex).T


def build_family(
    a=Fraction(3, 2),
    C=Fraction(1, 2),
    lam=None,
    n: int = 1,
    truncation: int = 6,
    J: Matrix | None = None,
    N: Matrix | None = None,
    pairing: Pairing | None = None,
) -> DeformationFamily:
    """Family on the ``u``-basis; ``a`` is the frame constant (``w_2`` at ``t = 0``
    is ``ũ_2 + (a - 1) ũ_3``) and ``lam=None`` keeps ``λ`` symbolic."""
    from .fixtures import four_dim_conj, four_dim_N, four_dim_pairing

    ring = ParamRing(n, truncation)
    lam_value = None if lam is None else as_scalar(lam)
    lam_el = ring.lam if lam_value is None else ring.const(lam_value)
    frame = standard_tilde_frame(ring, a, C, lam_el)
    return DeformationFamily(
        ring,
        as_scalar(a),
        as_scalar(C),
        lam_value,
        J if J is not None else four_dim_conj(),
        N if N is not None else four_dim_N(),
        pairing if pairing is not None else four_dim_pairing(),
        frame,
    )


def family_from_orbit(
    orbit: NilpotentOrbit,
    basis: FourVectorBasis,
    lam=None,
    n: int = 1,
    truncation: int = 6,
    C=None,
) -> DeformationFamily:
    """Family on the span of ``u_1..u_4``; ``C`` defaults to ``<u_1,u_4>/<u_2,u_3>``."""
    verdict = validate_four_vector_basis(orbit, basis.u, basis.a)
    if not verdict:
        raise ValueError(f"invalid basis: {verdict.summary()}")
    H = orbit.limit
    N = orbit.N[0]
    P = orbit.pairing
    frame = Matrix.from_columns(basis.u)

    def coords(v):
        x = solve(frame, v)
        if x is None:
            raise ValueError("vector outside the span of u_1..u_4")
        return x

    Ju = Matrix.from_columns([coords(H.conj(u)) for u in basis.u])
    Nu = Matrix.from_columns([coords(N.apply(u)) for u in basis.u])
    Qu = Matrix([[P(x, y) for y in basis.u] for x in basis.u])
    s, r = basis.pairing_constants(P)
    if C is None:
        C = r / s
    return build_family(basis.a + 1, C, lam, n, truncation, Ju, Nu, Pairing(Qu, P.weight))


# ---------------------------------------------------------------------------
# symbolic checks
# ---------------------------------------------------------------------------

def _vec_str(v: Vector) -> str:
    return "(" + ", ".join(str(x) for x in v) + ")"


def _lin(coeffs: Sequence, vecs: Sequence[Vector], ring: ParamRing) -> Vector:
    out = [ring.zero()] * len(vecs[0])
    for c, v in zip(coeffs, vecs):
        if not c:
            continue
        out = [o + c * x for o, x in zip(out, v)]
    return tuple(out)


def check_transversality(fam: DeformationFamily) -> Verdict:
    """``ξ_k w_1 = CλT w_2``, ``ξ_k w_2 = w_3``, ``ξ_k w_3 = λT w_4``, ``ξ_k w_4 = 0``
    exactly, and ``ξ_k F^p ⊆ F^{p-1}`` via the connection matrix."""
    v = Verdict()
    ring = fam.ring
    w = fam.frame()
    LT = fam.lam * fam.T
    zero = tuple([ring.zero()] * 4)
    expected = (
        tuple(x * LT * fam.C for x in w[1]),
        w[2],
        tuple(x * LT for x in w[3]),
        zero,
    )
    for k in range(1, fam.n + 1):
        for j in range(4):
            diff = tuple(p - q for p, q in zip(fam.xi(w[j], k), expected[j]))
            if not _is_zero_vec(diff):
                v.fail(f"ξ_{k} w_{j + 1}", f"ξ_{k} w_{j + 1} differs from the expected value by {_vec_str(diff)}", diff)
        try:
            G = connection_matrix(fam, k)
        except ValueError as exc:
            v.fail("frame", str(exc))
            continue
        for j in range(4):
            for l in range(j + 2, 4):
                if G[l][j]:
                    v.fail(f"griffiths ξ_{k}", f"ξ_{k} w_{j + 1} has w_{l + 1}-component {G[l][j]}", G[l][j])
    return v


def connection_matrix(fam: DeformationFamily, k: int) -> list:
    """``G`` with ``ξ_k w_j = sum_l G[l][j] w_l`` over the parameter ring."""
    ring = fam.ring
    tilde = fam.tilde_frame
    N = _pmat(ring, fam.N)
    # in ũ-coordinates ξ_k acts as (coefficientwise ξ_k) - N
    images = []
    for w in tilde:
        xw = tuple(x.xi(k) for x in w)
        Nw = _papply(N, w, ring)
        images.append(tuple(a - b for a, b in zip(xw, Nw)))
    Winv = _frame_inverse(tilde, ring)
    return _pmul(Winv, _from_columns(images), ring)


def check_orthogonality(fam: DeformationFamily) -> Verdict:
    """``<F^p, F^{-p}> = 0`` for all ``p``: ``<w_i, w_j> = 0`` whenever ``i + j <= 4``."""
    v = Verdict()
    w = fam.frame()
    for i in range(4):
        for j in range(4):
            if i + j + 2 <= 4:
                val = fam.pair(w[i], w[j])
                if val:
                    v.fail(f"<w_{i + 1}, w_{j + 1}>", f"<w_{i + 1}, w_{j + 1}> = {val}", val)
    return v


def conjugate_frame_closed_form(fam: DeformationFamily) -> tuple:
    """``conj w_j`` in horizontal coordinates, written out directly."""
    ring = fam.ring
    n = fam.n
    Tb = fam.T.conj()
    Lb = fam.lam.conj()
    Zb = ring.zero()
    for k in range(1, n + 1):
        Zb = Zb + ring.zbar(k)
    ab = fam.a.conjugate()
    Cb = fam.C.conjugate()
    zero, one = ring.zero(), ring.one()
    half = Fraction(1, 2)
    LbTb = Lb * Tb
    wb1 = (LbTb * LbTb * (Cb * half), LbTb * Cb, LbTb * (Zb - ab) * Cb, one)
    wb2 = (LbTb, one, Zb - ab + 1, zero)
    wb3 = (LbTb, zero, one, zero)
    wb4 = (one, zero, zero, zero)
    return (wb1, wb2, wb3, wb4)


def check_conjugate_frame(fam: DeformationFamily) -> Verdict:
    v = Verdict()
    for j, (got, want) in enumerate(zip(fam.conj_frame(), conjugate_frame_closed_form(fam))):
        diff = tuple(p - q for p, q in zip(got, want))
        if not _is_zero_vec(diff):
            v.fail(f"conj w_{j + 1}", f"conj w_{j + 1} differs from the closed form by {_vec_str(diff)}", diff)
    return v


def _leibniz_det(rows: Sequence[Vector], ring: ParamRing) -> ParamElement:
    d = len(rows)
    total = ring.zero()
    for perm in permutations(range(d)):
        inv = sum(1 for i in range(d) for j in range(i + 1, d) if perm[i] > perm[j])
        term = ring.one()
        for i in range(d):
            x = rows[i][perm[i]]
            if not x:
                term = ring.zero()
                break
            term = term * x
        if term:
            total = total + (-term if inv % 2 else term)
    return total


def frame_determinant(fam: DeformationFamily) -> ParamElement:
    """Determinant of the rows ``w_1, w_2, w_3, conj w_1`` (horizontal coordinates)."""
    w = fam.frame()
    return _leibniz_det([w[0], w[1], w[2], fam.conj_vector(w[0])], fam.ring)


# ---------------------------------------------------------------------------
# numeric checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Sample:
    t: tuple
    lam: complex = 0.0

    def label(self) -> str:
        ts = ",".join(_cstr(x) for x in self.t)
        return f"t=({ts}) λ={_cstr(self.lam)}"


def _cstr(x: complex) -> str:
    x = complex(x)
    return f"{x.real:.6g}{x.imag:+.6g}i"


def default_samples(n: int = 1, lams=(0.0, 1e-3, 1e-2j), radii=(1e-1, 1e-2)) -> list:
    """``t`` over two radii times the phases ``1, i, -1, -i`` for each ``λ``."""
    phases = (1, 1j, -1, -1j)
    out = []
    for lam in lams:
        for r in radii:
            for ph in phases:
                out.append(Sample(tuple([r * ph] * n), complex(lam)))
    return out


@dataclass
class FrameIndependence:
    determinant: ParamElement
    values: list
    tolerance: float
    at_lambda_zero: ParamElement | None

    @property
    def ok(self) -> bool:
        return all(abs(v) > self.tolerance for _, v in self.values)

    def __bool__(self):
        return self.ok


def check_frame_independence(fam: DeformationFamily, samples: Sequence[Sample] | None = None, tol: float = 1e-9) -> FrameIndependence:
    det = frame_determinant(fam)
    samples = default_samples(fam.n) if samples is None else samples
    values = [(s, det.evaluate(s.t, s.lam)) for s in samples]
    at0 = det.at_lambda(0) if fam.lam_value is None else None
    return FrameIndependence(det, values, tol, at0)


@dataclass
class SampleResult:
    sample: Sample
    dims: dict
    values: dict
    ok: bool
    reason: str = ""


@dataclass
class PositivityReport:
    results: list
    tolerance: float

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def __bool__(self):
        return self.ok

    @property
    def min_margin(self) -> float:
        vals = [v for r in self.results for v in r.values.values()]
        return min(vals) if vals else float("nan")

    def failures(self) -> list:
        return [r for r in self.results if not r.ok]


def _null_space(M: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    u, s, vh = np.linalg.svd(M)
    scale = s[0] if s.size else 1.0
    rank = int(np.sum(s > rtol * max(scale, 1.0)))
    return vh[rank:].conj().T


def check_positivity(fam: DeformationFamily, samples: Sequence[Sample] | None = None, tol: float = 1e-9) -> PositivityReport:
    """For ``p = 1, 0, -1, -2``: ``F^p ∩ conj F^{-1-p}`` is a line spanned by
    ``η`` and ``(2πi)^{-1} <η, i^{-2p-1} conj η>`` exceeds ``tol``."""
    samples = default_samples(fam.n) if samples is None else samples
    J = np.array([[complex(x) for x in r] for r in fam.J.rows])
    Q = np.array([[complex(x) for x in r] for r in fam.pairing.matrix.rows])
    results = []
    for s in samples:
        Wn = fam.numeric_frame(s.t, s.lam)
        Wb = J @ Wn.conj()
        dims, values = {}, {}
        ok, reason = True, ""
        for p in (1, 0, -1, -2):
            A = Wn[:, : 2 - p]
            B = Wb[:, : 3 + p]
            K = _null_space(np.hstack([A, -B]))
            dims[p] = K.shape[1]
            if K.shape[1] != 1:
                ok, reason = False, f"dim F^{p} ∩ conj F^{-1 - p} = {K.shape[1]}"
                continue
            eta = A @ K[: A.shape[1], 0]
            eta = eta / np.linalg.norm(eta)
            eta_bar = J @ eta.conj()
            val = (1j ** (-2 * p - 1)) * (eta @ Q @ eta_bar) / (2j * math.pi)
            values[p] = float(val.real)
            if abs(val.imag) > 1e-8 * max(1.0, abs(val)):
                ok, reason = False, f"value for p={p} is not real ({val})"
            elif val.real <= tol:
                ok, reason = False, f"value for p={p} is {val.real:.3e}"
        results.append(SampleResult(s, dims, values, ok, reason))
    return PositivityReport(results, tol)


# ---------------------------------------------------------------------------
# limit fibre and hypothesis check
# ---------------------------------------------------------------------------

@dataclass
class LimitFiber:
    frame: tuple
    lam_free: bool
    mhs: MixedHodgeStructure | None
    verdict: Verdict


def limit_fiber(fam: DeformationFamily) -> LimitFiber:
    """Set ``t_k = t̄_k = 0`` in the ``ũ``-frame; the result must be constant."""
    ring = fam.ring
    frame = tuple(tuple(x.at_t_zero() for x in w) for w in fam.tilde_frame)
    lam_idx = (ring.index("lam"), ring.index("lamb"))
    lam_free = not any(x.depends_on(i) for w in frame for x in w for i in lam_idx)
    verdict = Verdict()
    if not lam_free:
        verdict.fail("λ-free", "limit frame depends on λ")
        return LimitFiber(frame, False, None, verdict)
    if not all(x.is_constant() for w in frame for x in w):
        verdict.fail("constant", "limit frame depends on the logarithms")
        return LimitFiber(frame, True, None, verdict)
    vecs = [tuple(x.constant_value() for x in w) for w in frame]
    F = DecreasingFiltration.from_frame(4, vecs, 2)
    W = monodromy_filtration(fam.N, -1)
    H = MixedHodgeStructure(4, W, F, fam.J)
    verdict.merge(check_mhs(H), "mhs:")
    return LimitFiber(tuple(vecs), True, H, verdict)


@dataclass
class HypothesisResult:
    holds: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.holds

    def describe(self) -> str:
        if self.holds:
            return "ξ_k F^{-1} ⊆ F^{-1} for all k"
        k, j, l, coeff = self.witness
        return f"ξ_{k} w_{j} = {coeff}·w_{l} mod F^{{-1}}"


def check_surjectivity_hypothesis(fam: DeformationFamily, rank: int = 3) -> HypothesisResult:
    """Whether ``F^{-1}`` (the first ``rank`` frame vectors) is stable under every ``ξ_k``."""
    for k in range(1, fam.n + 1):
        G = connection_matrix(fam, k)
        for j in range(rank):
            for l in range(rank, 4):
                if G[l][j]:
                    return HypothesisResult(False, (k, j + 1, l + 1, G[l][j]))
    return HypothesisResult(True)


# ---------------------------------------------------------------------------
# obstruction certificate
# ---------------------------------------------------------------------------

class LinearForm:
    """``sum coeff * atom`` with ParamElement coefficients and hashable atoms."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: ParamRing, terms: dict | None = None):
        self.ring = ring
        self.terms = {a: c for a, c in (terms or {}).items() if c}

    def __add__(self, other: "LinearForm") -> "LinearForm":
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out.get(a, self.ring.zero()) + c
        return LinearForm(self.ring, out)

    def __neg__(self):
        return LinearForm(self.ring, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "LinearForm":
        return LinearForm(self.ring, {a: c * x for a, x in self.terms.items()})

    def atoms(self) -> set:
        return set(self.terms)

    def coefficient(self, atom) -> ParamElement:
        return self.terms.get(atom, self.ring.zero())

    def __bool__(self):
        return bool(self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for atom in sorted(self.terms, key=_atom_key):
            c = self.terms[atom]
            cs = str(c)
            name = _atom_name(atom)
            if cs == "1":
                parts.append(name)
            elif cs == "-1":
                parts.append("-" + name)
            elif len(c.terms) > 1:
                parts.append(f"({cs})·{name}")
            else:
                parts.append(f"{cs}·{name}")
        return " + ".join(parts).replace("+ -", "- ")


def _atom_key(atom):
    return (atom[0], tuple(atom[1:]))


def _atom_name(atom) -> str:
    kind = atom[0]
    if kind == "c":
        return f"c_{atom[1]}"
    if kind == "h":
        return f"h_{atom[1]}"
    if kind == "xih":
        return f"ξ_{atom[1]} h_{atom[2]}"
    if kind == "hc":
        mono = "".join(f"t{k + 1}^{e}" if e > 1 else f"t{k + 1}" for k, e in enumerate(atom[2]) if e) or "1"
        return f"h_{atom[1]}[{mono}]"
    return str(atom)


@dataclass
class Feasibility:
    lam: GaussScalar
    c: tuple
    degree: int
    feasible: bool
    unknowns: int
    equations: int


@dataclass
class Certificate:
    n: int
    h1_dim: int
    target_dim: int
    equations: dict
    identities: list
    feasibility: Feasibility | None = None

    def identity_text(self) -> str:
        parts = []
        for k, kp, mult in self.identities:
            m = str(mult)
            m = m if len(mult.terms) <= 1 else f"({m})"
            parts.append(f"{m}(c_{k}−c_{kp})=0")
        return ", ".join(parts)

    def summary(self) -> str:
        head = []
        if self.feasibility is not None:
            head.append("feasible" if self.feasibility.feasible else "infeasible")
        head.append(f"identity {self.identity_text()}")
        head.append(f"target dim {self.target_dim}")
        return "; ".join(head)


def _section_equations(fam: DeformationFamily) -> dict:
    """For each ``k``, the ``w_4``-coefficient of ``ξ_k w'_0`` as a linear form in
    ``c_m``, ``h_j`` and ``ξ_k h_j`` (it must vanish)."""
    ring = fam.ring
    n = fam.n
    tilde = fam.tilde_frame
    Winv = _frame_inverse(tilde, ring)
    Ninv_sign = deligne_matrix(ring, fam.Ns, sign=1)
    out = {}
    for k in range(1, n + 1):
        form = LinearForm(ring)
        # ξ_k ũ'_0 for c = e_m, via the Deligne frame of the extension H ⊕ C u'_0
        for m in range(1, n + 1):
            Next = []
            for kk in range(1, n + 1):
                rows = [list(r) + [ZERO] for r in fam.N.rows] + [[ZERO] * 5]
                if kk == m:
                    rows[2][4] = ONE  # N'_m u'_0 = u_3
                Next.append(Matrix(rows))
            u0 = tuple([ZERO] * 4 + [ONE])
            u0t = horizontal_to_deligne(u0, Next, ring)
            xi0 = tuple(x.xi(k) for x in u0t)
            if xi0[4]:
                raise AssertionError("ξ_k ũ'_0 has a component along u'_0")
            in_tilde = _papply(Ninv_sign, xi0[:4], ring)
            in_w = _papply(Winv, in_tilde, ring)
            form = form + LinearForm(ring, {("c", m): in_w[3]})
        G = connection_matrix(fam, k)
        for j in range(4):
            form = form + LinearForm(ring, {("h", j + 1): G[3][j]})
        form = form + LinearForm(ring, {("xih", k, 4): ring.one()})
        out[k] = form
    return out


def _t_monomials(n: int, D: int) -> list:
    out = []

    def rec(prefix, left):
        if len(prefix) == n:
            out.append(tuple(prefix))
            return
        for e in range(left + 1):
            rec(prefix + [e], left - e)

    rec([], D)
    return out


def _coefficient_form(form: LinearForm, k: int, M: tuple, ring: ParamRing) -> LinearForm:
    """Coefficient of ``t^M`` after expanding ``h_j = sum h_{j,M'} t^{M'}``."""
    out = {}
    n = ring.n
    for atom, coeff in form.terms.items():
        if atom[0] == "c":
            part = coeff.t_coefficient(M)
            if part:
                out[atom] = out.get(atom, ring.zero()) + part
        elif atom[0] == "h":
            j = atom[1]
            for Mp in _t_monomials(n, sum(M)):
                if all(a <= b for a, b in zip(Mp, M)):
                    rest = tuple(b - a for a, b in zip(Mp, M))
                    part = coeff.t_coefficient(rest)
                    if part:
                        key = ("hc", j, Mp)
                        out[key] = out.get(key, ring.zero()) + part
        elif atom[0] == "xih":
            _, kk, j = atom
            e = M[kk - 1]
            part = coeff.t_coefficient((0,) * n)
            if e and part:
                key = ("hc", j, M)
                out[key] = out.get(key, ring.zero()) + part * e
    return LinearForm(ring, out)


def vanishing_certificate(fam: DeformationFamily, c=None, lam=None, degree: int = 3) -> Certificate:
    """Obstruction to realizing a class ``(c_k)`` by a Hodge-filtered extension.

    Griffiths transversality of ``w'_0 = ũ'_0 + sum_j h_j w_j`` forces the
    ``w_4``-coefficient of ``ξ_k w'_0`` to vanish.  Comparing the coefficient
    of ``t_1 ... t_n`` for two indices ``k, k'`` leaves ``λ (c_k - c_{k'}) = 0``.
    With numeric ``λ`` and ``c`` the truncated system in the Taylor
    coefficients of ``h_j`` up to ``degree`` is solved exactly.
    """
    n = fam.n
    if n < 2:
        raise ValueError("the obstruction needs at least two variables")
    from .cohomology import cohomology, ic_complex

    lf = limit_fiber(fam)
    if lf.mhs is None or not lf.verdict:
        raise ValueError(f"limit fibre is not a mixed Hodge structure: {lf.verdict.summary()}")
    H1 = cohomology(ic_complex(lf.mhs, fam.Ns), 1)
    target = hom_from_Q(H1.mhs).dim

    trunc = max(6, 2 * degree + 2, 2 * n + 2)
    ring = ParamRing(n, trunc)
    sym = DeformationFamily(ring, fam.a, fam.C, None, fam.J, fam.N, fam.pairing, standard_tilde_frame(ring, fam.a, fam.C, ring.lam))
    if fam.tilde_frame != standard_tilde_frame(fam.ring, fam.a, fam.C, fam.lam):
        raise ValueError("certificate is defined for the standard frame only")
    eqs = _section_equations(sym)
    top = tuple([1] * n)
    at_top = {k: _coefficient_form(eqs[k], k, top, ring) for k in eqs}
    identities = []
    for k, kp in combinations(range(1, n + 1), 2):
        diff = at_top[kp] - at_top[k]
        if any(a[0] != "c" for a in diff.atoms()):
            raise AssertionError("Taylor coefficients of h_j do not cancel")
        mult = diff.coefficient(("c", k))
        others = diff.atoms() - {("c", k), ("c", kp)}
        if others or diff.coefficient(("c", kp)) != -mult:
            raise AssertionError(f"unexpected identity {diff}")
        identities.append((k, kp, mult))

    feas = None
    lam_val = lam if lam is not None else fam.lam_value
    c = c if c is not None else fam.c
    if lam_val is not None and c is not None:
        feas = _feasibility(sym, eqs, as_scalar(lam_val), tuple(as_scalar(x) for x in c), degree)
    return Certificate(n, H1.dim, target, eqs, identities, feas)


def _feasibility(sym: DeformationFamily, eqs: dict, lam: GaussScalar, c: tuple, D: int) -> Feasibility:
    ring = sym.ring
    n = ring.n
    if len(c) != n:
        raise ValueError(f"need {n} values of c, got {len(c)}")
    rows: list = []
    rhs: list = []
    unknowns = [("hc", j, M) for j in range(1, 5) for M in _t_monomials(n, D)]
    pos = {u: i for i, u in enumerate(unknowns)}
    for k in range(1, n + 1):
        for M in _t_monomials(n, D):
            form = _coefficient_form(eqs[k], k, M, ring)
            # split by the remaining monomials (after substituting λ)
            buckets: dict = {}
            for atom, coeff in form.terms.items():
                val = coeff.at_lambda(lam)
                for mono, x in val.terms.items():
                    buckets.setdefault(mono, {})
                    buckets[mono][atom] = buckets[mono].get(atom, ZERO) + x
            for mono, entries in buckets.items():
                row = [ZERO] * len(unknowns)
                b = ZERO
                for atom, x in entries.items():
                    if atom[0] == "c":
                        b = b - x * c[atom[1] - 1]
                    else:
                        if atom not in pos:
                            raise AssertionError(f"unknown outside the truncation: {atom}")
                        row[pos[atom]] = row[pos[atom]] + x
                rows.append(row)
                rhs.append(b)
    if rows:
        sol = solve(Matrix(rows, len(unknowns)), rhs)
    else:
        sol = tuple([ZERO] * len(unknowns))
    return Feasibility(lam, c, D, sol is not None, len(unknowns), len(rows))
