"""Truncated Puiseux series: the working model of C_infinity.

An element is  sum_j c_j theta^(-j/m)  with c_j in the coefficient field
F_{q^s}.  Exponents are integers j in units of 1/m, so val(theta) = -1 has
j = -m.  Digits are stored densely as an (n, d) integer array over F_p
(d = e*s), one row per exponent starting at ``lo``; ``prec`` is the absolute
precision (exponents >= prec are unknown) or ``None`` for an exact element.

Inexact results keep at most ``R`` digits past their leading exponent (the
relative cap of the context).  All precision bookkeeping is worst-case
non-archimedean propagation, so a digit is reported only if it is provable.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import FieldMismatchError, PrecisionError, RepresentationError, RootFindingError
from .ffield import FFElem, FiniteField, ff_solve_kummer

__all__ = [
    "Context",
    "PuiseuxApprox",
    "poly_eval",
    "poly_deriv",
    "newton_polygon",
    "hensel_refine",
    "poly_roots",
    "binom_mod_p",
]

INF = math.inf


class Context:
    """Session data shared by all elements: carrier field, ramification m,
    precision target N, guard digits and residual slack (all in 1/m units).

    ``R = N + guard`` is the relative digit cap of inexact elements and the
    absolute cap used for coefficients of series in t.
    """

    def __init__(self, field: FiniteField, m: int, N: int = 160, guard: int = 96, slack: int | None = None):
        if m < 1:
            raise ValueError("ramification index m must be positive")
        self.field = field
        self.m = m
        self.N = N
        self.guard = guard
        self.R = N + guard
        # residual checks pass at valuation >= (N - slack)/m
        self.slack = 2 * m if slack is None else slack
        self.threshold = Fraction(N - self.slack, m)
        self.p, self.q, self.e, self.d = field.p, field.q, field.e, field.degree
        self.key = (field.p, field.e, field.s, m, N, guard, self.slack)
        self._one = np.zeros(self.d, dtype=np.int64)
        self._one[0] = 1
        self._mulmat = {}
        if self.d * self.R * (self.p - 1) ** 2 >= 2 ** 62:  # pragma: no cover
            raise ValueError("precision too large for the product kernel")

    def __repr__(self):
        F = self.field
        return f"Context(p={F.p}, e={F.e}, s={F.s}, m={self.m}, N={self.N}, guard={self.guard})"

    def __eq__(self, other):
        return isinstance(other, Context) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    # -- digit-array kernels ----------------------------------------------

    def mulmat(self, code: int) -> np.ndarray:
        M = self._mulmat.get(code)
        if M is None:
            M = self._mulmat[code] = self.field.mul_matrix(code).T.copy()
        return M

    def conv(self, A: np.ndarray, B: np.ndarray, L: int) -> np.ndarray:
        """First L rows of the product of two digit series, reduced mod the
        field modulus.  Kronecker substitution into one big-integer product."""
        na, nb = min(len(A), L), min(len(B), L)
        d, p = self.d, self.p
        if na <= 0 or nb <= 0:
            return np.zeros((0, d), dtype=np.int64)
        A, B = A[:na], B[:nb]
        D2 = 2 * d - 1
        bound = d * min(na, nb) * (p - 1) ** 2
        if bound < 2 ** 16:
            dt = np.dtype("<u2")
        elif bound < 2 ** 32:
            dt = np.dtype("<u4")
        else:
            dt = np.dtype("<u8")
        Pa = np.zeros((na, D2), dtype=dt)
        Pa[:, :d] = A
        Pb = np.zeros((nb, D2), dtype=dt)
        Pb[:, :d] = B
        prod = int.from_bytes(Pa.tobytes(), "little") * int.from_bytes(Pb.tobytes(), "little")
        rows = na + nb - 1
        buf = prod.to_bytes(rows * D2 * dt.itemsize, "little")
        C = np.frombuffer(buf, dtype=dt).reshape(rows, D2)[:L].astype(np.int64)
        C %= p
        if d == 1:
            return C
        return (C @ self.field.reduction) % p

    def series_inv(self, A: np.ndarray, L: int) -> np.ndarray:
        """Inverse of a digit series with nonzero first row, to L rows (Newton)."""
        F = self.field
        a0 = F.from_vec([int(v) for v in A[0]])
        B = np.array([F.to_vec(F._inv_code(a0))], dtype=np.int64)
        k = 1
        while k < L:
            k2 = min(2 * k, L)
            E = self.conv(A, B, k2)
            E = np.vstack([E, np.zeros((k2 - len(E), self.d), dtype=np.int64)])
            E[0] = (E[0] - self._one) % self.p
            corr = self.conv(B, E, k2)
            Bn = np.zeros((k2, self.d), dtype=np.int64)
            Bn[:len(B)] = B
            Bn[:len(corr)] -= corr
            B = Bn % self.p
            k = k2
        return B[:L]

    # -- constructors -------------------------------------------------------

    def make(self, lo: int, digits, prec) -> "PuiseuxApprox":
        return PuiseuxApprox._normalized(self, lo, np.asarray(digits, dtype=np.int64), prec)

    def zero(self, prec=None) -> "PuiseuxApprox":
        return PuiseuxApprox(self, 0, np.zeros((0, self.d), dtype=np.int64), prec)

    def mono(self, c, j: int = 0) -> "PuiseuxApprox":
        """Exact c * theta^(-j/m)."""
        c = self.field(c)
        if not c:
            return self.zero()
        return PuiseuxApprox(self, j, np.array([c.to_list()], dtype=np.int64), None)

    def one(self):
        return self.mono(1)

    def const(self, c):
        return self.mono(c, 0)

    def theta(self, k=1) -> "PuiseuxApprox":
        """Exact theta^k for rational k with k*m integral."""
        j = Fraction(k) * self.m
        if j.denominator != 1:
            raise RepresentationError(
                f"theta^{k} needs m divisible by {Fraction(k).denominator}",
                required_m=self.m * j.denominator,
            )
        return self.mono(1, -int(j))

    def from_poly(self, coeffs) -> "PuiseuxApprox":
        """Exact polynomial sum_k c_k theta^k, coefficients low degree first."""
        coeffs = [self.field(c) for c in coeffs]
        deg = len(coeffs) - 1
        while deg >= 0 and not coeffs[deg]:
            deg -= 1
        if deg < 0:
            return self.zero()
        # exponent of theta^k is -k*m; rows run from -deg*m upward
        n = deg * self.m + 1
        digits = np.zeros((n, self.d), dtype=np.int64)
        for k in range(deg + 1):
            digits[(deg - k) * self.m] = coeffs[k].to_list()
        return self.make(-deg * self.m, digits, None)

    def random(self, rng, lo: int, length: int | None = None, prec: int | None = None):
        """Random inexact element with leading exponent lo (units of 1/m)."""
        n = self.R if length is None else length
        digits = np.array([[rng.randrange(self.p) for _ in range(self.d)] for _ in range(n)], dtype=np.int64)
        while not digits[0].any():
            digits[0] = [rng.randrange(self.p) for _ in range(self.d)]
        return self.make(lo, digits, lo + n if prec is None else prec)

    def from_json(self, obj) -> "PuiseuxApprox":
        if obj["m"] != self.m:
            raise FieldMismatchError(f"serialized m={obj['m']} but session m={self.m}")
        terms = obj["terms"]
        prec = obj["prec"]
        if not terms:
            return self.zero(prec)
        lo = terms[0][0]
        hi = terms[-1][0]
        digits = np.zeros((hi - lo + 1, self.d), dtype=np.int64)
        last = None
        for j, vec in terms:
            if last is not None and j <= last:
                raise ValueError("terms must be strictly increasing")
            if len(vec) != self.d:
                raise ValueError("coefficient vector has the wrong length")
            digits[j - lo] = vec
            last = j
        if prec is not None and hi >= prec:
            raise ValueError("term beyond stated precision")
        return PuiseuxApprox(self, lo, digits, prec)


def _minp(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class PuiseuxApprox:
    """Element of C_infinity known to absolute precision ``prec``."""

    __slots__ = ("ctx", "lo", "digits", "prec")

    def __init__(self, ctx: Context, lo: int, digits: np.ndarray, prec):
        self.ctx = ctx
        self.lo = lo
        self.digits = digits
        self.prec = prec

    @classmethod
    def _normalized(cls, ctx, lo, digits, prec):
        if prec is not None and len(digits) and lo + len(digits) > prec:
            digits = digits[:max(0, prec - lo)]
        nz = np.flatnonzero(digits.any(axis=1)) if len(digits) else ()
        if len(nz) == 0:
            return cls(ctx, 0, np.zeros((0, ctx.d), dtype=np.int64), prec)
        first, last = nz[0], nz[-1]
        lo += int(first)
        digits = digits[first:last + 1]
        if prec is not None and prec > lo + ctx.R:
            prec = lo + ctx.R
            digits = digits[:ctx.R]
            nz = np.flatnonzero(digits.any(axis=1))
            digits = digits[:nz[-1] + 1]
        return cls(ctx, lo, digits, prec)

    # -- inspection -----------------------------------------------------------

    @property
    def exact(self) -> bool:
        return self.prec is None

    def is_zero(self) -> bool:
        """True when no nonzero digit is known (exact zero or zero to precision)."""
        return len(self.digits) == 0

    def is_exact_zero(self) -> bool:
        return len(self.digits) == 0 and self.prec is None

    def vbound(self):
        """Lower bound for the valuation in 1/m units (exact when nonzero)."""
        if len(self.digits):
            return self.lo
        return INF if self.prec is None else self.prec

    def val(self) -> Fraction:
        """Valuation in theta-units; raises for an element with no known digit."""
        if not len(self.digits):
            raise PrecisionError("valuation of an element that is zero to its precision", prec=self.prec)
        return Fraction(self.lo, self.ctx.m)

    def residual_valuation(self):
        """Valuation if a digit is known, else the precision; inf for exact 0."""
        v = self.vbound()
        return INF if v == INF else Fraction(v, self.ctx.m)

    def lc(self) -> FFElem:
        if not len(self.digits):
            raise PrecisionError("leading coefficient of zero")
        return FFElem(self.ctx.field, self.ctx.field.from_vec([int(c) for c in self.digits[0]]))

    def terms(self):
        F = self.ctx.field
        return [(self.lo + int(i), FFElem(F, F.from_vec([int(c) for c in self.digits[i]])))
                for i in np.flatnonzero(self.digits.any(axis=1))]

    def rel_prec(self):
        if self.prec is None:
            return INF
        return self.prec - self.vbound()

    def with_prec(self, prec: int) -> "PuiseuxApprox":
        """Forget digits at exponents >= prec."""
        P = _minp(self.prec, prec)
        return PuiseuxApprox._normalized(self.ctx, self.lo, self.digits, P)

    def is_monomial(self) -> bool:
        return len(self.digits) == 1

    # -- coercion ---------------------------------------------------------------

    def _other(self, other):
        if isinstance(other, PuiseuxApprox):
            if other.ctx is not self.ctx and other.ctx != self.ctx:
                raise FieldMismatchError("elements from different contexts (m or field differ)")
            return other
        if isinstance(other, (int, np.integer, FFElem)):
            return self.ctx.mono(other)
        return None

    # -- ring operations -------------------------------------------------------

    def __add__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        return _add(self, b)

    __radd__ = __add__

    def __neg__(self):
        return PuiseuxApprox(self.ctx, self.lo, (-self.digits) % self.ctx.p, self.prec)

    def __sub__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        return _add(self, -b)

    def __rsub__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        return _add(b, -self)

    def __mul__(self, other):
        if isinstance(other, (FFElem, int, np.integer)) and not isinstance(other, bool):
            return self.scale(other)
        b = self._other(other)
        if b is None:
            return NotImplemented
        return _mul(self, b)

    __rmul__ = __mul__

    def scale(self, c) -> "PuiseuxApprox":
        """Multiply by a constant of the coefficient field."""
        c = self.ctx.field(c)
        if not c:
            return self.ctx.zero()
        if c.code == 1 or not len(self.digits):
            return self
        D = (self.digits @ self.ctx.mulmat(c.code)) % self.ctx.p
        return PuiseuxApprox(self.ctx, self.lo, D, self.prec)

    def shift(self, k: int) -> "PuiseuxApprox":
        """Multiply by theta^(-k/m) exactly."""
        return PuiseuxApprox(self.ctx, self.lo + k, self.digits, None if self.prec is None else self.prec + k)

    def inverse(self) -> "PuiseuxApprox":
        if not len(self.digits):
            raise PrecisionError("division by an element that is zero to its precision", prec=self.prec)
        ctx = self.ctx
        if self.prec is None and len(self.digits) == 1:
            c = self.lc().inverse()
            return ctx.mono(c, -self.lo)
        P = -self.lo + ctx.R
        if self.prec is not None:
            P = min(P, self.prec - 2 * self.lo)
        L = P + self.lo
        D = ctx.series_inv(self.digits, L)
        return PuiseuxApprox._normalized(ctx, -self.lo, D, P)

    def __truediv__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        if isinstance(other, (FFElem, int, np.integer)):
            return self.scale(self.ctx.field(other).inverse())
        return _mul(self, b.inverse())

    def __rtruediv__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        return _mul(b, self.inverse())

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.ctx.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def frob_p(self, k: int) -> "PuiseuxApprox":
        """x -> x^(p^k) for k >= 0: exponents and precision scale by p^k."""
        if k < 0:
            raise ValueError("use qroot for inverse Frobenius")
        if k == 0:
            return self
        ctx = self.ctx
        pk = ctx.p ** k
        P = None if self.prec is None else self.prec * pk
        if not len(self.digits):
            return ctx.zero(P)
        lo = self.lo * pk
        count = len(self.digits)
        if P is not None:
            P = min(P, lo + ctx.R)
            count = min(count, -(-P // pk) - self.lo)
        D = (self.digits[:count] @ ctx.field.frob_matrix(k).T) % ctx.p
        out = np.zeros(((count - 1) * pk + 1, ctx.d), dtype=np.int64)
        out[::pk] = D
        return PuiseuxApprox._normalized(ctx, lo, out, P)

    def qpow(self, n: int = 1) -> "PuiseuxApprox":
        """x -> x^(q^n), n >= 0."""
        if n < 0:
            raise ValueError("qpow needs n >= 0; use qroot for inverse twists")
        return self.frob_p(self.ctx.e * n)

    def qroot(self, n: int = 1) -> "PuiseuxApprox":
        """x -> x^(q^-n); requires every exponent divisible by q^n."""
        ctx = self.ctx
        K = ctx.e * n
        pk = ctx.p ** K
        P = None if self.prec is None else -(-self.prec // pk)
        if not len(self.digits):
            return ctx.zero(P)
        idx = np.flatnonzero(self.digits.any(axis=1)) + self.lo
        if np.any(idx % pk):
            raise RepresentationError(
                f"inverse twist needs exponents divisible by {pk}; raise m by a factor of {pk}",
                required_m=ctx.m * pk,
            )
        if self.lo % pk:  # pragma: no cover - implied by the check above
            raise RepresentationError("inverse twist unrepresentable", required_m=ctx.m * pk)
        D = (self.digits[::pk] @ ctx.field.frob_matrix(-K).T) % ctx.p
        return PuiseuxApprox._normalized(ctx, self.lo // pk, D, P)

    def nth_root(self, n: int) -> "PuiseuxApprox":
        """The n-th root whose leading coefficient is the first Kummer solution."""
        ctx = self.ctx
        if math.gcd(n, ctx.p) != 1:
            raise ValueError(f"n={n} shares a factor with the characteristic {ctx.p}")
        if not len(self.digits):
            if self.prec is None:
                return self
            raise PrecisionError("root of an element that is zero to its precision")
        if self.lo % n:
            g = math.gcd(self.lo, n)
            raise RepresentationError(
                f"leading exponent {self.lo}/{ctx.m} not divisible by {n}; increase m",
                required_m=ctx.m * (n // g),
            )
        lc = self.lc()
        roots = ff_solve_kummer(lc, n)
        if not roots:
            raise RepresentationError(
                f"leading coefficient has no {n}-th root in the carrier; increase s",
                required_s="larger",
            )
        c = roots[0]
        lo = self.lo // n
        if self.prec is None and len(self.digits) == 1:
            return ctx.mono(c, lo)
        rel = ctx.R if self.prec is None else self.prec - self.lo
        U = (self.digits @ ctx.mulmat(lc.inverse().code)) % ctx.p
        Z = _series_nth_root(ctx, U, n, rel)
        Z = (Z @ ctx.mulmat(c.code)) % ctx.p
        return PuiseuxApprox._normalized(ctx, lo, Z, lo + rel)

    # -- comparison and serialization ----------------------------------------

    def __eq__(self, other):
        if not isinstance(other, PuiseuxApprox):
            return NotImplemented
        return (self.ctx == other.ctx and self.prec == other.prec and self.lo == other.lo
                and self.digits.shape == other.digits.shape and bool(np.all(self.digits == other.digits)))

    def __hash__(self):
        return hash((self.lo, self.prec, self.digits.tobytes()))

    def agrees(self, other) -> bool:
        """Equal to the common precision."""
        return (self - other).is_zero()

    def to_json(self):
        return {
            "m": self.ctx.m,
            "prec": self.prec,
            "terms": [[j, c.to_list()] for j, c in self.terms()],
        }

    def __repr__(self):
        if not len(self.digits):
            return "PuiseuxApprox(0)" if self.prec is None else f"PuiseuxApprox(O(theta^{-Fraction(self.prec, self.ctx.m)}))"
        tail = "exact" if self.prec is None else f"prec={Fraction(self.prec, self.ctx.m)}"
        return f"PuiseuxApprox(val={self.val()}, {len(self.terms())} terms, {tail})"


def _add(a: PuiseuxApprox, b: PuiseuxApprox) -> PuiseuxApprox:
    ctx = a.ctx
    P = _minp(a.prec, b.prec)
    na, nb = len(a.digits), len(b.digits)
    if not na and not nb:
        return ctx.zero(P)
    if not nb:
        return a if P == a.prec else a.with_prec(P)
    if not na:
        return b if P == b.prec else b.with_prec(P)
    lo = min(a.lo, b.lo)
    hi = max(a.lo + na, b.lo + nb)
    if P is not None:
        hi = min(hi, P)
    if hi <= lo:
        return ctx.zero(P)
    out = np.zeros((hi - lo, ctx.d), dtype=np.int64)
    ka = max(0, min(na, hi - a.lo))
    kb = max(0, min(nb, hi - b.lo))
    out[a.lo - lo:a.lo - lo + ka] += a.digits[:ka]
    out[b.lo - lo:b.lo - lo + kb] += b.digits[:kb]
    out %= ctx.p
    return PuiseuxApprox._normalized(ctx, lo, out, P)


def _mul(a: PuiseuxApprox, b: PuiseuxApprox) -> PuiseuxApprox:
    ctx = a.ctx
    if a.is_exact_zero() or b.is_exact_zero():
        return ctx.zero()
    na, nb = len(a.digits), len(b.digits)
    if not na or not nb:
        return ctx.zero(a.vbound() + b.vbound())
    lo = a.lo + b.lo
    P = None
    if a.prec is not None:
        P = a.prec + b.lo
    if b.prec is not None:
        P = _minp(P, b.prec + a.lo)
    if P is None:
        L = na + nb - 1
    else:
        P = min(P, lo + ctx.R)
        L = P - lo
    D = ctx.conv(a.digits, b.digits, L)
    return PuiseuxApprox._normalized(ctx, lo, D, P)


def _series_nth_root(ctx: Context, U: np.ndarray, n: int, L: int) -> np.ndarray:
    """Z with Z^n = U and Z[0] = 1 (needs U[0] = 1), to L rows."""
    p, d = ctx.p, ctx.d
    ninv = pow(n % p, -1, p)
    Z = np.zeros((1, d), dtype=np.int64)
    Z[0, 0] = 1
    k = 1
    while k < L:
        k2 = min(2 * k, L)

        def power(A, e):
            R_ = np.zeros((1, d), dtype=np.int64)
            R_[0, 0] = 1
            while e:
                if e & 1:
                    R_ = ctx.conv(R_, A, k2)
                e >>= 1
                if e:
                    A = ctx.conv(A, A, k2)
            return R_

        Zn1 = power(Z, n - 1)
        Zn = ctx.conv(Zn1, Z, k2)
        diff = np.zeros((k2, d), dtype=np.int64)
        diff[:len(Zn)] += Zn
        u = U[:k2]
        diff[:len(u)] -= u
        diff %= p
        corr = ctx.conv(diff, ctx.series_inv(np.vstack([Zn1, np.zeros((max(0, k2 - len(Zn1)), d), dtype=np.int64)]), k2), k2)
        Zn_ = np.zeros((k2, d), dtype=np.int64)
        Zn_[:len(Z)] = Z
        Zn_[:len(corr)] -= (corr * ninv)
        Z = Zn_ % p
        k = k2
    return Z[:L]


# -- polynomials with PuiseuxApprox coefficients ---------------------------
#
# A polynomial is a dict {degree: PuiseuxApprox}; absent degrees are exact 0.


def binom_mod_p(n: int, k: int, p: int) -> int:
    """C(n, k) mod p by Lucas' theorem."""
    r = 1
    while n or k:
        a, b = n % p, k % p
        if b > a:
            return 0
        r = r * math.comb(a, b) % p
        n //= p
        k //= p
    return r


def _powers(x: PuiseuxApprox, degrees):
    """x^i for the requested degrees, built from Frobenius powers x^(p^k)."""
    ctx = x.ctx
    p = ctx.p
    frob = {0: x}
    out = {}
    for i in degrees:
        if i == 0:
            out[0] = ctx.one()
            continue
        r = None
        k, n = 0, i
        while n:
            n, dig = divmod(n, p)
            if dig:
                if k not in frob:
                    frob[k] = x.frob_p(k)
                f = frob[k] if dig == 1 else frob[k] ** dig
                r = f if r is None else r * f
            k += 1
        out[i] = r
    return out


def poly_eval(P: dict, x: PuiseuxApprox) -> PuiseuxApprox:
    ctx = x.ctx
    pw = _powers(x, sorted(P))
    total = ctx.zero()
    for i, a in P.items():
        total = total + a * pw[i]
    return total


def poly_deriv(P: dict, k: int = 1) -> dict:
    """k-th Hasse derivative: sum C(i, k) a_i X^(i-k)."""
    out = {}
    for i, a in P.items():
        if i >= k:
            c = binom_mod_p(i, k, a.ctx.p)
            if c:
                out[i - k] = a * c
    return out


def _lower_hull(points):
    hull = []
    for pt in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point if it lies on or above the chord
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def _segments(P: dict):
    """Newton polygon segments as (i0, i1, slope) with slope in 1/m units."""
    known = sorted((i, a.lo) for i, a in P.items() if not a.is_zero())
    unknown = sorted((i, a.prec) for i, a in P.items() if a.is_zero() and a.prec is not None)
    if not known:
        raise RootFindingError("polynomial is zero to precision")
    hull = _lower_hull(known)
    segs = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        segs.append((x1, x2, Fraction(y2 - y1, x2 - x1)))
    lo_i, hi_i = known[0][0], known[-1][0]
    for i, bound in unknown:
        if i < lo_i or i > hi_i:
            raise RootFindingError(
                f"coefficient of X^{i} is zero only to precision {bound}; Newton polygon undecidable",
                degree=i,
            )
        for x1, x2, s in segs:
            if x1 <= i <= x2:
                y1 = dict(known)[x1]
                if bound <= y1 + s * (i - x1):
                    raise RootFindingError(
                        f"coefficient of X^{i} is zero only to precision {bound}; Newton polygon undecidable",
                        degree=i,
                    )
    return segs


def newton_polygon(P: dict):
    """[(slope, count)] in 1/m units; a segment of slope s carries `count`
    roots of valuation -s/m.  Zero roots (missing low coefficients) are not
    listed."""
    return [(s, x2 - x1) for x1, x2, s in _segments(P)]


def _criterion(P: dict, x: PuiseuxApprox, v0, v1):
    """Hasse-derivative Newton criterion: every higher-order term of the
    Taylor expansion at x is dominated by the linear term along the step."""
    e = v0 - v1
    deg = max(P)
    xv = x.vbound()
    for k in range(2, deg + 1):
        bound = INF
        for i, a in P.items():
            if i >= k and binom_mod_p(i, k, x.ctx.p):
                bound = min(bound, a.vbound() + (i - k) * xv)
        if bound + (k - 1) * e <= v1:
            return False
    return True


def hensel_refine(P: dict, x0: PuiseuxApprox, target_prec: int | None = None, max_iter: int = 64):
    """Newton iteration from x0 to a root of P, with certified precision."""
    ctx = x0.ctx
    dP = poly_deriv(P)
    x = x0
    Px = poly_eval(P, x)
    if Px.is_exact_zero():
        return x
    if x.prec is None:
        x = x.with_prec(x.vbound() + ctx.R) if x.vbound() != INF else ctx.zero(ctx.R)
        Px = poly_eval(P, x)
    dPx = poly_eval(dP, x)
    if dPx.is_zero():
        raise RootFindingError("derivative vanishes at the initial guess")
    v1 = dPx.lo
    if not _criterion(P, x, Px.vbound(), v1):
        raise RootFindingError(
            "Newton criterion violated at the initial guess",
            val_P=str(Fraction(Px.vbound(), ctx.m)), val_dP=str(Fraction(v1, ctx.m)),
        )
    for _ in range(max_iter):
        if Px.is_zero():
            break
        x = x - Px / dPx
        Px = poly_eval(P, x)
        dPx = poly_eval(dP, x)
        if dPx.is_zero() or dPx.lo != v1:
            raise RootFindingError("Newton iteration left the basin of the initial guess")
    else:
        raise PrecisionError("Newton iteration did not converge")
    if not Px.is_exact_zero():
        x = x.with_prec(Px.vbound() - v1)
    if target_prec is not None and (x.prec is not None and x.prec < target_prec):
        raise PrecisionError(
            f"root known to {x.prec}/{ctx.m}, below target {target_prec}/{ctx.m}",
            prec=x.prec, target=target_prec,
        )
    return x


def poly_roots(P: dict, want_valuation=None):
    """Roots of P (optionally only those of valuation ``want_valuation`` in
    theta-units), sorted by (valuation, leading-coefficient tuple)."""
    ctx = next(iter(P.values())).ctx
    F = ctx.field
    P = {i: a for i, a in P.items() if not a.is_exact_zero()}
    roots = []
    zero_mult = min(P)
    if zero_mult and (want_valuation is None):
        roots.extend(ctx.zero() for _ in range(zero_mult))
    known = {i: a for i, a in P.items() if not a.is_zero()}
    for i0, i1, s in _segments(P):
        j = -s
        if want_valuation is not None and Fraction(j, ctx.m) != Fraction(want_valuation):
            continue
        if (j / ctx.m).denominator % ctx.p == 0:
            raise RepresentationError(
                f"roots of valuation {j / ctx.m} are wildly ramified (denominator divisible by p); "
                "they are not truncatable Puiseux series at any m",
                wild=True, valuation=str(j / ctx.m),
            )
        if j.denominator != 1:
            raise RepresentationError(
                f"roots of valuation {j / ctx.m} need m divisible by {(j / ctx.m).denominator}",
                required_m=ctx.m * j.denominator,
            )
        j = int(j)
        base = known[i0].lo
        res = {}
        for i, a in known.items():
            if i0 <= i <= i1 and a.lo == base + s * (i - i0):
                res[i - i0] = a.lc()
        found = []
        for c in F.elements():
            if not c:
                continue
            if sum((a * c ** k for k, a in res.items()), F.zero()):
                continue
            deriv = sum((a * k * c ** (k - 1) for k, a in res.items() if k % ctx.p), F.zero())
            if not deriv:
                raise RootFindingError("residue equation has a repeated root; not separable", slope=str(s))
            found.append(c)
        if len(found) < i1 - i0:
            raise RepresentationError(
                f"residue equation of slope {s} has only {len(found)} of {i1 - i0} roots in the carrier; increase s",
                required_s="larger",
            )
        for c in found:
            roots.append(hensel_refine(P, ctx.mono(c, j)))
    roots.sort(key=lambda r: (r.vbound(), r.lc().sort_key() if not r.is_zero() else ()))
    return roots
