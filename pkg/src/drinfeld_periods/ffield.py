"""Finite fields F_p ⊂ F_q ⊂ F_{q^s} with a reproducible modulus.

The coefficient field F_{q^s} (q = p^e) is built as F_p[x]/(f) where f is the
lexicographically first monic irreducible polynomial of degree e*s under the
coefficient-tuple order (c_0, c_1, ...).  Elements are stored as integer codes
c_0 + c_1 p + c_2 p^2 + ... so they hash and compare cheaply; the digit vector
is the serialized form.
"""

from __future__ import annotations

import functools
import itertools
import math

import numpy as np

__all__ = ["FiniteField", "FFElem", "ff_make", "ff_solve_kummer", "is_prime"]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, math.isqrt(n) + 1):
        if n % d == 0:
            return False
    return True


# -- polynomials over F_p as lists, lowest degree first ---------------------

def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, f, p):
    a = list(a)
    inv_lead = pow(f[-1], -1, p)
    df = len(f) - 1
    while len(_trim(a)) - 1 >= df:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - df
        for i, fi in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fi) % p
    return a


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _pgcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _ppowmod(base, n, f, p):
    result = [1]
    base = _pmod(base, f, p)
    while n:
        if n & 1:
            result = _pmod(_pmul(result, base, p), f, p)
        base = _pmod(_pmul(base, base, p), f, p)
        n >>= 1
    return result


def _is_irreducible(f, p):
    n = len(f) - 1
    if n == 1:
        return True
    for d in range(1, n // 2 + 1):
        xp = _ppowmod([0, 1], p ** d, f, p)
        g = list(xp) + [0] * max(0, 2 - len(xp))
        g[1] = (g[1] - 1) % p
        if len(_pgcd(f, _trim(g), p)) > 1:
            return False
    return True


@functools.lru_cache(maxsize=None)
def _first_irreducible(p, n):
    # itertools.product varies the last slot fastest, which is exactly the
    # lexicographic order on (c_0, ..., c_{n-1}).
    for coeffs in itertools.product(range(p), repeat=n):
        f = list(coeffs) + [1]
        if _is_irreducible(f, p):
            return tuple(f)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class FiniteField:
    """The field F_{q^s}, q = p**e, as F_p[x]/(modulus).

    Instances are cached per (p, e, s), so equal specs give the same object.
    """

    _cache: dict = {}

    def __new__(cls, p: int, e: int = 1, s: int = 1):
        key = (p, e, s)
        if key in cls._cache:
            return cls._cache[key]
        if not is_prime(p):
            raise ValueError(f"p={p} is not prime")
        if e < 1 or s < 1:
            raise ValueError("extension degrees must be positive")
        self = super().__new__(cls)
        self.p, self.e, self.s = p, e, s
        self.q = p ** e
        self.degree = e * s
        self.order = p ** self.degree
        self.modulus = _first_irreducible(p, self.degree)
        self._build_tables()
        cls._cache[key] = self
        return self

    def __reduce__(self):
        return FiniteField, (self.p, self.e, self.s)

    def __repr__(self):
        return f"FiniteField(p={self.p}, e={self.e}, s={self.s})"

    # -- encoding -----------------------------------------------------------

    def to_vec(self, code: int) -> list[int]:
        p = self.p
        out = []
        for _ in range(self.degree):
            code, r = divmod(code, p)
            out.append(r)
        return out

    def from_vec(self, vec) -> int:
        if len(vec) != self.degree:
            raise ValueError(f"expected {self.degree} coefficients, got {len(vec)}")
        code = 0
        for c in reversed(vec):
            if not 0 <= c < self.p:
                raise ValueError(f"coefficient {c} out of range mod {self.p}")
            code = code * self.p + c
        return code

    TABLE_LIMIT = 1024

    def _build_tables(self):
        d, p, Q = self.degree, self.p, self.order
        f = list(self.modulus)
        # powers of x reduced mod f up to x^(2d-2), used by digit-array products
        red = np.zeros((2 * d - 1, d), dtype=np.int64)
        for k in range(2 * d - 1):
            v = _pmod([0] * k + [1], f, p)
            red[k, :len(v)] = v
        self.reduction = red
        self._weights = p ** np.arange(d, dtype=np.int64)
        self.tables = Q <= self.TABLE_LIMIT
        if self.tables:
            A = np.array([self.to_vec(c) for c in range(Q)], dtype=np.int64).reshape(Q, d)
            # T[a, k] = digits of a * x^k
            T = np.zeros((Q, d, d), dtype=np.int64)
            for i in range(d):
                for k in range(d):
                    T[:, k, :] += np.outer(A[:, i], red[i + k])
            T %= p
            mul = np.empty((Q, Q), dtype=np.int64)
            for a in range(Q):
                mul[a] = ((A @ T[a]) % p) @ self._weights
            self.mul_table = mul
            self.add_table = ((A[:, None, :] + A[None, :, :]) % p) @ self._weights
            self.neg_table = ((-A) % p) @ self._weights
            inv = np.zeros(Q, dtype=np.int64)
            rows, cols = np.nonzero(mul == 1)
            inv[rows] = cols
            self.inv_table = inv
        # c -> c^p as a linear map on digit vectors (column k = image of x^k)
        frob = np.zeros((d, d), dtype=np.int64)
        for k in range(d):
            frob[:, k] = self.to_vec(self._pow_code(p ** k, p))
        self.frob_p = frob
        self._frob_cache = {0: np.eye(d, dtype=np.int64)}

    # raw code arithmetic, table driven when the field is small

    def _mul_code(self, a, b):
        if self.tables:
            return int(self.mul_table[a, b])
        va = np.array(self.to_vec(a), dtype=np.int64)
        vb = np.array(self.to_vec(b), dtype=np.int64)
        prod = np.convolve(va, vb) % self.p
        return int(((prod @ self.reduction) % self.p) @ self._weights)

    def _add_code(self, a, b):
        if self.tables:
            return int(self.add_table[a, b])
        v = (np.array(self.to_vec(a)) + np.array(self.to_vec(b))) % self.p
        return int(v @ self._weights)

    def _neg_code(self, a):
        if self.tables:
            return int(self.neg_table[a])
        return int(((-np.array(self.to_vec(a))) % self.p) @ self._weights)

    def _inv_code(self, a):
        if self.tables:
            return int(self.inv_table[a])
        return self._pow_code(a, self.order - 2)

    def _pow_code(self, a, n):
        r = 1
        while n:
            if n & 1:
                r = self._mul_code(r, a)
            a = self._mul_code(a, a)
            n >>= 1
        return r

    def frob_matrix(self, k: int) -> np.ndarray:
        """Matrix of c -> c^(p^k) on digit vectors; k may be negative."""
        k %= self.degree
        if k not in self._frob_cache:
            M = np.eye(self.degree, dtype=np.int64)
            for _ in range(k):
                M = (self.frob_p @ M) % self.p
            self._frob_cache[k] = M
        return self._frob_cache[k]

    def mul_matrix(self, code: int) -> np.ndarray:
        """Matrix of y -> c*y on digit vectors."""
        d = self.degree
        cols = [self.to_vec(self._mul_code(code, self.p ** k)) for k in range(d)]
        return np.array(cols, dtype=np.int64).T

    # -- element constructors -----------------------------------------------

    def __call__(self, value) -> "FFElem":
        if isinstance(value, FFElem):
            if value.field is not self:
                raise ValueError("element belongs to a different field")
            return value
        if isinstance(value, (int, np.integer)):
            return FFElem(self, int(value) % self.p)
        if isinstance(value, (list, tuple)):
            return FFElem(self, self.from_vec(list(value)))
        raise TypeError(f"cannot build a field element from {value!r}")

    def zero(self):
        return FFElem(self, 0)

    def one(self):
        return FFElem(self, 1)

    def gen(self):
        """Class of x in F_p[x]/(modulus)."""
        if self.degree == 1:
            return FFElem(self, (-self.modulus[0]) % self.p)
        return FFElem(self, self.p)

    def elements(self):
        """All elements in ascending coefficient-tuple order."""
        codes = sorted(range(self.order), key=lambda c: tuple(self.to_vec(c)))
        return [FFElem(self, c) for c in codes]

    def subfield(self, k: int):
        """Elements of F_{p^k}, i.e. fixed points of c -> c^(p^k), in tuple order."""
        if self.degree % k:
            raise ValueError(f"F_(p^{k}) is not a subfield of F_(p^{self.degree})")
        return [a for a in self.elements() if a.frobenius_p(k) == a]


class FFElem:
    """Immutable element of a FiniteField."""

    __slots__ = ("field", "code")

    def __init__(self, field: FiniteField, code: int):
        self.field = field
        self.code = code

    def _coerce(self, other):
        if isinstance(other, FFElem):
            if other.field is not self.field:
                raise ValueError("mismatched finite fields")
            return other.code
        if isinstance(other, (int, np.integer)):
            return self.field(int(other)).code
        return NotImplemented

    def __add__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return FFElem(self.field, self.field._add_code(self.code, b))

    __radd__ = __add__

    def __neg__(self):
        return FFElem(self.field, self.field._neg_code(self.code))

    def __sub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return self + FFElem(self.field, self.field._neg_code(b))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return FFElem(self.field, self.field._mul_code(self.code, b))

    __rmul__ = __mul__

    def inverse(self):
        if self.code == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        return FFElem(self.field, self.field._inv_code(self.code))

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return self * FFElem(self.field, b).inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return FFElem(self.field, self.field._pow_code(self.code, n))

    def frobenius_p(self, k: int) -> "FFElem":
        """c -> c^(p^k)."""
        F = self.field
        vec = (F.frob_matrix(k) @ np.array(F.to_vec(self.code))) % F.p
        return FFElem(F, F.from_vec([int(v) for v in vec]))

    def frobenius(self, n: int = 1) -> "FFElem":
        """c -> c^(q^n); negative n applies the inverse automorphism."""
        return self.frobenius_p(self.field.e * n)

    def __eq__(self, other):
        if isinstance(other, FFElem):
            return self.field is other.field and self.code == other.code
        if isinstance(other, (int, np.integer)):
            return self.code == self.field(int(other)).code
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.degree, self.code))

    def __bool__(self):
        return self.code != 0

    def to_list(self) -> list[int]:
        return self.field.to_vec(self.code)

    def sort_key(self):
        return tuple(self.to_list())

    def in_subfield(self, k: int) -> bool:
        return self.frobenius_p(k) == self

    def __repr__(self):
        return f"FFElem({self.to_list()})"


def ff_make(p: int, deg: int) -> FiniteField:
    """Deterministic F_{p^deg} (treated as q = p, s = deg)."""
    if deg < 1:
        raise ValueError("degree must be positive")
    return FiniteField(p, 1, deg)


def ff_solve_kummer(c: FFElem, n: int) -> list[FFElem]:
    """All x in the field with x**n == c, ascending coefficient-tuple order."""
    F = c.field
    if n < 1:
        raise ValueError("n must be positive")
    if math.gcd(n, F.p) != 1:
        raise ValueError(f"n={n} is divisible by the characteristic {F.p}")
    return [x for x in F.elements() if x ** n == c]
