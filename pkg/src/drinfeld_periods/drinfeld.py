"""Rank one and two Drinfeld modules rho_t = theta + kappa tau + Delta tau^2.

Twisted polynomials, the homomorphism a -> rho_a, biderivations, and the four
coefficient streams (exponential, logarithm, quasi-periodic F_tau and G_delta)
with certified evaluation.  Stream coefficients are memoized; their leading
exponents are exact, which is what the tail certificates below rely on.
"""

from __future__ import annotations

import threading
from fractions import Fraction

import numpy as np

from .cinf import INF, Context, PuiseuxApprox
from .errors import ConvergenceError, FieldMismatchError

__all__ = [
    "TwistedPoly",
    "DrinfeldModule",
    "CoeffStream",
    "tw_mul",
    "rho_of",
    "carlitz_of",
    "delta_of",
    "inner_biderivation",
    "exp_coeffs",
    "log_coeffs",
    "ftau_coeffs",
    "gdelta_coeffs",
    "eval_entire",
    "inv_theta_power_minus_theta",
]


class TwistedPoly:
    """sum a_i tau^i with tau c = c^q tau."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: Context, coeffs):
        self.ctx = ctx
        coeffs = [c if isinstance(c, PuiseuxApprox) else ctx.mono(c) for c in coeffs]
        while coeffs and coeffs[-1].is_exact_zero():
            coeffs.pop()
        self.coeffs = coeffs

    @classmethod
    def constant(cls, ctx, c):
        return cls(ctx, [c])

    @classmethod
    def tau(cls, ctx, k=1):
        return cls(ctx, [ctx.zero()] * k + [ctx.one()])

    def degree(self):
        return len(self.coeffs) - 1

    def coeff(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.ctx.zero()

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return TwistedPoly(self.ctx, [self.coeff(i) + other.coeff(i) for i in range(n)])

    def __neg__(self):
        return TwistedPoly(self.ctx, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, TwistedPoly):
            return tw_mul(self, other)
        return TwistedPoly(self.ctx, [c * other for c in self.coeffs])

    def __rmul__(self, other):
        # scalar on the left: c * sum a_i tau^i
        return TwistedPoly(self.ctx, [other * c for c in self.coeffs])

    def __call__(self, x: PuiseuxApprox) -> PuiseuxApprox:
        total = self.ctx.zero()
        for i, a in enumerate(self.coeffs):
            if not a.is_exact_zero():
                total = total + a * x.qpow(i)
        return total

    def residual_valuation(self):
        """Smallest residual valuation over the coefficients (inf for exact 0)."""
        return min((c.residual_valuation() for c in self.coeffs), default=INF)

    def agrees(self, other) -> bool:
        return all(c.is_zero() for c in (self - other).coeffs)

    def to_json(self):
        return [c.to_json() for c in self.coeffs]

    def __repr__(self):
        return f"TwistedPoly({self.coeffs!r})"


def tw_mul(a: TwistedPoly, b: TwistedPoly) -> TwistedPoly:
    """(sum a_i tau^i)(sum b_j tau^j) = sum a_i b_j^(q^i) tau^(i+j)."""
    ctx = a.ctx
    if b.ctx != ctx:
        raise FieldMismatchError("twisted polynomials over different contexts")
    if not a.coeffs or not b.coeffs:
        return TwistedPoly(ctx, [])
    out = [ctx.zero() for _ in range(len(a.coeffs) + len(b.coeffs) - 1)]
    for i, ai in enumerate(a.coeffs):
        if ai.is_exact_zero():
            continue
        for j, bj in enumerate(b.coeffs):
            if bj.is_exact_zero():
                continue
            out[i + j] = out[i + j] + ai * bj.qpow(i)
    return TwistedPoly(ctx, out)


def inv_theta_power_minus_theta(ctx: Context, i: int) -> PuiseuxApprox:
    """1/(theta^(q^i) - theta) = theta^(-Q) sum_k theta^(k(1-Q)), Q = q^i."""
    Q = ctx.q ** i
    lo = Q * ctx.m
    step = (Q - 1) * ctx.m
    P = lo + ctx.R
    n = ctx.R
    digits = np.zeros((n, ctx.d), dtype=np.int64)
    digits[::step, 0] = 1
    return ctx.make(lo, digits, P)


class CoeffStream:
    """Memoized coefficients c_0, c_1, ... of a series sum c_i z^(q^i)."""

    def __init__(self, module, kind, compute, alpha=None):
        self.module = module
        self.kind = kind
        self.alpha = alpha
        self._compute = compute
        self._coeffs = []
        self._lock = threading.Lock()

    def coeff(self, i: int) -> PuiseuxApprox:
        if i < len(self._coeffs):
            return self._coeffs[i]
        with self._lock:
            while len(self._coeffs) <= i:
                self._coeffs.append(self._compute(len(self._coeffs)))
            return self._coeffs[i]

    def vbound(self, i: int):
        return self.coeff(i).vbound()

    def val(self, i: int):
        """Valuation of c_i in theta-units (inf for an exact zero)."""
        c = self.coeff(i)
        return c.val() if not c.is_zero() else c.residual_valuation()

    def entries(self, n: int):
        return [(self.coeff(i), self.val(i)) for i in range(n)]

    def to_json(self, n: int):
        out = []
        for i in range(n):
            c = self.coeff(i)
            v = self.val(i)
            out.append({"i": i, "val": str(v) if v != INF else "inf", "coeff": c.to_json()})
        return out


class DrinfeldModule:
    """rho_t = theta + kappa tau + Delta tau^2 over the context's carrier."""

    def __init__(self, ctx: Context, kappa, delta, name: str | None = None):
        self.ctx = ctx
        self.kappa = kappa if isinstance(kappa, PuiseuxApprox) else ctx.mono(kappa)
        self.delta = delta if isinstance(delta, PuiseuxApprox) else ctx.mono(delta)
        if self.kappa.is_exact_zero() and self.delta.is_exact_zero():
            raise ValueError("rho_t must have positive rank")
        self.q = ctx.q
        self.name = name
        self.theta = ctx.theta()
        self._inv_den = {}
        self._lock = threading.Lock()
        self.exp = CoeffStream(self, "exp", self._alpha)
        self.log = CoeffStream(self, "log", self._gamma)
        self.ftau = CoeffStream(self, "ftau", self._beta)
        self._gdelta = {}

    @classmethod
    def carlitz(cls, ctx: Context):
        return cls(ctx, ctx.one(), ctx.zero(), name="carlitz")

    @property
    def rank(self):
        return 1 if self.delta.is_exact_zero() else 2

    def rho_t(self) -> TwistedPoly:
        return TwistedPoly(self.ctx, [self.theta, self.kappa, self.delta])

    def inv_den(self, i: int) -> PuiseuxApprox:
        r = self._inv_den.get(i)
        if r is None:
            r = self._inv_den[i] = inv_theta_power_minus_theta(self.ctx, i)
        return r

    # -- stream recursions ------------------------------------------------------

    def _alpha(self, i):
        ctx = self.ctx
        if i == 0:
            return ctx.one()
        acc = ctx.zero()
        if not self.kappa.is_exact_zero():
            acc = acc + self.kappa * self.exp.coeff(i - 1).qpow(1)
        if i >= 2 and not self.delta.is_exact_zero():
            acc = acc + self.delta * self.exp.coeff(i - 2).qpow(2)
        return acc * self.inv_den(i) if not acc.is_exact_zero() else acc

    def _gamma(self, i):
        ctx = self.ctx
        if i == 0:
            return ctx.one()
        acc = ctx.zero()
        if not self.kappa.is_exact_zero():
            acc = acc + self.log.coeff(i - 1) * self.kappa.qpow(i - 1)
        if i >= 2 and not self.delta.is_exact_zero():
            acc = acc + self.log.coeff(i - 2) * self.delta.qpow(i - 2)
        return -(acc * self.inv_den(i)) if not acc.is_exact_zero() else acc

    def _beta(self, i):
        if i == 0:
            return self.ctx.zero()
        a = self.exp.coeff(i - 1)
        if a.is_exact_zero():
            return a
        return a.qpow(1) * self.inv_den(i)

    def gdelta(self, alpha: PuiseuxApprox) -> CoeffStream:
        key = (alpha.lo, alpha.prec, alpha.digits.tobytes())
        with self._lock:
            s = self._gdelta.get(key)
            if s is None:
                def compute(i, alpha=alpha):
                    ctx = self.ctx
                    if i == 0 or alpha.is_exact_zero():
                        return ctx.zero()
                    if i == 1:
                        return alpha * self.inv_den(1)
                    acc = s_ref[0].coeff(i - 1).qpow(1)
                    a = self.exp.coeff(i - 1)
                    if not a.is_exact_zero():
                        acc = acc + alpha * a.qpow(1)
                    return acc * self.inv_den(i)
                s_ref = []
                s = CoeffStream(self, "gdelta", compute, alpha=alpha)
                s_ref.append(s)
                self._gdelta[key] = s
        return s

    # -- convenience evaluators ---------------------------------------------

    def exp_eval(self, z, **kw):
        return eval_entire(self.exp, z, True, **kw)

    def log_eval(self, z, **kw):
        return eval_entire(self.log, z, True, **kw)

    def ftau_eval(self, z, **kw):
        return eval_entire(self.ftau, z, False, **kw)

    def gdelta_eval(self, alpha, z, **kw):
        return eval_entire(self.gdelta(alpha), z, False, **kw)

    def rho_eval(self, x: PuiseuxApprox) -> PuiseuxApprox:
        return self.rho_t()(x)

    def rho_t_minus(self, beta: PuiseuxApprox) -> dict:
        """rho_t(X) - beta as a sparse polynomial {degree: coefficient}."""
        P = {1: self.theta}
        if not self.kappa.is_exact_zero():
            P[self.q] = self.kappa
        if not self.delta.is_exact_zero():
            P[self.q ** 2] = self.delta
        if not beta.is_exact_zero():
            P[0] = -beta
        return P

    def log_radius(self, n_terms: int = 8):
        """sup_i -val(gamma_i)/q^i over the first stored logarithm coefficients
        (theta-units); log is certified only strictly beyond this bound."""
        best = -INF
        for i in range(1, n_terms + 1):
            v = self.log.vbound(i)
            if v == INF:
                continue
            best = max(best, Fraction(-v, self.ctx.m * self.q ** i))
        return best

    def __repr__(self):
        return f"DrinfeldModule(kappa={self.kappa!r}, delta={self.delta!r})"


# -- rho_a, biderivations --------------------------------------------------


def _fq_coeffs(ctx, a):
    return [ctx.field(c) for c in a]


def _apply_poly(ctx, a, base: TwistedPoly) -> TwistedPoly:
    """sum a_k base^k for a in F_q[t] (coefficients low degree first)."""
    coeffs = _fq_coeffs(ctx, a)
    out = TwistedPoly(ctx, [])
    power = TwistedPoly.constant(ctx, ctx.one())
    for k, c in enumerate(coeffs):
        if k:
            power = tw_mul(power, base)
        if c:
            out = out + TwistedPoly(ctx, [x.scale(c) for x in power.coeffs])
    return out


def rho_of(M: DrinfeldModule, a) -> TwistedPoly:
    """rho_a for a in F_q[t]."""
    return _apply_poly(M.ctx, a, M.rho_t())


def carlitz_of(ctx: Context, a) -> TwistedPoly:
    return _apply_poly(ctx, a, TwistedPoly(ctx, [ctx.theta(), ctx.one()]))


def delta_of(M: DrinfeldModule, alpha: PuiseuxApprox, a) -> TwistedPoly:
    """delta_a for the biderivation with delta_t = alpha tau, from
    delta_(t^k) = C_t delta_(t^(k-1)) + delta_t rho_(t^(k-1))."""
    ctx = M.ctx
    coeffs = _fq_coeffs(ctx, a)
    Ct = TwistedPoly(ctx, [ctx.theta(), ctx.one()])
    dt = TwistedPoly(ctx, [ctx.zero(), alpha])
    out = TwistedPoly(ctx, [])
    d_prev = TwistedPoly(ctx, [])  # delta_1 = 0
    rho_prev = TwistedPoly.constant(ctx, ctx.one())
    for k, c in enumerate(coeffs):
        if k:
            d_prev = tw_mul(Ct, d_prev) + tw_mul(dt, rho_prev)
            rho_prev = tw_mul(rho_prev, M.rho_t())
        if c and k:
            out = out + TwistedPoly(ctx, [x.scale(c) for x in d_prev.coeffs])
    return out


def inner_biderivation(M: DrinfeldModule, U: TwistedPoly, a) -> TwistedPoly:
    """U rho_a - C_a U."""
    return tw_mul(U, rho_of(M, a)) - tw_mul(carlitz_of(M.ctx, a), U)


# -- streams -----------------------------------------------------------------


def exp_coeffs(M: DrinfeldModule, n: int) -> CoeffStream:
    M.exp.coeff(max(n - 1, 0))
    return M.exp


def log_coeffs(M: DrinfeldModule, n: int) -> CoeffStream:
    M.log.coeff(max(n - 1, 0))
    return M.log


def ftau_coeffs(M: DrinfeldModule, n: int) -> CoeffStream:
    M.ftau.coeff(max(n - 1, 0))
    return M.ftau


def gdelta_coeffs(M: DrinfeldModule, alpha: PuiseuxApprox, n: int) -> CoeffStream:
    s = M.gdelta(alpha)
    s.coeff(max(n - 1, 0))
    return s


# -- certified evaluation ----------------------------------------------------

MAX_TERMS = 48


def _tail_ok(stream: CoeffStream, i: int, T, X, v):
    """True when every term of index > i is provably of valuation >= X.

    T(k) is the exact (or lower-bound) valuation of term k.  The conditions
    come from pushing the stream recursion through the bound; see the
    per-kind comments.  All quantities are in 1/m units."""
    M = stream.module
    ctx = M.ctx
    q, m = ctx.q, ctx.m
    vk = M.kappa.vbound()
    vd = M.delta.vbound()
    Xp = max(X, 0)

    def exp_ok():
        # T_k >= q^k m + min(vk + q T_(k-1), vd + q^2 T_(k-2))
        if i < 1:
            return False
        Ta = lambda k: M.exp.vbound(k) + q ** k * v if M.exp.vbound(k) != INF else INF
        return Ta(i) >= Xp and Ta(i - 1) >= Xp and q ** (i + 1) * m + min(vk, vd) >= 0

    if stream.kind == "exp":
        return exp_ok()
    if stream.kind == "ftau":
        # term_k >= q T^exp_(k-1) + q^k m
        return exp_ok() and T(i) >= X
    if stream.kind == "gdelta":
        # G_k >= q^k m + min(q G_(k-1), val(alpha) + q T^exp_(k-1))
        va = stream.alpha.vbound()
        return exp_ok() and T(i) >= Xp and q ** (i + 1) * m + va >= 0
    if stream.kind == "log":
        # T_k >= q^k m + min(T_(k-1) + q^(k-1) A, T_(k-2) + q^(k-2) B)
        if i < 1:
            return False
        A = vk + (q - 1) * v
        B = vd + (q * q - 1) * v
        return T(i) >= X and T(i - 1) >= X and q * m + A > 0 and q * q * m + B > 0
    raise ValueError(f"unknown stream kind {stream.kind}")  # pragma: no cover


def certify(stream: CoeffStream, z: PuiseuxApprox, include_linear=True, target=None):
    """Truncation data (I, X, active) for sum c_i z^(q^i): terms of index > I
    have valuation >= X, and ``active`` lists the indices worth computing."""
    ctx = stream.module.ctx
    v = z.vbound()
    q = ctx.q
    if stream.kind == "log":
        R = stream.module.log_radius()
        if R != -INF and not Fraction(v, ctx.m) > R:
            raise ConvergenceError(
                f"log evaluated at valuation {Fraction(v, ctx.m)}; needs > {R}",
                bound=str(R), val=str(Fraction(v, ctx.m)),
            )

    cache = {}

    def T(k):
        if k not in cache:
            if k == 0 and not include_linear:
                cache[k] = INF
            else:
                c = stream.vbound(k)
                cache[k] = INF if c == INF else c + q ** k * v
        return cache[k]

    lead = INF
    for i in range(MAX_TERMS):
        lead = min(lead, T(i))
        if lead == INF:
            continue
        X = lead + ctx.R if target is None else target
        if _tail_ok(stream, i, T, X, v):
            return i, X, [k for k in range(i + 1) if T(k) < X]
    raise ConvergenceError("tail bound unreachable within the term budget", kind=stream.kind)


def eval_entire(stream: CoeffStream, z: PuiseuxApprox, include_linear: bool = True, target=None):
    """sum c_i z^(q^i) (including i = 0 only when include_linear), truncated
    where the remaining tail is certified below the returned precision."""
    ctx = stream.module.ctx
    if z.is_exact_zero():
        return ctx.zero()
    if stream.kind == "gdelta" and stream.alpha.is_exact_zero():
        return ctx.zero()
    I, X, active = certify(stream, z, include_linear, target)
    total = ctx.zero(X)
    for k in active:
        total = total + stream.coeff(k) * z.qpow(k)
    return total.with_prec(X)
