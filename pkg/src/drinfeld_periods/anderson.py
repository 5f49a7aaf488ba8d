"""Series in t over the Puiseux model, Anderson generating functions and Omega.

A TateSeries holds c_0 .. c_D (t-adic order D) or, with ``cap=None``, an
exact polynomial in t.  Series coefficients are truncated at the absolute
precision R of the context: entries of the motive matrices are compared
against absolute thresholds, so digits past R are never needed.
"""

from __future__ import annotations

from .cinf import INF, Context, PuiseuxApprox
from .drinfeld import DrinfeldModule, certify
from .errors import PrecisionError

__all__ = [
    "TateSeries",
    "AGFRational",
    "tate_twist",
    "agf_build",
    "agf_cross_check",
    "agf_eval",
    "agf_twist_eval_theta",
    "agf_residue",
    "fu1_residual",
    "omega_prefactor",
    "omega_build",
    "omega_theta",
    "omega_at",
    "min_omega_factors",
]


def _lb(c: PuiseuxApprox):
    return c.vbound()


class TateSeries:
    """sum_k c_k t^k known up to t^cap (cap None: exact polynomial)."""

    __slots__ = ("ctx", "coeffs", "cap", "tail")

    def __init__(self, ctx: Context, coeffs, cap=None, tail=None):
        self.ctx = ctx
        coeffs = list(coeffs)
        if cap is not None:
            A = ctx.R
            coeffs = coeffs[:cap + 1]
            coeffs += [ctx.zero(A)] * (cap + 1 - len(coeffs))
            coeffs = [c if c.prec is not None and c.prec <= A else c.with_prec(A) for c in coeffs]
        else:
            while coeffs and coeffs[-1].is_exact_zero():
                coeffs.pop()
        self.coeffs = coeffs
        self.cap = cap
        # lower bound (1/m units) for the coefficients beyond the cap, if known
        self.tail = tail

    # -- constructors --------------------------------------------------------

    @classmethod
    def poly(cls, ctx, coeffs):
        return cls(ctx, [c if isinstance(c, PuiseuxApprox) else ctx.mono(c) for c in coeffs])

    @classmethod
    def const(cls, ctx, c):
        return cls.poly(ctx, [c])

    @classmethod
    def t_minus(cls, ctx, a: PuiseuxApprox):
        """The polynomial t - a."""
        return cls.poly(ctx, [-a, ctx.one()])

    @classmethod
    def zero(cls, ctx):
        return cls(ctx, [])

    @classmethod
    def identity(cls, ctx):
        return cls.const(ctx, ctx.one())

    # -- access ------------------------------------------------------------------

    @property
    def is_poly(self):
        return self.cap is None

    def degree(self):
        return len(self.coeffs) - 1

    def coeff(self, k):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        if self.cap is None or k < 0:
            return self.ctx.zero()
        raise PrecisionError(f"coefficient t^{k} beyond the series cap {self.cap}")

    def is_exact_zero(self):
        return self.cap is None and not self.coeffs

    def _n(self, cap):
        return len(self.coeffs) if cap is None else cap + 1

    # -- arithmetic ----------------------------------------------------------

    def _join_cap(self, other):
        if self.cap is None:
            return other.cap
        if other.cap is None:
            return self.cap
        return min(self.cap, other.cap)

    def __add__(self, other):
        if not isinstance(other, TateSeries):
            other = TateSeries.const(self.ctx, other)
        cap = self._join_cap(other)
        n = max(len(self.coeffs), len(other.coeffs)) if cap is None else cap + 1
        get = lambda s, k: s.coeffs[k] if k < len(s.coeffs) else self.ctx.zero()
        return TateSeries(self.ctx, [get(self, k) + get(other, k) for k in range(n)], cap)

    __radd__ = __add__

    def __neg__(self):
        return TateSeries(self.ctx, [-c for c in self.coeffs], self.cap, self.tail)

    def __sub__(self, other):
        if not isinstance(other, TateSeries):
            other = TateSeries.const(self.ctx, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        ctx = self.ctx
        if isinstance(other, PuiseuxApprox) or not isinstance(other, TateSeries):
            return TateSeries(ctx, [c * other for c in self.coeffs], self.cap)
        if self.is_exact_zero() or other.is_exact_zero():
            return TateSeries.zero(ctx)
        cap = self._join_cap(other)
        n = len(self.coeffs) + len(other.coeffs) - 1 if cap is None else cap + 1
        A = INF if cap is None else ctx.R
        a_lb = [_lb(c) for c in self.coeffs]
        b_lb = [_lb(c) for c in other.coeffs]
        out = []
        for k in range(n):
            acc = ctx.zero() if cap is None else ctx.zero(A)
            lo_a = max(0, k - len(other.coeffs) + 1)
            for i in range(lo_a, min(k, len(self.coeffs) - 1) + 1):
                j = k - i
                if a_lb[i] + b_lb[j] >= A:
                    continue
                ai, bj = self.coeffs[i], other.coeffs[j]
                if ai.is_exact_zero() or bj.is_exact_zero():
                    continue
                acc = acc + ai * bj
            out.append(acc)
        return TateSeries(ctx, out, cap)

    __rmul__ = __mul__

    def twist(self, n: int = 1) -> "TateSeries":
        return tate_twist(self, n)

    def inverse(self) -> "TateSeries":
        """Power-series inverse (needs an invertible constant coefficient)."""
        ctx = self.ctx
        cap = self.cap
        if cap is None:
            raise ValueError("inverse of a polynomial is a series: give it a cap first")
        b0 = self.coeffs[0].inverse()
        lbs = [_lb(c) for c in self.coeffs]
        out = [b0]
        out_lb = [_lb(b0)]
        A = ctx.R
        for k in range(1, cap + 1):
            acc = ctx.zero(A - _lb(b0)) if _lb(b0) < 0 else ctx.zero(A)
            for j in range(1, k + 1):
                if lbs[j] + out_lb[k - j] + _lb(b0) >= A:
                    continue
                acc = acc + self.coeffs[j] * out[k - j]
            bk = -(b0 * acc)
            out.append(bk.with_prec(A))
            out_lb.append(_lb(out[-1]))
        return TateSeries(ctx, out, cap)

    def with_cap(self, cap: int) -> "TateSeries":
        if self.cap is not None and cap > self.cap:
            raise PrecisionError("cannot raise the cap of a series")
        return TateSeries(self.ctx, self.coeffs, cap, self.tail)

    def eval(self, t0: PuiseuxApprox) -> PuiseuxApprox:
        """Value at t0; for a series needs val(t0) >= 0 and a tail bound."""
        ctx = self.ctx
        total = ctx.zero()
        if self.cap is not None:
            if t0.vbound() < 0:
                raise PrecisionError("series evaluation needs |t0| <= 1")
            if self.tail is None:
                raise PrecisionError("series has no certified tail bound")
            total = ctx.zero(self.tail)
        power = ctx.one()
        for k, c in enumerate(self.coeffs):
            if k:
                power = power * t0
            total = total + c * power
        return total

    def residual_valuation(self, upto=None):
        """Minimum residual valuation over coefficients 0..upto."""
        n = len(self.coeffs) if upto is None else min(upto + 1, len(self.coeffs))
        return min((self.coeffs[k].residual_valuation() for k in range(n)), default=INF)

    def agrees(self, other, upto=None) -> bool:
        return (self - other).residual_valuation(upto) != INF and all(
            c.is_zero() for c in (self - other).coeffs[: None if upto is None else upto + 1])

    def to_json(self):
        return {"cap": self.cap, "coeffs": [c.to_json() for c in self.coeffs]}

    def __repr__(self):
        kind = "poly" if self.cap is None else f"cap={self.cap}"
        return f"TateSeries({kind}, {len(self.coeffs)} coeffs)"


def tate_twist(f: TateSeries, n: int = 1) -> TateSeries:
    """Coefficientwise c -> c^(q^n); t is untouched."""
    if n < 0:
        raise ValueError("only forward twists are available")
    tail = None if f.tail is None else f.tail * f.ctx.q ** n if f.tail > 0 else f.tail
    return TateSeries(f.ctx, [c.qpow(n) for c in f.coeffs], f.cap, tail)


# -- Anderson generating functions ------------------------------------------


class AGFRational:
    """f_u(t) = sum_i r_i / (theta^(q^i) - t) with r_i = alpha_i u^(q^i).

    ``terms`` maps i to r_i for the indices that matter; every omitted index
    has valuation >= ``bound`` (1/m units)."""

    def __init__(self, module: DrinfeldModule, u: PuiseuxApprox, terms: dict, bound):
        self.module = module
        self.u = u
        self.terms = terms
        self.bound = bound

    def __repr__(self):
        return f"AGFRational(indices={sorted(self.terms)})"


def agf_rational(M: DrinfeldModule, u: PuiseuxApprox, I: int | None = None) -> AGFRational:
    if u.is_exact_zero():
        return AGFRational(M, u, {}, INF)
    _, X, active = certify(M.exp, u, True)
    if I is not None and active and max(active) >= I:
        raise PrecisionError(f"Anderson generating function needs {max(active) + 1} terms; increase I",
                             required_I=max(active) + 1)
    terms = {i: M.exp.coeff(i) * u.qpow(i) for i in active}
    return AGFRational(M, u, terms, X)


def agf_series(M: DrinfeldModule, u: PuiseuxApprox, D: int) -> TateSeries:
    """Coefficients exp(u / theta^(k+1)), k = 0..D."""
    ctx = M.ctx
    if u.is_exact_zero():
        return TateSeries(ctx, [], D, tail=INF)
    coeffs = []
    theta_inv = ctx.theta(-1)
    z = u
    for _ in range(D + 1):
        z = z * theta_inv
        coeffs.append(M.exp_eval(z))
    # beyond D the argument only shrinks, so the leading term bound of the
    # next coefficient bounds the whole tail
    z = z * theta_inv
    _, X, active = certify(M.exp, z, True)
    q = ctx.q
    lead = min((M.exp.vbound(i) + q ** i * z.vbound() for i in active), default=X)
    return TateSeries(ctx, coeffs, D, tail=lead)


def agf_build(M: DrinfeldModule, u: PuiseuxApprox, I: int | None, D: int):
    """Both representations of the Anderson generating function of u."""
    return agf_rational(M, u, I), agf_series(M, u, D)


def agf_cross_check(agf: AGFRational, series: TateSeries):
    """Expand each rational term as a geometric series in t and compare with
    the series coefficients; returns the minimum residual valuation."""
    ctx = series.ctx
    q = ctx.q
    worst = INF
    for k in range(series.cap + 1):
        acc = ctx.zero(agf.bound) if agf.bound != INF else ctx.zero()
        for i, r in agf.terms.items():
            acc = acc + r.shift(q ** i * (k + 1) * ctx.m)
        worst = min(worst, (acc - series.coeffs[k]).residual_valuation())
    return worst


def agf_eval(agf: AGFRational, t0: PuiseuxApprox) -> PuiseuxApprox:
    """f_u(t0) from the rational form, for |t0| <= 1."""
    M = agf.module
    ctx = M.ctx
    if t0.vbound() < 0:
        raise PrecisionError("rational evaluation is certified only for |t0| <= 1")
    total = ctx.zero(agf.bound) if agf.bound != INF else ctx.zero()
    for i, r in agf.terms.items():
        den = ctx.theta(ctx.q ** i) - t0
        total = total + r / den
    return total


def agf_twist_eval_theta(agf: AGFRational, n: int = 1) -> PuiseuxApprox:
    """f_u^(n)(theta) = sum_i r_i^(q^n) / (theta^(q^(i+n)) - theta), n >= 1."""
    if n < 1:
        raise ValueError("f_u has a pole at theta; use agf_residue for n = 0")
    M = agf.module
    ctx = M.ctx
    if agf.bound == INF:
        total = ctx.zero()
    else:
        if agf.bound < 0:
            raise PrecisionError("tail bound of the generating function is negative")
        total = ctx.zero(agf.bound * ctx.q ** n)
    for i, r in agf.terms.items():
        total = total + r.qpow(n) * M.inv_den(i + n)
    return total


def agf_residue(agf: AGFRational) -> PuiseuxApprox:
    """Res_{t=theta} f_u = -alpha_0 u; only the i = 0 term has a pole at theta."""
    ctx = agf.module.ctx
    r0 = agf.terms.get(0)
    return -r0 if r0 is not None else ctx.zero()


def fu1_residual(M: DrinfeldModule, u: PuiseuxApprox, f: TateSeries) -> TateSeries:
    """kappa f^(1) + Delta f^(2) - (t - theta) f - exp(u)."""
    ctx = M.ctx
    lhs = f.twist(1) * M.kappa + f.twist(2) * M.delta
    rhs = TateSeries.t_minus(ctx, M.theta) * f + TateSeries.const(ctx, M.exp_eval(u))
    return lhs - rhs


# -- Omega -----------------------------------------------------------------------


def omega_prefactor(ctx: Context) -> PuiseuxApprox:
    """(-theta)^(-q/(q-1)) built from the fixed (q-1)-st root of -theta."""
    root = (-ctx.theta()).nth_root(ctx.q - 1)
    return root.inverse() ** ctx.q


def min_omega_factors(ctx: Context) -> int:
    """Smallest I whose dropped factors are 1 to the relative cap on |t| <= |theta|."""
    I = 0
    while (ctx.q ** (I + 1) - 1) * ctx.m < ctx.R:
        I += 1
    return I


def _check_I(ctx, I):
    need = min_omega_factors(ctx)
    if I < need:
        raise PrecisionError(f"Omega needs at least {need} product factors for this precision",
                             required_I=need)


def omega_build(ctx: Context, D: int, I: int) -> TateSeries:
    """Omega(t) = (-theta)^(-q/(q-1)) prod_{i=1}^{I} (1 - t/theta^(q^i)), to t^D."""
    _check_I(ctx, I)
    q, m = ctx.q, ctx.m
    poly = TateSeries.const(ctx, omega_prefactor(ctx))
    for i in range(1, I + 1):
        poly = poly * TateSeries.poly(ctx, [ctx.one(), -ctx.theta(-q ** i)])
    lead = poly.coeffs[0].vbound()
    P = min(lead + q ** (I + 1) * m, ctx.R)
    coeffs = [c.with_prec(P) for c in poly.coeffs]
    coeffs = coeffs[:D + 1] + [ctx.zero(P)] * (D + 1 - len(coeffs))
    return TateSeries(ctx, coeffs, D, tail=P)


def omega_at(ctx: Context, t0: PuiseuxApprox, I: int) -> PuiseuxApprox:
    """Omega(t0) from the truncated product.  The dropped factors differ from
    1 by theta^(-(q^(I+1)) m - val t0), which must be small."""
    _check_I(ctx, I)
    q, m = ctx.q, ctx.m
    vt = t0.vbound()
    if q ** (I + 1) * m + vt <= 0:
        raise PrecisionError("t0 too large for the truncated Omega product", required_I=I + 1)
    val = omega_prefactor(ctx)
    for i in range(1, I + 1):
        val = val * (ctx.one() - t0 * ctx.theta(-q ** i))
    if vt == INF or val.is_exact_zero():
        return val
    # dropped factors differ from 1 by at least theta^(-(q^(I+1)) m - vt)
    return val.with_prec(val.vbound() + q ** (I + 1) * m + vt)


def omega_theta(ctx: Context, I: int) -> PuiseuxApprox:
    return omega_at(ctx, ctx.theta(), I)
