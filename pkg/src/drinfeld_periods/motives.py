"""Frobenius difference matrices and their rigid analytic trivializations.

Phi-side entries are exact polynomials in t, Psi-side entries are TateSeries
capped at t-degree D.  Every difference equation Psi^(-1) = Phi Psi is
checked in the forward form Psi = Phi^(1) Psi^(1), which needs no inverse
twist of truncated data.
"""

from __future__ import annotations

from dataclasses import dataclass

from .anderson import (
    TateSeries,
    agf_rational,
    agf_series,
    agf_twist_eval_theta,
    omega_build,
    omega_theta,
)
from .cinf import PuiseuxApprox
from .errors import ValidationError
from .periods import PeriodLattice, log_algebraic

__all__ = [
    "MotiveMatrix",
    "ExtClass",
    "phi_rho",
    "psi_rho",
    "diff_residual",
    "psi_theta",
    "psi_theta_check",
    "third_kind_matrices",
    "ext_matrices",
    "g_vector",
    "g_at_theta",
    "n_matrix",
    "baer_sum",
    "pushout",
    "ext_psi_row",
    "cm_endo_matrix",
    "perturb",
]


class MotiveMatrix:
    """Square matrix of TateSeries entries; ``role`` is "phi" or "psi"."""

    def __init__(self, rows, role: str):
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("motive matrices are square")
        self.rows = [list(r) for r in rows]
        self.role = role

    @property
    def size(self):
        return len(self.rows)

    @property
    def ctx(self):
        return self.rows[0][0].ctx

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def twist(self, n: int = 1) -> "MotiveMatrix":
        return MotiveMatrix([[e.twist(n) for e in r] for r in self.rows], self.role)

    def __matmul__(self, other: "MotiveMatrix") -> "MotiveMatrix":
        n = self.size
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = TateSeries.zero(self.ctx)
                for k in range(n):
                    a, b = self.rows[i][k], other.rows[k][j]
                    if a.is_exact_zero() or b.is_exact_zero():
                        continue
                    acc = acc + a * b
                row.append(acc)
            out.append(row)
        return MotiveMatrix(out, other.role)

    def __sub__(self, other: "MotiveMatrix") -> "MotiveMatrix":
        return MotiveMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.role)

    def degree(self):
        """Largest t-degree of a polynomial entry."""
        return max((e.degree() for r in self.rows for e in r if e.is_poly), default=0)

    def residual_valuation(self, upto=None):
        return min(e.residual_valuation(upto) for r in self.rows for e in r)

    def is_exact_zero(self):
        return all(e.is_exact_zero() for r in self.rows for e in r)

    def det2(self) -> TateSeries:
        if self.size != 2:
            raise ValueError("det2 needs a 2x2 matrix")
        (a, b), (c, d) = self.rows
        return a * d - b * c

    def zero_pattern(self):
        return [[e.is_exact_zero() for e in r] for r in self.rows]

    def to_json(self):
        return {"role": self.role, "rows": [[e.to_json() for e in r] for r in self.rows]}


def _poly(ctx, *coeffs):
    return TateSeries.poly(ctx, list(coeffs))


def _const(ctx, c):
    return TateSeries.const(ctx, c)


def _zero(ctx):
    return TateSeries.zero(ctx)


# -- Phi_rho, Psi_rho ------------------------------------------------------------


def _require_monic(M):
    if M.delta != M.ctx.one():
        raise ValidationError("motive matrices are built for Delta = 1; twist to the monic model first")


def phi_rho(M) -> MotiveMatrix:
    """[[0, 1], [t - theta, -kappa^(-1)]]."""
    _require_monic(M)
    ctx = M.ctx
    kinv = M.kappa.qroot(1) if not M.kappa.is_exact_zero() else ctx.zero()
    rows = [[_zero(ctx), _const(ctx, ctx.one())],
            [TateSeries.t_minus(ctx, M.theta), _const(ctx, -kinv)]]
    return MotiveMatrix(rows, "phi")


def _agf_parts(M, u, D):
    f = agf_series(M, u, D)
    f1, f2 = f.twist(1), f.twist(2)
    return f, f1, f2


def _psi_block(lat: PeriodLattice, D: int, I: int):
    M = lat.module
    ctx = M.ctx
    Om = omega_build(ctx, D, I) * lat.xi
    _, f11, f12 = _agf_parts(M, lat.omega1, D)
    _, f21, f22 = _agf_parts(M, lat.omega2, D)
    k = M.kappa
    rows = [[-(Om * f21), Om * f11],
            [Om * (f21 * k + f22), -(Om * (f11 * k + f12))]]
    return rows


def psi_rho(lat: PeriodLattice, D: int, I: int) -> MotiveMatrix:
    """xi Omega [[-f_2^(1), f_1^(1)], [kappa f_2^(1) + f_2^(2), -kappa f_1^(1) - f_1^(2)]]."""
    _require_monic(lat.module)
    return MotiveMatrix(_psi_block(lat, D, I), "psi")


def diff_residual(Phi: MotiveMatrix, Psi: MotiveMatrix, upto=None):
    """Minimum residual valuation of Psi - Phi^(1) Psi^(1) over t-coefficients
    0 .. D - deg Phi (theta-units; inf when exactly zero)."""
    if Phi.size != Psi.size:
        raise ValueError("size mismatch")
    R = Psi - Phi.twist(1) @ Psi.twist(1)
    if upto is None:
        caps = [e.cap for r in Psi.rows for e in r if e.cap is not None]
        upto = min(caps) - Phi.degree() if caps else None
    return R.residual_valuation(upto)


def _inv2(m):
    (a, b), (c, d) = m
    det = a * d - b * c
    inv = det.inverse()
    return [[d * inv, -b * inv], [-c * inv, a * inv]], det


def psi_theta(lat: PeriodLattice, I: int):
    """Psi_rho(theta) from the rational generating functions and Omega(theta)."""
    M = lat.module
    ctx = M.ctx
    k = M.kappa
    Om = omega_theta(ctx, I) * lat.xi
    vals = []
    for w in lat.periods:
        agf = agf_rational(M, w)
        vals.append((agf_twist_eval_theta(agf, 1), agf_twist_eval_theta(agf, 2)))
    (a1, a2), (b1, b2) = vals
    return [[-(Om * b1), Om * a1], [Om * (k * b1 + b2), -(Om * (k * a1 + a2))]]


def psi_theta_check(lat: PeriodLattice, I: int) -> dict:
    """(Psi^-1)^tr(theta) against [[w1, w2], [-F(w1), -F(w2)]] and det Psi(theta) = -xi/pi~."""
    P = psi_theta(lat, I)
    inv, det = _inv2(P)
    target = [[lat.omega1, lat.omega2], [-lat.ftau1, -lat.ftau2]]
    sp = min((inv[j][i] - target[i][j]).residual_valuation() for i in range(2) for j in range(2))
    det_res = (det + lat.xi / lat.pi_tilde).residual_valuation()
    return {"specialization": sp, "det": det_res}


# -- third kind ------------------------------------------------------------------


def _row_times(a, b, block):
    """(a, b) . block for a 2x2 block of series."""
    return [a * block[0][0] + b * block[1][0], a * block[0][1] + b * block[1][1]]


def third_kind_matrices(lat: PeriodLattice, alpha: PuiseuxApprox, D: int, I: int, branch: int = 0):
    """The 3x3 pair for delta_t = alpha tau, with u = log(alpha/xi)."""
    M = lat.module
    _require_monic(M)
    ctx = M.ctx
    a = alpha / lat.xi
    Phi2 = phi_rho(M)
    z = _zero(ctx)
    Phi = MotiveMatrix([Phi2.rows[0] + [z], Phi2.rows[1] + [z],
                        [_const(ctx, a), z, _const(ctx, ctx.one())]], "phi")
    block = _psi_block(lat, D, I)
    if alpha.is_exact_zero():
        G = [_zero(ctx), _zero(ctx)]
    else:
        u = log_algebraic(M, a, branch)
        f, f1, _ = _agf_parts(M, u, D)
        left = -(TateSeries.t_minus(ctx, M.theta) * f) - _const(ctx, a)
        G = _row_times(left, -f1, block)
    Psi = MotiveMatrix([block[0] + [z], block[1] + [z], G + [_const(ctx, ctx.one())]], "psi")
    return Phi, Psi


# -- extensions ------------------------------------------------------------------


def g_vector(M, u: PuiseuxApprox, D: int):
    """g = (-kappa f_u^(1) - f_u^(2), -f_u^(1))."""
    _, f1, f2 = _agf_parts(M, u, D)
    return [-(f1 * M.kappa) - f2, -f1]


def g_at_theta(M, u: PuiseuxApprox):
    """g(theta) from the rational form of f_u."""
    agf = agf_rational(M, u)
    a1, a2 = agf_twist_eval_theta(agf, 1), agf_twist_eval_theta(agf, 2)
    return [-(M.kappa * a1) - a2, -a1]


def _ext_bottom(lat, g, block):
    return _row_times(g[0], g[1], block)


def ext_matrices(lat: PeriodLattice, alpha: PuiseuxApprox, u: PuiseuxApprox, D: int, I: int):
    """(Phi_i, Psi_i) for the extension with h = (alpha, 0), exp(u) = alpha."""
    return n_matrix(lat, [(alpha, u)], D, I)


def n_matrix(lat: PeriodLattice, pairs, D: int, I: int):
    """Block matrices of size 2n+1: Phi_rho (Psi_rho) on the diagonal,
    bottom row (h_1, ..., h_n, 1) resp. (g_1 Psi_rho, ..., g_n Psi_rho, 1)."""
    M = lat.module
    _require_monic(M)
    ctx = M.ctx
    n = len(pairs)
    size = 2 * n + 1
    Phi2 = phi_rho(M)
    block = _psi_block(lat, D, I)
    phi = [[_zero(ctx) for _ in range(size)] for _ in range(size)]
    psi = [[_zero(ctx) for _ in range(size)] for _ in range(size)]
    for k, (alpha, u) in enumerate(pairs):
        for i in range(2):
            for j in range(2):
                phi[2 * k + i][2 * k + j] = Phi2.rows[i][j]
                psi[2 * k + i][2 * k + j] = block[i][j]
        phi[-1][2 * k] = _const(ctx, alpha)
        if not u.is_exact_zero():
            psi[-1][2 * k:2 * k + 2] = _ext_bottom(lat, g_vector(M, u, D), block)
    phi[-1][-1] = _const(ctx, ctx.one())
    psi[-1][-1] = _const(ctx, ctx.one())
    return MotiveMatrix(phi, "phi"), MotiveMatrix(psi, "psi")


@dataclass
class ExtClass:
    """Extension of 1 by M_rho with defining matrix [[Phi_rho, 0], [v, 1]].

    ``w`` optionally carries the bottom row of a matching Psi."""

    v: list
    w: list | None = None

    def matrices(self, lat: PeriodLattice, D: int, I: int):
        M = lat.module
        ctx = M.ctx
        Phi2 = phi_rho(M)
        block = _psi_block(lat, D, I)
        z = _zero(ctx)
        one = _const(ctx, ctx.one())
        Phi = MotiveMatrix([Phi2.rows[0] + [z], Phi2.rows[1] + [z], list(self.v) + [one]], "phi")
        w = self.w if self.w is not None else [z, z]
        Psi = MotiveMatrix([block[0] + [z], block[1] + [z], list(w) + [one]], "psi")
        return Phi, Psi


def ext_psi_row(lat: PeriodLattice, u: PuiseuxApprox, D: int, I: int):
    """Bottom Psi row g^tr Psi_rho for exp(u) = alpha."""
    return _ext_bottom(lat, g_vector(lat.module, u, D), _psi_block(lat, D, I))


def baer_sum(x: ExtClass, y: ExtClass) -> ExtClass:
    v = [a + b for a, b in zip(x.v, y.v)]
    w = None if x.w is None or y.w is None else [a + b for a, b in zip(x.w, y.w)]
    return ExtClass(v, w)


def pushout(F, x: ExtClass, eta=None) -> ExtClass:
    """Row vF; with eta (F Psi = Psi eta) the Psi row transforms to w eta."""
    v = _row_times(x.v[0], x.v[1], F)
    w = None
    if x.w is not None and eta is not None:
        w = _row_times(x.w[0], x.w[1], eta)
    return ExtClass(v, w)


# -- CM ----------------------------------------------------------------------------


def cm_endo_matrix(lat: PeriodLattice, zeta, D: int, I: int) -> dict:
    """F = diag(zeta, zeta^q) and eta = Psi^-1 F Psi for the CM module kappa = 0."""
    M = lat.module
    ctx = M.ctx
    _require_monic(M)
    if not M.kappa.is_exact_zero():
        raise ValidationError("CM endomorphism matrices need kappa = 0")
    zeta = ctx.field(zeta)
    if zeta.frobenius(2) != zeta:
        raise ValidationError("zeta must lie in F_(q^2)", zeta=zeta.to_list())
    zq = zeta.frobenius(1)
    z = _zero(ctx)
    F = MotiveMatrix([[_const(ctx, ctx.mono(zeta)), z], [z, _const(ctx, ctx.mono(zq))]], "phi")
    Finv = MotiveMatrix([[_const(ctx, ctx.mono(zeta.frobenius(-1))), z],
                         [z, _const(ctx, ctx.mono(zq.frobenius(-1)))]], "phi")
    Phi = phi_rho(M)
    comm = Finv @ Phi - Phi @ F
    exact = all(e.is_exact_zero() or (e.is_poly and all(c.is_exact_zero() for c in e.coeffs))
                for r in comm.rows for e in r)
    Psi = psi_rho(lat, D, I)
    adj = [[Psi[1, 1], -Psi[0, 1]], [-Psi[1, 0], Psi[0, 0]]]
    dinv = Psi.det2().inverse()
    Pinv = MotiveMatrix([[e * dinv for e in r] for r in adj], "psi")
    eta = Pinv @ (F @ Psi)
    upto = min(e.cap for r in eta.rows for e in r if e.cap is not None)
    twist_res = (eta.twist(1) - eta).residual_valuation(upto)
    return {
        "F": F,
        "eta": eta,
        "commutes_exactly": exact,
        "eta_twist_residual": twist_res,
        "F21_theta_zero": True,
        "F11_theta": zeta,
    }


# -- fault injection ----------------------------------------------------------------


def perturb(Psi: MotiveMatrix, i: int, j: int, k: int = 0, valuation=1) -> MotiveMatrix:
    """Copy of Psi with theta^(-valuation) added to the t^k coefficient of entry (i, j)."""
    ctx = Psi.ctx
    e = Psi.rows[i][j]
    coeffs = list(e.coeffs)
    coeffs[k] = coeffs[k] + ctx.theta(-valuation)
    rows = [list(r) for r in Psi.rows]
    rows[i][j] = TateSeries(ctx, coeffs, e.cap, e.tail)
    return MotiveMatrix(rows, Psi.role)
