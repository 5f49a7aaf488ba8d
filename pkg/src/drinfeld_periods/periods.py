"""Periods of the first, second and third kind.

First kind: a basis of the period lattice from t-division towers of two
F_q-independent t-torsion points, omega = theta^n log(x_n).
Second kind: quasi-periods F_tau(omega).  Third kind: lambda_0 for a
biderivation delta_t = alpha tau, from the Legendre-type bilinear form.

Modules with Delta != 1 are handled through the monic twist
nu = eps^-1 rho eps, computed in nu-coordinates and transported back.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

from .anderson import omega_theta
from .cinf import Context, PuiseuxApprox, hensel_refine, poly_roots
from .drinfeld import DrinfeldModule
from .errors import ConvergenceError, DrinfeldError, RepresentationError, RootFindingError
from .ffield import ff_solve_kummer

__all__ = [
    "TorsionTower",
    "PeriodLattice",
    "Twist",
    "t_torsion_basis",
    "tower_extend",
    "period_from_tower",
    "carlitz_period",
    "normalize_xi",
    "period_basis",
    "compute_lattice",
    "quasi_period",
    "log_algebraic",
    "third_kind_period",
    "verify_third_kind",
    "twist_to_monic",
]


@dataclass
class TorsionTower:
    """x_1, ..., x_n with rho_t(x_1) = 0 and rho_t(x_{k+1}) = x_k."""

    levels: list
    root_index: int

    @property
    def depth(self):
        return len(self.levels)


@dataclass
class Twist:
    """nu = eps^-1 rho eps with nu monic; xi_delta^(q-1) = -Delta."""

    nu: DrinfeldModule
    eps: PuiseuxApprox
    xi_delta: PuiseuxApprox
    candidate_index: int
    nu_lattice: "PeriodLattice"


@dataclass
class PeriodLattice:
    module: DrinfeldModule
    omega1: PuiseuxApprox
    omega2: PuiseuxApprox
    ftau1: PuiseuxApprox
    ftau2: PuiseuxApprox
    pi_tilde: PuiseuxApprox
    xi: PuiseuxApprox
    towers: list = field(default_factory=list)
    twist: Twist | None = None
    meta: dict = field(default_factory=dict)

    @property
    def periods(self):
        return (self.omega1, self.omega2)

    @property
    def quasi_periods(self):
        return (self.ftau1, self.ftau2)

    def legendre_residual(self) -> PuiseuxApprox:
        return self.omega1 * self.ftau2 - self.omega2 * self.ftau1 - self.pi_tilde / self.xi


# -- first kind ----------------------------------------------------------------


def _fq_multiples(ctx: Context, x: PuiseuxApprox):
    for c in ctx.field.subfield(ctx.e):
        if c:
            yield x.scale(c)


def t_torsion_basis(M: DrinfeldModule):
    """Two F_q-independent nonzero roots of rho_t(X), the first ones in root order.

    Returns (x1, x1', (index1, index2)) with indices into the sorted root list.
    """
    ctx = M.ctx
    roots = [r for r in poly_roots(M.rho_t_minus(ctx.zero())) if not r.is_exact_zero()]
    if len(roots) != ctx.q ** M.rank - 1:
        raise RootFindingError(f"expected {ctx.q ** M.rank - 1} nonzero t-torsion points, found {len(roots)}")
    x1 = roots[0]
    for k, r in enumerate(roots[1:], start=1):
        if all(not (r - y).is_zero() for y in _fq_multiples(ctx, x1)):
            return x1, r, (0, k)
    raise RootFindingError("t-torsion has F_q-rank 1; module is not of rank 2")  # pragma: no cover


def tower_extend(M: DrinfeldModule, x1: PuiseuxApprox, depth: int, root_index: int = 0) -> TorsionTower:
    """Division tower: x_{k+1} is the Hensel root of rho_t(X) = x_k from x_k/theta."""
    levels = [x1]
    theta = M.theta
    for _ in range(depth - 1):
        x = levels[-1]
        levels.append(hensel_refine(M.rho_t_minus(x), x / theta))
    for a, b in zip(levels, levels[1:]):
        if b.val() != a.val() + 1:
            raise RootFindingError("division tower left the branch x_k/theta", level=len(levels))
    return TorsionTower(levels, root_index)


def period_from_tower(M: DrinfeldModule, tower: TorsionTower, margin=1) -> PuiseuxApprox:
    """theta^n log(x_n); x_n must lie ``margin`` theta-units inside the log domain."""
    n = tower.depth
    x = tower.levels[-1]
    r = M.log_radius()
    if x.val() < r + margin:
        need = n + max(0, math.ceil(r + margin - x.val()))
        raise ConvergenceError(
            f"x_{n} has valuation {x.val()}, needs >= {r + margin}; increase depth",
            required_depth=need,
        )
    return M.theta ** n * M.log_eval(x)


def carlitz_period(ctx: Context, I: int) -> PuiseuxApprox:
    """pi~ = -1/Omega(theta)."""
    return -omega_theta(ctx, I).inverse()


def normalize_xi(ctx: Context, omega1, omega2, ftau1, ftau2, pi_tilde):
    """The unique xi with xi^(q-1) = -1 making the Legendre relation hold.

    Returns (xi, report) where report lists every candidate and its residual.
    """
    lhs = omega1 * ftau2 - omega2 * ftau1
    report = []
    passing = []
    for c in ff_solve_kummer(-ctx.field.one(), ctx.q - 1):
        xi = ctx.mono(c)
        res = (lhs - pi_tilde / xi).residual_valuation()
        ok = res >= ctx.threshold
        report.append({"xi": c.to_list(), "residual": res, "pass": ok})
        if ok:
            passing.append(xi)
    if len(passing) != 1:
        raise DrinfeldError(
            f"{len(passing)} normalisations of xi satisfy the Legendre relation; expected exactly one",
            candidates=[{**r, "residual": str(r["residual"])} for r in report],
        )
    return passing[0], report


def period_basis(M: DrinfeldModule, depth: int, I: int) -> PeriodLattice:
    """Period lattice of a monic (Delta = 1) rank-2 module."""
    ctx = M.ctx
    if M.rank != 2:
        raise ValueError("period_basis needs a rank-2 module")
    x1, x2, idx = t_torsion_basis(M)
    towers = [tower_extend(M, x1, depth, idx[0]), tower_extend(M, x2, depth, idx[1])]
    om = [period_from_tower(M, T) for T in towers]
    F = [M.ftau_eval(w) for w in om]
    pit = carlitz_period(ctx, I)
    xi, report = normalize_xi(ctx, om[0], om[1], F[0], F[1], pit)
    meta = {"torsion_indices": list(idx), "depth": depth, "I": I, "xi_candidates": report,
            "log_radius": M.log_radius()}
    return PeriodLattice(M, om[0], om[1], F[0], F[1], pit, xi, towers, None, meta)


def compute_lattice(M: DrinfeldModule, depth: int, I: int) -> PeriodLattice:
    """Period lattice in rho-coordinates; Delta != 1 goes through the monic twist."""
    one = M.ctx.one()
    if M.delta == one:
        return period_basis(M, depth, I)
    return twist_to_monic(M, depth, I)


# -- second kind ---------------------------------------------------------------


def quasi_period(M: DrinfeldModule, omega: PuiseuxApprox) -> PuiseuxApprox:
    return M.ftau_eval(omega)


# -- third kind ----------------------------------------------------------------


def _in_log_domain(M, y):
    return y.is_exact_zero() or (not y.is_zero() and y.val() > M.log_radius())


def log_algebraic(M: DrinfeldModule, beta: PuiseuxApprox, branch: int = 0, max_div: int = 8) -> PuiseuxApprox:
    """Some u with exp(u) = beta.

    branch 0: log(beta) inside the log domain, otherwise divide by t along the
    root of rho_t(X) = y nearest y/theta and multiply back.  branch b >= 1:
    theta * log of the (b-1)-th root of rho_t(X) = beta in root order; two
    branches differ by a lattice element.
    """
    theta = M.theta
    if branch:
        roots = poly_roots(M.rho_t_minus(beta))
        if branch > len(roots):
            raise ValueError(f"branch {branch} out of range 1..{len(roots)}")
        y = roots[branch - 1]
        if not _in_log_domain(M, y):
            raise ConvergenceError("chosen t-division root lies outside the log domain", branch=branch)
        return theta * M.log_eval(y)
    y, n = beta, 0
    while not _in_log_domain(M, y):
        if n == max_div:
            raise ConvergenceError("t-division did not reach the log domain", divisions=n)
        try:
            roots = poly_roots(M.rho_t_minus(y))
        except RepresentationError as exc:
            raise RepresentationError(
                "t-division of the algebraic point leaves the carrier: " + str(exc),
                **{k: v for k, v in exc.payload.items() if k not in ("error", "message")},
            ) from exc
        guess = y / theta
        y = max(roots, key=lambda r: (r - guess).vbound())
        n += 1
    return theta ** n * M.log_eval(y)


def third_kind_period(lat: PeriodLattice, omega: PuiseuxApprox, u: PuiseuxApprox, Fu=None) -> PuiseuxApprox:
    """lambda_0 = -xi (u F_tau(omega) - omega F_tau(u))."""
    M = lat.module
    Fw = M.ftau_eval(omega)
    Fu = M.ftau_eval(u) if Fu is None else Fu
    return -lat.xi * (u * Fw - omega * Fu)


def verify_third_kind(lat: PeriodLattice, alpha: PuiseuxApprox, omega: PuiseuxApprox | None = None,
                      branch: int = 0) -> dict:
    """exp_C(lambda_0) + G_delta(omega) for delta_t = alpha tau.

    For a twisted lattice the computation runs in nu-coordinates with
    alpha_nu = alpha eps^q and omega_nu = omega / eps; lambda_0 is unchanged.
    """
    if lat.twist is not None:
        tw = lat.twist
        om = lat.omega1 if omega is None else omega
        out = verify_third_kind(tw.nu_lattice, alpha * tw.eps.qpow(1), om / tw.eps, branch)
        out["coordinates"] = "nu"
        return out
    M = lat.module
    ctx = M.ctx
    om = lat.omega1 if omega is None else omega
    u = log_algebraic(M, alpha / lat.xi, branch)
    lam = third_kind_period(lat, om, u)
    C = DrinfeldModule.carlitz(ctx)
    res = C.exp_eval(lam) + M.gdelta_eval(alpha, om)
    return {
        "u": u,
        "lambda0": lam,
        "residual": res,
        "residual_valuation": res.residual_valuation(),
        "exp_u_residual": (M.exp_eval(u) - alpha / lat.xi).residual_valuation(),
        "coordinates": "rho",
    }


# -- twist to monic -------------------------------------------------------------


def twist_to_monic(M: DrinfeldModule, depth: int, I: int) -> PeriodLattice:
    """Lattice of rho via nu = eps^-1 rho eps, eps^(q^2-1) = 1/Delta.

    Candidates eps are taken in Kummer order of their leading coefficient; the
    first one with eps^(q+1)/xi_nu = 1/xi_Delta is used, where xi_Delta is the
    fixed (q-1)-th root of -Delta.  Every candidate's status is recorded in
    ``meta["twist_candidates"]``.
    """
    ctx = M.ctx
    q = ctx.q
    n = q * q - 1
    eps0 = M.delta.inverse().nth_root(n)
    xi_delta = (-M.delta).nth_root(q - 1)
    units = ff_solve_kummer(ctx.field.one(), n)
    cands = sorted((eps0.scale(z) for z in units), key=lambda e: e.lc().sort_key())
    cache = {}
    tried = []
    chosen = None
    for k, eps in enumerate(cands):
        kappa_nu = M.kappa * eps.qpow(1) / eps if not M.kappa.is_exact_zero() else ctx.zero()
        key = repr(kappa_nu.to_json())
        if key not in cache:
            nu = DrinfeldModule(ctx, kappa_nu, ctx.one(), name="nu")
            cache[key] = period_basis(nu, depth, I)
        nl = cache[key]
        check = eps.qpow(1) * eps * xi_delta - nl.xi
        ok = check.is_zero() and (check.prec is None or check.residual_valuation() >= ctx.threshold)
        tried.append({"eps_lc": eps.lc().to_list(), "pass": bool(ok)})
        if ok and chosen is None:
            chosen = (k, eps, nl)
    if chosen is not None:
        k, eps, nl = chosen
        tw = Twist(nl.module, eps, xi_delta, k, nl)
        om = [eps * w for w in nl.periods]
        # F_rho(eps z) = eps^q F_nu(z)
        F = [eps.qpow(1) * f for f in nl.quasi_periods]
        meta = {"twist_candidates": tried, "depth": depth, "I": I}
        return PeriodLattice(M, om[0], om[1], F[0], F[1], nl.pi_tilde, xi_delta, nl.towers, tw, meta)
    raise DrinfeldError("no twist eps satisfies the xi normalisation", candidates=tried)
