from fractions import Fraction

import pytest

from drinfeld_periods.cinf import poly_eval
from drinfeld_periods.errors import ConvergenceError, RepresentationError
from drinfeld_periods.periods import (
    compute_lattice,
    log_algebraic,
    normalize_xi,
    period_from_tower,
    quasi_period,
    t_torsion_basis,
    third_kind_period,
    tower_extend,
    verify_third_kind,
)


def test_torsion_basis(ctx, rho):
    x1, x2, idx = t_torsion_basis(rho)
    P = rho.rho_t_minus(ctx.zero())
    for x in (x1, x2):
        assert x.val() == Fraction(-1, 8)
        assert poly_eval(P, x).residual_valuation() >= ctx.threshold
    for c in ctx.field.subfield(1):
        assert not (x2 - x1.scale(c)).is_zero()
    assert idx[0] == 0


def test_tower_valuations(ctx, rho):
    x1, _, _ = t_torsion_basis(rho)
    T = tower_extend(rho, x1, 4)
    assert [x.val() for x in T.levels] == [Fraction(8 * n - 9, 8) for n in range(1, 5)]
    for a, b in zip(T.levels, T.levels[1:]):
        assert (rho.rho_eval(b) - a).residual_valuation() >= ctx.threshold


def test_shallow_tower_rejected(ctx, rho):
    x1, _, _ = t_torsion_basis(rho)
    with pytest.raises(ConvergenceError) as err:
        period_from_tower(rho, tower_extend(rho, x1, 1))
    assert err.value.payload["required_depth"] >= 2


def test_periods(ctx, rho, lattice, theta):
    for w, T in zip(lattice.periods, lattice.towers):
        assert w.val() == Fraction(-9, 8)
        assert rho.exp_eval(w).residual_valuation() >= ctx.threshold
        assert (rho.exp_eval(w / theta) - T.levels[0]).residual_valuation() >= ctx.threshold


def test_depth_stability(ctx, rho, lattice):
    deeper = compute_lattice(rho, 4, 3)
    for a, b in zip(lattice.periods, deeper.periods):
        assert (a - b).residual_valuation() >= ctx.threshold


def test_cm_stability(ctx, rho, lattice):
    for z in ctx.field.subfield(2):
        if z:
            assert rho.exp_eval(lattice.omega1.scale(z)).residual_valuation() >= ctx.threshold


def test_quasi_periods(ctx, rho, lattice, theta):
    w1, w2 = lattice.periods
    F1, F2 = lattice.quasi_periods
    assert quasi_period(rho, ctx.zero()).is_exact_zero()
    assert (quasi_period(rho, theta * w1) - theta * F1).residual_valuation() >= ctx.threshold
    assert (quasi_period(rho, w1 + w2) - F1 - F2).residual_valuation() >= ctx.threshold


def test_legendre_and_xi(ctx, lattice):
    assert lattice.legendre_residual().residual_valuation() >= ctx.threshold
    cands = lattice.meta["xi_candidates"]
    assert len(cands) == 2 and sum(c["pass"] for c in cands) == 1
    xi = lattice.xi
    assert xi ** 2 == -ctx.one()
    assert xi.qpow(1) == -xi


def test_xi_swaps_with_period_order(ctx, lattice):
    L = lattice
    xi, _ = normalize_xi(ctx, L.omega2, L.omega1, L.ftau2, L.ftau1, L.pi_tilde)
    assert xi == -L.xi


def test_log_algebraic(ctx, rho, theta, lattice):
    assert log_algebraic(rho, ctx.zero()).is_exact_zero()
    beta = theta + ctx.one()
    u = log_algebraic(rho, beta)
    assert (rho.exp_eval(u) - beta).residual_valuation() >= ctx.threshold
    u1 = log_algebraic(rho, beta, branch=1)
    assert (rho.exp_eval(u1) - beta).residual_valuation() >= ctx.threshold
    assert not (u1 - u).is_zero()
    assert rho.exp_eval(u - u1).residual_valuation() >= ctx.threshold


def test_degree_two_points_are_wild(ctx, rho, theta):
    with pytest.raises(RepresentationError) as err:
        log_algebraic(rho, theta * theta)
    assert err.value.payload["wild"] is True


def test_third_kind_pairing(ctx, lattice, rho, rng):
    w1, w2 = lattice.periods
    assert third_kind_period(lattice, w1, w1).is_zero()
    lam = third_kind_period(lattice, w1, w2)
    assert (lam - lattice.pi_tilde).residual_valuation() >= ctx.threshold
    u, v = ctx.random(rng, 0), ctx.random(rng, 4)
    lhs = third_kind_period(lattice, w1, u + v)
    rhs = third_kind_period(lattice, w1, u) + third_kind_period(lattice, w1, v)
    assert (lhs - rhs).residual_valuation() >= ctx.threshold


@pytest.mark.parametrize("coeffs", [[1], [0, 1], [2, 2]])
def test_third_kind_residual(ctx, lattice, rho, theta, coeffs):
    alpha = ctx.from_poly(coeffs)
    for w in lattice.periods:
        r = verify_third_kind(lattice, alpha, w)
        assert r["residual_valuation"] >= ctx.threshold
        assert verify_third_kind(lattice, alpha, theta * w)["residual_valuation"] >= ctx.threshold
        assert verify_third_kind(lattice, alpha, w, branch=1)["residual_valuation"] >= ctx.threshold


def test_third_kind_zero_alpha(ctx, lattice):
    r = verify_third_kind(lattice, ctx.zero())
    assert r["lambda0"].is_exact_zero() and r["residual"].is_exact_zero()


def test_twist_to_monic(ctx, rho_theta, lattice_theta, theta, rng):
    tw = lattice_theta.twist
    eps, nu = tw.eps, tw.nu
    assert nu.delta == ctx.one()
    assert (eps ** 8 * theta - ctx.one()).is_zero()
    assert (eps.qpow(1) * eps * tw.xi_delta - tw.nu_lattice.xi).is_zero()
    for _ in range(3):
        z = ctx.random(rng, rng.randrange(0, 16))
        assert (nu.exp_eval(z / eps) - rho_theta.exp_eval(z) / eps).residual_valuation() >= ctx.threshold
        assert (nu.ftau_eval(z / eps) - rho_theta.ftau_eval(z) / eps.qpow(1)).residual_valuation() >= ctx.threshold


def test_general_delta_lattice(ctx, rho_theta, lattice_theta, theta):
    L = lattice_theta
    for w in L.periods:
        assert rho_theta.exp_eval(w).residual_valuation() >= ctx.threshold
    assert L.legendre_residual().residual_valuation() >= ctx.threshold
    assert (rho_theta.ftau_eval(L.omega1) - L.ftau1).residual_valuation() >= ctx.threshold
    r = verify_third_kind(L, theta + ctx.one())
    assert r["coordinates"] == "nu" and r["residual_valuation"] >= ctx.threshold


def test_monic_twist_is_trivial_for_delta_one(ctx, rho):
    from drinfeld_periods.periods import twist_to_monic
    L = twist_to_monic(rho, 3, 3)
    assert L.twist.nu.delta == ctx.one() and L.twist.nu.kappa.is_exact_zero()
    one = [c for c in L.meta["twist_candidates"] if c["eps_lc"] == ctx.one().lc().to_list()]
    assert one and one[0]["pass"]
    assert L.xi == period_basis_xi(rho)


def period_basis_xi(M):
    from drinfeld_periods.periods import period_basis
    return period_basis(M, 3, 3).xi
